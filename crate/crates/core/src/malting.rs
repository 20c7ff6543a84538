//! Resource-state preparation: squeezed-state generation probability,
//! repeat-until-success photon subtraction with squeezing decay, the attempt
//! threshold from the entanglement break-even cubic, and the averaged
//! entanglement gain.

use rand::Rng;
use rand_chacha::rand_core::SeedableRng;
use rand_chacha::ChaCha8Rng;

use crate::entanglement::logneg_subtracted;
use crate::error::{Error, Result};
use crate::fock::SchmidtPureState;
use crate::scalar::{real, Real};

/// Squeezing and subtraction-beamsplitter parameters.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct MaltingParams<T> {
    lambda: T,
    transmissivity: T,
}

impl<T: Real> MaltingParams<T> {
    pub fn new(lambda: T, transmissivity: T) -> Result<Self> {
        if !lambda.is_finite() || lambda < T::zero() || lambda >= T::one() {
            return Err(Error::Domain(format!(
                "initial squeezing must lie in [0, 1), got {}",
                lambda
            )));
        }
        if !transmissivity.is_finite() || transmissivity <= T::zero() || transmissivity > T::one() {
            return Err(Error::Domain(format!(
                "transmissivity must lie in (0, 1], got {}",
                transmissivity
            )));
        }
        Ok(MaltingParams {
            lambda,
            transmissivity,
        })
    }

    pub fn lambda(&self) -> T {
        self.lambda
    }

    pub fn transmissivity(&self) -> T {
        self.transmissivity
    }

    /// `eta = 1 - T`.
    pub fn eta(&self) -> T {
        T::one() - self.transmissivity
    }

    /// Squeezing after `f` vacuum events: `x = lambda T^f`.
    pub fn x_after(&self, f: u64) -> T {
        self.lambda * self.transmissivity.powi(f as i32)
    }

    /// Resource parameter after success at trial `f+1`: `mu = lambda T^{f+2}`.
    pub fn mu_after(&self, f: u64) -> T {
        self.x_after(f) * self.transmissivity * self.transmissivity
    }
}

/// Probability that the in-situ squeezed-state generation heralds vacuum:
/// `1 - lambda^2`.
pub fn tmss_generation_prob<T: Real>(lambda: T) -> Result<T> {
    if lambda < T::zero() || lambda >= T::one() {
        return Err(Error::Domain(format!(
            "squeezing must lie in [0, 1), got {}",
            lambda
        )));
    }
    Ok(T::one() - lambda * lambda)
}

/// Joint probability of the subtraction trajectory that sees `f` single-arm
/// vacuum events and then simultaneous clicks on both arms:
/// `P_f = (1 - T^2)^2 x^2 (1 - lambda^2) (1 + mu^2) / (1 - mu^2)^3`.
pub fn subtraction_prob<T: Real>(params: &MaltingParams<T>, f: u64) -> T {
    let t2 = params.transmissivity * params.transmissivity;
    let x = params.x_after(f);
    let mu = params.mu_after(f);
    let mu2 = mu * mu;
    let one = T::one();
    (one - t2) * (one - t2) * x * x * (one - params.lambda * params.lambda) * (one + mu2)
        / ((one - mu2) * (one - mu2) * (one - mu2))
}

/// `Pbar_f = sum_{j<=f} P_j`, the probability of succeeding by trial `f`.
pub fn cumulative_prob<T: Real>(params: &MaltingParams<T>, f: u64) -> T {
    let mut sum = T::zero();
    for j in 0..=f {
        sum += subtraction_prob(params, j);
    }
    sum
}

/// A (possibly unbounded) attempt count. Negative values mean that even the
/// immediate success `f = 0` does not beat the bare squeezed state.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum AttemptBound {
    Finite(i64),
    Unbounded,
}

impl AttemptBound {
    pub fn finite(&self) -> Option<i64> {
        match self {
            AttemptBound::Finite(f) => Some(*f),
            AttemptBound::Unbounded => None,
        }
    }
}

/// Output of [`max_attempts`]: the break-even root and the attempt threshold
/// under the conventions the accounting formulas are sensitive to.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SubtractionThreshold<T> {
    /// `floor(log(R/lambda)/log T) - 2`: the last `f` whose subtracted state
    /// still strictly beats the initial squeezed state.
    pub f_c: AttemptBound,
    /// `ceil(log(R/lambda)/log T) - 2`: includes the marginal attempt. The
    /// published budget and gain figures at low transmissivity are only
    /// reproducible under this variant.
    pub f_c_inclusive: AttemptBound,
    /// Small-eta approximation `floor(log(lambda/R)/eta) - 2`, for comparison.
    pub f_c_asymptotic: AttemptBound,
    /// The real root in (0, 1) of
    /// `r^3 + (1-2 lambda) r^2 + (2-lambda) r - lambda = 0`.
    pub cubic_root: T,
}

/// Residual of the break-even cubic at `r`.
pub fn threshold_cubic<T: Real>(lambda: T, r: T) -> T {
    let one = T::one();
    let two = real::<T>(2.0);
    r * r * r + (one - two * lambda) * r * r + (two - lambda) * r - lambda
}

/// Solves the break-even cubic for its unique real root in (0, 1) by
/// bisection with a Newton polish.
pub fn solve_threshold_cubic<T: Real>(lambda: T) -> Result<T> {
    if lambda <= T::zero() || lambda >= T::one() {
        return Err(Error::Domain(
            "break-even root needs lambda in (0, 1)".into(),
        ));
    }
    // f(0) = -lambda < 0, f(1) = 4 - 4 lambda > 0, and f' > 0 on (0, 1):
    // exactly one root, bracketed from the start.
    let mut lo = T::zero();
    let mut hi = T::one();
    debug_assert!(threshold_cubic(lambda, lo) < T::zero());
    debug_assert!(threshold_cubic(lambda, hi) > T::zero());
    for _ in 0..200 {
        let mid = (lo + hi) * real::<T>(0.5);
        if mid <= lo || mid >= hi {
            break;
        }
        if threshold_cubic(lambda, mid) > T::zero() {
            hi = mid;
        } else {
            lo = mid;
        }
    }
    let mut r = (lo + hi) * real::<T>(0.5);
    for _ in 0..2 {
        let f = threshold_cubic(lambda, r);
        let two = real::<T>(2.0);
        let three = real::<T>(3.0);
        let df = three * r * r + two * (T::one() - two * lambda) * r + (two - lambda);
        let step = f / df;
        let next = r - step;
        if next > T::zero() && next < T::one() {
            r = next;
        }
    }
    Ok(r)
}

/// Maximum number of pre-success vacuum events for which the subtracted
/// state still beats the initial squeezed state in entanglement.
pub fn max_attempts<T: Real>(params: &MaltingParams<T>) -> Result<SubtractionThreshold<T>> {
    if params.lambda == T::zero() {
        return Err(Error::Domain(
            "no resource: lambda = 0 has nothing to subtract from".into(),
        ));
    }
    let root = solve_threshold_cubic(params.lambda)?;
    if params.transmissivity == T::one() {
        return Ok(SubtractionThreshold {
            f_c: AttemptBound::Unbounded,
            f_c_inclusive: AttemptBound::Unbounded,
            f_c_asymptotic: AttemptBound::Unbounded,
            cubic_root: root,
        });
    }
    // mu = lambda T^{f+2} >= R  <=>  f + 2 <= log(R/lambda)/log(T).
    let ratio = (root / params.lambda).ln() / params.transmissivity.ln();
    let f_c = AttemptBound::Finite(floor_i64(ratio) - 2);
    let f_c_inclusive = AttemptBound::Finite(ceil_i64(ratio) - 2);
    let asym = (params.lambda / root).ln() / params.eta();
    let f_c_asymptotic = AttemptBound::Finite(floor_i64(asym) - 2);
    Ok(SubtractionThreshold {
        f_c,
        f_c_inclusive,
        f_c_asymptotic,
        cubic_root: root,
    })
}

fn floor_i64<T: Real>(x: T) -> i64 {
    x.floor().to_i64().expect("attempt count out of i64 range")
}

fn ceil_i64<T: Real>(x: T) -> i64 {
    x.ceil().to_i64().expect("attempt count out of i64 range")
}

/// How [`malt`] decides the number of vacuum events.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum MaltMode {
    /// Deterministic: exactly `f` vacuum events, then success.
    Fixed { f: u64 },
    /// Samples the trajectory with a seeded generator; attempts past `cap`
    /// (or any outcome other than single-arm vacuum / double click) end the
    /// attempt as an explicit failure.
    Sampled { seed: u64, cap: u64 },
}

/// A successfully malted resource.
#[derive(Debug, Clone)]
pub struct MaltingOutcome<T> {
    /// Vacuum events before the double click.
    pub f: u64,
    /// `x = lambda T^f`.
    pub x: T,
    /// `mu = x T^2 = lambda T^{f+2}`.
    pub mu: T,
    /// `P_f` of the realized trajectory.
    pub trajectory_prob: T,
    /// The resource state `alpha_n = (n+1) mu^n`.
    pub state: SchmidtPureState<T>,
}

/// Terminal result of one malting attempt.
#[derive(Debug, Clone)]
pub enum MaltResult<T> {
    Success(MaltingOutcome<T>),
    /// The trajectory left the vacuum/success alternatives (or hit the cap);
    /// the held state survives, only this resource copy is lost.
    Failure {
        vacuum_events: u64,
        /// Model probability of not succeeding by the cap, `1 - Pbar_cap`.
        failure_prob: T,
    },
}

/// Prepares one resource copy. `eps_trunc` controls the truncation of the
/// returned state.
pub fn malt<T: Real>(
    params: &MaltingParams<T>,
    mode: MaltMode,
    eps_trunc: T,
) -> Result<MaltResult<T>> {
    match mode {
        MaltMode::Fixed { f } => Ok(MaltResult::Success(outcome(params, f, eps_trunc)?)),
        MaltMode::Sampled { seed, cap } => {
            let mut rng = ChaCha8Rng::seed_from_u64(seed);
            sample_trajectory(params, cap, eps_trunc, &mut rng)
        }
    }
}

fn outcome<T: Real>(params: &MaltingParams<T>, f: u64, eps_trunc: T) -> Result<MaltingOutcome<T>> {
    let mu = params.mu_after(f);
    Ok(MaltingOutcome {
        f,
        x: params.x_after(f),
        mu,
        trajectory_prob: subtraction_prob(params, f),
        state: SchmidtPureState::subtracted_state_auto(mu, eps_trunc)?,
    })
}

/// Sequential trajectory sampler. Having survived `f` vacuum rounds (state is
/// a squeezed state at `x_f = lambda T^f`, reached with probability
/// `W_f = (1 - lambda^2)/(1 - x_f^2)`), the next pulse either:
/// succeeds with conditional probability `P_f / W_f`, stays vacuum with
/// `W_{f+1} / W_f`, or fails terminally with the remainder.
fn sample_trajectory<T: Real>(
    params: &MaltingParams<T>,
    cap: u64,
    eps_trunc: T,
    rng: &mut impl Rng,
) -> Result<MaltResult<T>> {
    let one = T::one();
    let lam2 = params.lambda * params.lambda;
    for f in 0..=cap {
        let x_f = params.x_after(f);
        let x_next = x_f * params.transmissivity;
        let w_f = (one - lam2) / (one - x_f * x_f);
        let w_next = (one - lam2) / (one - x_next * x_next);
        let p_success = subtraction_prob(params, f) / w_f;
        let p_continue = w_next / w_f;
        let u: T = real::<T>(rng.random::<f64>());
        if u < p_success {
            return Ok(MaltResult::Success(outcome(params, f, eps_trunc)?));
        }
        if u >= p_success + p_continue {
            return Ok(MaltResult::Failure {
                vacuum_events: f,
                failure_prob: one - cumulative_prob(params, cap),
            });
        }
    }
    Ok(MaltResult::Failure {
        vacuum_events: cap + 1,
        failure_prob: one - cumulative_prob(params, cap),
    })
}

/// Averaged entanglement gain `Pbar_c N_{f_c} / (Pbar_0 N_0)` under the
/// inclusive attempt convention (see [`SubtractionThreshold`]); the strict
/// threshold degenerates to a gain of exactly 1 whenever it is 0.
pub fn averaged_gain<T: Real>(params: &MaltingParams<T>) -> Result<T> {
    let threshold = max_attempts(params)?;
    match threshold.f_c_inclusive {
        AttemptBound::Unbounded => Err(Error::Domain(
            "gain undefined at T = 1: subtraction never clicks".into(),
        )),
        AttemptBound::Finite(f) if f < 1 => Err(Error::Domain(format!(
            "gain undefined: no attempt budget (inclusive threshold {})",
            f
        ))),
        AttemptBound::Finite(f) => averaged_gain_at(params, f as u64),
    }
}

/// Averaged entanglement gain with an explicit attempt threshold.
pub fn averaged_gain_at<T: Real>(params: &MaltingParams<T>, f_c: u64) -> Result<T> {
    let p_bar_c = cumulative_prob(params, f_c);
    let p_bar_0 = subtraction_prob(params, 0);
    if p_bar_0 <= T::zero() {
        return Err(Error::Domain(
            "gain undefined: subtraction never succeeds".into(),
        ));
    }
    let n_fc = logneg_subtracted(params.mu_after(f_c))?;
    let n_0 = logneg_subtracted(params.mu_after(0))?;
    Ok(p_bar_c * n_fc / (p_bar_0 * n_0))
}
