//! Resource accounting: how many heralded rounds fit into a memory's
//! time-bandwidth budget, and the Raman-memory parameter mapping.

use crate::error::{Error, Result};
use crate::malting::{cumulative_prob, max_attempts, AttemptBound, MaltingParams};
use crate::scalar::{real, Real};

/// Heralding probability of a round at the fixed point,
/// `p^s_inf = (1 - mu^2)^3 / (1 + mu^2)`, the inverse squared norm of the
/// unnormalized subtracted resource.
pub fn p_s_infinity<T: Real>(mu: T) -> Result<T> {
    if mu < T::zero() || mu >= T::one() {
        return Err(Error::Domain(format!(
            "resource parameter must lie in [0, 1), got {}",
            mu
        )));
    }
    let mu2 = mu * mu;
    let one = T::one();
    Ok((one - mu2).powi(3) / (one + mu2))
}

/// Which resource parameter feeds the fixed-point heralding probability.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum MuConvention {
    /// Worst case: the resource needed every allowed attempt,
    /// `mu = lambda T^{f_c + 2}`.
    WorstCaseFc,
    /// Best case: first-try success, `mu = lambda T^2`.
    BestCaseF0,
}

/// Which attempt-threshold variant feeds the cost formula.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum FcConvention {
    /// `floor(log(R/lambda)/log T) - 2`: last strictly-winning attempt count.
    Strict,
    /// `ceil(log(R/lambda)/log T) - 2`: includes the marginal attempt;
    /// reproduces the published iteration budgets at low transmissivity,
    /// where the strict count degenerates to zero.
    Inclusive,
}

/// Outcome class of a budget computation.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum BudgetStatus {
    /// `i_m` rounds fit.
    Feasible,
    /// Even `i = 0` (malting alone) exceeds the budget.
    InfeasibleForDistillation,
    /// The attempt threshold is <= 0 under the chosen convention, the cost
    /// expression degenerates to zero, and any number of rounds "fits".
    DegenerateFreeCost,
    /// `T = 1`: the subtraction never clicks and no budget applies.
    UnboundedThreshold,
}

/// Full accounting for one parameter point under one convention pair.
#[derive(Debug, Clone)]
pub struct BudgetReport<T> {
    pub lambda: T,
    pub transmissivity: T,
    pub b: T,
    pub mu_convention: MuConvention,
    pub fc_convention: FcConvention,
    /// Attempt threshold under `fc_convention` (may be <= 0).
    pub f_c: i64,
    /// Resource parameter under `mu_convention`.
    pub mu: T,
    /// `Pbar_{f_c}` (or `Pbar_0` when the threshold degenerates).
    pub p_bar_c: T,
    pub p_s_inf: T,
    /// Largest i with `(i+1) f_c / (Pbar_c p^i) <= B`; 0 when infeasible or
    /// degenerate (see `status`).
    pub i_m: u64,
    pub status: BudgetStatus,
    /// `(i, cost(i))` samples of the left-hand side, through `i_m + 3`.
    pub lhs_curve: Vec<(u64, T)>,
}

const SCAN_LIMIT: u64 = 10_000_000;

/// Result of the cost scan: the bound, its status, and `(i, cost)` samples.
pub type BoundScan<T> = (u64, BudgetStatus, Vec<(u64, T)>);

/// Solves `(i+1) f_c / (p_bar (p_inf)^i) <= b` for the largest `i` by upward
/// scan; the cost ratio `cost(i+1)/cost(i) = (i+2)/((i+1) p_inf) > 1` makes
/// the curve strictly increasing, so the crossing is unique.
pub fn solve_iteration_bound<T: Real>(f_c: u64, p_bar: T, p_inf: T, b: T) -> Result<BoundScan<T>> {
    if !(p_bar > T::zero() && p_bar <= T::one()) || !(p_inf > T::zero() && p_inf <= T::one()) {
        return Err(Error::Domain(
            "probabilities must lie in (0, 1] for the budget scan".into(),
        ));
    }
    if b <= T::zero() {
        return Err(Error::Domain("time-bandwidth product must be > 0".into()));
    }
    let f_c_t = real::<T>(f_c as f64);
    let mut curve = Vec::new();
    let mut cost = f_c_t / p_bar; // i = 0
    if cost > b {
        curve.push((0, cost));
        return Ok((0, BudgetStatus::InfeasibleForDistillation, curve));
    }
    let mut i: u64 = 0;
    loop {
        curve.push((i, cost));
        let next = cost * real::<T>((i + 2) as f64) / (real::<T>((i + 1) as f64) * p_inf);
        if next > b || i + 1 > SCAN_LIMIT {
            // Record a few points past the crossing so the curve shows it.
            let mut tail_cost = next;
            for j in 1..=3u64 {
                curve.push((i + j, tail_cost));
                tail_cost = tail_cost * real::<T>((i + j + 2) as f64)
                    / (real::<T>((i + j + 1) as f64) * p_inf);
            }
            return Ok((i, BudgetStatus::Feasible, curve));
        }
        cost = next;
        i += 1;
    }
}

/// Maximum iteration count under the strict threshold convention.
pub fn max_iterations<T: Real>(
    params: &MaltingParams<T>,
    b: T,
    mu_convention: MuConvention,
) -> Result<BudgetReport<T>> {
    max_iterations_with(params, b, mu_convention, FcConvention::Strict)
}

/// Maximum iteration count under explicit conventions.
pub fn max_iterations_with<T: Real>(
    params: &MaltingParams<T>,
    b: T,
    mu_convention: MuConvention,
    fc_convention: FcConvention,
) -> Result<BudgetReport<T>> {
    if b <= T::zero() {
        return Err(Error::Domain("time-bandwidth product must be > 0".into()));
    }
    let threshold = max_attempts(params)?;
    let bound = match fc_convention {
        FcConvention::Strict => threshold.f_c,
        FcConvention::Inclusive => threshold.f_c_inclusive,
    };
    let f_c = match bound {
        AttemptBound::Unbounded => {
            return Ok(BudgetReport {
                lambda: params.lambda(),
                transmissivity: params.transmissivity(),
                b,
                mu_convention,
                fc_convention,
                f_c: i64::MAX,
                mu: params.lambda(),
                p_bar_c: T::zero(),
                p_s_inf: T::zero(),
                i_m: 0,
                status: BudgetStatus::UnboundedThreshold,
                lhs_curve: Vec::new(),
            });
        }
        AttemptBound::Finite(f) => f,
    };
    let mu = match mu_convention {
        MuConvention::WorstCaseFc => params.mu_after(f_c.max(0) as u64),
        MuConvention::BestCaseF0 => params.mu_after(0),
    };
    let p_inf = p_s_infinity(mu)?;
    let p_bar_c = cumulative_prob(params, f_c.max(0) as u64);
    if f_c <= 0 {
        return Ok(BudgetReport {
            lambda: params.lambda(),
            transmissivity: params.transmissivity(),
            b,
            mu_convention,
            fc_convention,
            f_c,
            mu,
            p_bar_c,
            p_s_inf: p_inf,
            i_m: 0,
            status: BudgetStatus::DegenerateFreeCost,
            lhs_curve: Vec::new(),
        });
    }
    let (i_m, status, lhs_curve) = solve_iteration_bound(f_c as u64, p_bar_c, p_inf, b)?;
    Ok(BudgetReport {
        lambda: params.lambda(),
        transmissivity: params.transmissivity(),
        b,
        mu_convention,
        fc_convention,
        f_c,
        mu,
        p_bar_c,
        p_s_inf: p_inf,
        i_m,
        status,
        lhs_curve,
    })
}

/// All four convention combinations for one parameter point, in a fixed
/// order: (strict, worst), (strict, best), (inclusive, worst),
/// (inclusive, best).
pub fn budget_survey<T: Real>(params: &MaltingParams<T>, b: T) -> Result<Vec<BudgetReport<T>>> {
    let mut out = Vec::with_capacity(4);
    for fc_conv in [FcConvention::Strict, FcConvention::Inclusive] {
        for mu_conv in [MuConvention::WorstCaseFc, MuConvention::BestCaseF0] {
            out.push(max_iterations_with(params, b, mu_conv, fc_conv)?);
        }
    }
    Ok(out)
}

/// Raman memory drive parameters. Plain scalars; units are documented per
/// field and never checked.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct RamanParams<T> {
    /// Control pulse duration (s).
    pub tau: T,
    /// Resonant optical depth (dimensionless).
    pub optical_depth: T,
    /// Homogeneous linewidth of the excited state (rad/s).
    pub gamma: T,
    /// Control Rabi frequency (rad/s).
    pub rabi: T,
    /// Detuning of the squeezing drive (rad/s).
    pub delta_s: T,
    /// Detuning of the beamsplitter drive (rad/s).
    pub delta_bs: T,
    /// Stokes splitting between ground and storage states (rad/s).
    pub stokes_splitting: T,
}

impl<T: Real> RamanParams<T> {
    pub fn new(
        tau: T,
        optical_depth: T,
        gamma: T,
        rabi: T,
        delta_s: T,
        delta_bs: T,
        stokes_splitting: T,
    ) -> Result<Self> {
        for (name, value) in [
            ("tau", tau),
            ("optical_depth", optical_depth),
            ("gamma", gamma),
            ("delta_s", delta_s),
            ("delta_bs", delta_bs),
        ] {
            if !value.is_finite() || value <= T::zero() {
                return Err(Error::Domain(format!("{} must be > 0", name)));
            }
        }
        if rabi < T::zero() || !rabi.is_finite() {
            return Err(Error::Domain("rabi must be >= 0".into()));
        }
        if stokes_splitting < T::zero() || !stokes_splitting.is_finite() {
            return Err(Error::Domain("stokes_splitting must be >= 0".into()));
        }
        Ok(RamanParams {
            tau,
            optical_depth,
            gamma,
            rabi,
            delta_s,
            delta_bs,
            stokes_splitting,
        })
    }

    /// Mode-matched configuration: `delta_bs = delta_s + stokes_splitting`.
    pub fn mode_matched(
        tau: T,
        optical_depth: T,
        gamma: T,
        rabi: T,
        delta_s: T,
        stokes_splitting: T,
    ) -> Result<Self> {
        RamanParams::new(
            tau,
            optical_depth,
            gamma,
            rabi,
            delta_s,
            delta_s + stokes_splitting,
            stokes_splitting,
        )
    }
}

/// Couplings and the effective beamsplitter transmissivity of the memory.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct RamanCouplings<T> {
    /// Squeezing coupling, `C_S = Omega sqrt(tau d gamma) / Delta_S`.
    pub c_s: T,
    /// Beamsplitter coupling, same with `Delta_BS`.
    pub c_bs: T,
    /// `T = sqrt(1 - C_BS^2)`.
    pub t_eff: T,
}

/// Scalar mapping from drive parameters to couplings. Fails when the
/// beamsplitter drive is over-coupled (`C_BS^2 > 1`).
pub fn raman_mapping<T: Real>(params: &RamanParams<T>) -> Result<RamanCouplings<T>> {
    let strength = params.tau * params.optical_depth * params.gamma * params.rabi * params.rabi;
    let c_s2 = strength / (params.delta_s * params.delta_s);
    let c_bs2 = strength / (params.delta_bs * params.delta_bs);
    if c_bs2 > T::one() {
        return Err(Error::Domain(format!(
            "over-coupled beamsplitter drive: C_BS^2 = {}",
            c_bs2
        )));
    }
    Ok(RamanCouplings {
        c_s: c_s2.sqrt(),
        c_bs: c_bs2.sqrt(),
        t_eff: (T::one() - c_bs2).sqrt(),
    })
}
