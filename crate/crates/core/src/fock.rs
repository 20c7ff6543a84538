//! Truncated Fock-space state representations and the brute-force two-mode
//! beamsplitter projection oracle.
//!
//! Pure bipartite states are kept in Schmidt form `sum_n alpha_n |n>|n>` as a
//! single coefficient vector. Mixed states produced by the protocol stay in
//! the Schmidt-correlated sector `rho = sum_{nm} c_{nm} |nn><mm|` and are kept
//! as the (real, symmetric) matrix `c`.

use nalgebra::DMatrix;

use crate::error::{Error, Result};
use crate::pascal::{LnFactorial, Pascal};
use crate::scalar::{as_f64, real, real_usize, Real};

/// Default bound on the discarded probability mass when constructors choose
/// the truncation themselves.
pub const DEFAULT_EPS_TRUNC: f64 = 1e-12;

/// Largest truncation the dense beamsplitter oracle will accept.
pub const MAX_ORACLE_TRUNCATION: usize = 128;

/// Relative tolerance for the positive-semidefiniteness check: eigenvalues
/// down to `-PSD_TOL * trace` are accepted as rounding noise.
pub const PSD_TOL: f64 = 1e-10;

const MAX_AUTO_TRUNCATION: usize = 10_000;

/// Pure bipartite state `sum_n alpha_n |n>_A |n>_B`, possibly unnormalized,
/// truncated at Fock index N = `coeffs.len() - 1`.
#[derive(Debug, Clone, PartialEq)]
pub struct SchmidtPureState<T> {
    coeffs: Vec<T>,
    tail_bound: T,
}

impl<T: Real> SchmidtPureState<T> {
    /// Wraps a raw coefficient vector. `tail_bound` is the caller's estimate
    /// of the discarded probability mass `sum_{n>N} alpha_n^2`.
    pub fn new(coeffs: Vec<T>, tail_bound: T) -> Result<Self> {
        if coeffs.is_empty() {
            return Err(Error::InvalidState("empty coefficient vector".into()));
        }
        if coeffs.iter().any(|c| !c.is_finite()) {
            return Err(Error::InvalidState("non-finite coefficient".into()));
        }
        if !tail_bound.is_finite() || tail_bound < T::zero() {
            return Err(Error::InvalidState("invalid tail bound".into()));
        }
        Ok(SchmidtPureState { coeffs, tail_bound })
    }

    /// |00>, the vacuum on both modes.
    pub fn vacuum(truncation: usize) -> Self {
        let mut coeffs = vec![T::zero(); truncation + 1];
        coeffs[0] = T::one();
        SchmidtPureState {
            coeffs,
            tail_bound: T::zero(),
        }
    }

    /// Two-mode squeezed state `alpha_n = lambda^n` (unnormalized, alpha_0 = 1).
    pub fn tmss(lambda: T, truncation: usize) -> Result<Self> {
        check_squeezing(lambda)?;
        let mut coeffs = Vec::with_capacity(truncation + 1);
        let mut a = T::one();
        for _ in 0..=truncation {
            coeffs.push(a);
            a *= lambda;
        }
        Ok(SchmidtPureState {
            coeffs,
            tail_bound: tmss_tail(lambda, truncation),
        })
    }

    /// As [`Self::tmss`], with the truncation chosen as the smallest N whose
    /// geometric tail `lambda^{2(N+1)} / (1 - lambda^2)` is below `eps_trunc`.
    pub fn tmss_auto(lambda: T, eps_trunc: T) -> Result<Self> {
        check_squeezing(lambda)?;
        let n = smallest_truncation(eps_trunc, |n| tmss_tail(lambda, n))?;
        Self::tmss(lambda, n)
    }

    /// Photon-subtracted state `alpha_n = (n+1) mu^n` (unnormalized).
    pub fn subtracted_state(mu: T, truncation: usize) -> Result<Self> {
        check_squeezing(mu)?;
        let mut coeffs = Vec::with_capacity(truncation + 1);
        let mut p = T::one();
        for n in 0..=truncation {
            coeffs.push(real_usize::<T>(n + 1) * p);
            p *= mu;
        }
        Ok(SchmidtPureState {
            coeffs,
            tail_bound: subtracted_tail(mu, truncation),
        })
    }

    /// As [`Self::subtracted_state`] with automatic truncation.
    pub fn subtracted_state_auto(mu: T, eps_trunc: T) -> Result<Self> {
        check_squeezing(mu)?;
        let n = smallest_truncation(eps_trunc, |n| subtracted_tail(mu, n))?;
        Self::subtracted_state(mu, n)
    }

    pub fn truncation(&self) -> usize {
        self.coeffs.len() - 1
    }

    pub fn coeffs(&self) -> &[T] {
        &self.coeffs
    }

    /// Coefficient at Fock index `n`, zero beyond the truncation.
    pub fn coeff(&self, n: usize) -> T {
        self.coeffs.get(n).copied().unwrap_or_else(T::zero)
    }

    pub fn tail_bound(&self) -> T {
        self.tail_bound
    }

    /// `sum_n alpha_n^2`.
    pub fn norm_sqr(&self) -> T {
        self.coeffs.iter().fold(T::zero(), |s, &c| s + c * c)
    }

    /// Rescales to unit norm; returns the rescaled state together with the
    /// pre-normalization squared norm (a heralding probability when the
    /// coefficients came out of a projection on normalized inputs).
    pub fn normalize(&self) -> Result<(Self, T)> {
        let n2 = self.norm_sqr();
        if n2 <= T::zero() {
            return Err(Error::InvalidState(
                "cannot normalize an all-zero state".into(),
            ));
        }
        let inv = T::one() / n2.sqrt();
        let coeffs = self.coeffs.iter().map(|&c| c * inv).collect();
        Ok((
            SchmidtPureState {
                coeffs,
                tail_bound: self.tail_bound,
            },
            n2,
        ))
    }

    /// Rescales so that alpha_0 = 1, the gauge in which the iteration map is
    /// analyzed. Fails for states orthogonal to vacuum.
    pub fn in_vacuum_gauge(&self) -> Result<Self> {
        let a0 = self.coeffs[0];
        if a0 == T::zero() {
            return Err(Error::DegenerateResource);
        }
        let inv = T::one() / a0;
        Ok(SchmidtPureState {
            coeffs: self.coeffs.iter().map(|&c| c * inv).collect(),
            tail_bound: self.tail_bound,
        })
    }

    /// True if every coefficient is >= 0.
    pub fn is_nonnegative(&self) -> bool {
        self.coeffs.iter().all(|&c| c >= T::zero())
    }
}

fn check_squeezing<T: Real>(x: T) -> Result<()> {
    if x < T::zero() {
        return Err(Error::Domain(format!(
            "squeezing parameter must be nonnegative, got {}",
            x
        )));
    }
    if x >= T::one() {
        return Err(Error::Domain(format!(
            "squeezing parameter must be < 1 for a normalizable state, got {}",
            x
        )));
    }
    Ok(())
}

/// Geometric tail `sum_{n>N} lambda^{2n} = lambda^{2(N+1)} / (1 - lambda^2)`.
fn tmss_tail<T: Real>(lambda: T, truncation: usize) -> T {
    let q = lambda * lambda;
    q.powi(truncation as i32 + 1) / (T::one() - q)
}

/// Tail of `sum (n+1)^2 mu^{2n}` past N, in closed form.
fn subtracted_tail<T: Real>(mu: T, truncation: usize) -> T {
    let q = mu * mu;
    if q == T::zero() {
        return T::zero();
    }
    let one = T::one();
    let c = real_usize::<T>(truncation + 2);
    let omq = one - q;
    let head = c * c / omq + (c + c) * q / (omq * omq) + q * (one + q) / (omq * omq * omq);
    q.powi(truncation as i32 + 1) * head
}

fn smallest_truncation<T: Real>(eps: T, tail: impl Fn(usize) -> T) -> Result<usize> {
    if eps <= T::zero() {
        return Err(Error::Domain("eps_trunc must be positive".into()));
    }
    let mut n = 0;
    while tail(n) >= eps {
        n += 1;
        if n > MAX_AUTO_TRUNCATION {
            return Err(Error::Capacity {
                requested: n,
                max: MAX_AUTO_TRUNCATION,
            });
        }
    }
    Ok(n)
}

/// Sign convention of the real beamsplitter.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum PhaseConvention {
    /// Real rotation: the held input couples to (detector, kept) ports with
    /// amplitudes (t, r); the fresh input with (-r, t). With this choice a
    /// vacuum detection on two nonnegative Schmidt states yields nonnegative
    /// output coefficients, matching the binomial recursion weights.
    PositiveHeralding,
}

/// Two-port beamsplitter with real amplitudes, `r^2 + t^2 = 1`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct BeamsplitterSpec<T> {
    transmissivity: T,
    reflectivity: T,
    phase: PhaseConvention,
}

impl<T: Real> BeamsplitterSpec<T> {
    pub fn new(transmissivity: T, reflectivity: T, phase: PhaseConvention) -> Result<Self> {
        if !transmissivity.is_finite() || !reflectivity.is_finite() {
            return Err(Error::Domain("non-finite beamsplitter amplitude".into()));
        }
        if transmissivity < T::zero()
            || transmissivity > T::one()
            || reflectivity < T::zero()
            || reflectivity > T::one()
        {
            return Err(Error::Domain(
                "beamsplitter amplitudes must lie in [0, 1]".into(),
            ));
        }
        let unity = transmissivity * transmissivity + reflectivity * reflectivity;
        if (unity - T::one()).abs() > real::<T>(1e-14) {
            return Err(Error::Domain(format!(
                "R^2 + T^2 = {} violates unitarity",
                unity
            )));
        }
        Ok(BeamsplitterSpec {
            transmissivity,
            reflectivity,
            phase,
        })
    }

    /// Beamsplitter from its transmissivity, `r = sqrt(1 - t^2)`.
    pub fn from_transmissivity(transmissivity: T) -> Result<Self> {
        if !(transmissivity >= T::zero() && transmissivity <= T::one()) {
            return Err(Error::Domain("transmissivity must lie in [0, 1]".into()));
        }
        let r = (T::one() - transmissivity * transmissivity)
            .max(T::zero())
            .sqrt();
        BeamsplitterSpec::new(transmissivity, r, PhaseConvention::PositiveHeralding)
    }

    /// The 50:50 beamsplitter used in every interference step, `t = r = 1/sqrt(2)`.
    pub fn balanced() -> Self {
        let t = real::<T>(0.5).sqrt();
        BeamsplitterSpec {
            transmissivity: t,
            reflectivity: t,
            phase: PhaseConvention::PositiveHeralding,
        }
    }

    pub fn transmissivity(&self) -> T {
        self.transmissivity
    }

    pub fn reflectivity(&self) -> T {
        self.reflectivity
    }

    pub fn phase_convention(&self) -> PhaseConvention {
        self.phase
    }
}

/// Matrix element `<d, q| U |j, k>` of the two-mode beamsplitter unitary in
/// the Fock basis; `d` is the detector port, `q` the kept port. Zero unless
/// `d + q = j + k`.
pub fn beamsplitter_element<T: Real>(
    bs: &BeamsplitterSpec<T>,
    detector: usize,
    kept: usize,
    held: usize,
    fresh: usize,
    pascal: &Pascal<T>,
    lnf: &LnFactorial<T>,
) -> T {
    if detector + kept != held + fresh {
        return T::zero();
    }
    let t = bs.transmissivity;
    let r = bs.reflectivity;
    let half = real::<T>(0.5);
    let prefactor =
        (half * (lnf.get(detector) + lnf.get(kept) - lnf.get(held) - lnf.get(fresh))).exp();
    let s_min = detector.saturating_sub(fresh);
    let s_max = held.min(detector);
    let mut sum = T::zero();
    for s in s_min..=s_max {
        // held: s photons to the detector (t each), held - s kept (r each);
        // fresh: detector - s to the detector (-r each), rest kept (t each).
        let from_fresh = detector - s;
        let mut term = pascal.choose(held, s)
            * pascal.choose(fresh, from_fresh)
            * t.powi((s + fresh - from_fresh) as i32)
            * r.powi((held - s + from_fresh) as i32);
        if from_fresh % 2 == 1 {
            term = -term;
        }
        sum += term;
    }
    prefactor * sum
}

/// The unitary restricted to the total-photon-number-`n` block:
/// `B[d][j] = <d, n-d| U |j, n-j>`. Each block is orthogonal.
pub fn beamsplitter_block<T: Real>(bs: &BeamsplitterSpec<T>, n: usize) -> DMatrix<T> {
    let pascal = Pascal::<T>::new(n);
    let lnf = LnFactorial::new(n);
    DMatrix::from_fn(n + 1, n + 1, |d, j| {
        beamsplitter_element(bs, d, n - d, j, n - j, &pascal, &lnf)
    })
}

/// Result of projecting the two heralding ports onto Fock outcomes.
#[derive(Debug, Clone)]
pub enum ProjectionOutcome<T> {
    /// Equal outcomes preserve Schmidt form; the unnormalized output state.
    Schmidt(SchmidtPureState<T>),
    /// Unequal outcomes: raw two-mode coefficient table `C[n_A][n_B]`.
    Table(DMatrix<T>),
}

/// Brute-force reference for every heralded interference step: builds the
/// beamsplitter matrix elements explicitly, applies `U ⊗ U` to `psi ⊗ phi`
/// mode-wise, and projects the two detector ports onto `|outcome_a>`,
/// `|outcome_b>`.
///
/// The fast path equivalent for vacuum outcomes on a balanced splitter is
/// `mashing::mash_pure`; this oracle exists to validate it and to handle
/// general outcomes.
pub fn beamsplitter_vacuum_projection_oracle<T: Real>(
    psi: &SchmidtPureState<T>,
    phi: &SchmidtPureState<T>,
    bs: &BeamsplitterSpec<T>,
    outcome_a: usize,
    outcome_b: usize,
) -> Result<ProjectionOutcome<T>> {
    let n = psi.truncation();
    if n != phi.truncation() {
        return Err(Error::TruncationMismatch {
            left: n,
            right: phi.truncation(),
        });
    }
    if n > MAX_ORACLE_TRUNCATION {
        return Err(Error::Capacity {
            requested: n,
            max: MAX_ORACLE_TRUNCATION,
        });
    }
    let max_photons = 2 * n;
    for outcome in [outcome_a, outcome_b] {
        if outcome > max_photons {
            return Err(Error::OutcomeOutOfRange {
                outcome,
                truncation: n,
                max_photons,
            });
        }
    }

    let pascal = Pascal::<T>::new(max_photons);
    let lnf = LnFactorial::new(max_photons);
    let dim = max_photons + 1;
    let mut table = DMatrix::<T>::zeros(dim, dim);

    // The joint input is sum_{j,k} psi_j phi_k |j j>_{held} |k k>_{fresh};
    // both local beamsplitters see the same (j, k), so a term contributes to
    // (n_a, n_b) only when n_a + outcome_a = n_b + outcome_b = j + k.
    for total in outcome_a.max(outcome_b)..=max_photons {
        let n_a = total - outcome_a;
        let n_b = total - outcome_b;
        let j_min = total.saturating_sub(n);
        let j_max = n.min(total);
        let mut amp = T::zero();
        for j in j_min..=j_max {
            let k = total - j;
            let ea = beamsplitter_element(bs, outcome_a, n_a, j, k, &pascal, &lnf);
            let eb = beamsplitter_element(bs, outcome_b, n_b, j, k, &pascal, &lnf);
            amp += psi.coeff(j) * phi.coeff(k) * ea * eb;
        }
        table[(n_a, n_b)] = amp;
    }

    if outcome_a == outcome_b {
        let coeffs: Vec<T> = (0..=max_photons - outcome_a)
            .map(|n_out| table[(n_out, n_out)])
            .collect();
        let tail = psi.tail_bound() + phi.tail_bound();
        Ok(ProjectionOutcome::Schmidt(SchmidtPureState::new(
            coeffs, tail,
        )?))
    } else {
        Ok(ProjectionOutcome::Table(table))
    }
}

/// Mixed state on the Schmidt-correlated sector,
/// `rho = sum_{nm} c_{nm} |nn><mm|`, stored as the real symmetric matrix `c`.
///
/// Construction validates Hermiticity and positive semidefiniteness
/// (eigenvalues down to `-1e-10 * trace` are accepted as rounding noise and
/// treated as zero).
#[derive(Debug, Clone, PartialEq)]
pub struct SchmidtCorrelatedDensity<T> {
    cmat: DMatrix<T>,
}

impl<T: Real> SchmidtCorrelatedDensity<T> {
    pub fn new(cmat: DMatrix<T>) -> Result<Self> {
        if cmat.nrows() == 0 || cmat.nrows() != cmat.ncols() {
            return Err(Error::InvalidState("cmat must be square".into()));
        }
        if cmat.iter().any(|c| !c.is_finite()) {
            return Err(Error::InvalidState("non-finite density entry".into()));
        }
        let scale = cmat.iter().fold(T::zero(), |m, &c| m.max(c.abs()));
        let mut max_asym = T::zero();
        for i in 0..cmat.nrows() {
            for j in (i + 1)..cmat.ncols() {
                max_asym = max_asym.max((cmat[(i, j)] - cmat[(j, i)]).abs());
            }
        }
        if max_asym > real::<T>(1e-12) * scale {
            return Err(Error::NotHermitian {
                max_asymmetry: as_f64(max_asym),
            });
        }
        let trace = cmat.trace();
        if trace <= T::zero() {
            return Err(Error::InvalidState("density trace must be positive".into()));
        }
        let min_eig = nalgebra::SymmetricEigen::new(cmat.clone())
            .eigenvalues
            .iter()
            .fold(T::zero(), |m, &e| m.min(e));
        if min_eig < -real::<T>(PSD_TOL) * trace {
            return Err(Error::NotPositiveSemidefinite {
                min_eigenvalue: as_f64(min_eig),
                trace: as_f64(trace),
            });
        }
        Ok(SchmidtCorrelatedDensity { cmat })
    }

    pub fn truncation(&self) -> usize {
        self.cmat.nrows() - 1
    }

    pub fn cmat(&self) -> &DMatrix<T> {
        &self.cmat
    }

    /// `c_{nm}`; zero outside the stored range.
    pub fn entry(&self, n: usize, m: usize) -> T {
        if n < self.cmat.nrows() && m < self.cmat.ncols() {
            self.cmat[(n, m)]
        } else {
            T::zero()
        }
    }

    pub fn trace(&self) -> T {
        self.cmat.trace()
    }

    /// Trace-normalized copy together with the original trace.
    pub fn normalized(&self) -> (Self, T) {
        let tr = self.trace();
        (
            SchmidtCorrelatedDensity {
                cmat: &self.cmat / tr,
            },
            tr,
        )
    }

    /// Internal constructor for matrices that are symmetric and PSD by
    /// construction; still rejects non-finite entries in debug builds.
    pub(crate) fn from_validated(cmat: DMatrix<T>) -> Self {
        debug_assert!(cmat.iter().all(|c| c.is_finite()));
        SchmidtCorrelatedDensity { cmat }
    }
}
