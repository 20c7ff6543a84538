//! The vacuum-heralded concentration iteration: binomial recursion, its
//! triangular operator form, the limiting state, the Schmidt-correlated
//! mixed-state generalization, and the round-by-round driver.

use nalgebra::DMatrix;

use crate::decoherence::{embed_pure, wait_dephase};
use crate::entanglement::{logneg_mixed, logneg_pure};
use crate::error::{Error, Result};
use crate::fock::{SchmidtCorrelatedDensity, SchmidtPureState};
use crate::pascal::Pascal;
use crate::scalar::{half_pow, Real};

/// One vacuum-heralded round on pure states:
/// `alpha^{i+1}_n = 2^{-n} sum_t C(n,t) alpha^i_{n-t} alpha^0_t`.
///
/// The output is unnormalized (the alpha_0 = 1 gauge is preserved when both
/// inputs carry it). The returned scalar is the physical heralding
/// probability, i.e. the squared norm of the projected state for normalized
/// inputs; it does not depend on the gauge of the arguments.
pub fn mash_pure<T: Real>(
    psi_i: &SchmidtPureState<T>,
    psi_0: &SchmidtPureState<T>,
) -> Result<(SchmidtPureState<T>, T)> {
    let n = psi_i.truncation();
    if n != psi_0.truncation() {
        return Err(Error::TruncationMismatch {
            left: n,
            right: psi_0.truncation(),
        });
    }
    if !psi_i.is_nonnegative() || !psi_0.is_nonnegative() {
        return Err(Error::Domain(
            "vacuum-heralded rounds expect nonnegative coefficients".into(),
        ));
    }
    let pascal = Pascal::<T>::new(n);
    let held = psi_i.coeffs();
    let fresh = psi_0.coeffs();
    let mut out = Vec::with_capacity(n + 1);
    for m in 0..=n {
        let mut s = T::zero();
        for t in 0..=m {
            s += pascal.choose(m, t) * held[m - t] * fresh[t];
        }
        out.push(s * half_pow::<T>(m));
    }
    let tail = psi_i.tail_bound() + psi_0.tail_bound();
    let out = SchmidtPureState::new(out, tail)?;
    let denom = psi_i.norm_sqr() * psi_0.norm_sqr();
    if denom <= T::zero() {
        return Err(Error::InvalidState("zero input state".into()));
    }
    let heralding = out.norm_sqr() / denom;
    Ok((out, heralding))
}

/// Lower-triangular matrix realization of one round with a fixed resource:
/// `M_{jk} = 2^{-j} C(j,k) alpha^0_{j-k}` for `k <= j`.
#[derive(Debug, Clone)]
pub struct MashingOperator<T> {
    resource: SchmidtPureState<T>,
    matrix: DMatrix<T>,
}

impl<T: Real> MashingOperator<T> {
    pub fn resource(&self) -> &SchmidtPureState<T> {
        &self.resource
    }

    pub fn matrix(&self) -> &DMatrix<T> {
        &self.matrix
    }

    /// Eigenvalues of a triangular matrix: the diagonal, `alpha^0_0 / 2^k`.
    pub fn eigenvalues(&self) -> Vec<T> {
        (0..self.matrix.nrows())
            .map(|k| self.matrix[(k, k)])
            .collect()
    }

    /// Applies the operator to a coefficient vector.
    pub fn apply(&self, coeffs: &[T]) -> Vec<T> {
        let n = self.matrix.nrows();
        assert_eq!(coeffs.len(), n, "coefficient length must match truncation");
        let mut out = vec![T::zero(); n];
        for (j, out_j) in out.iter_mut().enumerate() {
            let mut s = T::zero();
            for (k, &c) in coeffs.iter().enumerate().take(j + 1) {
                s += self.matrix[(j, k)] * c;
            }
            *out_j = s;
        }
        out
    }
}

/// Builds the operator for a resource state, rescaled to the alpha_0 = 1
/// gauge first. Fails if the resource is orthogonal to vacuum.
pub fn build_operator<T: Real>(psi_0: &SchmidtPureState<T>) -> Result<MashingOperator<T>> {
    let resource = psi_0.in_vacuum_gauge()?;
    let n = resource.truncation();
    let pascal = Pascal::<T>::new(n);
    let a = resource.coeffs();
    let mut m = DMatrix::<T>::zeros(n + 1, n + 1);
    for j in 0..=n {
        let scale = half_pow::<T>(j);
        for k in 0..=j {
            m[(j, k)] = scale * pascal.choose(j, k) * a[j - k];
        }
    }
    Ok(MashingOperator {
        resource,
        matrix: m,
    })
}

/// Unique fixed point of the round map with `alphabar_0 = 1`, by forward
/// substitution:
/// `alphabar_n = [2^{-n} sum_{t>=1} C(n,t) alphabar_{n-t} alpha^0_t] / (1 - 2^{-n})`.
pub fn limiting_state<T: Real>(psi_0: &SchmidtPureState<T>) -> Result<SchmidtPureState<T>> {
    let resource = psi_0.in_vacuum_gauge()?;
    let n = resource.truncation();
    let pascal = Pascal::<T>::new(n);
    let a = resource.coeffs();
    let mut bar = vec![T::zero(); n + 1];
    bar[0] = T::one();
    for m in 1..=n {
        let mut s = T::zero();
        for t in 1..=m {
            s += pascal.choose(m, t) * bar[m - t] * a[t];
        }
        let hp = half_pow::<T>(m);
        bar[m] = s * hp / (T::one() - hp);
    }
    let state = SchmidtPureState::new(bar, psi_0.tail_bound())?;
    #[cfg(debug_assertions)]
    {
        use crate::scalar::real;
        let iterated = limiting_state_iterated(psi_0, 200, real::<T>(1e-10))?;
        for k in 0..=n {
            debug_assert!(
                (state.coeff(k) - iterated.coeff(k)).abs() <= real::<T>(1e-8),
                "forward substitution disagrees with iteration at index {}",
                k
            );
        }
    }
    Ok(state)
}

/// Fallback solver for the fixed point: iterates the round map from the
/// resource until the gauge-fixed coefficients move less than `tol`.
pub fn limiting_state_iterated<T: Real>(
    psi_0: &SchmidtPureState<T>,
    max_rounds: usize,
    tol: T,
) -> Result<SchmidtPureState<T>> {
    let resource = psi_0.in_vacuum_gauge()?;
    let mut held = resource.clone();
    for _ in 0..max_rounds {
        let (next, _) = mash_pure(&held, &resource)?;
        let next = next.in_vacuum_gauge()?;
        let delta = held
            .coeffs()
            .iter()
            .zip(next.coeffs())
            .fold(T::zero(), |m, (&a, &b)| m.max((a - b).abs()));
        held = next;
        if delta < tol {
            break;
        }
    }
    Ok(held)
}

/// One vacuum-heralded round on the Schmidt-correlated sector:
/// `c^{i+1}_{NM} = 2^{-(N+M)} sum_{n<=N, m<=M} C(N,n) C(M,m)
///                 c^i_{N-n,M-m} c^0_{nm}`.
///
/// Returns the unnormalized output and the heralding probability (the trace
/// of the raw output for trace-normalized inputs).
pub fn mash_mixed<T: Real>(
    rho_i: &SchmidtCorrelatedDensity<T>,
    rho_0: &SchmidtCorrelatedDensity<T>,
) -> Result<(SchmidtCorrelatedDensity<T>, T)> {
    let n = rho_i.truncation();
    if n != rho_0.truncation() {
        return Err(Error::TruncationMismatch {
            left: n,
            right: rho_0.truncation(),
        });
    }
    let pascal = Pascal::<T>::new(n);
    let ci = rho_i.cmat();
    let c0 = rho_0.cmat();
    let mut out = DMatrix::<T>::zeros(n + 1, n + 1);
    for nn in 0..=n {
        for mm in nn..=n {
            let mut s = T::zero();
            for p in 0..=nn {
                let cn = pascal.choose(nn, p);
                for q in 0..=mm {
                    s += cn * pascal.choose(mm, q) * ci[(nn - p, mm - q)] * c0[(p, q)];
                }
            }
            let val = s * half_pow::<T>(nn + mm);
            out[(nn, mm)] = val;
            out[(mm, nn)] = val;
        }
    }
    let heralding = out.trace() / (rho_i.trace() * rho_0.trace());
    Ok((SchmidtCorrelatedDensity::from_validated(out), heralding))
}

/// States recorded by [`iterate`]: the pure path when no dephasing acts, the
/// sector densities otherwise.
#[derive(Debug, Clone)]
pub enum TraceStates<T> {
    Pure(Vec<SchmidtPureState<T>>),
    Mixed(Vec<SchmidtCorrelatedDensity<T>>),
}

impl<T> TraceStates<T> {
    pub fn len(&self) -> usize {
        match self {
            TraceStates::Pure(v) => v.len(),
            TraceStates::Mixed(v) => v.len(),
        }
    }

    pub fn is_empty(&self) -> bool {
        self.len() == 0
    }
}

/// Round-by-round record of a protocol run: the held state after 0..=i
/// rounds, the per-round heralding probabilities, and the negativities.
#[derive(Debug, Clone)]
pub struct IterationTrace<T> {
    pub states: TraceStates<T>,
    pub heralding_probs: Vec<T>,
    pub negativities: Vec<T>,
}

/// Options for [`iterate_with`]. `held_v` dephases the stored state before
/// every round (it waits while the next resource is prepared); `resource_v`
/// optionally dephases each fresh resource as well and defaults to zero
/// because the resource is consumed as soon as it is ready.
#[derive(Debug, Clone, Copy)]
pub struct IterateOptions<T> {
    pub held_v: T,
    pub resource_v: T,
}

impl<T: Real> Default for IterateOptions<T> {
    fn default() -> Self {
        IterateOptions {
            held_v: T::zero(),
            resource_v: T::zero(),
        }
    }
}

/// Runs `rounds` heralded rounds, mashing fresh copies of `resource` into the
/// held state (initially the first copy of the resource itself). When
/// `v > 0`, the held state is dephased (wait scale) before each round.
pub fn iterate<T: Real>(
    resource: &SchmidtPureState<T>,
    rounds: usize,
    v: T,
) -> Result<IterationTrace<T>> {
    iterate_with(
        resource,
        resource,
        rounds,
        IterateOptions {
            held_v: v,
            resource_v: T::zero(),
        },
    )
}

/// As [`iterate`], with an explicit initial held state and options.
pub fn iterate_with<T: Real>(
    initial: &SchmidtPureState<T>,
    resource: &SchmidtPureState<T>,
    rounds: usize,
    options: IterateOptions<T>,
) -> Result<IterationTrace<T>> {
    if options.held_v < T::zero() || options.resource_v < T::zero() {
        return Err(Error::Domain("dephasing strength must be >= 0".into()));
    }
    if options.held_v == T::zero() && options.resource_v == T::zero() {
        iterate_pure_path(initial, resource, rounds)
    } else {
        iterate_mixed_path(initial, resource, rounds, options)
    }
}

fn iterate_pure_path<T: Real>(
    initial: &SchmidtPureState<T>,
    resource: &SchmidtPureState<T>,
    rounds: usize,
) -> Result<IterationTrace<T>> {
    let mut held = initial.in_vacuum_gauge()?;
    let resource = resource.in_vacuum_gauge()?;
    let mut states = Vec::with_capacity(rounds + 1);
    let mut heralding = Vec::with_capacity(rounds);
    let mut negativities = Vec::with_capacity(rounds + 1);
    negativities.push(logneg_pure(&held)?.log_negativity);
    states.push(held.clone());
    for _ in 0..rounds {
        let (next, p) = mash_pure(&held, &resource)?;
        held = next.in_vacuum_gauge()?;
        heralding.push(p);
        negativities.push(logneg_pure(&held)?.log_negativity);
        states.push(held.clone());
    }
    Ok(IterationTrace {
        states: TraceStates::Pure(states),
        heralding_probs: heralding,
        negativities,
    })
}

fn iterate_mixed_path<T: Real>(
    initial: &SchmidtPureState<T>,
    resource: &SchmidtPureState<T>,
    rounds: usize,
    options: IterateOptions<T>,
) -> Result<IterationTrace<T>> {
    let resource_pure = embed_pure(resource)?;
    let mut held = embed_pure(initial)?;
    let mut states = Vec::with_capacity(rounds + 1);
    let mut heralding = Vec::with_capacity(rounds);
    let mut negativities = Vec::with_capacity(rounds + 1);
    negativities.push(logneg_mixed(&held)?.log_negativity);
    states.push(held.clone());
    for _ in 0..rounds {
        held = wait_dephase(&held, options.held_v)?;
        let fresh = if options.resource_v > T::zero() {
            wait_dephase(&resource_pure, options.resource_v)?
        } else {
            resource_pure.clone()
        };
        let (raw, p) = mash_mixed(&held, &fresh)?;
        let (normalized, _) = raw.normalized();
        held = normalized;
        heralding.push(p);
        negativities.push(logneg_mixed(&held)?.log_negativity);
        states.push(held.clone());
    }
    Ok(IterationTrace {
        states: TraceStates::Mixed(states),
        heralding_probs: heralding,
        negativities,
    })
}
