//! Logarithmic negativity (base-2) for Schmidt-form pure states and
//! Schmidt-correlated mixed states.
//!
//! Closed forms are the fast path; `logneg_partial_transpose_oracle` is the
//! generic definition (trace norm of the partial transpose by dense
//! eigensolve) used to anchor them.

use nalgebra::DMatrix;

use crate::error::{Error, Result};
use crate::fock::{SchmidtCorrelatedDensity, SchmidtPureState};
use crate::scalar::{real, Real};

/// Largest truncation accepted by the dense partial-transpose eigensolve;
/// the full two-mode space has dimension (N+1)^2.
pub const ORACLE_MAX_TRUNCATION: usize = 64;

/// How a negativity value was obtained.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum NegativityMethod {
    SchmidtClosedForm,
    SchmidtCorrelated,
    PartialTransposeOracle,
}

/// Base-2 logarithmic negativity, in bits.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct NegativityResult<T> {
    pub log_negativity: T,
    pub method: NegativityMethod,
}

/// `log2[(sum_n |alpha_n|)^2 / sum_n alpha_n^2]`; normalization is internal.
pub fn logneg_pure<T: Real>(state: &SchmidtPureState<T>) -> Result<NegativityResult<T>> {
    let norm_sqr = state.norm_sqr();
    if norm_sqr <= T::zero() {
        return Err(Error::InvalidState("zero state has no negativity".into()));
    }
    let abs_sum = state.coeffs().iter().fold(T::zero(), |s, &c| s + c.abs());
    let value = (abs_sum * abs_sum / norm_sqr).log2().max(T::zero());
    Ok(NegativityResult {
        log_negativity: value,
        method: NegativityMethod::SchmidtClosedForm,
    })
}

/// Closed form on the Schmidt-correlated sector:
/// `log2[ sum_n c_nn + 2 sum_{n<m} |c_nm| ]` after trace normalization.
///
/// The partial transpose of `sum c_{nm} |nn><mm|` splits into 1x1 blocks
/// `c_nn` and 2x2 blocks with eigenvalues `±|c_nm|`, so its trace norm is the
/// expression above; `logneg_partial_transpose_oracle` checks this without
/// assuming the block structure.
pub fn logneg_mixed<T: Real>(rho: &SchmidtCorrelatedDensity<T>) -> Result<NegativityResult<T>> {
    let (rho, _) = rho.normalized();
    let c = rho.cmat();
    let mut sum = c.trace();
    for n in 0..c.nrows() {
        for m in (n + 1)..c.ncols() {
            sum += real::<T>(2.0) * c[(n, m)].abs();
        }
    }
    Ok(NegativityResult {
        log_negativity: sum.log2().max(T::zero()),
        method: NegativityMethod::SchmidtCorrelated,
    })
}

/// Reference implementation of `log2 || rho^{T_B} ||_1`: expands to the full
/// two-mode basis, partially transposes, and sums |eigenvalues|.
pub fn logneg_partial_transpose_oracle<T: Real>(
    rho: &SchmidtCorrelatedDensity<T>,
) -> Result<NegativityResult<T>> {
    let n = rho.truncation();
    if n > ORACLE_MAX_TRUNCATION {
        return Err(Error::Capacity {
            requested: n,
            max: ORACLE_MAX_TRUNCATION,
        });
    }
    let (rho, _) = rho.normalized();
    let c = rho.cmat();
    let dim = (n + 1) * (n + 1);
    // rho^{T_B} = sum_{nm} c_{nm} |n m><m n| in the |a b> product basis.
    let mut pt = DMatrix::<T>::zeros(dim, dim);
    for i in 0..=n {
        for j in 0..=n {
            pt[(i * (n + 1) + j, j * (n + 1) + i)] = c[(i, j)];
        }
    }
    let eigs = nalgebra::SymmetricEigen::new(pt).eigenvalues;
    let trace_norm = eigs.iter().fold(T::zero(), |s, &e| s + e.abs());
    Ok(NegativityResult {
        log_negativity: trace_norm.log2().max(T::zero()),
        method: NegativityMethod::PartialTransposeOracle,
    })
}

/// Closed form for the two-mode squeezed state: `log2[(1+lambda)/(1-lambda)]`.
pub fn logneg_tmss<T: Real>(lambda: T) -> Result<T> {
    if lambda < T::zero() || lambda >= T::one() {
        return Err(Error::Domain(format!(
            "squeezing parameter {} outside [0, 1)",
            lambda
        )));
    }
    Ok(((T::one() + lambda) / (T::one() - lambda)).log2())
}

/// Closed form for the photon-subtracted state:
/// `log2[(1+mu)^3 / ((1-mu)(1+mu^2))]`.
pub fn logneg_subtracted<T: Real>(mu: T) -> Result<T> {
    if mu < T::zero() || mu >= T::one() {
        return Err(Error::Domain(format!(
            "squeezing parameter {} outside [0, 1)",
            mu
        )));
    }
    let one = T::one();
    Ok(((one + mu).powi(3) / ((one - mu) * (one + mu * mu))).log2())
}
