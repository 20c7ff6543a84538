//! Scalar abstraction for the numeric core.
//!
//! Everything downstream is generic over [`Real`]; `f64` is the working type
//! used by the CLI and the acceptance tolerances, `f32` builds but cannot meet
//! the 1e-12 class tolerances.

use std::fmt::{Debug, Display, LowerExp};

use nalgebra::RealField;
use num_traits::{FromPrimitive, ToPrimitive};

/// Floating-point scalar usable throughout the crate: `f32` or `f64`.
pub trait Real:
    RealField + Copy + FromPrimitive + ToPrimitive + Display + LowerExp + Debug
{
}

impl<T> Real for T where
    T: RealField + Copy + FromPrimitive + ToPrimitive + Display + LowerExp + Debug
{
}

/// Converts an `f64` constant into the working scalar type.
#[inline]
pub fn real<T: Real>(x: f64) -> T {
    T::from_f64(x).expect("constant not representable in scalar type")
}

/// Converts a nonnegative integer into the working scalar type.
#[inline]
pub fn real_usize<T: Real>(n: usize) -> T {
    T::from_usize(n).expect("integer not representable in scalar type")
}

/// Lossy view of a scalar as `f64`, for diagnostics and error reports.
#[inline]
pub fn as_f64<T: Real>(x: T) -> f64 {
    x.to_f64().unwrap_or(f64::NAN)
}

/// 2^{-n} computed exactly (powers of two are representable).
#[inline]
pub fn half_pow<T: Real>(n: usize) -> T {
    real::<T>(0.5).powi(n as i32)
}
