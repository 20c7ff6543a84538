//! Binomial coefficients and log-factorials in the working scalar type.

use crate::scalar::{real, Real};

/// Pascal triangle with rows 0..=max_n, built by the additive recurrence.
///
/// Entries are exact as long as they are exactly representable; every entry
/// stays finite for `max_n <= 1000` in `f64`.
#[derive(Debug, Clone)]
pub struct Pascal<T> {
    rows: Vec<Vec<T>>,
}

impl<T: Real> Pascal<T> {
    pub fn new(max_n: usize) -> Self {
        let mut rows: Vec<Vec<T>> = Vec::with_capacity(max_n + 1);
        for n in 0..=max_n {
            let mut row = vec![T::one(); n + 1];
            for k in 1..n {
                row[k] = rows[n - 1][k - 1] + rows[n - 1][k];
            }
            rows.push(row);
        }
        Pascal { rows }
    }

    pub fn max_n(&self) -> usize {
        self.rows.len() - 1
    }

    /// C(n, k); zero when k > n.
    #[inline]
    pub fn choose(&self, n: usize, k: usize) -> T {
        if k > n {
            T::zero()
        } else {
            self.rows[n][k]
        }
    }
}

/// ln(n!) for n = 0..=max_n, accumulated in the working scalar type.
#[derive(Debug, Clone)]
pub struct LnFactorial<T> {
    table: Vec<T>,
}

impl<T: Real> LnFactorial<T> {
    pub fn new(max_n: usize) -> Self {
        let mut table = vec![T::zero(); max_n + 1];
        for n in 1..=max_n {
            table[n] = table[n - 1] + real::<T>(n as f64).ln();
        }
        LnFactorial { table }
    }

    #[inline]
    pub fn get(&self, n: usize) -> T {
        self.table[n]
    }
}
