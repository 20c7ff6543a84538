//! Error type shared by all modules.

use thiserror::Error;

/// Errors surfaced by state constructors, channels, and protocol steps.
#[derive(Debug, Clone, Error)]
pub enum Error {
    /// State vector is empty, all-zero, or contains non-finite entries.
    #[error("invalid state: {0}")]
    InvalidState(String),

    /// Parameter outside its admissible range.
    #[error("domain error: {0}")]
    Domain(String),

    /// Binary operation on states with different truncations.
    #[error("truncation mismatch: {left} vs {right}")]
    TruncationMismatch { left: usize, right: usize },

    /// Density matrix fails the Hermiticity check.
    #[error("density not Hermitian: max asymmetry {max_asymmetry:e}")]
    NotHermitian { max_asymmetry: f64 },

    /// Density matrix has an eigenvalue below -1e-10 * trace.
    #[error(
        "density not positive semidefinite: min eigenvalue {min_eigenvalue:e}, trace {trace:e}"
    )]
    NotPositiveSemidefinite { min_eigenvalue: f64, trace: f64 },

    /// Requested truncation exceeds what a dense routine can handle.
    #[error("truncation {requested} exceeds capacity {max}")]
    Capacity { requested: usize, max: usize },

    /// Detector outcome larger than the reachable photon number.
    #[error("outcome {outcome} unreachable: combined photon number at truncation {truncation} is at most {max_photons}")]
    OutcomeOutOfRange {
        outcome: usize,
        truncation: usize,
        max_photons: usize,
    },

    /// Resource state orthogonal to vacuum; the iteration analysis needs alpha_0 != 0.
    #[error("degenerate resource: leading coefficient is zero")]
    DegenerateResource,

    /// Malformed or unsupported state file.
    #[error("state file error: {0}")]
    StateFile(String),

    /// An internal invariant failed; indicates a bug, not bad input.
    #[error("internal invariant violated: {0}")]
    Internal(String),
}

pub type Result<T, E = Error> = std::result::Result<T, E>;
