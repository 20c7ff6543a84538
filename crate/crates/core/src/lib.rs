//! Truncated Fock-space simulation of iterative continuous-variable
//! entanglement distillation in quantum memories.
//!
//! The protocol has two stages. *Malting* prepares a non-Gaussian resource
//! state by in-situ two-mode squeezing followed by repeat-until-success
//! photon subtraction ([`malting`]). *Mashing* interferes the stored state
//! with fresh resource copies on balanced beamsplitters and heralds on vacuum,
//! concentrating entanglement round by round ([`mashing`]). Supporting
//! modules quantify entanglement by logarithmic negativity
//! ([`entanglement`]), model storage dephasing ([`decoherence`]), and account
//! for the finite time-bandwidth budget of realistic memories ([`budget`]).
//!
//! Everything numeric is generic over the scalar type through [`Real`]
//! (`f32` or `f64`); the aliases at the crate root fix `f64`, the working
//! precision of the command-line tools and the validation suite.

pub mod budget;
pub mod decoherence;
pub mod entanglement;
pub mod error;
pub mod fock;
pub mod malting;
pub mod mashing;
pub mod pascal;
pub mod scalar;
pub mod statefile;

pub use error::{Error, Result};
pub use scalar::Real;

/// `f64` working aliases.
pub type PureState = fock::SchmidtPureState<f64>;
pub type MixedState = fock::SchmidtCorrelatedDensity<f64>;
pub type Beamsplitter = fock::BeamsplitterSpec<f64>;
pub type Operator = mashing::MashingOperator<f64>;
pub type Budget = budget::BudgetReport<f64>;
