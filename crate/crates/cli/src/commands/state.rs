//! `state`: dump protocol states to the JSON schema and load them back.

use std::fmt::Write as _;
use std::path::PathBuf;

use distillery_core::decoherence::embed_pure;
use distillery_core::entanglement::{logneg_mixed, logneg_pure};
use distillery_core::statefile::{self, StateFile};
use distillery_core::PureState;

use crate::config::RunConfig;
use crate::report::{emit, g17};
use crate::CliError;

#[derive(Debug, Clone, Copy, PartialEq, Eq, clap::ValueEnum)]
pub enum StateKind {
    /// Two-mode squeezed state at the configured lambda.
    Tmss,
    /// Photon-subtracted resource at mu = lambda T^2.
    Subtracted,
    /// Rank-1 density of the subtracted resource (kind "mixed" on disk).
    SubtractedMixed,
}

pub fn dump(kind: StateKind, normalized: bool, config: &RunConfig) -> Result<(), CliError> {
    let mu = config.lambda * config.transmissivity * config.transmissivity;
    let file = match kind {
        StateKind::Tmss => {
            let state = PureState::tmss_auto(config.lambda, config.eps_trunc)?;
            let state = if normalized {
                state.normalize()?.0
            } else {
                state
            };
            StateFile::Pure { state, normalized }
        }
        StateKind::Subtracted => {
            let state = PureState::subtracted_state_auto(mu, config.eps_trunc)?;
            let state = if normalized {
                state.normalize()?.0
            } else {
                state
            };
            StateFile::Pure { state, normalized }
        }
        StateKind::SubtractedMixed => {
            let pure = PureState::subtracted_state_auto(mu, config.eps_trunc)?;
            StateFile::Mixed {
                state: embed_pure(&pure)?,
                normalized: true,
            }
        }
    };
    emit(config.out.as_deref(), &statefile::to_json(&file))
}

pub fn load(path: &PathBuf) -> Result<(), CliError> {
    let text = std::fs::read_to_string(path)
        .map_err(|e| CliError::Domain(format!("cannot read {}: {}", path.display(), e)))?;
    let file = statefile::from_json(&text)?;
    let mut s = String::new();
    match &file {
        StateFile::Pure { state, normalized } => {
            let _ = writeln!(s, "kind        = pure");
            let _ = writeln!(s, "truncation  = {}", state.truncation());
            let _ = writeln!(s, "norm_sqr    = {}", g17(state.norm_sqr()));
            let _ = writeln!(s, "normalized  = {}", normalized);
            let _ = writeln!(
                s,
                "logneg      = {}",
                g17(logneg_pure(state)?.log_negativity)
            );
        }
        StateFile::Mixed { state, normalized } => {
            let _ = writeln!(s, "kind        = mixed");
            let _ = writeln!(s, "truncation  = {}", state.truncation());
            let _ = writeln!(s, "trace       = {}", g17(state.trace()));
            let _ = writeln!(s, "normalized  = {}", normalized);
            let _ = writeln!(
                s,
                "logneg      = {}",
                g17(logneg_mixed(state)?.log_negativity)
            );
        }
    }
    print!("{}", s);
    Ok(())
}
