//! Command-line front end for the entanglement distillery simulator.
//!
//! Exit codes: 0 on success, 2 on domain or configuration errors, 3 on
//! internal invariant violations.

mod commands;
mod config;
mod report;

use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Parser, Subcommand};

use commands::figure::FigureName;
use commands::state::StateKind;
use config::{ParamArgs, RunConfig};

#[derive(Debug)]
pub enum CliError {
    /// Bad parameters, bad config, unreadable files: exit code 2.
    Domain(String),
    /// Invariant violations that indicate a bug: exit code 3.
    Internal(String),
}

impl std::fmt::Display for CliError {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        match self {
            CliError::Domain(m) => write!(f, "{}", m),
            CliError::Internal(m) => write!(f, "internal error: {}", m),
        }
    }
}

impl From<distillery_core::Error> for CliError {
    fn from(e: distillery_core::Error) -> Self {
        match e {
            distillery_core::Error::Internal(m) => CliError::Internal(m),
            other => CliError::Domain(other.to_string()),
        }
    }
}

#[derive(Parser)]
#[command(
    name = "distillery",
    version,
    about = "Iterative continuous-variable entanglement distillation in quantum memories"
)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Resource preparation: attempt threshold, probabilities, gain.
    Malt {
        #[command(flatten)]
        args: ParamArgs,
    },
    /// Full protocol run: malting plus heralded rounds with dephasing.
    Distill {
        #[command(flatten)]
        args: ParamArgs,
    },
    /// Iteration budget under the time-bandwidth constraint.
    Budget {
        #[command(flatten)]
        args: ParamArgs,
    },
    /// Deterministic figure data (CSV by default).
    Figure {
        #[arg(value_enum)]
        name: FigureName,
        #[command(flatten)]
        args: ParamArgs,
        /// Also write a gnuplot script next to --out.
        #[arg(long)]
        gnuplot: bool,
    },
    /// Dump or load state files in the JSON schema.
    State {
        #[command(subcommand)]
        action: StateAction,
    },
}

#[derive(Subcommand)]
enum StateAction {
    /// Write a protocol state to the JSON schema.
    Dump {
        #[arg(long, value_enum)]
        kind: StateKind,
        /// Store the normalized view instead of the raw coefficients.
        #[arg(long)]
        normalized: bool,
        #[command(flatten)]
        args: ParamArgs,
    },
    /// Read a state file, validate it, and print a summary.
    Load { path: PathBuf },
}

fn run(cli: Cli) -> Result<(), CliError> {
    match cli.command {
        Command::Malt { args } => commands::malt::run(&RunConfig::resolve(&args)?),
        Command::Distill { args } => commands::distill::run(&RunConfig::resolve(&args)?),
        Command::Budget { args } => commands::budget::run(&RunConfig::resolve(&args)?),
        Command::Figure {
            name,
            args,
            gnuplot,
        } => commands::figure::run(name, &RunConfig::resolve(&args)?, gnuplot),
        Command::State { action } => match action {
            StateAction::Dump {
                kind,
                normalized,
                args,
            } => commands::state::dump(kind, normalized, &RunConfig::resolve(&args)?),
            StateAction::Load { path } => commands::state::load(&path),
        },
    }
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match run(cli) {
        Ok(()) => ExitCode::SUCCESS,
        Err(CliError::Domain(message)) => {
            eprintln!("error: {}", message);
            ExitCode::from(2)
        }
        Err(CliError::Internal(message)) => {
            eprintln!("internal error: {}", message);
            ExitCode::from(3)
        }
    }
}
