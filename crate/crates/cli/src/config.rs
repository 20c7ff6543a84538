//! Run configuration: defaults, JSON config file, and flag precedence
//! (flags override the config file, which overrides defaults).

use std::path::{Path, PathBuf};

use serde::Deserialize;

use crate::CliError;

pub const DEFAULT_LAMBDA: f64 = 0.2;
pub const DEFAULT_T: f64 = 0.99;
pub const DEFAULT_V: f64 = 0.0;
pub const DEFAULT_B: f64 = 20_000.0;
pub const DEFAULT_ITERATIONS: u64 = 3;
pub use distillery_core::fock::DEFAULT_EPS_TRUNC;

#[derive(Debug, Clone, Copy, PartialEq, Eq, clap::ValueEnum)]
pub enum OutputFormat {
    Csv,
    Json,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, clap::ValueEnum)]
pub enum MuConventionArg {
    /// mu = lambda T^{f_c + 2} (resource needed every allowed attempt).
    WorstCaseFc,
    /// mu = lambda T^2 (first-try success).
    BestCaseF0,
}

/// Fields accepted in a `--config` JSON file; all optional.
#[derive(Debug, Clone, Default, Deserialize)]
#[serde(deny_unknown_fields)]
struct FileConfig {
    lambda: Option<f64>,
    #[serde(rename = "T")]
    transmissivity: Option<f64>,
    v: Option<f64>,
    #[serde(rename = "B")]
    bandwidth: Option<f64>,
    iterations: Option<u64>,
    eps_trunc: Option<f64>,
    seed: Option<u64>,
    out: Option<PathBuf>,
    format: Option<String>,
    mu_convention: Option<String>,
}

/// Shared parameter flags, available on every subcommand.
#[derive(Debug, Clone, clap::Args)]
pub struct ParamArgs {
    /// Initial squeezing parameter, in [0, 1).
    #[arg(long)]
    pub lambda: Option<f64>,

    /// Subtraction beamsplitter transmissivity, in (0, 1].
    #[arg(long = "T")]
    pub transmissivity: Option<f64>,

    /// Per-round dephasing strength of the stored state, >= 0.
    #[arg(long)]
    pub v: Option<f64>,

    /// Time-bandwidth product (memory lifetime in clock cycles).
    #[arg(long = "B")]
    pub bandwidth: Option<f64>,

    /// Number of heralded rounds.
    #[arg(long = "iters")]
    pub iterations: Option<u64>,

    /// Truncation control: bound on discarded probability mass, in (0, 1e-6].
    #[arg(long = "eps-trunc")]
    pub eps_trunc: Option<f64>,

    /// Seed for the stochastic malting sampler; omit for deterministic runs.
    #[arg(long)]
    pub seed: Option<u64>,

    /// Output path; stdout when omitted.
    #[arg(long)]
    pub out: Option<PathBuf>,

    /// Output format; default is text for reports and csv for figure data.
    #[arg(long, value_enum)]
    pub format: Option<OutputFormat>,

    /// Resource parameter convention for the budget accounting.
    #[arg(long = "mu-convention", value_enum)]
    pub mu_convention: Option<MuConventionArg>,

    /// JSON config file; flags override its values.
    #[arg(long)]
    pub config: Option<PathBuf>,
}

/// Fully resolved configuration.
#[derive(Debug, Clone)]
pub struct RunConfig {
    pub lambda: f64,
    pub transmissivity: f64,
    pub v: f64,
    pub bandwidth: f64,
    pub iterations: u64,
    pub eps_trunc: f64,
    pub seed: Option<u64>,
    pub out: Option<PathBuf>,
    pub format: Option<OutputFormat>,
    pub mu_convention: MuConventionArg,
}

impl RunConfig {
    pub fn resolve(args: &ParamArgs) -> Result<Self, CliError> {
        let file = match &args.config {
            Some(path) => load_file_config(path)?,
            None => FileConfig::default(),
        };
        let format = match args.format {
            Some(f) => Some(f),
            None => match file.format.as_deref() {
                None => None,
                Some("csv") => Some(OutputFormat::Csv),
                Some("json") => Some(OutputFormat::Json),
                Some(other) => {
                    return Err(CliError::Domain(format!(
                        "config: unknown format {:?} (expected \"csv\" or \"json\")",
                        other
                    )))
                }
            },
        };
        let mu_convention = match args.mu_convention {
            Some(m) => m,
            None => match file.mu_convention.as_deref() {
                None => MuConventionArg::WorstCaseFc,
                Some("worst_case_fc") => MuConventionArg::WorstCaseFc,
                Some("best_case_f0") => MuConventionArg::BestCaseF0,
                Some(other) => {
                    return Err(CliError::Domain(format!(
                        "config: unknown mu_convention {:?}",
                        other
                    )))
                }
            },
        };
        let config = RunConfig {
            lambda: args.lambda.or(file.lambda).unwrap_or(DEFAULT_LAMBDA),
            transmissivity: args
                .transmissivity
                .or(file.transmissivity)
                .unwrap_or(DEFAULT_T),
            v: args.v.or(file.v).unwrap_or(DEFAULT_V),
            bandwidth: args.bandwidth.or(file.bandwidth).unwrap_or(DEFAULT_B),
            iterations: args
                .iterations
                .or(file.iterations)
                .unwrap_or(DEFAULT_ITERATIONS),
            eps_trunc: args
                .eps_trunc
                .or(file.eps_trunc)
                .unwrap_or(DEFAULT_EPS_TRUNC),
            seed: args.seed.or(file.seed),
            out: args.out.clone().or(file.out),
            format,
            mu_convention,
        };
        config.validate()?;
        Ok(config)
    }

    fn validate(&self) -> Result<(), CliError> {
        if !(self.eps_trunc > 0.0 && self.eps_trunc <= 1e-6) {
            return Err(CliError::Domain(format!(
                "eps_trunc must lie in (0, 1e-6], got {}",
                self.eps_trunc
            )));
        }
        if !self.v.is_finite() || self.v < 0.0 {
            return Err(CliError::Domain(format!("v must be >= 0, got {}", self.v)));
        }
        if !self.bandwidth.is_finite() || self.bandwidth <= 0.0 {
            return Err(CliError::Domain(format!(
                "B must be > 0, got {}",
                self.bandwidth
            )));
        }
        // lambda and T are range-checked by the core constructors so that
        // every entry point reports the same message.
        Ok(())
    }
}

fn load_file_config(path: &Path) -> Result<FileConfig, CliError> {
    let text = std::fs::read_to_string(path)
        .map_err(|e| CliError::Domain(format!("cannot read config {}: {}", path.display(), e)))?;
    serde_json::from_str(&text)
        .map_err(|e| CliError::Domain(format!("bad config {}: {}", path.display(), e)))
}
