//! `figure`: deterministic CSV data for the three standard plots.
//!
//! fig3: negativity vs squeezing after each protocol stage (truncation 60);
//! fig4: iteration budget vs time-bandwidth product (inclusive threshold);
//! fig6: negativity vs squeezing and dephasing strength over three rounds
//! (truncation 40).

use distillery_core::budget::{max_iterations_with, BudgetStatus, FcConvention, MuConvention};
use distillery_core::entanglement::{logneg_pure, logneg_tmss};
use distillery_core::malting::MaltingParams;
use distillery_core::mashing::{self, limiting_state};
use distillery_core::PureState;
use rayon::prelude::*;
use serde_json::json;

use crate::config::{MuConventionArg, OutputFormat, RunConfig};
use crate::report::{emit, g17, Csv};
use crate::CliError;

pub const FIG3_TRUNCATION: usize = 60;
pub const FIG6_TRUNCATION: usize = 40;

#[derive(Debug, Clone, Copy, PartialEq, Eq, clap::ValueEnum)]
pub enum FigureName {
    Fig3,
    Fig4,
    Fig6,
}

/// Grid of `count` points `start, start + step, ...` generated from integer
/// indices so that repeated runs produce identical floats.
fn grid(start: f64, step: f64, count: usize) -> Vec<f64> {
    (0..count).map(|i| start + step * i as f64).collect()
}

fn thread_pool() -> Result<rayon::ThreadPool, CliError> {
    let mut builder = rayon::ThreadPoolBuilder::new();
    if let Ok(text) = std::env::var("DISTILLERY_THREADS") {
        let n: usize = text.parse().map_err(|_| {
            CliError::Domain(format!(
                "DISTILLERY_THREADS must be an integer, got {:?}",
                text
            ))
        })?;
        if n > 0 {
            builder = builder.num_threads(n);
        }
    }
    builder
        .build()
        .map_err(|e| CliError::Internal(format!("thread pool: {}", e)))
}

/// One fig3 row: negativities after each stage at a fixed squeezing.
fn fig3_row(lambda: f64, transmissivity: f64) -> Result<[f64; 7], CliError> {
    let mu = lambda * transmissivity * transmissivity;
    let resource = PureState::subtracted_state(mu, FIG3_TRUNCATION)?;
    let trace = mashing::iterate(&resource, 3, 0.0)?;
    let limit = limiting_state(&resource)?;
    Ok([
        lambda,
        logneg_tmss(lambda)?,
        trace.negativities[0],
        trace.negativities[1],
        trace.negativities[2],
        trace.negativities[3],
        logneg_pure(&limit)?.log_negativity,
    ])
}

fn fig3(config: &RunConfig) -> Result<(Vec<&'static str>, Vec<Vec<f64>>), CliError> {
    let lambdas = grid(0.05, 0.05, 10);
    let t = config.transmissivity;
    let rows = thread_pool()?.install(|| {
        lambdas
            .par_iter()
            .map(|&lam| fig3_row(lam, t).map(|r| r.to_vec()))
            .collect::<Result<Vec<_>, CliError>>()
    })?;
    Ok((
        vec![
            "lambda", "N_tmss", "N_sub", "N_iter1", "N_iter2", "N_iter3", "N_limit",
        ],
        rows,
    ))
}

fn fig4(config: &RunConfig) -> Result<(Vec<&'static str>, Vec<Vec<f64>>), CliError> {
    let lambdas = grid(0.05, 0.05, 6);
    let bandwidths = [1e3, 1e4, 2e4, 1e5, 1e6];
    let transmissivities = [0.8, 0.9, 0.95];
    let mu_conv = match config.mu_convention {
        MuConventionArg::WorstCaseFc => MuConvention::WorstCaseFc,
        MuConventionArg::BestCaseF0 => MuConvention::BestCaseF0,
    };
    let mut points = Vec::new();
    for &lam in &lambdas {
        for &b in &bandwidths {
            for &t in &transmissivities {
                points.push((lam, b, t));
            }
        }
    }
    let rows = thread_pool()?.install(|| {
        points
            .par_iter()
            .map(|&(lam, b, t)| -> Result<Vec<f64>, CliError> {
                let params = MaltingParams::new(lam, t)?;
                // The strict threshold degenerates for much of this grid;
                // the inclusive variant keeps the cost finite everywhere.
                let report = max_iterations_with(&params, b, mu_conv, FcConvention::Inclusive)?;
                let i_m = match report.status {
                    BudgetStatus::Feasible => report.i_m as f64,
                    _ => 0.0,
                };
                Ok(vec![lam, b, t, i_m])
            })
            .collect::<Result<Vec<_>, CliError>>()
    })?;
    Ok((vec!["lambda", "B", "T", "i_m"], rows))
}

/// fig6 negativities for one (lambda, v): three dephased rounds.
fn fig6_point(lambda: f64, transmissivity: f64, v: f64) -> Result<[f64; 3], CliError> {
    let mu = lambda * transmissivity * transmissivity;
    let resource = PureState::subtracted_state(mu, FIG6_TRUNCATION)?;
    let trace = mashing::iterate(&resource, 3, v)?;
    Ok([
        trace.negativities[1],
        trace.negativities[2],
        trace.negativities[3],
    ])
}

fn fig6(config: &RunConfig) -> Result<(Vec<&'static str>, Vec<Vec<f64>>), CliError> {
    let lambdas = grid(0.05, 0.05, 10);
    let vs = grid(0.0, 0.25, 9);
    let t = config.transmissivity;
    let mut points = Vec::new();
    for &lam in &lambdas {
        for &v in &vs {
            points.push((lam, v));
        }
    }
    let results = thread_pool()?.install(|| {
        points
            .par_iter()
            .map(|&(lam, v)| fig6_point(lam, t, v))
            .collect::<Result<Vec<_>, CliError>>()
    })?;
    let mut rows = Vec::with_capacity(points.len() * 3);
    for ((lam, v), negs) in points.iter().zip(results) {
        for (iter, &neg) in negs.iter().enumerate() {
            rows.push(vec![*lam, *v, (iter + 1) as f64, neg]);
        }
    }
    Ok((vec!["lambda", "v", "iter", "logneg"], rows))
}

fn render_csv(header: &[&str], rows: &[Vec<f64>], int_cols: &[usize]) -> String {
    let mut csv = Csv::new(header);
    for row in rows {
        let fields: Vec<String> = row
            .iter()
            .enumerate()
            .map(|(i, &x)| {
                if int_cols.contains(&i) {
                    format!("{}", x as i64)
                } else {
                    g17(x)
                }
            })
            .collect();
        csv.row(&fields);
    }
    csv.finish()
}

fn render_json(header: &[&str], rows: &[Vec<f64>]) -> String {
    let objects: Vec<_> = rows
        .iter()
        .map(|row| {
            let mut obj = serde_json::Map::new();
            for (name, &value) in header.iter().zip(row) {
                obj.insert((*name).into(), json!(value));
            }
            serde_json::Value::Object(obj)
        })
        .collect();
    let mut text = serde_json::to_string_pretty(&objects).expect("figure serialization");
    text.push('\n');
    text
}

/// Minimal gnuplot companion for a written CSV.
fn gnuplot_stub(name: FigureName, csv_path: &str) -> String {
    let mut s = String::new();
    s.push_str("set datafile separator ','\n");
    s.push_str("set key autotitle columnhead\n");
    match name {
        FigureName::Fig3 => {
            s.push_str("set xlabel 'lambda'\nset ylabel 'logarithmic negativity (bits)'\n");
            s.push_str(&format!(
                "plot for [col=2:7] '{}' using 1:col with lines\n",
                csv_path
            ));
        }
        FigureName::Fig4 => {
            s.push_str("set logscale x\nset xlabel 'B'\nset ylabel 'i_m'\n");
            s.push_str(&format!(
                "plot '{}' using 2:4 with points pt 7 ps 0.5\n",
                csv_path
            ));
        }
        FigureName::Fig6 => {
            s.push_str("set xlabel 'lambda'\nset ylabel 'logarithmic negativity (bits)'\n");
            s.push_str(&format!(
                "plot '{}' using 1:($3==3 ? $4 : 1/0) with points pt 7 ps 0.5\n",
                csv_path
            ));
        }
    }
    s
}

pub fn run(name: FigureName, config: &RunConfig, gnuplot: bool) -> Result<(), CliError> {
    let (header, rows) = match name {
        FigureName::Fig3 => fig3(config)?,
        FigureName::Fig4 => fig4(config)?,
        FigureName::Fig6 => fig6(config)?,
    };
    let content = match config.format {
        Some(OutputFormat::Json) => render_json(&header, &rows),
        _ => {
            let int_cols: &[usize] = match name {
                FigureName::Fig4 => &[3],
                FigureName::Fig6 => &[2],
                FigureName::Fig3 => &[],
            };
            render_csv(&header, &rows, int_cols)
        }
    };
    emit(config.out.as_deref(), &content)?;
    if gnuplot {
        let out = config.out.as_deref().ok_or_else(|| {
            CliError::Domain("--gnuplot needs --out so the script can reference the CSV".into())
        })?;
        let script = gnuplot_stub(name, &out.display().to_string());
        let path = out.with_extension("gp");
        std::fs::write(&path, script)
            .map_err(|e| CliError::Domain(format!("cannot write {}: {}", path.display(), e)))?;
    }
    Ok(())
}
