//! `malt`: resource-preparation report — attempt threshold, break-even root,
//! trajectory probability table, and averaged entanglement gain.

use std::fmt::Write as _;

use distillery_core::malting::{self, AttemptBound, MaltingParams, SubtractionThreshold};
use serde_json::json;

use crate::config::{OutputFormat, RunConfig};
use crate::report::{emit, g17, Csv};
use crate::CliError;

struct MaltData {
    lambda: f64,
    transmissivity: f64,
    generation_prob: f64,
    threshold: SubtractionThreshold<f64>,
    /// (f, P_f, Pbar_f) for f = 0..=f_c when the strict threshold is >= 0.
    table: Vec<(u64, f64, f64)>,
    p_bar_c: Option<f64>,
    gain: Result<f64, String>,
}

fn compute(config: &RunConfig) -> Result<MaltData, CliError> {
    let params = MaltingParams::new(config.lambda, config.transmissivity)?;
    let threshold = malting::max_attempts(&params)?;
    let mut table = Vec::new();
    let mut p_bar_c = None;
    if let AttemptBound::Finite(f_c) = threshold.f_c {
        if f_c >= 0 {
            let mut cum = 0.0;
            for f in 0..=f_c as u64 {
                let p = malting::subtraction_prob(&params, f);
                cum += p;
                table.push((f, p, cum));
            }
            p_bar_c = Some(cum);
        }
    }
    Ok(MaltData {
        lambda: config.lambda,
        transmissivity: config.transmissivity,
        generation_prob: malting::tmss_generation_prob(config.lambda)?,
        threshold,
        table,
        p_bar_c,
        gain: malting::averaged_gain(&params).map_err(|e| e.to_string()),
    })
}

fn bound_str(b: AttemptBound) -> String {
    match b {
        AttemptBound::Finite(f) => f.to_string(),
        AttemptBound::Unbounded => "unbounded".into(),
    }
}

fn render_text(d: &MaltData) -> String {
    let mut s = String::new();
    let _ = writeln!(s, "malting report");
    let _ = writeln!(s, "  lambda             = {}", d.lambda);
    let _ = writeln!(s, "  T                  = {}", d.transmissivity);
    let _ = writeln!(s, "  generation_prob    = {}", g17(d.generation_prob));
    let _ = writeln!(s, "  cubic_root_R       = {}", g17(d.threshold.cubic_root));
    let _ = writeln!(s, "  f_c                = {}", bound_str(d.threshold.f_c));
    let _ = writeln!(
        s,
        "  f_c_inclusive      = {}",
        bound_str(d.threshold.f_c_inclusive)
    );
    let _ = writeln!(
        s,
        "  f_c_asymptotic     = {}",
        bound_str(d.threshold.f_c_asymptotic)
    );
    match d.p_bar_c {
        Some(p) => {
            let _ = writeln!(s, "  Pbar_c             = {}", g17(p));
        }
        None => {
            let _ = writeln!(s, "  Pbar_c             = undefined (no attempt budget)");
        }
    }
    match &d.gain {
        Ok(g) => {
            let _ = writeln!(
                s,
                "  averaged_gain      = {} (inclusive attempt convention)",
                g17(*g)
            );
        }
        Err(e) => {
            let _ = writeln!(s, "  averaged_gain      = undefined ({})", e);
        }
    }
    if !d.table.is_empty() {
        let _ = writeln!(s, "  trajectory probabilities:");
        let _ = writeln!(s, "  f,P_f,Pbar_f");
        for (f, p, cum) in &d.table {
            let _ = writeln!(s, "  {},{},{}", f, g17(*p), g17(*cum));
        }
    }
    s
}

fn render_json(d: &MaltData) -> String {
    let mut out = json!({
        "lambda": d.lambda,
        "T": d.transmissivity,
        "generation_prob": d.generation_prob,
        "cubic_root_R": d.threshold.cubic_root,
        "f_c": d.threshold.f_c.finite(),
        "f_c_inclusive": d.threshold.f_c_inclusive.finite(),
        "f_c_asymptotic": d.threshold.f_c_asymptotic.finite(),
        "Pbar_c": d.p_bar_c,
        "table": d.table.iter().map(|(f, p, cum)| json!({
            "f": f, "P_f": p, "Pbar_f": cum
        })).collect::<Vec<_>>(),
    });
    match &d.gain {
        Ok(g) => out["averaged_gain"] = json!(g),
        Err(e) => out["averaged_gain_error"] = json!(e),
    }
    let mut text = serde_json::to_string_pretty(&out).expect("report serialization");
    text.push('\n');
    text
}

fn render_csv(d: &MaltData) -> String {
    let mut csv = Csv::new(&["f", "P_f", "Pbar_f"]);
    for (f, p, cum) in &d.table {
        csv.row(&[f.to_string(), g17(*p), g17(*cum)]);
    }
    csv.finish()
}

pub fn run(config: &RunConfig) -> Result<(), CliError> {
    let data = compute(config)?;
    let content = match config.format {
        Some(OutputFormat::Json) => render_json(&data),
        Some(OutputFormat::Csv) => render_csv(&data),
        None => render_text(&data),
    };
    emit(config.out.as_deref(), &content)
}
