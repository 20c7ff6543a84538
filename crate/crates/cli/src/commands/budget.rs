//! `budget`: iteration count that fits the time-bandwidth product, reported
//! under every documented convention pair, with the cost curve of the
//! selected one.

use std::fmt::Write as _;

use distillery_core::budget::{
    budget_survey, BudgetReport, BudgetStatus, FcConvention, MuConvention,
};
use distillery_core::malting::MaltingParams;
use serde_json::json;

use crate::config::{MuConventionArg, OutputFormat, RunConfig};
use crate::report::{emit, g17, Csv};
use crate::CliError;

fn mu_conv_name(c: MuConvention) -> &'static str {
    match c {
        MuConvention::WorstCaseFc => "worst_case_fc",
        MuConvention::BestCaseF0 => "best_case_f0",
    }
}

fn fc_conv_name(c: FcConvention) -> &'static str {
    match c {
        FcConvention::Strict => "strict",
        FcConvention::Inclusive => "inclusive",
    }
}

fn status_name(s: BudgetStatus) -> &'static str {
    match s {
        BudgetStatus::Feasible => "feasible",
        BudgetStatus::InfeasibleForDistillation => "infeasible_for_distillation",
        BudgetStatus::DegenerateFreeCost => "degenerate_free_cost",
        BudgetStatus::UnboundedThreshold => "unbounded_threshold",
    }
}

fn selected_mu(config: &RunConfig) -> MuConvention {
    match config.mu_convention {
        MuConventionArg::WorstCaseFc => MuConvention::WorstCaseFc,
        MuConventionArg::BestCaseF0 => MuConvention::BestCaseF0,
    }
}

struct BudgetData {
    b: f64,
    reports: Vec<BudgetReport<f64>>,
    /// Index of the report whose cost curve is shown: the selected mu
    /// convention, strict threshold preferred, inclusive when strict
    /// degenerates.
    curve_of: Option<usize>,
}

fn compute(config: &RunConfig) -> Result<BudgetData, CliError> {
    let params = MaltingParams::new(config.lambda, config.transmissivity)?;
    let reports = budget_survey(&params, config.bandwidth)?;
    let mu = selected_mu(config);
    let pick = |fc: FcConvention| {
        reports.iter().position(|r| {
            r.mu_convention == mu && r.fc_convention == fc && r.status == BudgetStatus::Feasible
        })
    };
    let curve_of = pick(FcConvention::Strict).or_else(|| pick(FcConvention::Inclusive));
    Ok(BudgetData {
        b: config.bandwidth,
        reports,
        curve_of,
    })
}

fn render_text(d: &BudgetData) -> String {
    let mut s = String::new();
    let _ = writeln!(s, "budget report (B = {})", d.b);
    let _ = writeln!(
        s,
        "  fc_convention,mu_convention,f_c,mu,Pbar_c,p_s_inf,i_m,status"
    );
    for r in &d.reports {
        let _ = writeln!(
            s,
            "  {},{},{},{},{},{},{},{}",
            fc_conv_name(r.fc_convention),
            mu_conv_name(r.mu_convention),
            r.f_c,
            g17(r.mu),
            g17(r.p_bar_c),
            g17(r.p_s_inf),
            r.i_m,
            status_name(r.status)
        );
    }
    match d.curve_of {
        Some(idx) => {
            let r = &d.reports[idx];
            let _ = writeln!(
                s,
                "  cost curve ({} / {}): i,cost",
                fc_conv_name(r.fc_convention),
                mu_conv_name(r.mu_convention)
            );
            for (i, cost) in &r.lhs_curve {
                let _ = writeln!(s, "  {},{}", i, g17(*cost));
            }
        }
        None => {
            let _ = writeln!(
                s,
                "  cost curve: none (no feasible convention at these parameters)"
            );
        }
    }
    s
}

fn render_json(d: &BudgetData) -> String {
    let reports: Vec<_> = d
        .reports
        .iter()
        .map(|r| {
            json!({
                "fc_convention": fc_conv_name(r.fc_convention),
                "mu_convention": mu_conv_name(r.mu_convention),
                "f_c": r.f_c,
                "mu": r.mu,
                "Pbar_c": r.p_bar_c,
                "p_s_inf": r.p_s_inf,
                "i_m": r.i_m,
                "status": status_name(r.status),
                "lhs_curve": r.lhs_curve.iter().map(|(i, c)| json!([i, c])).collect::<Vec<_>>(),
            })
        })
        .collect();
    let out = json!({
        "B": d.b,
        "reports": reports,
    });
    let mut text = serde_json::to_string_pretty(&out).expect("report serialization");
    text.push('\n');
    text
}

fn render_csv(d: &BudgetData) -> String {
    let mut csv = Csv::new(&[
        "fc_convention",
        "mu_convention",
        "f_c",
        "mu",
        "Pbar_c",
        "p_s_inf",
        "i_m",
        "status",
    ]);
    for r in &d.reports {
        csv.row(&[
            fc_conv_name(r.fc_convention).into(),
            mu_conv_name(r.mu_convention).into(),
            r.f_c.to_string(),
            g17(r.mu),
            g17(r.p_bar_c),
            g17(r.p_s_inf),
            r.i_m.to_string(),
            status_name(r.status).into(),
        ]);
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
