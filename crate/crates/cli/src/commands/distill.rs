//! `distill`: full protocol run — malting (worst-case deterministic or
//! seeded sampling) followed by heralded rounds with per-round dephasing.

use std::fmt::Write as _;

use distillery_core::entanglement::logneg_tmss;
use distillery_core::malting::{self, AttemptBound, MaltMode, MaltResult, MaltingParams};
use distillery_core::mashing;
use distillery_core::PureState;
use serde_json::json;

use crate::config::{OutputFormat, RunConfig};
use crate::report::{emit, g17, Csv};
use crate::CliError;

const MAX_MALT_RETRIES: u64 = 100_000;

struct Round {
    round: u64,
    heralding_prob: f64,
    cumulative_prob: f64,
    logneg: f64,
}

struct DistillData {
    lambda: f64,
    transmissivity: f64,
    v: f64,
    seed: Option<u64>,
    f_c: i64,
    /// (copy index, sampled f, retries) per resource copy in sampled mode.
    sampled: Option<Vec<(u64, u64, u64)>>,
    mu: f64,
    resource_logneg: f64,
    tmss_logneg: f64,
    limit_logneg: Option<f64>,
    p_bar_c: f64,
    initial_logneg: f64,
    rounds: Vec<Round>,
}

/// Deterministically derived stream seed for one (copy, retry) pair.
fn mix_seed(seed: u64, copy: u64, retry: u64) -> u64 {
    let mut z = seed
        .wrapping_add(copy.wrapping_mul(0x9e3779b97f4a7c15))
        .wrapping_add(retry.wrapping_mul(0xbf58476d1ce4e5b9));
    z = (z ^ (z >> 30)).wrapping_mul(0xbf58476d1ce4e5b9);
    z = (z ^ (z >> 27)).wrapping_mul(0x94d049bb133111eb);
    z ^ (z >> 31)
}

fn sample_until_success(
    params: &MaltingParams<f64>,
    cap: u64,
    eps: f64,
    seed: u64,
    copy: u64,
) -> Result<(malting::MaltingOutcome<f64>, u64), CliError> {
    for retry in 0..MAX_MALT_RETRIES {
        let mode = MaltMode::Sampled {
            seed: mix_seed(seed, copy, retry),
            cap,
        };
        if let MaltResult::Success(outcome) = malting::malt(params, mode, eps)? {
            return Ok((outcome, retry));
        }
    }
    Err(CliError::Domain(format!(
        "malting did not succeed within {} retries; success probability too small",
        MAX_MALT_RETRIES
    )))
}

fn compute(config: &RunConfig) -> Result<DistillData, CliError> {
    let params = MaltingParams::new(config.lambda, config.transmissivity)?;
    let threshold = malting::max_attempts(&params)?;
    let f_c = match threshold.f_c {
        AttemptBound::Finite(f) if f >= 0 => f,
        AttemptBound::Finite(f) => {
            return Err(CliError::Domain(format!(
                "resource below break-even for every f (strict threshold {})",
                f
            )))
        }
        AttemptBound::Unbounded => {
            return Err(CliError::Domain(
                "T = 1: subtraction never clicks, nothing to distill".into(),
            ))
        }
    };
    let p_bar_c = malting::cumulative_prob(&params, f_c as u64);
    let rounds = config.iterations as usize;

    // Prepare the rounds + 1 resource copies.
    let mut sampled = None;
    let trace;
    let mu;
    match config.seed {
        None => {
            // Worst case: every copy needed all f_c attempts.
            let outcome = match malting::malt(
                &params,
                MaltMode::Fixed { f: f_c as u64 },
                config.eps_trunc,
            )? {
                MaltResult::Success(o) => o,
                MaltResult::Failure { .. } => unreachable!("fixed mode cannot fail"),
            };
            mu = outcome.mu;
            trace = mashing::iterate(&outcome.state, rounds, config.v)?;
        }
        Some(seed) => {
            let mut copies = Vec::with_capacity(rounds + 1);
            let mut log = Vec::new();
            for copy in 0..=(rounds as u64) {
                let (outcome, retries) =
                    sample_until_success(&params, f_c as u64, config.eps_trunc, seed, copy)?;
                log.push((copy, outcome.f, retries));
                copies.push(outcome);
            }
            // Shared truncation across copies of different mu.
            let max_n = copies
                .iter()
                .map(|o| o.state.truncation())
                .max()
                .expect("at least one copy");
            let states: Vec<PureState> = copies
                .iter()
                .map(|o| PureState::subtracted_state(o.mu, max_n))
                .collect::<Result<_, _>>()?;
            mu = copies[0].mu;
            sampled = Some(log);
            trace = iterate_sequence(&states, config.v)?;
        }
    }

    let mut cumulative = 1.0;
    let mut round_rows = Vec::with_capacity(rounds);
    for (i, (&p, &neg)) in trace
        .heralding_probs
        .iter()
        .zip(trace.negativities.iter().skip(1))
        .enumerate()
    {
        if !(p > 0.0 && p <= 1.0 + 1e-12) {
            return Err(CliError::Internal(format!(
                "heralding probability {} outside (0, 1]",
                p
            )));
        }
        cumulative *= p;
        round_rows.push(Round {
            round: i as u64 + 1,
            heralding_prob: p,
            cumulative_prob: cumulative,
            logneg: neg,
        });
    }

    let limit_logneg = if config.seed.is_none() {
        let resource = PureState::subtracted_state_auto(mu, config.eps_trunc)?;
        let limit = mashing::limiting_state(&resource)?;
        Some(distillery_core::entanglement::logneg_pure(&limit)?.log_negativity)
    } else {
        None
    };

    Ok(DistillData {
        lambda: config.lambda,
        transmissivity: config.transmissivity,
        v: config.v,
        seed: config.seed,
        f_c,
        sampled,
        mu,
        resource_logneg: distillery_core::entanglement::logneg_subtracted(mu)?,
        tmss_logneg: logneg_tmss(config.lambda)?,
        limit_logneg,
        p_bar_c,
        initial_logneg: trace.negativities[0],
        rounds: round_rows,
    })
}

/// Round loop with a different resource copy per round (sampled mode).
/// `states[0]` is the initial held copy; each later entry feeds one round.
fn iterate_sequence(
    states: &[PureState],
    v: f64,
) -> Result<distillery_core::mashing::IterationTrace<f64>, CliError> {
    use distillery_core::decoherence::{embed_pure, wait_dephase};
    use distillery_core::entanglement::{logneg_mixed, logneg_pure};
    use distillery_core::mashing::{mash_mixed, mash_pure, IterationTrace, TraceStates};

    let mut heralding = Vec::with_capacity(states.len() - 1);
    if v == 0.0 {
        let mut held = states[0].in_vacuum_gauge()?;
        let mut list = vec![held.clone()];
        let mut negs = vec![logneg_pure(&held)?.log_negativity];
        for fresh in &states[1..] {
            let (raw, p) = mash_pure(&held, &fresh.in_vacuum_gauge()?)?;
            held = raw.in_vacuum_gauge()?;
            heralding.push(p);
            negs.push(logneg_pure(&held)?.log_negativity);
            list.push(held.clone());
        }
        Ok(IterationTrace {
            states: TraceStates::Pure(list),
            heralding_probs: heralding,
            negativities: negs,
        })
    } else {
        let mut held = embed_pure(&states[0])?;
        let mut list = vec![held.clone()];
        let mut negs = vec![logneg_mixed(&held)?.log_negativity];
        for fresh in &states[1..] {
            let dephased = wait_dephase(&held, v)?;
            let (raw, p) = mash_mixed(&dephased, &embed_pure(fresh)?)?;
            held = raw.normalized().0;
            heralding.push(p);
            negs.push(logneg_mixed(&held)?.log_negativity);
            list.push(held.clone());
        }
        Ok(IterationTrace {
            states: TraceStates::Mixed(list),
            heralding_probs: heralding,
            negativities: negs,
        })
    }
}

fn render_text(d: &DistillData) -> String {
    let mut s = String::new();
    let _ = writeln!(s, "distillation report");
    let _ = writeln!(s, "  lambda           = {}", d.lambda);
    let _ = writeln!(s, "  T                = {}", d.transmissivity);
    let _ = writeln!(s, "  v                = {}", d.v);
    match d.seed {
        Some(seed) => {
            let _ = writeln!(s, "  malting          = sampled (seed {})", seed);
        }
        None => {
            let _ = writeln!(s, "  malting          = deterministic worst case (f = f_c)");
        }
    }
    let _ = writeln!(s, "  f_c              = {}", d.f_c);
    let _ = writeln!(s, "  mu               = {}", g17(d.mu));
    let _ = writeln!(s, "  Pbar_c           = {}", g17(d.p_bar_c));
    let _ = writeln!(s, "  logneg_tmss      = {}", g17(d.tmss_logneg));
    let _ = writeln!(s, "  logneg_resource  = {}", g17(d.resource_logneg));
    if let Some(l) = d.limit_logneg {
        let _ = writeln!(s, "  logneg_limit     = {}", g17(l));
    }
    if let Some(log) = &d.sampled {
        let _ = writeln!(s, "  sampled copies (copy,f,retries):");
        for (copy, f, retries) in log {
            let _ = writeln!(s, "    {},{},{}", copy, f, retries);
        }
    }
    let _ = writeln!(s, "  round,heralding_prob,cumulative_prob,logneg");
    let _ = writeln!(s, "  0,,,{}", g17(d.initial_logneg));
    for r in &d.rounds {
        let _ = writeln!(
            s,
            "  {},{},{},{}",
            r.round,
            g17(r.heralding_prob),
            g17(r.cumulative_prob),
            g17(r.logneg)
        );
    }
    s
}

fn render_json(d: &DistillData) -> String {
    let rounds: Vec<_> = d
        .rounds
        .iter()
        .map(|r| {
            json!({
                "round": r.round,
                "heralding_prob": r.heralding_prob,
                "cumulative_prob": r.cumulative_prob,
                "logneg": r.logneg,
            })
        })
        .collect();
    let out = json!({
        "lambda": d.lambda,
        "T": d.transmissivity,
        "v": d.v,
        "seed": d.seed,
        "f_c": d.f_c,
        "mu": d.mu,
        "Pbar_c": d.p_bar_c,
        "logneg_tmss": d.tmss_logneg,
        "logneg_resource": d.resource_logneg,
        "logneg_limit": d.limit_logneg,
        "initial_logneg": d.initial_logneg,
        "sampled": d.sampled.as_ref().map(|log| log.iter().map(|(c, f, r)| json!({
            "copy": c, "f": f, "retries": r
        })).collect::<Vec<_>>()),
        "rounds": rounds,
    });
    let mut text = serde_json::to_string_pretty(&out).expect("report serialization");
    text.push('\n');
    text
}

fn render_csv(d: &DistillData) -> String {
    let mut csv = Csv::new(&["round", "heralding_prob", "cumulative_prob", "logneg"]);
    csv.row(&[
        "0".into(),
        String::new(),
        String::new(),
        g17(d.initial_logneg),
    ]);
    for r in &d.rounds {
        csv.row(&[
            r.round.to_string(),
            g17(r.heralding_prob),
            g17(r.cumulative_prob),
            g17(r.logneg),
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
