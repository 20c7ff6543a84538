//! JSON state files.
//!
//! Schema:
//! `{"schema": "distillery-state-v1", "kind": "pure" | "mixed",
//!   "truncation": N, "coefficients": [...] | "cmat": [[...], ...],
//!   "normalized": bool}`
//!
//! Writing is hand-rolled so every float carries 17 significant digits
//! (lossless for f64) and the output is byte-stable; parsing goes through
//! `serde_json`.

use std::fmt::Write as _;

use nalgebra::DMatrix;
use serde_json::Value;

use crate::error::{Error, Result};
use crate::fock::{SchmidtCorrelatedDensity, SchmidtPureState};

pub const SCHEMA: &str = "distillery-state-v1";

/// A state as stored on disk.
#[derive(Debug, Clone)]
pub enum StateFile {
    Pure {
        state: SchmidtPureState<f64>,
        normalized: bool,
    },
    Mixed {
        state: SchmidtCorrelatedDensity<f64>,
        normalized: bool,
    },
}

/// 17 significant digits, enough to round-trip any f64 exactly.
pub fn g17(x: f64) -> String {
    format!("{:.16e}", x)
}

/// Serializes a state to the JSON schema (LF line endings, stable bytes).
pub fn to_json(file: &StateFile) -> String {
    let mut out = String::new();
    match file {
        StateFile::Pure { state, normalized } => {
            out.push_str("{\n");
            let _ = writeln!(out, "  \"schema\": \"{}\",", SCHEMA);
            out.push_str("  \"kind\": \"pure\",\n");
            let _ = writeln!(out, "  \"truncation\": {},", state.truncation());
            out.push_str("  \"coefficients\": [");
            for (i, &c) in state.coeffs().iter().enumerate() {
                if i > 0 {
                    out.push_str(", ");
                }
                out.push_str(&g17(c));
            }
            out.push_str("],\n");
            let _ = writeln!(out, "  \"normalized\": {}", normalized);
            out.push_str("}\n");
        }
        StateFile::Mixed { state, normalized } => {
            out.push_str("{\n");
            let _ = writeln!(out, "  \"schema\": \"{}\",", SCHEMA);
            out.push_str("  \"kind\": \"mixed\",\n");
            let _ = writeln!(out, "  \"truncation\": {},", state.truncation());
            out.push_str("  \"cmat\": [\n");
            let c = state.cmat();
            for i in 0..c.nrows() {
                out.push_str("    [");
                for j in 0..c.ncols() {
                    if j > 0 {
                        out.push_str(", ");
                    }
                    out.push_str(&g17(c[(i, j)]));
                }
                out.push(']');
                if i + 1 < c.nrows() {
                    out.push(',');
                }
                out.push('\n');
            }
            out.push_str("  ],\n");
            let _ = writeln!(out, "  \"normalized\": {}", normalized);
            out.push_str("}\n");
        }
    }
    out
}

/// Parses and validates a state file.
pub fn from_json(text: &str) -> Result<StateFile> {
    let value: Value =
        serde_json::from_str(text).map_err(|e| Error::StateFile(format!("bad JSON: {}", e)))?;
    let obj = value
        .as_object()
        .ok_or_else(|| Error::StateFile("top level must be an object".into()))?;
    let schema = obj
        .get("schema")
        .and_then(Value::as_str)
        .ok_or_else(|| Error::StateFile("missing schema".into()))?;
    if schema != SCHEMA {
        return Err(Error::StateFile(format!(
            "unsupported schema {:?}, expected {:?}",
            schema, SCHEMA
        )));
    }
    let kind = obj
        .get("kind")
        .and_then(Value::as_str)
        .ok_or_else(|| Error::StateFile("missing kind".into()))?;
    let truncation =
        obj.get("truncation")
            .and_then(Value::as_u64)
            .ok_or_else(|| Error::StateFile("missing truncation".into()))? as usize;
    let normalized = obj
        .get("normalized")
        .and_then(Value::as_bool)
        .ok_or_else(|| Error::StateFile("missing normalized flag".into()))?;

    match kind {
        "pure" => {
            let coeffs = obj
                .get("coefficients")
                .and_then(Value::as_array)
                .ok_or_else(|| Error::StateFile("missing coefficients".into()))?;
            let coeffs: Vec<f64> = coeffs
                .iter()
                .map(|v| {
                    v.as_f64()
                        .ok_or_else(|| Error::StateFile("non-numeric coefficient".into()))
                })
                .collect::<Result<_>>()?;
            if coeffs.len() != truncation + 1 {
                return Err(Error::StateFile(format!(
                    "truncation {} does not match {} coefficients",
                    truncation,
                    coeffs.len()
                )));
            }
            let state = SchmidtPureState::new(coeffs, 0.0)?;
            if normalized && (state.norm_sqr() - 1.0).abs() > 1e-12 {
                return Err(Error::StateFile(
                    "state marked normalized but squared norm differs from 1".into(),
                ));
            }
            Ok(StateFile::Pure { state, normalized })
        }
        "mixed" => {
            let rows = obj
                .get("cmat")
                .and_then(Value::as_array)
                .ok_or_else(|| Error::StateFile("missing cmat".into()))?;
            if rows.len() != truncation + 1 {
                return Err(Error::StateFile(format!(
                    "truncation {} does not match {} rows",
                    truncation,
                    rows.len()
                )));
            }
            let dim = truncation + 1;
            let mut cmat = DMatrix::<f64>::zeros(dim, dim);
            for (i, row) in rows.iter().enumerate() {
                let row = row
                    .as_array()
                    .ok_or_else(|| Error::StateFile("cmat row is not an array".into()))?;
                if row.len() != dim {
                    return Err(Error::StateFile("ragged cmat".into()));
                }
                for (j, v) in row.iter().enumerate() {
                    cmat[(i, j)] = v
                        .as_f64()
                        .ok_or_else(|| Error::StateFile("non-numeric cmat entry".into()))?;
                }
            }
            let state = SchmidtCorrelatedDensity::new(cmat)?;
            if normalized && (state.trace() - 1.0).abs() > 1e-12 {
                return Err(Error::StateFile(
                    "state marked normalized but trace differs from 1".into(),
                ));
            }
            Ok(StateFile::Mixed { state, normalized })
        }
        other => Err(Error::StateFile(format!("unknown kind {:?}", other))),
    }
}
