//! Text/JSON input and output for matrices, verdicts, intervals, and region
//! samples. Under the exact backend all numeric JSON output is stringified
//! rationals; the float backend emits plain numbers.

use serde_json::{json, Map, Value};
use thiserror::Error;

use crate::completion::{PartialSymMatrix, RegionPoint};
use crate::criterion::Verdict;
use crate::matrix::{MatrixError, SymMatrix};
use crate::quadratic::{Bound, Endpoint, Interval};
use crate::scalar::{Scalar, ScalarParseError};

#[derive(Debug, Error)]
pub enum IoError {
    #[error("cannot parse value {text:?}: {source}")]
    BadValue {
        text: String,
        #[source]
        source: ScalarParseError,
    },
    #[error("invalid JSON: {0}")]
    Json(String),
    #[error("matrix is empty")]
    Empty,
    #[error("declared dimension {declared} does not match {got} rows")]
    DimensionMismatch { declared: usize, got: usize },
    #[error(transparent)]
    Matrix(#[from] MatrixError),
}

fn parse_token<S: Scalar>(tok: &str) -> Result<Option<S>, IoError> {
    if tok == "?" {
        return Ok(None);
    }
    S::parse(tok)
        .map(Some)
        .map_err(|source| IoError::BadValue { text: tok.to_string(), source })
}

/// Whitespace text format: one row per nonempty line, `?` marks a missing
/// entry.
pub fn parse_partial_text<S: Scalar>(text: &str) -> Result<PartialSymMatrix<S>, IoError> {
    let rows: Vec<Vec<Option<S>>> = text
        .lines()
        .map(str::trim)
        .filter(|l| !l.is_empty() && !l.starts_with('#'))
        .map(|l| l.split_whitespace().map(parse_token).collect())
        .collect::<Result<_, _>>()?;
    if rows.is_empty() {
        return Err(IoError::Empty);
    }
    Ok(PartialSymMatrix::from_rows(rows)?)
}

/// Fully observed text matrix; `?` tokens are rejected.
pub fn parse_matrix_text<S: Scalar>(text: &str) -> Result<SymMatrix<S>, IoError> {
    let p = parse_partial_text::<S>(text)?;
    p.to_matrix().map_err(|_| {
        IoError::Json("matrix has missing entries; use a completion command".into())
    })
}

fn parse_json_entry<S: Scalar>(v: &Value) -> Result<Option<S>, IoError> {
    match v {
        Value::Null => Ok(None),
        // numbers go through their decimal rendering, so 0.8 parses to 4/5
        // under the exact backend rather than its binary approximation
        Value::Number(n) => parse_token(&n.to_string()),
        Value::String(s) => parse_token(s),
        other => Err(IoError::Json(format!("entry must be number, string, or null, got {other}"))),
    }
}

/// JSON format: `{"m": int, "entries": [[number|string|null, ...], ...]}`.
/// `"m"` is optional; when present it must match the row count.
pub fn parse_partial_json<S: Scalar>(text: &str) -> Result<PartialSymMatrix<S>, IoError> {
    let v: Value = serde_json::from_str(text).map_err(|e| IoError::Json(e.to_string()))?;
    let obj = v.as_object().ok_or_else(|| IoError::Json("top level must be an object".into()))?;
    let entries = obj
        .get("entries")
        .and_then(Value::as_array)
        .ok_or_else(|| IoError::Json("missing \"entries\" array".into()))?;
    let rows: Vec<Vec<Option<S>>> = entries
        .iter()
        .map(|row| {
            row.as_array()
                .ok_or_else(|| IoError::Json("each row must be an array".into()))?
                .iter()
                .map(parse_json_entry)
                .collect()
        })
        .collect::<Result<_, _>>()?;
    if rows.is_empty() {
        return Err(IoError::Empty);
    }
    if let Some(m) = obj.get("m").and_then(Value::as_u64) {
        if m as usize != rows.len() {
            return Err(IoError::DimensionMismatch { declared: m as usize, got: rows.len() });
        }
    }
    Ok(PartialSymMatrix::from_rows(rows)?)
}

/// Auto-detecting loader: JSON when the text starts with `{`, else the
/// whitespace format.
pub fn parse_partial_auto<S: Scalar>(text: &str) -> Result<PartialSymMatrix<S>, IoError> {
    if text.trim_start().starts_with('{') {
        parse_partial_json(text)
    } else {
        parse_partial_text(text)
    }
}

pub fn parse_matrix_auto<S: Scalar>(text: &str) -> Result<SymMatrix<S>, IoError> {
    let p = parse_partial_auto::<S>(text)?;
    p.to_matrix()
        .map_err(|_| IoError::Json("matrix has missing entries; use a completion command".into()))
}

/// Stringified rational under the exact backend, plain number otherwise.
pub fn scalar_json<S: Scalar>(v: &S) -> Value {
    if S::EXACT {
        Value::String(v.to_string())
    } else {
        json!(v.to_f64())
    }
}

pub fn matrix_to_json<S: Scalar>(x: &SymMatrix<S>) -> Value {
    let entries: Vec<Value> = (1..=x.dim())
        .map(|i| Value::Array((1..=x.dim()).map(|j| scalar_json(x.get(i, j))).collect()))
        .collect();
    json!({"m": x.dim(), "entries": entries})
}

pub fn partial_to_json<S: Scalar>(p: &PartialSymMatrix<S>) -> Value {
    let entries: Vec<Value> = (1..=p.dim())
        .map(|i| {
            Value::Array(
                (1..=p.dim())
                    .map(|j| p.get(i, j).map_or(Value::Null, |v| scalar_json(v)))
                    .collect(),
            )
        })
        .collect();
    json!({"m": p.dim(), "entries": entries})
}

pub fn matrix_to_text<S: Scalar>(x: &SymMatrix<S>) -> String {
    (1..=x.dim())
        .map(|i| {
            (1..=x.dim())
                .map(|j| x.get(i, j).to_string())
                .collect::<Vec<_>>()
                .join(" ")
        })
        .collect::<Vec<_>>()
        .join("\n")
        + "\n"
}

/// Verdict JSON: `{"psd": bool, "witness": [ints]|null, "det_evals": int}`.
/// The same shape reports PD checks; the key names the positivity verdict.
pub fn verdict_json(verdict: &Verdict, det_evals: usize) -> Value {
    json!({
        "psd": verdict.is_positive,
        "witness": verdict.witness.as_ref().map(|w| w.indices().to_vec()),
        "det_evals": det_evals,
    })
}

fn endpoint_json<S: Scalar>(e: &Endpoint<S>, prefix: &str, out: &mut Map<String, Value>) {
    let rendered = if S::EXACT {
        Value::String(e.display())
    } else {
        json!(e.approx())
    };
    out.insert(prefix.to_string(), rendered);
    out.insert(format!("{prefix}_base"), scalar_json(&e.base));
    out.insert(format!("{prefix}_coeff"), scalar_json(&e.coeff));
    out.insert(format!("{prefix}_radicand"), scalar_json(&e.radicand));
}

fn bound_json<S: Scalar>(b: &Bound<S>, prefix: &str, out: &mut Map<String, Value>) {
    match b {
        Bound::Finite(e) => endpoint_json(e, prefix, out),
        Bound::NegInf => {
            out.insert(prefix.to_string(), Value::String("-inf".into()));
        }
        Bound::PosInf => {
            out.insert(prefix.to_string(), Value::String("+inf".into()));
        }
    }
}

/// Interval JSON: `{"empty": bool, "lo": ..., "lo_radicand": ...,
/// "open_lo": bool, "hi": ..., ...}`. Exact endpoints render as
/// `"p/q + r/s*sqrt(d)"`.
pub fn interval_json<S: Scalar>(interval: &Interval<S>) -> Value {
    let mut out = Map::new();
    match interval {
        Interval::Empty => {
            out.insert("empty".into(), Value::Bool(true));
        }
        Interval::Range { lo, hi, open_lo, open_hi } => {
            out.insert("empty".into(), Value::Bool(false));
            bound_json(lo, "lo", &mut out);
            bound_json(hi, "hi", &mut out);
            out.insert("open_lo".into(), Value::Bool(*open_lo));
            out.insert("open_hi".into(), Value::Bool(*open_hi));
            if let Some(r) = interval.representative() {
                out.insert("representative".into(), scalar_json(&r));
            }
        }
    }
    Value::Object(out)
}

/// Region CSV with one row per sampled `(x1, x2)` grid point.
pub fn region_csv<S: Scalar>(points: &[RegionPoint<S>]) -> String {
    let mut out = String::from("x1,x2,feasible_Y,feasible_Z,feasible_both\n");
    for p in points {
        out.push_str(&format!(
            "{},{},{},{},{}\n",
            p.v1.to_f64(),
            p.v2.to_f64(),
            p.feasible_first,
            p.feasible_second,
            p.feasible_both()
        ));
    }
    out
}
