//! Model files.
//!
//! ```json
//! {"n": 2, "A": [[1, 0], [0, 1]], "B": [[1, "1/2"], ["1/2", 2]], "S": [[1, 0], [0, 1]]}
//! ```
//!
//! Entries are JSON integers, decimal numbers or strings `"p/q"`; all are
//! read exactly. Instead of `S` a model may give `samples`, either a list of
//! `n`-vectors or the path of a CSV file with one vector per row (relative
//! to the model file). `S` is then their sample covariance.

use std::path::Path;

use covdeg_core::pencil::{sample_covariance, Pencil, PencilError, SymMatrix};
use covdeg_core::ratpoly::{parse_rational, Rational};
use num_traits::ToPrimitive;
use serde_json::{json, Value};

use crate::error::CliError;

fn parse_err(context: impl Into<String>, message: impl Into<String>) -> CliError {
    CliError::Parse {
        context: context.into(),
        message: message.into(),
    }
}

fn entry(v: &Value, field: &str) -> Result<Rational, CliError> {
    let text = match v {
        Value::Number(n) => n.to_string(),
        Value::String(s) => s.clone(),
        other => {
            return Err(parse_err(
                field,
                format!("expected an integer, a number or a \"p/q\" string, found {other}"),
            ))
        }
    };
    parse_rational(&text).map_err(|_| parse_err(field, format!("not an exact rational: {text:?}")))
}

fn vector(v: &Value, field: &str) -> Result<Vec<Rational>, CliError> {
    let items = v
        .as_array()
        .ok_or_else(|| parse_err(field, "expected an array"))?;
    items
        .iter()
        .enumerate()
        .map(|(j, x)| entry(x, &format!("{field}[{j}]")))
        .collect()
}

fn matrix(obj: &serde_json::Map<String, Value>, name: &str, n: usize) -> Result<SymMatrix, CliError> {
    let rows = obj
        .get(name)
        .ok_or_else(|| parse_err(name, "missing field"))?
        .as_array()
        .ok_or_else(|| parse_err(name, "expected an array of rows"))?;
    let mut out = Vec::with_capacity(rows.len());
    for (i, row) in rows.iter().enumerate() {
        out.push(vector(row, &format!("{name}[{i}]"))?);
    }
    let width = out.iter().map(Vec::len).max().unwrap_or(0);
    if out.len() != n || out.iter().any(|r| r.len() != n) {
        return Err(CliError::Model {
            field: name.to_string(),
            source: PencilError::DimensionMismatch {
                expected: n,
                found: format!("{}x{}", out.len(), width),
            },
        });
    }
    SymMatrix::new(out).map_err(|source| CliError::Model {
        field: name.to_string(),
        source,
    })
}

/// Reads one sample vector per CSV row.
pub fn load_samples_csv(path: &Path) -> Result<Vec<Vec<Rational>>, CliError> {
    let shown = path.display().to_string();
    let mut reader = csv::ReaderBuilder::new()
        .has_headers(false)
        .trim(csv::Trim::All)
        .comment(Some(b'#'))
        .flexible(true)
        .from_path(path)
        .map_err(|e| match e.into_kind() {
            csv::ErrorKind::Io(source) => CliError::Io {
                path: shown.clone(),
                source,
            },
            other => parse_err(&shown, format!("{other:?}")),
        })?;
    let mut rows = Vec::new();
    for record in reader.records() {
        let record = record.map_err(|e| parse_err(&shown, e.to_string()))?;
        let line = record.position().map_or(0, |p| p.line());
        let row = record
            .iter()
            .enumerate()
            .map(|(j, cell)| {
                parse_rational(cell)
                    .map_err(|_| parse_err(format!("{shown}:{line} column {}", j + 1), format!("not an exact rational: {cell:?}")))
            })
            .collect::<Result<Vec<_>, _>>()?;
        rows.push(row);
    }
    Ok(rows)
}

/// Parses a model from JSON text. `base` resolves a CSV `samples` path.
pub fn parse_model(text: &str, origin: &str, base: &Path) -> Result<Pencil, CliError> {
    let value: Value = serde_json::from_str(text)
        .map_err(|e| parse_err(format!("{origin}:{}:{}", e.line(), e.column()), e.to_string()))?;
    let obj = value
        .as_object()
        .ok_or_else(|| parse_err(origin, "expected a JSON object"))?;
    let n = obj
        .get("n")
        .ok_or_else(|| parse_err("n", "missing field"))?
        .as_u64()
        .filter(|&n| n >= 2)
        .ok_or_else(|| parse_err("n", "expected an integer of at least 2"))? as usize;
    let a = matrix(obj, "A", n)?;
    let b = matrix(obj, "B", n)?;
    let s = match (obj.get("S"), obj.get("samples")) {
        (Some(_), Some(_)) => return Err(parse_err("samples", "give either S or samples, not both")),
        (None, None) => return Err(parse_err("S", "missing field (or give samples)")),
        (Some(_), None) => matrix(obj, "S", n)?,
        (None, Some(samples)) => {
            let rows = match samples {
                Value::String(path) => load_samples_csv(&base.join(path))?,
                Value::Array(items) => items
                    .iter()
                    .enumerate()
                    .map(|(i, v)| vector(v, &format!("samples[{i}]")))
                    .collect::<Result<Vec<_>, _>>()?,
                _ => return Err(parse_err("samples", "expected an array of vectors or a CSV path")),
            };
            if let Some((i, row)) = rows.iter().enumerate().find(|(_, r)| r.len() != n) {
                return Err(CliError::Model {
                    field: format!("samples[{i}]"),
                    source: PencilError::RaggedData {
                        index: i,
                        len: row.len(),
                        expected: n,
                    },
                });
            }
            sample_covariance(&rows).map_err(|source| CliError::Model {
                field: "samples".to_string(),
                source,
            })?
        }
    };
    Pencil::new(a, b, s).map_err(|source| CliError::Model {
        field: "model".to_string(),
        source,
    })
}

pub fn load_model(path: &Path) -> Result<Pencil, CliError> {
    let text = std::fs::read_to_string(path).map_err(|source| CliError::Io {
        path: path.display().to_string(),
        source,
    })?;
    let base = path.parent().unwrap_or_else(|| Path::new("."));
    parse_model(&text, &path.display().to_string(), base)
}

/// An integer when the value is one that fits `i64`, otherwise `"p/q"`.
pub fn rational_json(r: &Rational) -> Value {
    match r.is_integer().then(|| r.numer().to_i64()).flatten() {
        Some(v) => json!(v),
        None => json!(r.to_string()),
    }
}

fn matrix_json(m: &SymMatrix) -> Value {
    Value::Array(
        m.rows()
            .iter()
            .map(|row| Value::Array(row.iter().map(rational_json).collect()))
            .collect(),
    )
}

/// The model in file form, with `S` explicit.
pub fn model_json(p: &Pencil) -> Value {
    json!({
        "n": p.n(),
        "A": matrix_json(&p.a),
        "B": matrix_json(&p.b),
        "S": matrix_json(&p.s),
    })
}
