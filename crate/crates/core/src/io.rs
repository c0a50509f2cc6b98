//! Text and JSON formats: boundary files, interaction matrices, external fields.
//!
//! Boundary files hold one "vertex value" pair per line. Hard-core values are 0 or 1; spin
//! colors are written 1..=q in files and stored 0-based. Blank lines and lines starting with
//! `#` are ignored.

use num_complex::Complex64;
use serde_json::Value;

use crate::error::{Error, Result};
use crate::exact::{Fields, SpinMatrix};
use crate::graph::{HardcoreBoundary, SpinBoundary};

fn parse_err(line: usize, message: impl Into<String>) -> Error {
    Error::Parse {
        line,
        message: message.into(),
    }
}

fn pairs(text: &str) -> Result<Vec<(usize, usize, usize)>> {
    let mut out = Vec::new();
    for (idx, raw) in text.lines().enumerate() {
        let line = raw.trim();
        if line.is_empty() || line.starts_with('#') {
            continue;
        }
        let fields: Vec<&str> = line.split_whitespace().collect();
        if fields.len() != 2 {
            return Err(parse_err(idx + 1, format!("expected \"vertex value\", found {line:?}")));
        }
        let num = |s: &str| {
            s.parse::<usize>()
                .map_err(|_| parse_err(idx + 1, format!("not a nonnegative integer: {s:?}")))
        };
        out.push((idx + 1, num(fields[0])?, num(fields[1])?));
    }
    Ok(out)
}

pub fn parse_hardcore_boundary(text: &str) -> Result<HardcoreBoundary> {
    let mut out = Vec::new();
    for (line, v, val) in pairs(text)? {
        if val > 1 {
            return Err(parse_err(line, format!("hard-core value must be 0 or 1, found {val}")));
        }
        out.push((v, val == 1));
    }
    Ok(HardcoreBoundary::from_pairs(out))
}

/// Colors in the file are 1-based.
pub fn parse_spin_boundary(text: &str, q: usize) -> Result<SpinBoundary> {
    let mut out = Vec::new();
    for (line, v, c) in pairs(text)? {
        if c == 0 || c > q {
            return Err(parse_err(line, format!("color must lie in 1..={q}, found {c}")));
        }
        out.push((v, c - 1));
    }
    SpinBoundary::from_pairs(q, out)
}

/// A number or a `[re, im]` pair.
pub fn complex_from_json(v: &Value) -> Result<Complex64> {
    let bad = || Error::Parse {
        line: 0,
        message: format!("expected a number or [re, im], found {v}"),
    };
    match v {
        Value::Number(n) => Ok(Complex64::new(n.as_f64().ok_or_else(bad)?, 0.0)),
        Value::Array(a) if a.len() == 2 => Ok(Complex64::new(
            a[0].as_f64().ok_or_else(bad)?,
            a[1].as_f64().ok_or_else(bad)?,
        )),
        _ => Err(bad()),
    }
}

pub fn complex_to_json(c: Complex64) -> Value {
    serde_json::json!([c.re, c.im])
}

fn json(text: &str) -> Result<Value> {
    serde_json::from_str(text).map_err(|e| Error::Parse {
        line: e.line(),
        message: e.to_string(),
    })
}

/// JSON array of rows.
pub fn parse_matrix_json(text: &str) -> Result<SpinMatrix> {
    let rows = match json(text)? {
        Value::Array(rows) => rows,
        other => return Err(parse_err(0, format!("matrix must be an array of rows, found {other}"))),
    };
    let rows = rows
        .iter()
        .map(|r| match r {
            Value::Array(entries) => entries.iter().map(complex_from_json).collect::<Result<Vec<_>>>(),
            other => Err(parse_err(0, format!("matrix row must be an array, found {other}"))),
        })
        .collect::<Result<Vec<_>>>()?;
    SpinMatrix::from_rows(rows)
}

/// JSON object mapping vertex (as a string key) to an array of `q` field values;
/// vertices not mentioned keep all-ones fields.
pub fn parse_fields_json(text: &str, n: usize, q: usize) -> Result<Fields> {
    let map = match json(text)? {
        Value::Object(m) => m,
        other => return Err(parse_err(0, format!("fields must be an object, found {other}"))),
    };
    let mut f = Fields::ones(n, q);
    for (key, val) in &map {
        let v: usize = key
            .parse()
            .map_err(|_| parse_err(0, format!("field key {key:?} is not a vertex index")))?;
        if v >= n {
            return Err(Error::VertexOutOfRange { vertex: v, n });
        }
        let arr = val
            .as_array()
            .filter(|a| a.len() == q)
            .ok_or_else(|| parse_err(0, format!("fields of vertex {v} must be an array of {q} values")))?;
        for (c, x) in arr.iter().enumerate() {
            f.set(v, c, complex_from_json(x)?);
        }
    }
    Ok(f)
}

/// `a`, `a+bi`, `a-bi`, `bi`, or `a,b`.
pub fn parse_complex(s: &str) -> Result<Complex64> {
    let t = s.trim().replace(' ', "");
    let bad = || parse_err(0, format!("not a complex number: {s:?}"));
    if let Some((a, b)) = t.split_once(',') {
        return Ok(Complex64::new(a.parse().map_err(|_| bad())?, b.parse().map_err(|_| bad())?));
    }
    if let Some(body) = t.strip_suffix('i').or_else(|| t.strip_suffix('j')) {
        // split at the last sign that is not part of an exponent or the leading sign
        let bytes = body.as_bytes();
        let split = (1..bytes.len())
            .rev()
            .find(|&k| (bytes[k] == b'+' || bytes[k] == b'-') && !matches!(bytes[k - 1], b'e' | b'E'));
        let (re, im) = match split {
            Some(k) => (&body[..k], &body[k..]),
            None => ("0", body),
        };
        let im = match im {
            "" | "+" => "1",
            "-" => "-1",
            other => other,
        };
        return Ok(Complex64::new(re.parse().map_err(|_| bad())?, im.parse().map_err(|_| bad())?));
    }
    Ok(Complex64::new(t.parse().map_err(|_| bad())?, 0.0))
}
