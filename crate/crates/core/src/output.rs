//! Byte-stable JSON and CSV rendering. Floats are written with 17 significant digits.

use crate::error::{Error, Result};
use serde::Serialize;
use serde_json::Value;
use std::fmt::Write;

/// A float with 17 significant digits; non-finite values become `null` (JSON) or `nan`/`inf`.
pub fn float(x: f64) -> String {
    if x.is_finite() {
        format!("{x:.16e}")
    } else if x.is_nan() {
        "nan".into()
    } else if x > 0.0 {
        "inf".into()
    } else {
        "-inf".into()
    }
}

fn number(n: &serde_json::Number) -> String {
    if let Some(u) = n.as_u64() {
        u.to_string()
    } else if let Some(i) = n.as_i64() {
        i.to_string()
    } else {
        float(n.as_f64().unwrap_or(f64::NAN))
    }
}

fn write_value(out: &mut String, v: &Value, indent: usize) {
    let pad = |out: &mut String, k: usize| out.extend(std::iter::repeat(' ').take(2 * k));
    match v {
        Value::Null => out.push_str("null"),
        Value::Bool(b) => out.push_str(if *b { "true" } else { "false" }),
        Value::Number(n) => {
            let s = number(n);
            out.push_str(if s == "nan" || s.ends_with("inf") { "null" } else { &s });
        }
        Value::String(s) => out.push_str(&Value::String(s.clone()).to_string()),
        Value::Array(a) if a.is_empty() => out.push_str("[]"),
        Value::Array(a) => {
            out.push_str("[\n");
            for (i, x) in a.iter().enumerate() {
                pad(out, indent + 1);
                write_value(out, x, indent + 1);
                out.push_str(if i + 1 < a.len() { ",\n" } else { "\n" });
            }
            pad(out, indent);
            out.push(']');
        }
        Value::Object(m) if m.is_empty() => out.push_str("{}"),
        Value::Object(m) => {
            out.push_str("{\n");
            for (i, (k, x)) in m.iter().enumerate() {
                pad(out, indent + 1);
                let _ = write!(out, "{}: ", Value::String(k.clone()));
                write_value(out, x, indent + 1);
                out.push_str(if i + 1 < m.len() { ",\n" } else { "\n" });
            }
            pad(out, indent);
            out.push('}');
        }
    }
}

/// Pretty JSON with stable float formatting and key order as serialized.
pub fn to_json<T: Serialize + ?Sized>(v: &T) -> Result<String> {
    let v = serde_json::to_value(v)?;
    let mut s = String::new();
    write_value(&mut s, &v, 0);
    s.push('\n');
    Ok(s)
}

fn cell(v: &Value) -> Result<String> {
    Ok(match v {
        Value::Null => String::new(),
        Value::Bool(b) => b.to_string(),
        Value::Number(n) => number(n),
        Value::String(s) if s.contains([',', '"', '\n']) => format!("\"{}\"", s.replace('"', "\"\"")),
        Value::String(s) => s.clone(),
        _ => return Err(Error::Parse("nested value cannot be written as a CSV cell".into())),
    })
}

/// CSV from a sequence of flat records; the header is the first record's keys.
pub fn to_csv<T: Serialize>(rows: &[T]) -> Result<String> {
    let mut out = String::new();
    let mut header: Option<Vec<String>> = None;
    for r in rows {
        let Value::Object(m) = serde_json::to_value(r)? else {
            return Err(Error::Parse("CSV rows must be records".into()));
        };
        let keys = header.get_or_insert_with(|| {
            let k: Vec<String> = m.keys().cloned().collect();
            out.push_str(&k.join(","));
            out.push('\n');
            k
        });
        let cells: Vec<String> = keys
            .iter()
            .map(|k| cell(m.get(k).unwrap_or(&Value::Null)))
            .collect::<Result<_>>()?;
        out.push_str(&cells.join(","));
        out.push('\n');
    }
    Ok(out)
}
