//! Deterministic JSON and CSV emission.
//!
//! Floats are printed in scientific notation with 17 significant digits, so
//! every `f64` round-trips and identical inputs give identical bytes. Object
//! keys come out sorted because `serde_json::Map` is ordered.

use std::fmt::Write as _;
use std::fs;
use std::path::{Path, PathBuf};

use serde::Serialize;
use serde_json::Value;

use crate::error::CliError;

pub fn float(x: f64) -> String {
    if x.is_finite() {
        format!("{x:.16e}")
    } else {
        // Only reachable from CSV; JSON maps non-finite values to null upstream.
        format!("{x}")
    }
}

pub fn to_json<T: Serialize>(doc: &T) -> Result<String, CliError> {
    let value = serde_json::to_value(doc).map_err(|e| CliError::Internal(e.to_string()))?;
    let mut out = String::new();
    write_value(&value, 0, &mut out);
    out.push('\n');
    Ok(out)
}

fn write_value(v: &Value, depth: usize, out: &mut String) {
    let pad = |d: usize, out: &mut String| out.extend(std::iter::repeat_n("  ", d));
    match v {
        Value::Null => out.push_str("null"),
        Value::Bool(b) => out.push_str(if *b { "true" } else { "false" }),
        Value::Number(n) => match (n.as_u64(), n.as_i64()) {
            (Some(u), _) if !n.is_f64() => write!(out, "{u}").unwrap(),
            (_, Some(i)) if !n.is_f64() => write!(out, "{i}").unwrap(),
            _ => out.push_str(&float(n.as_f64().unwrap_or(f64::NAN))),
        },
        Value::String(s) => out.push_str(&serde_json::to_string(s).expect("strings always serialize")),
        Value::Array(items) if items.is_empty() => out.push_str("[]"),
        Value::Array(items) if items.iter().all(|x| !x.is_array() && !x.is_object()) => {
            out.push('[');
            for (k, x) in items.iter().enumerate() {
                if k > 0 {
                    out.push_str(", ");
                }
                write_value(x, depth, out);
            }
            out.push(']');
        }
        Value::Array(items) => {
            out.push_str("[\n");
            for (k, x) in items.iter().enumerate() {
                pad(depth + 1, out);
                write_value(x, depth + 1, out);
                out.push_str(if k + 1 < items.len() { ",\n" } else { "\n" });
            }
            pad(depth, out);
            out.push(']');
        }
        Value::Object(map) if map.is_empty() => out.push_str("{}"),
        Value::Object(map) => {
            out.push_str("{\n");
            for (k, (key, x)) in map.iter().enumerate() {
                pad(depth + 1, out);
                out.push_str(&serde_json::to_string(key).expect("keys always serialize"));
                out.push_str(": ");
                write_value(x, depth + 1, out);
                out.push_str(if k + 1 < map.len() { ",\n" } else { "\n" });
            }
            pad(depth, out);
            out.push('}');
        }
    }
}

pub fn csv_row(cells: &[Option<f64>]) -> String {
    let mut line = cells.iter().map(|c| c.map(float).unwrap_or_default()).collect::<Vec<_>>().join(",");
    line.push('\n');
    line
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, clap::ValueEnum)]
pub enum Format {
    Json,
    Csv,
    Both,
}

/// Writes the requested artifacts. With `--format both` the output path's
/// extension is replaced by `.json` and `.csv`.
pub fn emit(format: Format, output: Option<&Path>, json: &str, csv: &str) -> Result<(), CliError> {
    let write = |path: &Path, text: &str| {
        fs::write(path, text).map_err(|e| CliError::Io(format!("{}: {e}", path.display())))
    };
    match (format, output) {
        (Format::Json, None) => print!("{json}"),
        (Format::Csv, None) => print!("{csv}"),
        (Format::Both, None) => return Err(CliError::Usage("--format both needs --output".into())),
        (Format::Json, Some(p)) => write(p, json)?,
        (Format::Csv, Some(p)) => write(p, csv)?,
        (Format::Both, Some(p)) => {
            write(&with_ext(p, "json"), json)?;
            write(&with_ext(p, "csv"), csv)?;
        }
    }
    Ok(())
}

fn with_ext(p: &Path, ext: &str) -> PathBuf {
    p.with_extension(ext)
}
