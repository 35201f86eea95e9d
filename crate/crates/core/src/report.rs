//! Deterministic report serialization.
//!
//! Every float is written with 17 significant digits in scientific notation
//! (`{:.16e}`), object keys are sorted, and non-finite values become `null`,
//! so an identical configuration always yields byte-identical output.

use std::fmt::Write as _;

use serde::Serialize;
use serde_json::Value;

use crate::error::{Error, Result};

/// Bumped whenever a report field is renamed, removed or changes meaning.
pub const SCHEMA_VERSION: &str = "1.0.0";
pub const TOOL_NAME: &str = "rotsurf";
pub const TOOL_VERSION: &str = env!("CARGO_PKG_VERSION");

#[derive(Clone, Debug, Serialize)]
pub struct ToolInfo {
    pub name: &'static str,
    pub version: &'static str,
}

/// Common header around every command's payload.
#[derive(Clone, Debug, Serialize)]
pub struct Envelope<T> {
    pub schema_version: &'static str,
    pub tool: ToolInfo,
    pub command: &'static str,
    #[serde(flatten)]
    pub body: T,
}

impl<T: Serialize> Envelope<T> {
    pub fn new(command: &'static str, body: T) -> Self {
        Self {
            schema_version: SCHEMA_VERSION,
            tool: ToolInfo {
                name: TOOL_NAME,
                version: TOOL_VERSION,
            },
            command,
            body,
        }
    }

    pub fn to_json(&self) -> Result<String> {
        to_json_string(self)
    }
}

/// `{:.16e}`; `null` for NaN and infinities; `-0` prints as `0`.
pub fn format_float(v: f64) -> String {
    if v.is_finite() {
        format!("{:.16e}", v + 0.0)
    } else {
        "null".to_string()
    }
}

/// Pretty JSON (two-space indent, trailing newline) with fixed float format.
pub fn to_json_string<T: Serialize + ?Sized>(value: &T) -> Result<String> {
    let v = serde_json::to_value(value).map_err(|e| Error::Io(e.to_string()))?;
    let mut out = String::new();
    write_value(&v, 0, &mut out);
    out.push('\n');
    Ok(out)
}

fn write_value(v: &Value, depth: usize, out: &mut String) {
    let pad = |d: usize, out: &mut String| out.extend(std::iter::repeat_n("  ", d));
    match v {
        Value::Null => out.push_str("null"),
        Value::Bool(b) => out.push_str(if *b { "true" } else { "false" }),
        Value::Number(n) => {
            if n.is_f64() {
                out.push_str(&format_float(n.as_f64().unwrap()));
            } else {
                let _ = write!(out, "{n}");
            }
        }
        Value::String(s) => out.push_str(&Value::String(s.clone()).to_string()),
        Value::Array(items) => {
            // short numeric arrays (bivectors, matrices rows) stay on one line
            if items.len() <= 6 && items.iter().all(|x| x.is_number() || x.is_null()) {
                out.push('[');
                for (k, x) in items.iter().enumerate() {
                    if k > 0 {
                        out.push_str(", ");
                    }
                    write_value(x, depth, out);
                }
                out.push(']');
                return;
            }
            if items.is_empty() {
                out.push_str("[]");
                return;
            }
            out.push_str("[\n");
            for (k, x) in items.iter().enumerate() {
                pad(depth + 1, out);
                write_value(x, depth + 1, out);
                out.push_str(if k + 1 < items.len() { ",\n" } else { "\n" });
            }
            pad(depth, out);
            out.push(']');
        }
        Value::Object(map) => {
            if map.is_empty() {
                out.push_str("{}");
                return;
            }
            out.push_str("{\n");
            let n = map.len();
            for (k, (key, x)) in map.iter().enumerate() {
                pad(depth + 1, out);
                out.push_str(&Value::String(key.clone()).to_string());
                out.push_str(": ");
                write_value(x, depth + 1, out);
                out.push_str(if k + 1 < n { ",\n" } else { "\n" });
            }
            pad(depth, out);
            out.push('}');
        }
    }
}

/// A report with a per-point table that can be flattened to CSV.
pub trait Tabular {
    fn header(&self) -> Vec<String>;
    fn rows(&self) -> Vec<Vec<f64>>;

    fn to_csv(&self) -> Result<String> {
        let mut w = csv::Writer::from_writer(Vec::new());
        let io = |e: csv::Error| Error::Io(e.to_string());
        w.write_record(self.header()).map_err(io)?;
        for row in self.rows() {
            w.write_record(row.iter().map(|v| format_float(*v))).map_err(io)?;
        }
        let bytes = w.into_inner().map_err(|e| Error::Io(e.to_string()))?;
        String::from_utf8(bytes).map_err(|e| Error::Io(e.to_string()))
    }
}
