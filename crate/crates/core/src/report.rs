//! Deterministic JSON and CSV emission.
//!
//! Reports must be byte-identical across runs with the same config, so floats
//! are printed with a fixed 17-significant-digit scientific format and object
//! keys are emitted in sorted order (serde_json's default map is a BTreeMap).

use crate::error::{Error, Result};
use serde::Serialize;
use serde_json::Value;
use std::path::Path;

/// 17 significant digits, enough to round-trip any f64.
pub fn format_float(x: f64) -> String {
    if x == 0.0 {
        // normalize -0.0
        return "0.0000000000000000e0".to_string();
    }
    format!("{:.16e}", x)
}

fn write_value(v: &Value, out: &mut String) {
    match v {
        Value::Null => out.push_str("null"),
        Value::Bool(b) => out.push_str(if *b { "true" } else { "false" }),
        Value::Number(n) => {
            if let Some(i) = n.as_i64() {
                out.push_str(&i.to_string());
            } else if let Some(u) = n.as_u64() {
                out.push_str(&u.to_string());
            } else {
                out.push_str(&format_float(n.as_f64().unwrap()));
            }
        }
        Value::String(s) => {
            out.push_str(&serde_json::to_string(s).expect("string serialization"));
        }
        Value::Array(items) => {
            out.push('[');
            for (i, item) in items.iter().enumerate() {
                if i > 0 {
                    out.push(',');
                }
                write_value(item, out);
            }
            out.push(']');
        }
        Value::Object(map) => {
            out.push('{');
            for (i, (k, item)) in map.iter().enumerate() {
                if i > 0 {
                    out.push(',');
                }
                out.push_str(&serde_json::to_string(k).expect("key serialization"));
                out.push(':');
                write_value(item, out);
            }
            out.push('}');
        }
    }
}

/// Serialize any record with sorted keys and pinned float formatting.
pub fn to_json_string<T: Serialize>(record: &T) -> Result<String> {
    let value = serde_json::to_value(record)
        .map_err(|e| Error::Parse(format!("serialization failed: {e}")))?;
    if !value_is_finite(&value) {
        return Err(Error::Parse("report contains a non-finite number".into()));
    }
    let mut out = String::new();
    write_value(&value, &mut out);
    out.push('\n');
    Ok(out)
}

fn value_is_finite(v: &Value) -> bool {
    match v {
        Value::Number(n) => n.as_f64().map(f64::is_finite).unwrap_or(true),
        Value::Array(items) => items.iter().all(value_is_finite),
        Value::Object(map) => map.values().all(value_is_finite),
        _ => true,
    }
}

/// Write atomically: temp file in the same directory, then rename.
pub fn write_atomic(path: &Path, content: &str) -> Result<()> {
    let dir = path.parent().unwrap_or_else(|| Path::new("."));
    std::fs::create_dir_all(dir)?;
    let tmp = dir.join(format!(
        ".{}.tmp",
        path.file_name().and_then(|s| s.to_str()).unwrap_or("report")
    ));
    std::fs::write(&tmp, content)?;
    std::fs::rename(&tmp, path)?;
    Ok(())
}

/// CSV with the same float discipline; header then rows.
pub fn to_csv_string(header: &[&str], rows: &[Vec<f64>]) -> String {
    let mut out = String::new();
    out.push_str(&header.join(","));
    out.push('\n');
    for row in rows {
        let cells: Vec<String> = row.iter().map(|&x| format_float(x)).collect();
        out.push_str(&cells.join(","));
        out.push('\n');
    }
    out
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn floats_are_pinned_and_deterministic() {
        assert_eq!(format_float(0.5), "5.0000000000000000e-1");
        assert_eq!(format_float(-0.0), "0.0000000000000000e0");
        let x = std::f64::consts::PI;
        assert_eq!(format_float(x), format_float(x));
        // round-trip through the printed form
        let back: f64 = format_float(x).parse().unwrap();
        assert_eq!(back, x);
    }

    #[test]
    fn objects_emit_sorted_keys() {
        #[derive(Serialize)]
        struct R {
            zeta: f64,
            alpha: u32,
        }
        let s = to_json_string(&R { zeta: 1.5, alpha: 2 }).unwrap();
        assert_eq!(s, "{\"alpha\":2,\"zeta\":1.5000000000000000e0}\n");
    }

    #[test]
    fn non_finite_numbers_are_rejected() {
        #[derive(Serialize)]
        struct R {
            x: f64,
        }
        // serde_json maps NaN to null; reject infinities through the walker
        let v = serde_json::json!({"x": 1.0});
        assert!(value_is_finite(&v));
        assert!(to_json_string(&R { x: 2.0 }).is_ok());
    }

    #[test]
    fn csv_rows_use_pinned_floats() {
        let s = to_csv_string(&["r", "f"], &[vec![1.0, 0.25]]);
        assert_eq!(s, "r,f\n1.0000000000000000e0,2.5000000000000000e-1\n");
    }
}
