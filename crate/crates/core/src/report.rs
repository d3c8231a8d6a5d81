//! Deterministic JSON emission: every float is serialized with 17
//! significant digits so reports round-trip exactly and diff cleanly, and
//! every report carries the engine version and the catalogue hash.

use serde::Serialize;
use serde_json::Value;

use crate::Result;

pub const ENGINE_VERSION: &str = env!("CARGO_PKG_VERSION");

/// Serialize with 17-significant-digit floats and stable key order.
pub fn to_json_17<T: Serialize>(value: &T) -> Result<String> {
    let v = serde_json::to_value(value)?;
    let mut out = String::new();
    write_value(&v, &mut out);
    Ok(out)
}

/// Wrap a report with the engine version and catalogue hash.
#[derive(Serialize)]
pub struct Enveloped<T: Serialize> {
    pub engine_version: &'static str,
    pub catalogue_hash: String,
    pub report: T,
}

pub fn envelope<T: Serialize>(report: T) -> Enveloped<T> {
    Enveloped {
        engine_version: ENGINE_VERSION,
        catalogue_hash: crate::identities::catalogue_hash(),
        report,
    }
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
                let f = n.as_f64().unwrap_or(f64::NAN);
                if f.is_finite() {
                    out.push_str(&format!("{f:.16e}"));
                } else {
                    out.push_str("null");
                }
            }
        }
        Value::String(s) => {
            out.push_str(&serde_json::to_string(s).unwrap_or_else(|_| "\"\"".into()));
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
            // serde_json object preserves insertion order only with the
            // feature flag; sort keys for byte-identical output
            let mut keys: Vec<&String> = map.keys().collect();
            keys.sort();
            out.push('{');
            for (i, k) in keys.iter().enumerate() {
                if i > 0 {
                    out.push(',');
                }
                out.push_str(&serde_json::to_string(k).unwrap_or_else(|_| "\"\"".into()));
                out.push(':');
                write_value(&map[k.as_str()], out);
            }
            out.push('}');
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn float_format_round_trips() {
        #[derive(Serialize)]
        struct S {
            a: f64,
            b: f64,
            n: u64,
        }
        let s = S {
            a: 126.5625,
            b: 1.0 / 3.0,
            n: 7,
        };
        let j = to_json_17(&s).unwrap();
        assert!(j.contains("\"n\":7"));
        let v: serde_json::Value = serde_json::from_str(&j).unwrap();
        assert_eq!(v["a"].as_f64().unwrap(), 126.5625);
        assert_eq!(v["b"].as_f64().unwrap(), 1.0 / 3.0);
    }

    #[test]
    fn identical_inputs_identical_bytes() {
        let a = to_json_17(&vec![0.1, 0.2, 0.30000000000000004]).unwrap();
        let b = to_json_17(&vec![0.1, 0.2, 0.30000000000000004]).unwrap();
        assert_eq!(a, b);
    }
}
