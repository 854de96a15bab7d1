//! Artifact formatting. Every float is written with 17 significant digits.

use std::fmt::Write as _;
use std::path::Path;

use serde::Serialize;
use serde_json::Value;

pub fn float(x: f64) -> String {
    if x.is_finite() {
        format!("{x:.16e}")
    } else if x.is_nan() {
        "NaN".into()
    } else if x > 0.0 {
        "inf".into()
    } else {
        "-inf".into()
    }
}

fn write_json(out: &mut String, v: &Value, indent: usize) {
    let pad = |out: &mut String, k: usize| out.extend(std::iter::repeat_n("  ", k));
    match v {
        Value::Null => out.push_str("null"),
        Value::Bool(b) => out.push_str(if *b { "true" } else { "false" }),
        Value::Number(n) => {
            if let Some(i) = n.as_i64() {
                write!(out, "{i}").unwrap();
            } else if let Some(u) = n.as_u64() {
                write!(out, "{u}").unwrap();
            } else {
                out.push_str(&float(n.as_f64().unwrap_or(f64::NAN)));
            }
        }
        Value::String(s) => out.push_str(&Value::String(s.clone()).to_string()),
        Value::Array(a) if a.is_empty() => out.push_str("[]"),
        Value::Array(a) => {
            out.push_str("[\n");
            for (k, item) in a.iter().enumerate() {
                pad(out, indent + 1);
                write_json(out, item, indent + 1);
                out.push_str(if k + 1 < a.len() { ",\n" } else { "\n" });
            }
            pad(out, indent);
            out.push(']');
        }
        Value::Object(m) if m.is_empty() => out.push_str("{}"),
        Value::Object(m) => {
            out.push_str("{\n");
            for (k, (key, item)) in m.iter().enumerate() {
                pad(out, indent + 1);
                write!(out, "{}: ", Value::String(key.clone())).unwrap();
                write_json(out, item, indent + 1);
                out.push_str(if k + 1 < m.len() { ",\n" } else { "\n" });
            }
            pad(out, indent);
            out.push('}');
        }
    }
}

/// Pretty JSON with floats forced to scientific notation. Non-finite
/// floats, which JSON cannot carry, come out as `null`.
pub fn to_json<T: Serialize>(value: &T) -> String {
    let v = serde_json::to_value(value).expect("artifact serializes");
    let mut out = String::new();
    write_json(&mut out, &v, 0);
    out.push('\n');
    out
}

/// A JSON artifact wrapped with the config hash.
pub fn json_artifact<T: Serialize>(hash: &str, command: &str, body: &T) -> String {
    #[derive(Serialize)]
    struct Wrapped<'a, T> {
        config_hash: &'a str,
        command: &'a str,
        result: &'a T,
    }
    to_json(&Wrapped {
        config_hash: hash,
        command,
        result: body,
    })
}

/// CSV text: a `#` header line holding JSON metadata, then the table.
pub fn csv_artifact<T: Serialize>(header: &T, columns: &[&str], rows: &[Vec<String>]) -> String {
    let meta = serde_json::to_value(header).expect("header serializes");
    let mut out = format!("# {}\n", compact(&meta));
    let mut w = csv::Writer::from_writer(Vec::new());
    w.write_record(columns).expect("in-memory write");
    for r in rows {
        w.write_record(r).expect("in-memory write");
    }
    out.push_str(&String::from_utf8(w.into_inner().expect("flush")).expect("utf8"));
    out
}

fn compact(v: &Value) -> String {
    let mut s = String::new();
    write_json(&mut s, v, 0);
    s.split('\n').map(str::trim).collect::<Vec<_>>().join(" ")
}

/// Writes `text` to `path`, or stdout when no path is given. Files are
/// written through a temporary sibling so a failure leaves nothing behind.
pub fn emit(path: Option<&Path>, text: &str) -> std::io::Result<()> {
    match path {
        None => {
            use std::io::Write;
            let mut out = std::io::stdout().lock();
            out.write_all(text.as_bytes())?;
            out.flush()
        }
        Some(p) => {
            let tmp = p.with_extension("partial");
            std::fs::write(&tmp, text)?;
            std::fs::rename(&tmp, p)
        }
    }
}
