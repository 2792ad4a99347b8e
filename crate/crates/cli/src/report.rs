//! Deterministic JSON reports: complex numbers as `[re, im]`, floats rounded
//! to 15 significant digits, keys in insertion order of the builders below.

use std::io::Write;
use std::path::Path;

use serde_json::{json, Map, Value};

use ncmeasure::{CMat, C64};

pub const SCHEMA: u64 = 1;

/// Round to 15 significant digits; non-finite values become `null`.
pub fn round15(x: f64) -> Value {
    if !x.is_finite() {
        return Value::Null;
    }
    if x == 0.0 {
        return json!(0.0);
    }
    let r: f64 = format!("{x:.14e}").parse().expect("formatted float parses");
    json!(r)
}

/// Rounds every float in a JSON tree in place.
pub fn normalize(v: &mut Value) {
    match v {
        Value::Number(n) if n.is_f64() => {
            *v = round15(n.as_f64().expect("f64 number"));
        }
        Value::Array(items) => items.iter_mut().for_each(normalize),
        Value::Object(map) => map.values_mut().for_each(normalize),
        _ => {}
    }
}

pub fn complex(z: C64) -> Value {
    json!([z.re, z.im])
}

pub fn complex_table(zs: &[C64]) -> Value {
    Value::Array(zs.iter().map(|&z| complex(z)).collect())
}

pub fn matrix(m: &CMat) -> Value {
    Value::Array(
        (0..m.nrows())
            .map(|i| Value::Array((0..m.ncols()).map(|j| complex(m[(i, j)])).collect()))
            .collect(),
    )
}

pub fn opt(x: Option<f64>) -> Value {
    x.map_or(Value::Null, |v| json!(v))
}

/// Report skeleton shared by all subcommands.
pub fn header(command: &str, config: &impl serde::Serialize) -> Map<String, Value> {
    let mut m = Map::new();
    m.insert("schema".into(), json!(SCHEMA));
    m.insert("command".into(), json!(command));
    m.insert("version".into(), json!(ncmeasure::VERSION));
    m.insert(
        "config".into(),
        serde_json::to_value(config).expect("config serializes"),
    );
    m
}

pub fn to_string(mut v: Value) -> String {
    normalize(&mut v);
    let mut s = serde_json::to_string_pretty(&v).expect("report serializes");
    s.push('\n');
    s
}

/// Writes through a temporary file in the target directory, then renames.
pub fn write_atomic(path: &Path, contents: &str) -> std::io::Result<()> {
    let dir = match path.parent() {
        Some(p) if !p.as_os_str().is_empty() => p,
        _ => Path::new("."),
    };
    let mut tmp = tempfile::NamedTempFile::new_in(dir)?;
    tmp.write_all(contents.as_bytes())?;
    tmp.flush()?;
    tmp.persist(path).map_err(|e| e.error)?;
    Ok(())
}
