//! Serialization helpers. JSON objects come out with lexicographically
//! sorted keys and shortest round-trip floats; CSV uses 17 significant digits.

use std::fs;
use std::path::Path;

use serde::Serialize;
use serde_json::Value;

use crate::error::{CliError, CliResult};

/// Pretty JSON with sorted keys and a trailing newline.
pub fn to_json<T: Serialize>(value: &T) -> CliResult<String> {
    // going through Value sorts object keys (BTreeMap-backed)
    let v: Value = serde_json::to_value(value).map_err(|e| CliError::Io(e.to_string()))?;
    if let Some(bad) = first_null_float(&v) {
        return Err(CliError::Precondition(format!("non-finite value in output field `{bad}`")));
    }
    let mut s = serde_json::to_string_pretty(&v).map_err(|e| CliError::Io(e.to_string()))?;
    s.push('\n');
    Ok(s)
}

fn first_null_float(v: &Value) -> Option<String> {
    match v {
        Value::Object(map) => map.iter().find_map(|(k, v)| match v {
            Value::Null => Some(k.clone()),
            other => first_null_float(other).map(|inner| format!("{k}.{inner}")),
        }),
        Value::Array(items) => items.iter().find_map(first_null_float),
        _ => None,
    }
}

pub fn format_float(x: f64) -> String {
    format!("{x:.16e}")
}

pub fn write_output(path: &Path, contents: &[u8]) -> CliResult<()> {
    if let Some(dir) = path.parent() {
        if !dir.as_os_str().is_empty() {
            fs::create_dir_all(dir)?;
        }
    }
    fs::write(path, contents)?;
    Ok(())
}
