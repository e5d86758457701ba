//! Report documents emitted by every command.
//!
//! Everything except `timing` is a deterministic function of the command
//! line, the input files and the seed.

use std::collections::BTreeMap;
use std::fmt::Write as _;
use std::path::Path;

use serde::Serialize;
use serde_json::Value;
use sha2::{Digest, Sha256};

use crate::error::CliError;

#[derive(Clone, Debug, Serialize)]
pub struct InputDigest {
    pub path: String,
    pub sha256: String,
}

impl InputDigest {
    pub fn of(path: &Path, contents: &[u8]) -> Self {
        let digest = Sha256::digest(contents);
        let sha256 = digest.iter().fold(String::with_capacity(64), |mut s, b| {
            let _ = write!(s, "{b:02x}");
            s
        });
        Self {
            path: path.display().to_string(),
            sha256,
        }
    }

    pub fn read(path: &Path) -> Result<Self, CliError> {
        let bytes = std::fs::read(path).map_err(|e| CliError::io(path, e))?;
        Ok(Self::of(path, &bytes))
    }
}

#[derive(Clone, Debug, Serialize)]
pub struct Timing {
    pub wall_time_ms: f64,
}

#[derive(Clone, Debug, Serialize)]
pub struct ReportDocument {
    pub command: Vec<String>,
    pub inputs: Vec<InputDigest>,
    pub seed: Option<u64>,
    pub versions: BTreeMap<String, String>,
    pub results: Value,
    pub timing: Timing,
}

impl ReportDocument {
    pub fn new(
        command: Vec<String>,
        inputs: Vec<InputDigest>,
        seed: Option<u64>,
        results: Value,
    ) -> Self {
        let mut versions = BTreeMap::new();
        versions.insert(
            "logent-cli".to_string(),
            env!("CARGO_PKG_VERSION").to_string(),
        );
        Self {
            command,
            inputs,
            seed,
            versions,
            results,
            timing: Timing { wall_time_ms: 0.0 },
        }
    }

    /// The document without `timing`.
    pub fn deterministic(&self) -> Value {
        let mut v = serde_json::to_value(self).expect("report serializes");
        v.as_object_mut()
            .expect("report is an object")
            .remove("timing");
        v
    }

    pub fn to_json(&self) -> String {
        serde_json::to_string_pretty(self).expect("report serializes")
    }
}

/// Plain `key  value` rendering of a JSON object, nested keys joined by dots.
pub fn render_table(results: &Value) -> String {
    let mut rows = Vec::new();
    flatten("", results, &mut rows);
    let width = rows
        .iter()
        .map(|(k, _)| k.chars().count())
        .max()
        .unwrap_or(0);
    let mut out = String::new();
    for (k, v) in rows {
        let pad = width - k.chars().count();
        let _ = writeln!(out, "{k}{}  {v}", " ".repeat(pad));
    }
    out
}

fn flatten(prefix: &str, v: &Value, rows: &mut Vec<(String, String)>) {
    let key = |k: &str| {
        if prefix.is_empty() {
            k.to_string()
        } else {
            format!("{prefix}.{k}")
        }
    };
    match v {
        Value::Object(map) => {
            for (k, v) in map {
                flatten(&key(k), v, rows);
            }
        }
        Value::Array(items) if items.iter().all(|x| !x.is_object() && !x.is_array()) => {
            let parts: Vec<String> = items.iter().map(scalar).collect();
            rows.push((prefix.to_string(), format!("[{}]", parts.join(", "))));
        }
        Value::Array(items) => {
            for (i, v) in items.iter().enumerate() {
                flatten(&key(&i.to_string()), v, rows);
            }
        }
        other => rows.push((prefix.to_string(), scalar(other))),
    }
}

fn scalar(v: &Value) -> String {
    match v {
        Value::String(s) => s.clone(),
        Value::Number(n) => match n.as_f64() {
            Some(x) if n.is_f64() => format!("{x:.12}"),
            _ => n.to_string(),
        },
        other => other.to_string(),
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use serde_json::json;

    #[test]
    fn digest_is_sha256() {
        let d = InputDigest::of(Path::new("x"), b"abc");
        assert_eq!(
            d.sha256,
            "ba7816bf8f01cfea414140de5dae2223b00361a396177a9cb410ff61f20015ad"
        );
    }

    #[test]
    fn deterministic_section_drops_timing() {
        let mut r = ReportDocument::new(vec!["entropy".into()], vec![], None, json!({"L": 0.5}));
        r.timing.wall_time_ms = 12.0;
        let v = r.deterministic();
        assert!(v.get("timing").is_none());
        assert_eq!(v["results"]["L"], json!(0.5));
    }

    #[test]
    fn table_flattens() {
        let t = render_table(&json!({"a": 0.5, "b": {"c": [1, 2]}, "name": "x"}));
        assert_eq!(t, "a     0.500000000000\nb.c   [1, 2]\nname  x\n");
    }
}
