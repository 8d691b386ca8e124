use std::collections::BTreeMap;
use std::path::Path;
use std::time::Instant;

use anyhow::{Context, Result};
use serde_json::{json, Map, Value};
use sha2::{Digest, Sha256};

pub const SCHEMA: u32 = 1;

/// Accumulates one command's report.
pub struct Report {
    command: &'static str,
    seed: u64,
    inputs: Map<String, Value>,
    files: BTreeMap<String, String>,
    timings: Map<String, Value>,
    timed: bool,
}

impl Report {
    pub fn new(command: &'static str, seed: u64, timed: bool) -> Self {
        Self {
            command,
            seed,
            inputs: Map::new(),
            files: BTreeMap::new(),
            timings: Map::new(),
            timed,
        }
    }

    pub fn input(&mut self, key: &str, v: impl Into<Value>) {
        self.inputs.insert(key.to_string(), v.into());
    }

    /// Reads a file and records its SHA-256.
    pub fn read_file(&mut self, path: &Path) -> Result<Vec<u8>> {
        let bytes = std::fs::read(path).with_context(|| format!("reading {}", path.display()))?;
        self.hash_bytes(&path.display().to_string(), &bytes);
        Ok(bytes)
    }

    pub fn hash_bytes(&mut self, name: &str, bytes: &[u8]) {
        self.files.insert(name.to_string(), hex(&Sha256::digest(bytes)));
    }

    /// Hashes every regular file of a measure directory, in name order.
    pub fn hash_dir(&mut self, dir: &Path) -> Result<()> {
        let mut names: Vec<_> = std::fs::read_dir(dir)
            .with_context(|| format!("reading {}", dir.display()))?
            .filter_map(|e| e.ok())
            .filter(|e| e.path().is_file())
            .map(|e| e.path())
            .collect();
        names.sort();
        for p in names {
            let bytes = std::fs::read(&p)?;
            self.hash_bytes(&p.display().to_string(), &bytes);
        }
        Ok(())
    }

    pub fn time<T>(&mut self, phase: &str, f: impl FnOnce() -> T) -> T {
        let t0 = Instant::now();
        let out = f();
        if self.timed {
            let ms = t0.elapsed().as_secs_f64() * 1e3;
            self.timings.insert(phase.to_string(), json!((ms * 1e3).round() / 1e3));
        }
        out
    }

    pub fn finish(mut self, results: Value) -> Value {
        if !self.files.is_empty() {
            self.inputs.insert("files".into(), json!(self.files));
        }
        let mut v = json!({
            "schema": SCHEMA,
            "command": self.command,
            "inputs": Value::Object(self.inputs),
            "seed": self.seed,
            "results": results,
        });
        if self.timed {
            v["timings"] = Value::Object(self.timings);
        }
        v
    }
}

fn hex(bytes: &[u8]) -> String {
    bytes.iter().map(|b| format!("{b:02x}")).collect()
}

/// `key  value` lines; nested values are shown as compact JSON.
pub fn render_table(report: &Value) -> String {
    let mut out = String::new();
    out.push_str(&format!("command  {}\n", report["command"].as_str().unwrap_or("")));
    out.push_str(&format!("seed     {}\n", report["seed"]));
    let mut rows = Vec::new();
    flatten("", &report["results"], &mut rows);
    let width = rows.iter().map(|(k, _)| k.len()).max().unwrap_or(0);
    for (k, v) in rows {
        out.push_str(&format!("{k:width$}  {v}\n"));
    }
    if let Some(t) = report.get("timings").and_then(Value::as_object) {
        for (k, v) in t {
            out.push_str(&format!("time.{k}  {v} ms\n"));
        }
    }
    out
}

fn flatten(prefix: &str, v: &Value, rows: &mut Vec<(String, String)>) {
    match v {
        Value::Object(m) => {
            for (k, x) in m {
                let key = if prefix.is_empty() { k.clone() } else { format!("{prefix}.{k}") };
                match x {
                    Value::Object(_) => flatten(&key, x, rows),
                    Value::String(s) => rows.push((key, s.clone())),
                    _ => rows.push((key, x.to_string())),
                }
            }
        }
        _ => rows.push((prefix.to_string(), v.to_string())),
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn schema_and_optional_timings() {
        let mut r = Report::new("x", 3, false);
        r.input("n", 5);
        r.time("phase", || ());
        let v = r.finish(json!({"a": {"b": 1}}));
        assert_eq!(v["schema"], 1);
        assert!(v.get("timings").is_none());
        let t = render_table(&v);
        assert!(t.contains("a.b"));
    }

    #[test]
    fn sha256_of_empty_input() {
        assert_eq!(
            hex(&Sha256::digest(b"")),
            "e3b0c44298fc1c149afbf4c8996fb92427ae41e4649b934ca495991b7852b855"
        );
    }
}
