//! CSV emission with `#`-prefixed header comments and JSON metadata sidecars.
//! CSV bodies are byte-deterministic for a fixed configuration; wall time and
//! other run-varying facts live only in the sidecar.

use std::fmt::Write as _;
use std::fs;
use std::io;
use std::path::{Path, PathBuf};

use serde_json::{json, Value};

/// A CSV table under construction.
#[derive(Debug, Clone)]
pub struct CsvReport {
    comments: Vec<String>,
    columns: Vec<String>,
    rows: Vec<Vec<String>>,
}

/// Deterministic float formatting used in CSV bodies.
pub fn fmt_f64(x: f64) -> String {
    if x == 0.0 {
        // avoid the -0 artifact so reruns are byte-identical
        "0.000000000000e0".to_string()
    } else {
        format!("{x:.12e}")
    }
}

impl CsvReport {
    pub fn new<S: Into<String>>(columns: Vec<S>) -> Self {
        Self {
            comments: Vec::new(),
            columns: columns.into_iter().map(Into::into).collect(),
            rows: Vec::new(),
        }
    }

    pub fn comment<S: Into<String>>(&mut self, line: S) -> &mut Self {
        self.comments.push(line.into());
        self
    }

    pub fn row(&mut self, values: Vec<String>) -> &mut Self {
        assert_eq!(values.len(), self.columns.len(), "row arity mismatch");
        self.rows.push(values);
        self
    }

    pub fn row_f64(&mut self, values: &[f64]) -> &mut Self {
        self.row(values.iter().map(|v| fmt_f64(*v)).collect())
    }

    pub fn body(&self) -> String {
        let mut out = String::new();
        for c in &self.comments {
            let _ = writeln!(out, "# {c}");
        }
        let _ = writeln!(out, "{}", self.columns.join(","));
        for r in &self.rows {
            let _ = writeln!(out, "{}", r.join(","));
        }
        out
    }

    pub fn write_to(&self, path: &Path) -> io::Result<()> {
        if let Some(dir) = path.parent() {
            fs::create_dir_all(dir)?;
        }
        fs::write(path, self.body())
    }
}

/// JSON metadata accompanying every CSV artifact.
#[derive(Debug, Clone)]
pub struct Sidecar {
    pub command: String,
    pub fields: Value,
}

impl Sidecar {
    pub fn new(command: &str) -> Self {
        Self {
            command: command.to_string(),
            fields: json!({}),
        }
    }

    pub fn set(&mut self, key: &str, value: Value) -> &mut Self {
        self.fields[key] = value;
        self
    }

    pub fn write_to(&self, path: &Path, wall_time_s: f64) -> io::Result<()> {
        if let Some(dir) = path.parent() {
            fs::create_dir_all(dir)?;
        }
        let mut v = self.fields.clone();
        v["command"] = json!(self.command);
        v["version"] = json!(crate::VERSION);
        v["wall_time_s"] = json!(wall_time_s);
        fs::write(path, serde_json::to_string_pretty(&v).expect("serializable"))
    }
}

/// Sidecar path convention: `<data>.csv` → `<data>.meta.json`.
pub fn sidecar_path(csv: &Path) -> PathBuf {
    let mut p = csv.to_path_buf();
    p.set_extension("meta.json");
    p
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn deterministic_body() {
        let build = || {
            let mut r = CsvReport::new(vec!["x", "y"]);
            r.comment("demo");
            r.row_f64(&[1.0, -0.0]);
            r.row_f64(&[0.25, 3.5e-9]);
            r.body()
        };
        assert_eq!(build(), build());
        let b = build();
        assert!(b.starts_with("# demo\nx,y\n"));
        assert!(b.contains("0.000000000000e0"));
    }
}
