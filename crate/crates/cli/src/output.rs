//! Artifact emission: versioned CSV tables, JSON documents, destinations.

use std::fs;
use std::io::{self, Write};
use std::path::{Path, PathBuf};

use paramp_core::SCHEMA_VERSION;

pub fn csv_header() -> String {
    format!("# paramp-lab v{}, schema {SCHEMA_VERSION}\n", env!("CARGO_PKG_VERSION"))
}

/// A numeric table with named columns.
#[derive(Debug, Clone, PartialEq)]
pub struct Table {
    pub columns: Vec<String>,
    pub rows: Vec<Vec<f64>>,
}

impl Table {
    pub fn new(columns: &[&str]) -> Self {
        Table { columns: columns.iter().map(|c| c.to_string()).collect(), rows: vec![] }
    }

    pub fn to_csv(&self) -> io::Result<String> {
        let mut w = csv::Writer::from_writer(csv_header().into_bytes());
        w.write_record(&self.columns)?;
        for r in &self.rows {
            w.write_record(r.iter().map(|v| v.to_string()))?;
        }
        let bytes = w.into_inner().map_err(|e| e.into_error())?;
        String::from_utf8(bytes).map_err(|e| io::Error::new(io::ErrorKind::InvalidData, e))
    }

    pub fn to_json(&self) -> serde_json::Value {
        let rows: Vec<serde_json::Map<String, serde_json::Value>> = self
            .rows
            .iter()
            .map(|r| self.columns.iter().cloned().zip(r.iter().map(|v| json_number(*v))).collect())
            .collect();
        serde_json::json!({ "schema": SCHEMA_VERSION, "columns": self.columns, "rows": rows })
    }
}

/// JSON has no infinities; they are written as strings.
pub fn json_number(v: f64) -> serde_json::Value {
    serde_json::Number::from_f64(v).map_or_else(|| serde_json::Value::String(v.to_string()), serde_json::Value::Number)
}

pub fn pretty(value: &serde_json::Value) -> String {
    let mut s = serde_json::to_string_pretty(value).unwrap_or_default();
    s.push('\n');
    s
}

/// Where artifacts go: a directory, or standard output when none is set.
#[derive(Debug, Clone)]
pub struct Sink {
    pub dir: Option<PathBuf>,
}

impl Sink {
    pub fn new(dir: Option<PathBuf>) -> io::Result<Self> {
        if let Some(d) = &dir {
            fs::create_dir_all(d).map_err(|e| io::Error::new(e.kind(), format!("{}: {e}", d.display())))?;
        }
        Ok(Sink { dir })
    }

    pub fn path(&self, name: &str) -> Option<PathBuf> {
        self.dir.as_ref().map(|d| d.join(name))
    }

    /// Writes `contents` to `<dir>/<name>`, or to stdout without a directory.
    pub fn emit(&self, name: &str, contents: &str) -> io::Result<()> {
        match self.path(name) {
            Some(p) => write_file(&p, contents),
            None => io::stdout().lock().write_all(contents.as_bytes()),
        }
    }
}

pub fn write_file(path: &Path, contents: &str) -> io::Result<()> {
    fs::write(path, contents).map_err(|e| io::Error::new(e.kind(), format!("{}: {e}", path.display())))
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn csv_starts_with_versioned_header() {
        let mut t = Table::new(&["a", "b"]);
        t.rows.push(vec![1.0, f64::NEG_INFINITY]);
        let s = t.to_csv().unwrap();
        let mut lines = s.lines();
        assert_eq!(lines.next().unwrap(), format!("# paramp-lab v{}, schema 1", env!("CARGO_PKG_VERSION")));
        assert_eq!(lines.next().unwrap(), "a,b");
        assert_eq!(lines.next().unwrap(), "1,-inf");
    }

    #[test]
    fn json_keeps_infinities_as_strings() {
        let mut t = Table::new(&["g"]);
        t.rows.push(vec![f64::NEG_INFINITY]);
        assert_eq!(t.to_json()["rows"][0]["g"], "-inf");
    }
}
