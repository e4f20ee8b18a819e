//! CSV tables and JSON summaries, written atomically.

use std::collections::BTreeMap;
use std::fmt;
use std::io::Write;
use std::path::{Path, PathBuf};

use serde_json::{json, Map, Value};

use crate::error::{Error, Result};

/// One CSV field. Floats are written with 17 significant digits so output
/// is byte-stable and round-trips.
#[derive(Debug, Clone, PartialEq)]
pub enum Cell {
    Int(i64),
    Float(f64),
    Text(String),
    Bool(bool),
}

impl fmt::Display for Cell {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Cell::Int(v) => write!(f, "{v}"),
            Cell::Float(v) if v.is_finite() => write!(f, "{v:.16e}"),
            Cell::Float(v) => write!(f, "{v}"),
            Cell::Text(s) => f.write_str(s),
            Cell::Bool(b) => write!(f, "{b}"),
        }
    }
}

impl From<f64> for Cell {
    fn from(v: f64) -> Self {
        Cell::Float(v)
    }
}
impl From<u32> for Cell {
    fn from(v: u32) -> Self {
        Cell::Int(v as i64)
    }
}
impl From<usize> for Cell {
    fn from(v: usize) -> Self {
        Cell::Int(v as i64)
    }
}
impl From<bool> for Cell {
    fn from(v: bool) -> Self {
        Cell::Bool(v)
    }
}
impl From<&str> for Cell {
    fn from(v: &str) -> Self {
        Cell::Text(v.to_string())
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct Table {
    pub header: Vec<&'static str>,
    pub rows: Vec<Vec<Cell>>,
}

impl Table {
    pub fn new(header: &[&'static str]) -> Self {
        Table {
            header: header.to_vec(),
            rows: Vec::new(),
        }
    }

    pub fn push(&mut self, row: Vec<Cell>) {
        debug_assert_eq!(row.len(), self.header.len());
        self.rows.push(row);
    }

    /// Index of a named column.
    pub fn column(&self, name: &str) -> Option<usize> {
        self.header.iter().position(|h| *h == name)
    }

    /// Numeric values of a column (non-float cells are skipped).
    pub fn floats(&self, name: &str) -> Vec<f64> {
        let Some(i) = self.column(name) else { return Vec::new() };
        self.rows
            .iter()
            .filter_map(|r| match r[i] {
                Cell::Float(v) => Some(v),
                Cell::Int(v) => Some(v as f64),
                _ => None,
            })
            .collect()
    }

    pub fn to_csv(&self) -> Result<Vec<u8>> {
        let mut w = csv::Writer::from_writer(Vec::new());
        w.write_record(&self.header).map_err(csv_err)?;
        for row in &self.rows {
            w.write_record(row.iter().map(|c| c.to_string())).map_err(csv_err)?;
        }
        w.into_inner().map_err(|e| Error::Io(e.into_error()))
    }
}

fn csv_err(e: csv::Error) -> Error {
    Error::Io(std::io::Error::other(e))
}

/// Everything a suite produces.
#[derive(Debug, Clone)]
pub struct SuiteOutput {
    pub suite: &'static str,
    pub config: Value,
    /// Constants the suite measured or used (tolerances, envelopes, fits).
    pub constants: Map<String, Value>,
    /// Named checks. Empty for exploratory suites.
    pub flags: BTreeMap<String, bool>,
    pub exploratory: bool,
    /// False if any quadrature or optimisation missed its tolerance.
    pub converged: bool,
    pub table: Table,
}

impl SuiteOutput {
    pub fn new(suite: &'static str, config: Value, table: Table) -> Self {
        SuiteOutput {
            suite,
            config,
            constants: Map::new(),
            flags: BTreeMap::new(),
            exploratory: false,
            converged: true,
            table,
        }
    }

    pub fn constant(&mut self, key: &str, value: impl Into<Value>) {
        self.constants.insert(key.to_string(), value.into());
    }

    pub fn flag(&mut self, key: &str, value: bool) {
        self.flags.insert(key.to_string(), value);
    }

    pub fn passed(&self) -> bool {
        self.flags.values().all(|f| *f)
    }

    pub fn summary(&self) -> Value {
        json!({
            "suite": self.suite,
            "status": if self.exploratory { "EXPLORATORY" } else if self.passed() { "pass" } else { "fail" },
            "converged": self.converged,
            "config": self.config,
            "constants": self.constants,
            "flags": self.flags,
            "rows": self.table.rows.len(),
        })
    }

    /// Writes `<dir>/<suite>.csv` and `<dir>/<suite>.json`; returns the
    /// summary path.
    pub fn write(&self, dir: &Path) -> Result<PathBuf> {
        std::fs::create_dir_all(dir)?;
        let csv_path = dir.join(format!("{}.csv", self.suite));
        let json_path = dir.join(format!("{}.json", self.suite));
        write_atomic(&csv_path, &self.table.to_csv()?)?;
        let mut text = serde_json::to_string_pretty(&self.summary())?;
        text.push('\n');
        write_atomic(&json_path, text.as_bytes())?;
        Ok(json_path)
    }
}

/// Writes through a temporary file in the same directory, then renames.
pub fn write_atomic(path: &Path, bytes: &[u8]) -> Result<()> {
    let dir = match path.parent() {
        Some(p) if !p.as_os_str().is_empty() => p,
        _ => Path::new("."),
    };
    let mut tmp = tempfile::NamedTempFile::new_in(dir)?;
    tmp.write_all(bytes)?;
    tmp.as_file().sync_all()?;
    tmp.persist(path).map_err(|e| Error::Io(e.error))?;
    Ok(())
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn float_cells_have_17_digits() {
        assert_eq!(Cell::Float(0.1).to_string(), "1.0000000000000001e-1");
        assert_eq!(Cell::Float(3.0).to_string(), "3.0000000000000000e0");
        assert_eq!(Cell::Float(f64::NAN).to_string(), "NaN");
        assert_eq!(Cell::from(5usize).to_string(), "5");
    }

    #[test]
    fn csv_and_summary_round_trip() {
        let dir = tempfile::tempdir().unwrap();
        let mut t = Table::new(&["x", "label"]);
        t.push(vec![Cell::Float(1.5), Cell::from("a,b")]);
        let mut out = SuiteOutput::new("demo", json!({"seed": 1}), t);
        out.flag("ok", true);
        out.constant("c", 2.0);
        let summary = out.write(dir.path()).unwrap();
        let text = std::fs::read_to_string(dir.path().join("demo.csv")).unwrap();
        assert_eq!(text, "x,label\n1.5000000000000000e0,\"a,b\"\n");
        let v: Value = serde_json::from_str(&std::fs::read_to_string(summary).unwrap()).unwrap();
        assert_eq!(v["status"], "pass");
        assert_eq!(v["constants"]["c"], 2.0);
    }
}
