//! Report files: the JSON summary and the CSV sample tables, whose columns
//! are fixed by `schema/csv_columns.json`.

use std::fs;
use std::path::{Path, PathBuf};
use std::sync::OnceLock;

use serde::{Deserialize, Serialize};
use serde_json::{Map, Value};

use super::config::Experiment;
use crate::error::{Error, Result};
use crate::stats::{MomentReport, StatReport};

const SCHEMA_JSON: &str = include_str!("../../schema/csv_columns.json");

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct CsvFileSchema {
    pub columns: Vec<String>,
    pub description: String,
}

fn schema() -> &'static Map<String, Value> {
    static SCHEMA: OnceLock<Map<String, Value>> = OnceLock::new();
    SCHEMA.get_or_init(|| serde_json::from_str(SCHEMA_JSON).expect("csv schema file is valid JSON"))
}

/// The CSV files an experiment writes, with their columns.
pub fn csv_schema(experiment: Experiment) -> Vec<(String, CsvFileSchema)> {
    let Some(Value::Object(files)) = schema().get(experiment.name()) else {
        return Vec::new();
    };
    files
        .iter()
        .map(|(name, v)| {
            let s: CsvFileSchema = serde_json::from_value(v.clone()).expect("csv schema entry is well formed");
            (name.clone(), s)
        })
        .collect()
}

/// Text rendering for `bridgelab schema`.
pub fn render_schema(experiment: Experiment) -> String {
    let mut out = String::new();
    for (file, s) in csv_schema(experiment) {
        out.push_str(&format!("{file}\n  {}\n  columns: {}\n", s.description, s.columns.join(", ")));
    }
    out
}

/// Rows of one CSV file, already formatted.
#[derive(Debug, Clone, PartialEq)]
pub struct CsvTable {
    pub file: String,
    pub columns: Vec<String>,
    pub rows: Vec<Vec<String>>,
}

impl CsvTable {
    /// Empty table with the columns the schema declares for `file`.
    pub fn new(experiment: Experiment, file: &str) -> Self {
        let columns = csv_schema(experiment)
            .into_iter()
            .find(|(f, _)| f == file)
            .map(|(_, s)| s.columns)
            .unwrap_or_else(|| panic!("{file} is not declared for {experiment} in the csv schema"));
        CsvTable {
            file: file.to_string(),
            columns,
            rows: Vec::new(),
        }
    }

    pub fn push(&mut self, row: Vec<String>) {
        debug_assert_eq!(row.len(), self.columns.len(), "{}", self.file);
        self.rows.push(row);
    }

    pub fn write(&self, dir: &Path) -> Result<PathBuf> {
        let path = dir.join(&self.file);
        let mut w = csv::WriterBuilder::new()
            .terminator(csv::Terminator::Any(b'\n'))
            .from_path(&path)
            .map_err(|e| Error::Io(format!("{}: {e}", path.display())))?;
        let io = |e: csv::Error| Error::Io(format!("{}: {e}", path.display()));
        w.write_record(&self.columns).map_err(io)?;
        for r in &self.rows {
            w.write_record(r).map_err(io)?;
        }
        w.flush()?;
        Ok(path)
    }
}

/// Shortest round-trip decimal form, never in exponent notation.
pub fn num(v: f64) -> String {
    format!("{v}")
}

/// Everything that may differ between two runs of the same config.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct RunInfo {
    pub wall_time_seconds: f64,
    pub timestamp_unix: u64,
    pub parallelism: usize,
    pub version: &'static str,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct Summary {
    pub experiment: String,
    pub anchor: String,
    pub passed: bool,
    pub config: Value,
    pub tests: Vec<StatReport>,
    pub moments: Vec<MomentReport>,
    pub csv_files: Vec<String>,
    pub run_info: RunInfo,
}

impl Summary {
    pub fn to_json(&self) -> String {
        let mut s = serde_json::to_string_pretty(self).expect("summary serializes");
        s.push('\n');
        s
    }

    /// The summary without `run_info`, for reproducibility comparisons.
    pub fn reproducible_json(&self) -> String {
        let mut v = serde_json::to_value(self).expect("summary serializes");
        if let Value::Object(m) = &mut v {
            m.shift_remove("run_info");
        }
        serde_json::to_string_pretty(&v).expect("summary serializes")
    }

    pub fn failures(&self) -> Vec<String> {
        let mut out: Vec<String> = self.tests.iter().filter(|t| !t.passed).map(|t| t.test_name.clone()).collect();
        out.extend(
            self.moments
                .iter()
                .filter(|m| !m.passed)
                .map(|m| format!("moment c={} q={}", m.c, m.q)),
        );
        out
    }
}

pub fn write_summary(summary: &Summary, dir: &Path) -> Result<PathBuf> {
    let path = dir.join("summary.json");
    fs::write(&path, summary.to_json())?;
    Ok(path)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn schema_covers_every_experiment() {
        for e in Experiment::ALL {
            let files = csv_schema(e);
            assert!(!files.is_empty(), "{e}");
            for (f, s) in files {
                assert!(f.ends_with(".csv") && !s.columns.is_empty());
                assert!(render_schema(e).contains(&f));
            }
        }
    }

    #[test]
    fn numbers_are_plain_decimals() {
        assert_eq!(num(0.1), "0.1");
        assert_eq!(num(1e-7), "0.0000001");
        assert_eq!(num(3.0), "3");
        assert_eq!(num(-2.5), "-2.5");
    }

    #[test]
    fn csv_round_trip() {
        let dir = tempfile::tempdir().unwrap();
        let mut t = CsvTable::new(Experiment::VerifyGcMoments, "gc_samples.csv");
        t.push(vec!["0".into(), "1".into(), num(0.25), num(0.5)]);
        let path = t.write(dir.path()).unwrap();
        let text = fs::read_to_string(path).unwrap();
        assert_eq!(text, "path_index,c,g_fine,g_coarse\n0,1,0.25,0.5\n");
    }

    #[test]
    #[should_panic]
    fn undeclared_file_panics() {
        CsvTable::new(Experiment::VerifyGcMoments, "other.csv");
    }
}
