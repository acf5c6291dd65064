//! Experiment runner behind the `bridgelab` binary.
//!
//! A run writes `<out>/<experiment>/summary.json` and the CSV files declared
//! for the experiment in `schema/csv_columns.json`. Only the `run_info` block
//! of the summary depends on the machine, the clock or the thread count.

mod config;
mod experiments;
mod report;

use std::fs;
use std::path::{Path, PathBuf};
use std::time::{Instant, SystemTime, UNIX_EPOCH};

use serde::Serialize;
use serde_json::Value;

pub use config::{Constraint, Experiment, ExperimentConfig, ParamSpec, ParamValue, Params, DEFAULT_CSV_LIMIT};
pub use experiments::Outcome;
pub use report::{csv_schema, num, render_schema, CsvFileSchema, CsvTable, RunInfo, Summary};

use crate::error::Result;

/// Environment variable naming the default output directory.
pub const OUT_ENV: &str = "BRIDGELAB_OUT";

/// Output directory used when neither `--out` nor [`OUT_ENV`] is given.
pub const FALLBACK_OUT: &str = "bridgelab-out";

pub fn default_out_dir() -> PathBuf {
    std::env::var_os(OUT_ENV)
        .filter(|v| !v.is_empty())
        .map(PathBuf::from)
        .unwrap_or_else(|| PathBuf::from(FALLBACK_OUT))
}

/// Runs the experiment and builds the summary without touching the disk.
pub fn execute(cfg: &ExperimentConfig) -> Result<(Summary, Vec<CsvTable>)> {
    let start = Instant::now();
    let out = experiments::run(cfg)?;
    experiments::check_tables(cfg.experiment, &out)?;
    let passed = out.tests.iter().all(|t| t.passed) && out.moments.iter().all(|m| m.passed);
    let summary = Summary {
        experiment: cfg.experiment.name().to_string(),
        anchor: cfg.experiment.anchor().to_string(),
        passed,
        config: cfg.echo(),
        tests: out.tests,
        moments: out.moments,
        csv_files: out.tables.iter().map(|t| t.file.clone()).collect(),
        run_info: RunInfo {
            wall_time_seconds: start.elapsed().as_secs_f64(),
            timestamp_unix: SystemTime::now().duration_since(UNIX_EPOCH).map(|d| d.as_secs()).unwrap_or(0),
            parallelism: cfg.parallelism,
            version: env!("CARGO_PKG_VERSION"),
        },
    };
    Ok((summary, out.tables))
}

#[derive(Debug, Clone, PartialEq)]
pub struct RunOutcome {
    pub summary: Summary,
    pub dir: PathBuf,
    pub files: Vec<PathBuf>,
}

/// Runs the experiment and writes its report files under
/// `out_dir/<experiment>/`.
pub fn run_experiment(cfg: &ExperimentConfig, out_dir: &Path) -> Result<RunOutcome> {
    cfg.validate()?;
    let (summary, tables) = execute(cfg)?;
    let dir = out_dir.join(cfg.experiment.name());
    fs::create_dir_all(&dir)?;
    let mut files = vec![report::write_summary(&summary, &dir)?];
    for t in &tables {
        files.push(t.write(&dir)?);
    }
    Ok(RunOutcome { summary, dir, files })
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct ExperimentInfo {
    pub name: &'static str,
    pub anchor: &'static str,
    pub description: &'static str,
    pub n_paths: usize,
    pub grid_steps: usize,
    pub params: Value,
}

pub fn list_experiments() -> Vec<ExperimentInfo> {
    Experiment::ALL
        .iter()
        .map(|&e| {
            let cfg = ExperimentConfig::new(e);
            ExperimentInfo {
                name: e.name(),
                anchor: e.anchor(),
                description: e.description(),
                n_paths: cfg.n_paths,
                grid_steps: cfg.grid_steps,
                params: cfg.params.to_json(),
            }
        })
        .collect()
}

/// One row per experiment: name, anchor and default parameters.
pub fn render_list() -> String {
    let rows = list_experiments();
    let w = rows.iter().map(|r| r.name.len()).max().unwrap_or(0);
    let a = rows.iter().map(|r| r.anchor.len()).max().unwrap_or(0);
    let mut out = format!("{:w$}  {:a$}  defaults\n", "experiment", "anchor");
    for r in rows {
        out.push_str(&format!(
            "{:w$}  {:a$}  n_paths={} grid_steps={} {}\n",
            r.name, r.anchor, r.n_paths, r.grid_steps, r.params
        ));
    }
    out
}

pub fn render_list_json() -> String {
    serde_json::to_string_pretty(&list_experiments()).expect("listing serializes")
}
