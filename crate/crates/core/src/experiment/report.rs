use std::fmt::Write as _;
use std::fs;
use std::path::{Path, PathBuf};

use serde::{Deserialize, Serialize};

use super::{ExperimentConfig, Scenario};
use crate::error::{Error, Result};

/// Bumped whenever a field of [`RunReport`] changes meaning or shape.
pub const SCHEMA_VERSION: u32 = 1;

/// Outcome of one holdout split or one cross-validation fold.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct FoldReport {
    pub accuracy: f64,
    pub train_rows: usize,
    pub test_rows: usize,
    /// SMOTE rows appended to the training side.
    pub synthetic_rows: usize,
    pub inputs: usize,
    pub parameters: usize,
    pub final_loss: f64,
    pub evaluations: usize,
    /// Best training loss after initialization and after every sweep.
    pub trace: Vec<f64>,
}

/// Result of one matrix cell under one seed.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RunReport {
    pub schema_version: u32,
    pub config: ExperimentConfig,
    pub scenario: Scenario,
    pub seed: u64,
    /// Rows left after cleaning, before any split.
    pub rows: usize,
    pub folds: Vec<FoldReport>,
    pub mean_accuracy: f64,
    pub best_final_loss: f64,
    /// Not serialized, so reruns produce byte-identical files.
    #[serde(skip)]
    pub wall_clock_seconds: f64,
}

impl RunReport {
    pub fn accuracies(&self) -> Vec<f64> {
        self.folds.iter().map(|f| f.accuracy).collect()
    }

    pub fn file_stem(&self) -> String {
        format!("{}-seed{}", self.config.cell_name(), self.seed)
    }

    pub fn to_json(&self) -> Result<String> {
        let mut s = serde_json::to_string_pretty(self)?;
        s.push('\n');
        Ok(s)
    }

    /// Writes `<dir>/<file_stem>.json` and returns its path.
    pub fn write_to(&self, dir: &Path) -> Result<PathBuf> {
        fs::create_dir_all(dir).map_err(|e| Error::io(dir, e))?;
        let path = dir.join(format!("{}.json", self.file_stem()));
        fs::write(&path, self.to_json()?).map_err(|e| Error::io(&path, e))?;
        Ok(path)
    }

    pub fn read_from(path: &Path) -> Result<RunReport> {
        let text = fs::read_to_string(path).map_err(|e| Error::io(path, e))?;
        let report: RunReport = serde_json::from_str(&text)
            .map_err(|e| Error::from(e).context(path.display().to_string()))?;
        if report.schema_version != SCHEMA_VERSION {
            return Err(Error::Data(format!(
                "{}: schema version {} is not {SCHEMA_VERSION}",
                path.display(),
                report.schema_version
            )));
        }
        Ok(report)
    }
}

/// Loads every `*.json` report in `dir`, sorted by file name.
pub fn read_reports(dir: &Path) -> Result<Vec<RunReport>> {
    let mut paths: Vec<PathBuf> = fs::read_dir(dir)
        .map_err(|e| Error::io(dir, e))?
        .filter_map(|entry| entry.ok().map(|e| e.path()))
        .filter(|p| p.extension().is_some_and(|x| x == "json"))
        .collect();
    paths.sort();
    paths.iter().map(|p| RunReport::read_from(p)).collect()
}

/// Tab-separated convergence data: one row per iteration, one column per fold.
pub fn trace_table(report: &RunReport) -> String {
    let mut out = String::from("iteration");
    for f in 1..=report.folds.len() {
        let _ = write!(out, "\tfold{f}");
    }
    out.push('\n');
    let len = report.folds.iter().map(|f| f.trace.len()).max().unwrap_or(0);
    for i in 0..len {
        let _ = write!(out, "{i}");
        for f in &report.folds {
            match f.trace.get(i) {
                Some(v) => {
                    let _ = write!(out, "\t{v}");
                }
                None => out.push('\t'),
            }
        }
        out.push('\n');
    }
    out
}
