//! Scenario configuration, single-cell runs, the full dataset x optimizer x
//! scenario matrix, and Table-shaped summaries of the results.

mod matrix;
mod report;
mod run;

use std::fmt;
use std::str::FromStr;

use serde::{Deserialize, Serialize};

use crate::data::{DatasetKind, SmoteConfig, SplitPlan};
use crate::error::{Error, Result};
use crate::nn::NetworkTopology;
use crate::optimizer::{OptimizerKind, OptimizerSettings};

pub use matrix::{
    compare_optimizers, run_matrix, CellFailure, CellKey, CellRanking, CellStats, MatrixOutcome,
    MatrixPlan, RankedOptimizer, SummaryRow, SummaryTable,
};
pub use report::{read_reports, trace_table, FoldReport, RunReport, SCHEMA_VERSION};
pub use run::{prepare_fold, run_scenario, run_seed, PreparedFold};

/// The four training settings: cross-validation on or off, crossed with PCA
/// on or off.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Scenario {
    A,
    B,
    C,
    D,
}

impl Scenario {
    pub const ALL: [Scenario; 4] = [Scenario::A, Scenario::B, Scenario::C, Scenario::D];

    pub fn from_flags(cv: bool, pca: bool) -> Self {
        match (cv, pca) {
            (false, false) => Scenario::A,
            (true, false) => Scenario::B,
            (false, true) => Scenario::C,
            (true, true) => Scenario::D,
        }
    }

    pub fn cv(self) -> bool {
        matches!(self, Scenario::B | Scenario::D)
    }

    pub fn pca(self) -> bool {
        matches!(self, Scenario::C | Scenario::D)
    }

    pub fn as_str(self) -> &'static str {
        match self {
            Scenario::A => "a",
            Scenario::B => "b",
            Scenario::C => "c",
            Scenario::D => "d",
        }
    }

    pub fn label(self) -> &'static str {
        match self {
            Scenario::A => "No-CV and No-PCA",
            Scenario::B => "CV and No-PCA",
            Scenario::C => "No-CV and PCA",
            Scenario::D => "CV and PCA",
        }
    }
}

impl fmt::Display for Scenario {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

impl FromStr for Scenario {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s.to_ascii_lowercase().as_str() {
            "a" => Ok(Scenario::A),
            "b" => Ok(Scenario::B),
            "c" => Ok(Scenario::C),
            "d" => Ok(Scenario::D),
            other => Err(Error::config(format!("unknown scenario `{other}` (expected a-d)"))),
        }
    }
}

/// Principal components kept when PCA is on and no count is given.
pub fn default_pca_components(dataset: DatasetKind) -> usize {
    match dataset {
        DatasetKind::Original => 4,
        DatasetKind::Diagnostic | DatasetKind::Prognostic => 8,
    }
}

/// SMOTE is on by default only for the imbalanced prognostic set.
pub fn default_smote(dataset: DatasetKind) -> Option<SmoteConfig> {
    (dataset == DatasetKind::Prognostic).then(SmoteConfig::default)
}

pub const DEFAULT_SEEDS: [u64; 5] = [1, 2, 3, 4, 5];

/// Everything needed to reproduce one matrix cell.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ExperimentConfig {
    pub dataset: DatasetKind,
    pub optimizer: OptimizerKind,
    pub cv: bool,
    pub folds: usize,
    /// Number of principal components, `None` for no projection.
    pub pca: Option<usize>,
    pub smote: Option<SmoteConfig>,
    /// Hidden layer sizes; `None` picks `[inputs, ceil(inputs / 2)]`.
    pub hidden: Option<Vec<usize>>,
    pub settings: OptimizerSettings,
    pub seeds: Vec<u64>,
    /// Training share of the holdout split used when `cv` is off.
    pub holdout: f64,
    /// Fit scaling, SMOTE and PCA on the whole dataset before splitting.
    pub paper_compat: bool,
}

impl ExperimentConfig {
    /// Defaults for one cell of the matrix.
    pub fn new(dataset: DatasetKind, optimizer: OptimizerKind, scenario: Scenario) -> Self {
        Self {
            dataset,
            optimizer,
            cv: scenario.cv(),
            folds: 10,
            pca: scenario.pca().then(|| default_pca_components(dataset)),
            smote: default_smote(dataset),
            hidden: None,
            settings: OptimizerSettings::default(),
            seeds: DEFAULT_SEEDS.to_vec(),
            holdout: 0.7,
            paper_compat: false,
        }
    }

    pub fn scenario(&self) -> Scenario {
        Scenario::from_flags(self.cv, self.pca.is_some())
    }

    pub fn split_plan(&self) -> SplitPlan {
        if self.cv {
            SplitPlan::k_fold(self.folds)
        } else {
            SplitPlan::holdout(self.holdout)
        }
    }

    pub fn topology(&self, inputs: usize) -> Result<NetworkTopology> {
        match &self.hidden {
            Some(h) => NetworkTopology::new(inputs, h.clone()),
            None => Ok(NetworkTopology::default_for(inputs)),
        }
    }

    pub fn validate(&self) -> Result<()> {
        if self.seeds.is_empty() {
            return Err(Error::config("at least one seed is required"));
        }
        if self.cv && self.folds < 2 {
            return Err(Error::config(format!("folds must be at least 2, got {}", self.folds)));
        }
        if !self.cv && !(self.holdout > 0.0 && self.holdout < 1.0) {
            return Err(Error::config(format!(
                "holdout fraction must lie in (0, 1), got {}",
                self.holdout
            )));
        }
        if self.pca == Some(0) {
            return Err(Error::config("PCA needs at least one component"));
        }
        if let Some(s) = &self.smote {
            if s.ratio.is_nan() || s.ratio < 1.0 || s.neighbors == 0 {
                return Err(Error::config(format!(
                    "SMOTE needs ratio >= 1 and at least one neighbour, got {} and {}",
                    s.ratio, s.neighbors
                )));
            }
        }
        if let Some(h) = &self.hidden {
            if h.contains(&0) {
                return Err(Error::config(format!("hidden layer sizes must be positive: {h:?}")));
            }
        }
        self.settings.validate()
    }

    /// Short identifier used in file names and error context.
    pub fn cell_name(&self) -> String {
        format!("{}-{}-{}", self.dataset, self.scenario(), self.optimizer)
    }
}
