use std::collections::BTreeMap;
use std::fmt::Write as _;

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use super::report::RunReport;
use super::run::run_seed;
use super::{default_pca_components, default_smote, ExperimentConfig, Scenario, DEFAULT_SEEDS};
use crate::data::{Dataset, DatasetKind, SmoteConfig};
use crate::error::{Error, Result};
use crate::optimizer::{OptimizerKind, OptimizerSettings};

/// Accuracies closer than this count as a tie.
const TIE_TOLERANCE: f64 = 1e-12;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub struct CellKey {
    pub dataset: DatasetKind,
    pub scenario: Scenario,
    pub optimizer: OptimizerKind,
}

impl CellKey {
    pub fn of(report: &RunReport) -> Self {
        Self {
            dataset: report.config.dataset,
            scenario: report.scenario,
            optimizer: report.config.optimizer,
        }
    }
}

/// Selectors and shared overrides for a batch of cells. The default is the
/// full study: three datasets, three optimizers, four scenarios, five seeds.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct MatrixPlan {
    pub datasets: Vec<DatasetKind>,
    pub optimizers: Vec<OptimizerKind>,
    pub scenarios: Vec<Scenario>,
    pub seeds: Vec<u64>,
    pub settings: OptimizerSettings,
    pub folds: usize,
    pub holdout: f64,
    pub hidden: Option<Vec<usize>>,
    /// Overrides the per-dataset component count.
    pub pca_components: Option<usize>,
    /// Overrides the per-dataset SMOTE default.
    pub smote: Option<bool>,
    pub smote_config: SmoteConfig,
    pub paper_compat: bool,
}

impl Default for MatrixPlan {
    fn default() -> Self {
        Self {
            datasets: DatasetKind::ALL.to_vec(),
            optimizers: OptimizerKind::ALL.to_vec(),
            scenarios: Scenario::ALL.to_vec(),
            seeds: DEFAULT_SEEDS.to_vec(),
            settings: OptimizerSettings::default(),
            folds: 10,
            holdout: 0.7,
            hidden: None,
            pca_components: None,
            smote: None,
            smote_config: SmoteConfig::default(),
            paper_compat: false,
        }
    }
}

impl MatrixPlan {
    pub fn cell_config(&self, key: CellKey) -> ExperimentConfig {
        let smote = match self.smote {
            Some(true) => Some(self.smote_config.clone()),
            Some(false) => None,
            None => default_smote(key.dataset).map(|_| self.smote_config.clone()),
        };
        ExperimentConfig {
            dataset: key.dataset,
            optimizer: key.optimizer,
            cv: key.scenario.cv(),
            folds: self.folds,
            pca: key
                .scenario
                .pca()
                .then(|| self.pca_components.unwrap_or_else(|| default_pca_components(key.dataset))),
            smote,
            hidden: self.hidden.clone(),
            settings: self.settings.clone(),
            seeds: self.seeds.clone(),
            holdout: self.holdout,
            paper_compat: self.paper_compat,
        }
    }

    /// Cells in dataset, scenario, optimizer order.
    pub fn cells(&self) -> Vec<CellKey> {
        let mut out = Vec::new();
        for &dataset in &self.datasets {
            for &scenario in &self.scenarios {
                for &optimizer in &self.optimizers {
                    out.push(CellKey {
                        dataset,
                        scenario,
                        optimizer,
                    });
                }
            }
        }
        out
    }

    pub fn validate(&self) -> Result<()> {
        if self.datasets.is_empty() || self.optimizers.is_empty() || self.scenarios.is_empty() {
            return Err(Error::config("matrix needs at least one dataset, optimizer and scenario"));
        }
        for key in self.cells() {
            self.cell_config(key).validate()?;
        }
        Ok(())
    }
}

/// A cell and seed that could not be run.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct CellFailure {
    pub key: CellKey,
    pub seed: u64,
    pub message: String,
}

#[derive(Debug, Clone, Default)]
pub struct MatrixOutcome {
    /// Sorted by cell then seed.
    pub reports: Vec<RunReport>,
    pub failures: Vec<CellFailure>,
}

impl MatrixOutcome {
    pub fn summary(&self) -> SummaryTable {
        SummaryTable::build(&self.reports, &self.failures)
    }
}

/// Runs every cell and seed of `plan` over the loaded datasets. A cell whose
/// dataset is missing or whose run fails is recorded and the rest continue.
/// `on_done` sees each result as it finishes.
pub fn run_matrix(
    plan: &MatrixPlan,
    data: &[(DatasetKind, Dataset)],
    on_done: &(dyn Fn(CellKey, u64, &Result<RunReport>) + Sync),
) -> Result<MatrixOutcome> {
    plan.validate()?;
    let jobs: Vec<(CellKey, u64)> = plan
        .cells()
        .into_iter()
        .flat_map(|k| plan.seeds.iter().map(move |&s| (k, s)))
        .collect();
    let results: Vec<(CellKey, u64, Result<RunReport>)> = jobs
        .into_par_iter()
        .map(|(key, seed)| {
            let result = match data.iter().find(|(kind, _)| *kind == key.dataset) {
                Some((_, ds)) => run_seed(&plan.cell_config(key), ds, seed),
                None => Err(Error::Data(format!("{} dataset is not loaded", key.dataset))),
            };
            on_done(key, seed, &result);
            (key, seed, result)
        })
        .collect();

    let mut outcome = MatrixOutcome::default();
    for (key, seed, result) in results {
        match result {
            Ok(r) => outcome.reports.push(r),
            Err(e) => outcome.failures.push(CellFailure {
                key,
                seed,
                message: e.to_string(),
            }),
        }
    }
    Ok(outcome)
}

/// Per-seed mean accuracies of each cell, ordered by seed so aggregates do
/// not depend on the order reports arrive in.
fn group_by_cell(reports: &[RunReport]) -> BTreeMap<CellKey, Vec<f64>> {
    let mut by_cell: BTreeMap<CellKey, Vec<(u64, f64)>> = BTreeMap::new();
    for r in reports {
        by_cell.entry(CellKey::of(r)).or_default().push((r.seed, r.mean_accuracy));
    }
    by_cell
        .into_iter()
        .map(|(k, mut v)| {
            v.sort_by(|a, b| a.0.cmp(&b.0).then(a.1.total_cmp(&b.1)));
            (k, v.into_iter().map(|(_, a)| a).collect())
        })
        .collect()
}

/// Aggregate over the seeds of one cell.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct CellStats {
    pub seeds: usize,
    pub mean: f64,
    /// Sample standard deviation; 0 for a single seed.
    pub std: f64,
    pub best: f64,
    pub worst: f64,
}

impl CellStats {
    pub fn from_accuracies(acc: &[f64]) -> Option<Self> {
        if acc.is_empty() {
            return None;
        }
        let n = acc.len() as f64;
        let mean = acc.iter().sum::<f64>() / n;
        let std = if acc.len() > 1 {
            (acc.iter().map(|a| (a - mean).powi(2)).sum::<f64>() / (n - 1.0)).sqrt()
        } else {
            0.0
        };
        Some(Self {
            seeds: acc.len(),
            mean,
            std,
            best: acc.iter().copied().fold(f64::NEG_INFINITY, f64::max),
            worst: acc.iter().copied().fold(f64::INFINITY, f64::min),
        })
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RankedOptimizer {
    pub optimizer: OptimizerKind,
    pub mean: f64,
    /// Another optimizer in the cell has the same mean accuracy.
    pub tied: bool,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct CellRanking {
    pub dataset: DatasetKind,
    pub scenario: Scenario,
    /// Highest mean accuracy first.
    pub order: Vec<RankedOptimizer>,
}

impl CellRanking {
    pub fn leader(&self) -> Option<OptimizerKind> {
        self.order.first().map(|r| r.optimizer)
    }
}

/// Orders the optimizers of every (dataset, scenario) by mean accuracy over
/// seeds. Ties keep the fixed PSO, MTO, MTOCL order and are flagged.
pub fn compare_optimizers(reports: &[RunReport]) -> Vec<CellRanking> {
    let mut rows: BTreeMap<(DatasetKind, Scenario), Vec<RankedOptimizer>> = BTreeMap::new();
    for (key, acc) in group_by_cell(reports) {
        let mean = acc.iter().sum::<f64>() / acc.len() as f64;
        rows.entry((key.dataset, key.scenario)).or_default().push(RankedOptimizer {
            optimizer: key.optimizer,
            mean,
            tied: false,
        });
    }
    rows.into_iter()
        .map(|((dataset, scenario), mut order)| {
            order.sort_by(|a, b| b.mean.total_cmp(&a.mean).then(a.optimizer.cmp(&b.optimizer)));
            let means: Vec<f64> = order.iter().map(|r| r.mean).collect();
            for (i, r) in order.iter_mut().enumerate() {
                r.tied = means
                    .iter()
                    .enumerate()
                    .any(|(j, m)| j != i && (m - r.mean).abs() <= TIE_TOLERANCE);
            }
            CellRanking {
                dataset,
                scenario,
                order,
            }
        })
        .collect()
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SummaryRow {
    pub dataset: DatasetKind,
    pub scenario: Scenario,
    /// Aligned with [`SummaryTable::optimizers`].
    pub cells: Vec<Option<CellStats>>,
    /// Optimizers with at least one failed seed in this row.
    pub failed: Vec<OptimizerKind>,
    /// Optimizers sharing the highest mean accuracy.
    pub winners: Vec<OptimizerKind>,
}

/// Datasets x scenarios down, optimizers across.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SummaryTable {
    pub optimizers: Vec<OptimizerKind>,
    pub rows: Vec<SummaryRow>,
}

fn pct(v: f64) -> String {
    format!("{:.2}", 100.0 * v)
}

impl SummaryTable {
    pub fn build(reports: &[RunReport], failures: &[CellFailure]) -> Self {
        let grouped = group_by_cell(reports);
        let mut optimizers: Vec<OptimizerKind> = grouped
            .keys()
            .map(|k| k.optimizer)
            .chain(failures.iter().map(|f| f.key.optimizer))
            .collect();
        optimizers.sort();
        optimizers.dedup();
        let mut row_keys: Vec<(DatasetKind, Scenario)> = grouped
            .keys()
            .map(|k| (k.dataset, k.scenario))
            .chain(failures.iter().map(|f| (f.key.dataset, f.key.scenario)))
            .collect();
        row_keys.sort();
        row_keys.dedup();

        let rows = row_keys
            .into_iter()
            .map(|(dataset, scenario)| {
                let cells: Vec<Option<CellStats>> = optimizers
                    .iter()
                    .map(|&optimizer| {
                        grouped
                            .get(&CellKey {
                                dataset,
                                scenario,
                                optimizer,
                            })
                            .and_then(|acc| CellStats::from_accuracies(acc))
                    })
                    .collect();
                let top = cells
                    .iter()
                    .flatten()
                    .map(|c| c.mean)
                    .fold(f64::NEG_INFINITY, f64::max);
                let winners = optimizers
                    .iter()
                    .zip(&cells)
                    .filter(|(_, c)| c.as_ref().is_some_and(|c| (c.mean - top).abs() <= TIE_TOLERANCE))
                    .map(|(o, _)| *o)
                    .collect();
                let mut failed: Vec<OptimizerKind> = failures
                    .iter()
                    .filter(|f| f.key.dataset == dataset && f.key.scenario == scenario)
                    .map(|f| f.key.optimizer)
                    .collect();
                failed.sort();
                failed.dedup();
                SummaryRow {
                    dataset,
                    scenario,
                    cells,
                    failed,
                    winners,
                }
            })
            .collect();
        Self { optimizers, rows }
    }

    /// Accuracies in percent with two decimals; empty fields for cells with no
    /// successful seed.
    pub fn to_csv(&self) -> String {
        let mut out = String::from("dataset,scenario,setting");
        for o in &self.optimizers {
            let _ = write!(out, ",{o}_mean,{o}_std,{o}_best,{o}_seeds");
        }
        out.push_str(",best,failed\n");
        for row in &self.rows {
            let _ = write!(out, "{},{},{}", row.dataset, row.scenario, row.scenario.label());
            for cell in &row.cells {
                match cell {
                    Some(c) => {
                        let _ = write!(out, ",{},{},{},{}", pct(c.mean), pct(c.std), pct(c.best), c.seeds);
                    }
                    None => out.push_str(",,,,0"),
                }
            }
            let join = |v: &[OptimizerKind]| v.iter().map(|o| o.as_str()).collect::<Vec<_>>().join("|");
            let _ = writeln!(out, ",{},{}", join(&row.winners), join(&row.failed));
        }
        out
    }

    /// Markdown grid; each cell reads `mean ± std (best)` and the row winner
    /// is bold.
    pub fn to_markdown(&self) -> String {
        let mut out = String::from("| Dataset | Setting |");
        for o in &self.optimizers {
            let _ = write!(out, " {} |", o.label());
        }
        out.push_str("\n|---|---|");
        out.push_str(&"---|".repeat(self.optimizers.len()));
        out.push('\n');
        for row in &self.rows {
            let _ = write!(out, "| {} | {} |", row.dataset.label(), row.scenario.label());
            for (o, cell) in self.optimizers.iter().zip(&row.cells) {
                let text = match cell {
                    Some(c) => format!("{} ± {} ({})", pct(c.mean), pct(c.std), pct(c.best)),
                    None if row.failed.contains(o) => "failed".to_string(),
                    None => "n/a".to_string(),
                };
                if row.winners.contains(o) {
                    let _ = write!(out, " **{text}** |");
                } else {
                    let _ = write!(out, " {text} |");
                }
            }
            out.push('\n');
        }
        out
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::experiment::report::{FoldReport, SCHEMA_VERSION};

    pub(crate) fn fake(dataset: DatasetKind, scenario: Scenario, optimizer: OptimizerKind, seed: u64, acc: f64) -> RunReport {
        let mut config = ExperimentConfig::new(dataset, optimizer, scenario);
        config.seeds = vec![seed];
        RunReport {
            schema_version: SCHEMA_VERSION,
            config,
            scenario,
            seed,
            rows: 10,
            folds: vec![FoldReport {
                accuracy: acc,
                train_rows: 7,
                test_rows: 3,
                synthetic_rows: 0,
                inputs: 9,
                parameters: 152,
                final_loss: 0.1,
                evaluations: 10,
                trace: vec![0.2, 0.1],
            }],
            mean_accuracy: acc,
            best_final_loss: 0.1,
            wall_clock_seconds: 0.0,
        }
    }

    #[test]
    fn full_plan_has_36_cells() {
        let plan = MatrixPlan::default();
        assert_eq!(plan.cells().len(), 36);
        assert!(plan.validate().is_ok());
        let cfg = plan.cell_config(CellKey {
            dataset: DatasetKind::Prognostic,
            scenario: Scenario::C,
            optimizer: OptimizerKind::Mtocl,
        });
        assert_eq!(cfg, ExperimentConfig::new(DatasetKind::Prognostic, OptimizerKind::Mtocl, Scenario::C));
    }

    #[test]
    fn stats_by_hand() {
        let s = CellStats::from_accuracies(&[0.9, 0.95, 1.0]).unwrap();
        assert!((s.mean - 0.95).abs() < 1e-15);
        assert!((s.std - 0.05).abs() < 1e-12);
        assert_eq!(s.best, 1.0);
        assert_eq!(s.worst, 0.9);
        assert_eq!(CellStats::from_accuracies(&[0.7]).unwrap().std, 0.0);
        assert!(CellStats::from_accuracies(&[]).is_none());
    }

    #[test]
    fn ranking_puts_highest_first() {
        let o = DatasetKind::Original;
        let reports = vec![
            fake(o, Scenario::A, OptimizerKind::Pso, 1, 0.978),
            fake(o, Scenario::A, OptimizerKind::Mto, 1, 0.985),
            fake(o, Scenario::A, OptimizerKind::Mtocl, 1, 0.993),
        ];
        let ranking = compare_optimizers(&reports);
        assert_eq!(ranking.len(), 1);
        assert_eq!(ranking[0].leader(), Some(OptimizerKind::Mtocl));
        assert!(ranking[0].order.iter().all(|r| !r.tied));
        let mut reversed = reports.clone();
        reversed.reverse();
        assert_eq!(compare_optimizers(&reversed), ranking);
    }

    #[test]
    fn ties_are_flagged() {
        let o = DatasetKind::Diagnostic;
        let reports = vec![
            fake(o, Scenario::C, OptimizerKind::Pso, 1, 0.807),
            fake(o, Scenario::C, OptimizerKind::Mto, 1, 0.991),
            fake(o, Scenario::C, OptimizerKind::Mtocl, 1, 0.807),
        ];
        let r = &compare_optimizers(&reports)[0];
        assert_eq!(r.leader(), Some(OptimizerKind::Mto));
        assert!(!r.order[0].tied);
        assert!(r.order[1].tied && r.order[2].tied);
        assert_eq!(r.order[1].optimizer, OptimizerKind::Pso);
    }

    #[test]
    fn table_marks_winner_and_failures() {
        let o = DatasetKind::Original;
        let reports = vec![
            fake(o, Scenario::A, OptimizerKind::Pso, 1, 0.9),
            fake(o, Scenario::A, OptimizerKind::Pso, 2, 1.0),
            fake(o, Scenario::A, OptimizerKind::Mto, 1, 0.8),
        ];
        let failures = vec![CellFailure {
            key: CellKey {
                dataset: o,
                scenario: Scenario::A,
                optimizer: OptimizerKind::Mtocl,
            },
            seed: 1,
            message: "boom".into(),
        }];
        let t = SummaryTable::build(&reports, &failures);
        assert_eq!(t.rows.len(), 1);
        assert_eq!(t.rows[0].winners, vec![OptimizerKind::Pso]);
        let csv = t.to_csv();
        assert!(csv.contains("original,a,No-CV and No-PCA,95.00,7.07,100.00,2,80.00,0.00,80.00,1,,,,0,pso,mtocl"), "{csv}");
        let md = t.to_markdown();
        assert!(md.contains("**95.00 ± 7.07 (100.00)**"), "{md}");
        assert!(md.contains("| failed |"));
    }

    #[test]
    fn missing_dataset_is_a_cell_failure() {
        let plan = MatrixPlan {
            datasets: vec![DatasetKind::Prognostic],
            optimizers: vec![OptimizerKind::Pso],
            scenarios: vec![Scenario::A],
            seeds: vec![1, 2],
            ..MatrixPlan::default()
        };
        let out = run_matrix(&plan, &[], &|_, _, _| {}).unwrap();
        assert!(out.reports.is_empty());
        assert_eq!(out.failures.len(), 2);
        assert_eq!(out.summary().rows[0].failed, vec![OptimizerKind::Pso]);
    }
}
