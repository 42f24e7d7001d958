use std::time::Instant;

use rayon::prelude::*;

use super::report::{FoldReport, RunReport, SCHEMA_VERSION};
use super::ExperimentConfig;
use crate::data::{fit_pca, make_splits, normalize, smote, Dataset, MinMaxScaler};
use crate::error::{Error, Result};
use crate::nn;
use crate::rng::RngStream;

/// Train/test pair after scaling, oversampling and projection.
#[derive(Debug, Clone)]
pub struct PreparedFold {
    pub train: Dataset,
    pub test: Dataset,
    pub synthetic_rows: usize,
}

/// Fits every transform on `train` alone and applies it to both sides.
pub fn prepare_fold(
    train: &Dataset,
    test: &Dataset,
    cfg: &ExperimentConfig,
    rng: &mut RngStream,
) -> Result<PreparedFold> {
    let scaler = MinMaxScaler::fit(train);
    let mut train = scaler.transform(train)?;
    let mut test = scaler.transform(test)?;
    let before = train.len();
    if let Some(s) = &cfg.smote {
        train = smote(&train, s, rng)?;
    }
    let synthetic_rows = train.len() - before;
    if let Some(k) = cfg.pca {
        let model = fit_pca(&train, k)?;
        train = model.transform(&train)?;
        test = model.transform(&test)?;
    }
    Ok(PreparedFold {
        train,
        test,
        synthetic_rows,
    })
}

/// Whole-dataset preprocessing used by the compatibility mode.
fn prepare_whole(data: &Dataset, cfg: &ExperimentConfig, rng: &mut RngStream) -> Result<(Dataset, usize)> {
    let mut out = normalize(data);
    if let Some(s) = &cfg.smote {
        out = smote(&out, s, rng)?;
    }
    let synthetic = out.len() - data.len();
    if let Some(k) = cfg.pca {
        out = fit_pca(&out, k)?.transform(&out)?;
    }
    Ok((out, synthetic))
}

fn train_and_score(fold: PreparedFold, cfg: &ExperimentConfig, rng: &mut RngStream) -> Result<FoldReport> {
    let topo = cfg.topology(fold.train.n_features())?;
    let (inputs, parameters) = (topo.input_size, topo.parameter_count());
    let train_rows = fold.train.len();
    let spec = nn::as_objective(fold.train, topo.clone())?;
    let result = cfg.settings.run(cfg.optimizer, &spec, rng)?;
    let accuracy = nn::accuracy(&result.best_position, &fold.test, &topo)?;
    Ok(FoldReport {
        accuracy,
        train_rows,
        test_rows: fold.test.len(),
        synthetic_rows: fold.synthetic_rows,
        inputs,
        parameters,
        final_loss: result.best_loss,
        evaluations: result.evaluations,
        trace: result.trace,
    })
}

/// Runs one cell under one seed. `data` is the cleaned, unscaled dataset.
pub fn run_seed(cfg: &ExperimentConfig, data: &Dataset, seed: u64) -> Result<RunReport> {
    let started = Instant::now();
    let context = || format!("{} seed {seed}", cfg.cell_name());
    cfg.validate().map_err(|e| e.context(context()))?;
    if data.is_empty() {
        return Err(Error::Data("dataset has no rows".into()).context(context()));
    }

    let mut root = RngStream::new(seed);
    let mut split_rng = root.fork();
    let mut whole_rng = root.fork();

    let (source, compat_synthetic) = if cfg.paper_compat {
        let (prepared, synthetic) = prepare_whole(data, cfg, &mut whole_rng).map_err(|e| e.context(context()))?;
        (prepared, synthetic)
    } else {
        (data.clone(), 0)
    };
    let splits = make_splits(source.labels(), &cfg.split_plan(), &mut split_rng)
        .map_err(|e| e.context(context()))?;
    let fold_rngs: Vec<RngStream> = splits.iter().map(|_| root.fork()).collect();

    let folds = splits
        .into_par_iter()
        .zip(fold_rngs)
        .map(|(split, mut rng)| {
            let train = source.subset(&split.train);
            let test = source.subset(&split.test);
            let fold = if cfg.paper_compat {
                let synthetic_rows = train.synthetic().iter().filter(|s| **s).count();
                PreparedFold {
                    train,
                    test,
                    synthetic_rows,
                }
            } else {
                prepare_fold(&train, &test, cfg, &mut rng)?
            };
            train_and_score(fold, cfg, &mut rng)
        })
        .collect::<Result<Vec<_>>>()
        .map_err(|e| e.context(context()))?;

    if compat_synthetic > 0 {
        log::info!("{}: {compat_synthetic} synthetic rows added before splitting", context());
    }
    let mean_accuracy = folds.iter().map(|f| f.accuracy).sum::<f64>() / folds.len() as f64;
    let best_final_loss = folds.iter().map(|f| f.final_loss).fold(f64::INFINITY, f64::min);
    Ok(RunReport {
        schema_version: SCHEMA_VERSION,
        config: cfg.clone(),
        scenario: cfg.scenario(),
        seed,
        rows: data.len(),
        folds,
        mean_accuracy,
        best_final_loss,
        wall_clock_seconds: started.elapsed().as_secs_f64(),
    })
}

/// One report per seed in `cfg.seeds`.
pub fn run_scenario(cfg: &ExperimentConfig, data: &Dataset) -> Result<Vec<RunReport>> {
    cfg.seeds.iter().map(|&s| run_seed(cfg, data, s)).collect()
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::data::{DatasetKind, Provenance, SmoteConfig};
    use crate::experiment::Scenario;
    use crate::optimizer::OptimizerKind;
    use crate::rng::UniformSource;

    /// Two noisy Gaussian-ish blobs in 3-D, 2:1 imbalance.
    pub(crate) fn blobs(n: usize, seed: u64) -> Dataset {
        let mut rng = RngStream::new(seed);
        let mut rows = Vec::new();
        let mut labels = Vec::new();
        for i in 0..n {
            let label = u8::from(i % 3 == 0);
            let c = if label == 1 { 6.0 } else { 2.0 };
            rows.push((0..3).map(|j| c + j as f64 + 2.0 * rng.next_uniform()).collect());
            labels.push(label);
        }
        let names = (0..3).map(|j| format!("x{j}")).collect();
        Dataset::from_rows(rows, labels, names, Provenance::Synthetic).unwrap()
    }

    fn quick(scenario: Scenario, optimizer: OptimizerKind) -> ExperimentConfig {
        let mut c = ExperimentConfig::new(DatasetKind::Original, optimizer, scenario);
        c.settings.iterations = 12;
        c.seeds = vec![3];
        c.folds = 3;
        c.pca = scenario.pca().then_some(2);
        c
    }

    #[test]
    fn holdout_run_shapes() {
        let data = blobs(60, 1);
        let mut cfg = quick(Scenario::A, OptimizerKind::Mtocl);
        cfg.settings.iterations = 150;
        let r = run_seed(&cfg, &data, 3).unwrap();
        assert_eq!(r.folds.len(), 1);
        assert_eq!(r.folds[0].train_rows + r.folds[0].test_rows, 60);
        assert_eq!(r.folds[0].trace.len(), 151);
        assert_eq!(r.folds[0].inputs, 3);
        assert_eq!(r.rows, 60);
        assert!(r.mean_accuracy > 0.8, "{}", r.mean_accuracy);
    }

    #[test]
    fn cv_with_pca() {
        let data = blobs(45, 2);
        let r = run_seed(&quick(Scenario::D, OptimizerKind::Pso), &data, 3).unwrap();
        assert_eq!(r.folds.len(), 3);
        assert_eq!(r.folds.iter().map(|f| f.test_rows).sum::<usize>(), 45);
        assert!(r.folds.iter().all(|f| f.inputs == 2));
        let mean = r.accuracies().iter().sum::<f64>() / 3.0;
        assert!((mean - r.mean_accuracy).abs() < 1e-12);
        assert_eq!(r.best_final_loss, r.folds.iter().map(|f| f.final_loss).fold(f64::INFINITY, f64::min));
    }

    #[test]
    fn same_seed_same_json() {
        let data = blobs(40, 4);
        let cfg = quick(Scenario::B, OptimizerKind::Mto);
        let a = run_seed(&cfg, &data, 9).unwrap().to_json().unwrap();
        let b = run_seed(&cfg, &data, 9).unwrap().to_json().unwrap();
        assert_eq!(a, b);
        let c = run_seed(&cfg, &data, 10).unwrap().to_json().unwrap();
        assert_ne!(a, c);
    }

    #[test]
    fn zero_iterations_reports_random_network() {
        let data = blobs(30, 5);
        let mut cfg = quick(Scenario::A, OptimizerKind::Pso);
        cfg.settings.iterations = 0;
        let r = run_seed(&cfg, &data, 1).unwrap();
        assert_eq!(r.folds[0].trace.len(), 1);
        assert!((0.0..=1.0).contains(&r.mean_accuracy));
    }

    #[test]
    fn test_rows_never_touch_the_fit() {
        let data = blobs(30, 6);
        let cfg = {
            let mut c = quick(Scenario::C, OptimizerKind::Pso);
            c.smote = Some(SmoteConfig { ratio: 1.5, neighbors: 3 });
            c
        };
        let train = data.subset(&(0..20).collect::<Vec<_>>());
        let test = data.subset(&(20..30).collect::<Vec<_>>());
        let mut wild = test.clone();
        // Same labels, wildly different features on the test side.
        let rows: Vec<Vec<f64>> = wild.rows().map(|r| r.iter().map(|v| v * 100.0 - 7.0).collect()).collect();
        wild = Dataset::from_rows(rows, wild.labels().to_vec(), wild.feature_names().to_vec(), Provenance::Synthetic).unwrap();
        let a = prepare_fold(&train, &test, &cfg, &mut RngStream::new(1)).unwrap();
        let b = prepare_fold(&train, &wild, &cfg, &mut RngStream::new(1)).unwrap();
        assert_eq!(a.train, b.train);
        assert!(a.synthetic_rows > 0);
    }

    #[test]
    fn compat_mode_runs() {
        let data = blobs(36, 7);
        let mut cfg = quick(Scenario::B, OptimizerKind::Mtocl);
        cfg.paper_compat = true;
        cfg.smote = Some(SmoteConfig::default());
        let r = run_seed(&cfg, &data, 2).unwrap();
        assert_eq!(r.folds.len(), 3);
    }

    #[test]
    fn errors_carry_cell_context() {
        let data = blobs(12, 8);
        let mut cfg = quick(Scenario::C, OptimizerKind::Pso);
        cfg.pca = Some(5);
        let err = run_seed(&cfg, &data, 1).unwrap_err();
        assert!(err.to_string().contains("original-c-pso seed 1"), "{err}");
        assert!(err.is_usage());
    }
}
