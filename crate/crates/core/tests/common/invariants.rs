//! Structural invariants, parameterized so they can be driven by proptest
//! or by a fixed sweep.

use std::collections::BTreeSet;

use swarmnet::benchmarks::sphere;
use swarmnet::data::{fit_pca, make_splits, smote, Dataset, DatasetKind, Provenance, SmoteConfig, SplitPlan};
use swarmnet::experiment::{prepare_fold, run_matrix, run_seed, MatrixPlan};
use swarmnet::mto::{group_topology, Group, MtoConfig, MtoState};
use swarmnet::nn::{flatten, unflatten};
use swarmnet::{
    Bounds, ExperimentConfig, NetworkTopology, ObjectiveSpec, OptimizerKind, RngStream, Scenario, UniformSource,
};

/// Two shifted uniform blobs with a `pos_share` fraction of positives.
pub fn blobs(n: usize, d: usize, pos_share: f64, seed: u64) -> Dataset {
    let mut rng = RngStream::new(seed);
    let n_pos = ((n as f64) * pos_share).round() as usize;
    let mut rows = Vec::new();
    let mut labels = Vec::new();
    for i in 0..n {
        let label = u8::from(i < n_pos);
        let shift = if label == 1 { 3.0 } else { 0.0 };
        rows.push((0..d).map(|j| shift + (j as f64) + 2.0 * rng.next_uniform()).collect());
        labels.push(label);
    }
    let names = (0..d).map(|j| format!("f{j}")).collect();
    Dataset::from_rows(rows, labels, names, Provenance::Original).unwrap()
}

pub fn group_partition(n: usize) {
    let topo = group_topology(n).unwrap();
    let mut counts = [0usize; 4];
    for rank in 1..=n {
        let g = topo.group_of(rank).unwrap_or_else(|| panic!("rank {rank} of {n} unassigned"));
        counts[match g {
            Group::Tmt => 0,
            Group::Fpct => 1,
            Group::Fct => 2,
            Group::Lpct => 3,
        }] += 1;
    }
    assert_eq!(topo.group_of(0), None);
    assert_eq!(topo.group_of(n + 1), None);
    assert_eq!(counts, [1, n / 2 - 2, 3, n / 2 - 2], "N = {n}");
    assert_eq!(topo.offspring, n / 2 - 1);
}

pub fn climate_conservation(n: usize, d: usize, el: f64, seed: u64) {
    let cfg = MtoConfig {
        population: n,
        elimination: el,
        ..MtoConfig::default()
    };
    let spec = ObjectiveSpec::new(Bounds::uniform(d, -3.0, 3.0).unwrap(), sphere);
    let mut rng = RngStream::new(seed);
    let mut state = MtoState::initialize(&spec, &cfg, &mut rng).unwrap();
    for _ in 0..3 {
        state.sweep(&spec, &cfg, &mut rng).unwrap();
    }
    let before = state.evaluations();
    state.climate_event(&spec, &cfg, &mut rng).unwrap();
    assert_eq!(state.ranked().len(), n);
    assert_eq!(state.stalled().len(), n);
    assert_eq!(state.evaluations(), before + n);
    assert!(state.stalled().iter().all(|s| !s));
    for w in state.ranked().windows(2) {
        assert!(w[0].loss <= w[1].loss);
    }
    for c in state.ranked() {
        assert!(spec.bounds().contains(&c.position));
        assert_eq!(c.loss, sphere(&c.position));
    }
}

pub fn flatten_round_trip(input: usize, hidden: Vec<usize>, seed: u64) {
    let topo = NetworkTopology::new(input, hidden).unwrap();
    let mut rng = RngStream::new(seed);
    let params: Vec<f64> = (0..topo.parameter_count()).map(|_| rng.uniform_in(-5.0, 5.0)).collect();
    let layers = unflatten(&params, &topo).unwrap();
    assert_eq!(layers.len(), topo.layer_shapes().len());
    assert_eq!(flatten(&layers), params);
    assert!(unflatten(&params[1..], &topo).is_err());
}

pub fn fold_partition(k: usize, n: usize, pos_share: f64, seed: u64) {
    let n_pos = ((n as f64) * pos_share).round() as usize;
    let labels: Vec<u8> = (0..n).map(|i| u8::from(i < n_pos)).collect();
    let splits = make_splits(&labels, &SplitPlan::k_fold(k), &mut RngStream::new(seed)).unwrap();
    assert_eq!(splits.len(), k);
    let mut seen = BTreeSet::new();
    for s in &splits {
        assert!(!s.test.is_empty());
        let test: BTreeSet<usize> = s.test.iter().copied().collect();
        let train: BTreeSet<usize> = s.train.iter().copied().collect();
        assert_eq!(test.len(), s.test.len());
        assert!(test.is_disjoint(&train));
        assert_eq!(test.len() + train.len(), n);
        for &i in &test {
            assert!(seen.insert(i), "row {i} tested twice");
        }
    }
    assert_eq!(seen.len(), n);
}

pub fn pca_orthonormal(n: usize, d: usize, seed: u64) {
    let ds = blobs(n, d, 0.4, seed);
    let k = d.min(4);
    let model = fit_pca(&ds, k).unwrap();
    assert_eq!(model.n_components(), k);
    for a in 0..k {
        for b in 0..k {
            let dot: f64 = model.components[a].iter().zip(&model.components[b]).map(|(x, y)| x * y).sum();
            let want = if a == b { 1.0 } else { 0.0 };
            assert!((dot - want).abs() <= 1e-10, "<{a},{b}> = {dot}");
        }
    }
    for w in model.explained_variance.windows(2) {
        assert!(w[0] >= w[1] - 1e-12);
    }
}

/// Returns false when the draw has too few minority rows to oversample.
pub fn smote_arithmetic(n: usize, pos_share: f64, ratio: f64, seed: u64) -> bool {
    let ds = blobs(n, 3, pos_share, seed);
    let [neg, pos] = ds.class_counts();
    if pos <= 5 {
        return false;
    }
    let cfg = SmoteConfig { ratio, neighbors: 5 };
    let out = smote(&ds, &cfg, &mut RngStream::new(seed ^ 1)).unwrap();
    // Smallest minority count m with neg <= ratio * m, found by search.
    let mut target = pos;
    while (neg as f64) > ratio * target as f64 {
        target += 1;
    }
    let [neg2, pos2] = out.class_counts();
    assert_eq!(neg2, neg);
    assert_eq!(pos2, target);
    assert_eq!(out.len() - ds.len(), target - pos);
    assert_eq!(out.synthetic().iter().filter(|s| **s).count(), target - pos);
    for i in 0..ds.len() {
        assert_eq!(out.row(i), ds.row(i));
        assert!(!out.synthetic()[i]);
    }
    // Synthetic rows are convex mixes of minority rows, so they stay inside
    // the minority bounding box.
    for j in 0..3 {
        let col: Vec<f64> = (0..ds.len()).filter(|&i| ds.labels()[i] == 1).map(|i| ds.row(i)[j]).collect();
        let lo = col.iter().copied().fold(f64::INFINITY, f64::min);
        let hi = col.iter().copied().fold(f64::NEG_INFINITY, f64::max);
        for i in ds.len()..out.len() {
            assert_eq!(out.labels()[i], 1);
            assert!(out.row(i)[j] >= lo - 1e-12 && out.row(i)[j] <= hi + 1e-12);
        }
    }
    true
}

fn quick_cfg(kind: DatasetKind, opt: OptimizerKind, scenario: Scenario) -> ExperimentConfig {
    let mut cfg = ExperimentConfig::new(kind, opt, scenario);
    cfg.settings.iterations = 6;
    cfg.folds = 3;
    cfg.pca = cfg.pca.map(|_| 3);
    cfg.seeds = vec![7];
    cfg
}

/// Same seed, byte-identical JSON on one thread and on three.
pub fn seed_determinism() {
    let data = blobs(90, 5, 0.3, 3);
    for opt in OptimizerKind::ALL {
        let mut cfg = quick_cfg(DatasetKind::Prognostic, opt, Scenario::D);
        cfg.smote = Some(SmoteConfig::default());
        let one = rayon::ThreadPoolBuilder::new().num_threads(1).build().unwrap();
        let three = rayon::ThreadPoolBuilder::new().num_threads(3).build().unwrap();
        let a = one.install(|| run_seed(&cfg, &data, 11)).unwrap().to_json().unwrap();
        let b = three.install(|| run_seed(&cfg, &data, 11)).unwrap().to_json().unwrap();
        let c = run_seed(&cfg, &data, 12).unwrap().to_json().unwrap();
        assert_eq!(a, b, "{opt}");
        assert_ne!(a, c, "{opt}: different seeds should differ");
    }
}

pub fn scenario_isolation() {
    let data: Vec<(DatasetKind, Dataset)> = DatasetKind::ALL
        .iter()
        .enumerate()
        .map(|(i, &k)| (k, blobs(60, 4 + i, 0.35, i as u64)))
        .collect();
    let before: Vec<u64> = data.iter().map(|(_, d)| d.checksum()).collect();
    let plan = MatrixPlan {
        seeds: vec![1],
        folds: 3,
        pca_components: Some(2),
        settings: swarmnet::OptimizerSettings {
            iterations: 2,
            ..Default::default()
        },
        ..MatrixPlan::default()
    };
    let outcome = run_matrix(&plan, &data, &|_, _, _| {}).unwrap();
    assert_eq!(outcome.reports.len(), 36);
    assert!(outcome.failures.is_empty());
    let after: Vec<u64> = data.iter().map(|(_, d)| d.checksum()).collect();
    assert_eq!(before, after);
}

/// Held-out rows never influence scaling, SMOTE or PCA.
pub fn no_leakage() {
    let ds = blobs(80, 6, 0.3, 5);
    let split = &make_splits(ds.labels(), &SplitPlan::holdout(0.7), &mut RngStream::new(2)).unwrap()[0];
    let train = ds.subset(&split.train);
    let test = ds.subset(&split.test);
    let mut cfg = quick_cfg(DatasetKind::Prognostic, OptimizerKind::Pso, Scenario::C);
    cfg.smote = Some(SmoteConfig::default());

    let mut noise = RngStream::new(99);
    let rows: Vec<Vec<f64>> = (0..test.len())
        .map(|_| (0..6).map(|_| noise.uniform_in(-50.0, 50.0)).collect())
        .collect();
    let other = Dataset::from_rows(rows, test.labels().to_vec(), test.feature_names().to_vec(), Provenance::Original)
        .unwrap();

    let a = prepare_fold(&train, &test, &cfg, &mut RngStream::new(4)).unwrap();
    let b = prepare_fold(&train, &other, &cfg, &mut RngStream::new(4)).unwrap();
    assert_eq!(a.train, b.train);
    assert_eq!(a.synthetic_rows, b.synthetic_rows);
    assert!(a.synthetic_rows > 0);
    assert_ne!(a.test, b.test);
    assert_eq!(a.test.len(), test.len(), "held-out rows are never resampled");
}
