//! Synthetic minority oversampling.
//!
//! Minority rows are visited round-robin; each visit picks one of the row's
//! `k` nearest minority neighbours at random and emits a point a uniform
//! fraction of the way along the segment between them. Generation stops once
//! `majority / minority <= ratio`.

use serde::{Deserialize, Serialize};

use super::dataset::{Dataset, NEGATIVE, POSITIVE};
use crate::error::{Error, Result};
use crate::rng::UniformSource;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default)]
pub struct SmoteConfig {
    /// Target majority:minority ratio.
    pub ratio: f64,
    pub neighbors: usize,
}

impl Default for SmoteConfig {
    fn default() -> Self {
        Self {
            ratio: 2.0,
            neighbors: 5,
        }
    }
}

/// Number of synthetic rows needed to bring `majority:minority` down to
/// `ratio`.
pub fn synthetic_needed(majority: usize, minority: usize, ratio: f64) -> usize {
    if minority == 0 || majority as f64 <= ratio * minority as f64 {
        return 0;
    }
    let target = (majority as f64 / ratio).ceil() as usize;
    target.saturating_sub(minority)
}

fn squared_distance(a: &[f64], b: &[f64]) -> f64 {
    a.iter().zip(b).map(|(x, y)| (x - y) * (x - y)).sum()
}

/// Returns `ds` with synthetic minority rows appended. Original rows are
/// untouched and keep their order.
pub fn smote<R: UniformSource + ?Sized>(ds: &Dataset, cfg: &SmoteConfig, rng: &mut R) -> Result<Dataset> {
    if cfg.ratio.is_nan() || cfg.ratio < 1.0 {
        return Err(Error::config(format!("SMOTE ratio must be at least 1, got {}", cfg.ratio)));
    }
    let [neg, pos] = ds.class_counts();
    let (minority_label, majority, minority) = if pos <= neg {
        (POSITIVE, neg, pos)
    } else {
        (NEGATIVE, pos, neg)
    };
    let needed = synthetic_needed(majority, minority, cfg.ratio);
    if needed == 0 {
        return Ok(ds.clone());
    }
    if minority <= cfg.neighbors || cfg.neighbors == 0 {
        return Err(Error::config(format!(
            "SMOTE needs more than {} minority samples, found {minority}",
            cfg.neighbors
        )));
    }

    let members: Vec<usize> = (0..ds.len())
        .filter(|&i| ds.labels()[i] == minority_label)
        .collect();
    let neighbours: Vec<Vec<usize>> = members
        .iter()
        .map(|&i| {
            let mut others: Vec<(f64, usize)> = members
                .iter()
                .filter(|&&j| j != i)
                .map(|&j| (squared_distance(ds.row(i), ds.row(j)), j))
                .collect();
            others.sort_by(|a, b| a.0.total_cmp(&b.0).then(a.1.cmp(&b.1)));
            others.truncate(cfg.neighbors);
            others.into_iter().map(|(_, j)| j).collect()
        })
        .collect();

    let mut out = ds.clone();
    let mut point = vec![0.0; ds.n_features()];
    for s in 0..needed {
        let slot = s % members.len();
        let base = ds.row(members[slot]);
        let nn = ds.row(neighbours[slot][rng.index(cfg.neighbors)]);
        let gap = rng.next_uniform();
        for ((p, b), n) in point.iter_mut().zip(base).zip(nn) {
            *p = b + gap * (n - b);
        }
        out.push_synthetic(&point, minority_label);
    }
    log::debug!("SMOTE added {needed} synthetic rows ({majority} vs {minority})");
    Ok(out)
}
