//! Principal component analysis via eigendecomposition of the sample
//! covariance matrix.

use nalgebra::{DMatrix, SymmetricEigen};
use serde::{Deserialize, Serialize};

use super::dataset::{Dataset, ScalingState};
use crate::error::{check_len, Error, Result};

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct PcaModel {
    pub means: Vec<f64>,
    /// `components[c]` is the unit direction of component `c`, length `d`.
    pub components: Vec<Vec<f64>>,
    /// Variance captured by each component, non-increasing.
    pub explained_variance: Vec<f64>,
    /// Sum of all covariance eigenvalues (total variance).
    pub total_variance: f64,
}

impl PcaModel {
    pub fn n_components(&self) -> usize {
        self.components.len()
    }

    pub fn explained_variance_ratio(&self) -> Vec<f64> {
        self.explained_variance
            .iter()
            .map(|v| if self.total_variance > 0.0 { v / self.total_variance } else { 0.0 })
            .collect()
    }

    /// Projects one row onto the components.
    pub fn project(&self, row: &[f64]) -> Vec<f64> {
        self.components
            .iter()
            .map(|c| {
                c.iter()
                    .zip(row.iter().zip(&self.means))
                    .map(|(w, (x, m))| w * (x - m))
                    .sum()
            })
            .collect()
    }

    /// Maps projected coordinates back to the input space.
    pub fn reconstruct(&self, scores: &[f64]) -> Vec<f64> {
        let mut out = self.means.clone();
        for (s, c) in scores.iter().zip(&self.components) {
            for (o, w) in out.iter_mut().zip(c) {
                *o += s * w;
            }
        }
        out
    }

    pub fn transform(&self, ds: &Dataset) -> Result<Dataset> {
        check_len(self.means.len(), ds.n_features())?;
        let k = self.n_components();
        let mut features = Vec::with_capacity(ds.len() * k);
        for row in ds.rows() {
            features.extend(self.project(row));
        }
        let names = (1..=k).map(|c| format!("pc{c}")).collect();
        Ok(ds.with_features(features, k, names, ScalingState::Projected))
    }
}

/// Fits the top `k` principal directions of `train`.
pub fn fit_pca(train: &Dataset, k: usize) -> Result<PcaModel> {
    let d = train.n_features();
    let n = train.len();
    if k == 0 || k > d {
        return Err(Error::config(format!(
            "PCA component count must be in 1..={d}, got {k}"
        )));
    }
    if n < 2 {
        return Err(Error::config("PCA needs at least two rows"));
    }
    let means: Vec<f64> = (0..d)
        .map(|j| train.column(j).sum::<f64>() / n as f64)
        .collect();
    let mut cov = DMatrix::<f64>::zeros(d, d);
    for row in train.rows() {
        for a in 0..d {
            let da = row[a] - means[a];
            for b in a..d {
                cov[(a, b)] += da * (row[b] - means[b]);
            }
        }
    }
    for a in 0..d {
        for b in a..d {
            let v = cov[(a, b)] / (n - 1) as f64;
            cov[(a, b)] = v;
            cov[(b, a)] = v;
        }
    }

    let eig = SymmetricEigen::new(cov);
    let mut order: Vec<usize> = (0..d).collect();
    order.sort_by(|&a, &b| eig.eigenvalues[b].total_cmp(&eig.eigenvalues[a]).then(a.cmp(&b)));
    let total_variance = eig.eigenvalues.iter().map(|v| v.max(0.0)).sum();

    let mut components = Vec::with_capacity(k);
    let mut explained = Vec::with_capacity(k);
    for &c in order.iter().take(k) {
        let mut v: Vec<f64> = eig.eigenvectors.column(c).iter().copied().collect();
        // Fix the sign so the largest-magnitude loading is positive.
        let pivot = v
            .iter()
            .copied()
            .fold(0.0f64, |acc, x| if x.abs() > acc.abs() { x } else { acc });
        if pivot < 0.0 {
            v.iter_mut().for_each(|x| *x = -*x);
        }
        components.push(v);
        explained.push(eig.eigenvalues[c].max(0.0));
    }
    Ok(PcaModel {
        means,
        components,
        explained_variance: explained,
        total_variance,
    })
}
