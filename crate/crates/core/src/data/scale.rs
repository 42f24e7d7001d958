//! Per-column min-max scaling to `[0, 1]`.

use serde::{Deserialize, Serialize};

use super::dataset::{Dataset, ScalingState};
use crate::error::{check_len, Result};

/// Column minima and maxima learned from one dataset, applicable to others.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct MinMaxScaler {
    pub mins: Vec<f64>,
    pub maxs: Vec<f64>,
}

impl MinMaxScaler {
    pub fn fit(ds: &Dataset) -> Self {
        let d = ds.n_features();
        let mut mins = vec![f64::INFINITY; d];
        let mut maxs = vec![f64::NEG_INFINITY; d];
        for row in ds.rows() {
            for (j, &v) in row.iter().enumerate() {
                mins[j] = mins[j].min(v);
                maxs[j] = maxs[j].max(v);
            }
        }
        Self { mins, maxs }
    }

    /// `(x - min) / (max - min)`, saturated into `[0, 1]` for values outside
    /// the fitted range. Constant columns map to 0.
    pub fn transform(&self, ds: &Dataset) -> Result<Dataset> {
        check_len(self.mins.len(), ds.n_features())?;
        let mut out = Vec::with_capacity(ds.len() * ds.n_features());
        for row in ds.rows() {
            for (j, &v) in row.iter().enumerate() {
                let span = self.maxs[j] - self.mins[j];
                out.push(if span > 0.0 {
                    ((v - self.mins[j]) / span).clamp(0.0, 1.0)
                } else {
                    0.0
                });
            }
        }
        Ok(ds.with_features(
            out,
            ds.n_features(),
            ds.feature_names().to_vec(),
            ScalingState::Normalized,
        ))
    }
}

/// Fits on `ds` and scales it.
pub fn normalize(ds: &Dataset) -> Dataset {
    MinMaxScaler::fit(ds)
        .transform(ds)
        .expect("scaler fitted on the same dataset")
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::data::dataset::Provenance;

    fn ds(rows: Vec<Vec<f64>>) -> Dataset {
        let n = rows.len();
        let d = rows[0].len();
        Dataset::from_rows(rows, vec![0; n], (0..d).map(|j| format!("f{j}")).collect(), Provenance::Original).unwrap()
    }

    #[test]
    fn endpoints_map_to_unit_interval() {
        let out = normalize(&ds(vec![vec![2.0], vec![4.0], vec![6.0]]));
        assert_eq!(out.column(0).collect::<Vec<_>>(), vec![0.0, 0.5, 1.0]);
        assert_eq!(out.scaling(), ScalingState::Normalized);
    }

    #[test]
    fn constant_column_maps_to_zero() {
        let out = normalize(&ds(vec![vec![3.0], vec![3.0], vec![3.0]]));
        assert_eq!(out.column(0).collect::<Vec<_>>(), vec![0.0, 0.0, 0.0]);
    }

    #[test]
    fn normalizing_twice_is_stable() {
        let once = normalize(&ds(vec![vec![1.0, -3.0], vec![7.5, 2.0], vec![3.3, 0.1]]));
        let twice = normalize(&once);
        for (a, b) in once.rows().flatten().zip(twice.rows().flatten()) {
            assert!((a - b).abs() < 1e-12);
        }
    }

    #[test]
    fn unseen_values_saturate() {
        let scaler = MinMaxScaler::fit(&ds(vec![vec![0.0], vec![10.0]]));
        let out = scaler.transform(&ds(vec![vec![-5.0], vec![5.0], vec![20.0]])).unwrap();
        assert_eq!(out.column(0).collect::<Vec<_>>(), vec![0.0, 0.5, 1.0]);
    }
}
