use std::io::Write;

use serde::{Deserialize, Serialize};

use crate::error::{check_len, Error, Result};

/// Class index of the negative label (benign / non-recurrent).
pub const NEGATIVE: u8 = 0;
/// Class index of the positive label (malignant / recurrent).
pub const POSITIVE: u8 = 1;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum ScalingState {
    Raw,
    Normalized,
    /// Projected onto principal components.
    Projected,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Provenance {
    Original,
    Diagnostic,
    Prognostic,
    Synthetic,
}

/// Dense binary-labelled tabular data, rows are samples.
#[derive(Debug, Clone, PartialEq)]
pub struct Dataset {
    features: Vec<f64>,
    n_cols: usize,
    labels: Vec<u8>,
    feature_names: Vec<String>,
    scaling: ScalingState,
    provenance: Provenance,
    synthetic: Vec<bool>,
}

impl Dataset {
    pub fn from_rows(
        rows: Vec<Vec<f64>>,
        labels: Vec<u8>,
        feature_names: Vec<String>,
        provenance: Provenance,
    ) -> Result<Self> {
        check_len(rows.len(), labels.len())?;
        let n_cols = feature_names.len();
        let mut features = Vec::with_capacity(rows.len() * n_cols);
        for row in &rows {
            check_len(n_cols, row.len())?;
            features.extend_from_slice(row);
        }
        if let Some(bad) = labels.iter().find(|&&l| l > POSITIVE) {
            return Err(Error::Data(format!("label {bad} is not binary")));
        }
        Ok(Self {
            synthetic: vec![false; labels.len()],
            features,
            n_cols,
            labels,
            feature_names,
            scaling: ScalingState::Raw,
            provenance,
        })
    }

    pub fn len(&self) -> usize {
        self.labels.len()
    }

    pub fn is_empty(&self) -> bool {
        self.labels.is_empty()
    }

    pub fn n_features(&self) -> usize {
        self.n_cols
    }

    pub fn row(&self, i: usize) -> &[f64] {
        &self.features[i * self.n_cols..(i + 1) * self.n_cols]
    }

    pub fn rows(&self) -> impl Iterator<Item = &[f64]> {
        // chunks_exact yields nothing for zero columns, which is what we want
        // only when there are no rows either.
        self.features.chunks_exact(self.n_cols.max(1))
    }

    pub fn column(&self, j: usize) -> impl Iterator<Item = f64> + '_ {
        self.rows().map(move |r| r[j])
    }

    pub fn labels(&self) -> &[u8] {
        &self.labels
    }

    pub fn feature_names(&self) -> &[String] {
        &self.feature_names
    }

    pub fn scaling(&self) -> ScalingState {
        self.scaling
    }

    pub fn provenance(&self) -> Provenance {
        self.provenance
    }

    /// Per-row flag marking oversampled rows.
    pub fn synthetic(&self) -> &[bool] {
        &self.synthetic
    }

    /// `[negative, positive]` counts.
    pub fn class_counts(&self) -> [usize; 2] {
        let pos = self.labels.iter().filter(|&&l| l == POSITIVE).count();
        [self.len() - pos, pos]
    }

    /// Rows at `indices`, in that order.
    pub fn subset(&self, indices: &[usize]) -> Dataset {
        let mut features = Vec::with_capacity(indices.len() * self.n_cols);
        for &i in indices {
            features.extend_from_slice(self.row(i));
        }
        Dataset {
            features,
            n_cols: self.n_cols,
            labels: indices.iter().map(|&i| self.labels[i]).collect(),
            feature_names: self.feature_names.clone(),
            scaling: self.scaling,
            provenance: self.provenance,
            synthetic: indices.iter().map(|&i| self.synthetic[i]).collect(),
        }
    }

    pub(crate) fn with_features(
        &self,
        features: Vec<f64>,
        n_cols: usize,
        feature_names: Vec<String>,
        scaling: ScalingState,
    ) -> Dataset {
        debug_assert_eq!(features.len(), n_cols * self.len());
        Dataset {
            features,
            n_cols,
            labels: self.labels.clone(),
            feature_names,
            scaling,
            provenance: self.provenance,
            synthetic: self.synthetic.clone(),
        }
    }

    pub(crate) fn push_synthetic(&mut self, row: &[f64], label: u8) {
        debug_assert_eq!(row.len(), self.n_cols);
        self.features.extend_from_slice(row);
        self.labels.push(label);
        self.synthetic.push(true);
    }

    /// FNV-1a over the feature bits and labels; used to detect mutation.
    pub fn checksum(&self) -> u64 {
        let mut h: u64 = 0xcbf2_9ce4_8422_2325;
        let mut eat = |bytes: &[u8]| {
            for b in bytes {
                h ^= u64::from(*b);
                h = h.wrapping_mul(0x0000_0100_0000_01b3);
            }
        };
        for v in &self.features {
            eat(&v.to_bits().to_le_bytes());
        }
        eat(&self.labels);
        h
    }

    /// Comma-separated export: one header line (`feature names..., label`),
    /// then one line per row with the class index.
    pub fn write_csv<W: Write>(&self, mut out: W) -> std::io::Result<()> {
        let mut header = self.feature_names.join(",");
        if !header.is_empty() {
            header.push(',');
        }
        header.push_str("label");
        writeln!(out, "{header}")?;
        for (row, label) in self.rows().zip(&self.labels) {
            let mut line = String::new();
            for v in row {
                line.push_str(&format!("{v},"));
            }
            line.push_str(&label.to_string());
            writeln!(out, "{line}")?;
        }
        Ok(())
    }
}
