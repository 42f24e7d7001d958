//! Stratified holdout and k-fold partitions.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::rng::RngStream;

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "lowercase")]
pub enum SplitPlan {
    Holdout { train_fraction: f64, stratified: bool },
    KFold { k: usize, stratified: bool },
}

impl SplitPlan {
    pub fn holdout(train_fraction: f64) -> Self {
        SplitPlan::Holdout {
            train_fraction,
            stratified: true,
        }
    }

    pub fn k_fold(k: usize) -> Self {
        SplitPlan::KFold { k, stratified: true }
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct Split {
    pub train: Vec<usize>,
    pub test: Vec<usize>,
}

/// Shuffled sample indices, grouped by class (negatives first) when
/// stratifying.
fn shuffled_groups(labels: &[u8], stratified: bool, rng: &mut RngStream) -> Vec<Vec<usize>> {
    let mut groups: Vec<Vec<usize>> = if stratified {
        (0..=1u8)
            .map(|c| (0..labels.len()).filter(|&i| labels[i] == c).collect())
            .collect()
    } else {
        vec![(0..labels.len()).collect()]
    };
    for g in &mut groups {
        rng.shuffle(g);
    }
    groups
}

pub fn make_splits(labels: &[u8], plan: &SplitPlan, rng: &mut RngStream) -> Result<Vec<Split>> {
    let n = labels.len();
    match *plan {
        SplitPlan::Holdout {
            train_fraction,
            stratified,
        } => {
            if !(train_fraction > 0.0 && train_fraction < 1.0) {
                return Err(Error::config(format!(
                    "train fraction must lie in (0, 1), got {train_fraction}"
                )));
            }
            if n < 2 {
                return Err(Error::config("holdout split needs at least two samples"));
            }
            let mut split = Split {
                train: Vec::new(),
                test: Vec::new(),
            };
            for g in shuffled_groups(labels, stratified, rng) {
                let cut = (train_fraction * g.len() as f64).round() as usize;
                split.train.extend_from_slice(&g[..cut]);
                split.test.extend_from_slice(&g[cut..]);
            }
            if split.train.is_empty() || split.test.is_empty() {
                return Err(Error::config(format!(
                    "holdout fraction {train_fraction} leaves an empty side on {n} samples"
                )));
            }
            Ok(vec![split])
        }
        SplitPlan::KFold { k, stratified } => {
            if k < 2 {
                return Err(Error::config(format!("k-fold needs k >= 2, got {k}")));
            }
            if n < k {
                return Err(Error::config(format!("{n} samples cannot fill {k} folds")));
            }
            let mut stratified = stratified;
            if stratified {
                let pos = labels.iter().filter(|&&l| l == 1).count();
                if pos < k || n - pos < k {
                    log::warn!(
                        "a class has fewer than {k} samples; falling back to unstratified folds"
                    );
                    stratified = false;
                }
            }
            // Deal the concatenated class groups round-robin so fold sizes and
            // per-class counts both differ by at most one.
            let mut fold_of = vec![0usize; n];
            let dealt = shuffled_groups(labels, stratified, rng).concat();
            for (pos, &i) in dealt.iter().enumerate() {
                fold_of[i] = pos % k;
            }
            Ok((0..k)
                .map(|f| {
                    let (test, train): (Vec<usize>, Vec<usize>) = (0..n).partition(|&i| fold_of[i] == f);
                    Split { train, test }
                })
                .collect())
        }
    }
}
