//! The contract shared by the optimizers and the network adapter: a box-bounded
//! search space plus a loss to minimize.

use std::fmt;
use std::sync::Arc;

use crate::error::{check_len, Error, Result};

/// Per-dimension box bounds. `lower[i] <= upper[i]`; equal bounds pin a
/// coordinate.
#[derive(Debug, Clone, PartialEq)]
pub struct Bounds {
    lower: Vec<f64>,
    upper: Vec<f64>,
}

impl Bounds {
    pub fn new(lower: Vec<f64>, upper: Vec<f64>) -> Result<Self> {
        check_len(lower.len(), upper.len())?;
        if lower.is_empty() {
            return Err(Error::config("bounds must have at least one dimension"));
        }
        for (i, (lo, hi)) in lower.iter().zip(&upper).enumerate() {
            if !(lo.is_finite() && hi.is_finite()) || lo > hi {
                return Err(Error::config(format!(
                    "invalid bounds in dimension {i}: [{lo}, {hi}]"
                )));
            }
        }
        Ok(Self { lower, upper })
    }

    /// The same interval `[low, high]` in every dimension.
    pub fn uniform(dimension: usize, low: f64, high: f64) -> Result<Self> {
        Self::new(vec![low; dimension], vec![high; dimension])
    }

    pub fn dimension(&self) -> usize {
        self.lower.len()
    }

    pub fn lower(&self) -> &[f64] {
        &self.lower
    }

    pub fn upper(&self) -> &[f64] {
        &self.upper
    }

    pub fn width(&self, i: usize) -> f64 {
        self.upper[i] - self.lower[i]
    }

    pub fn contains(&self, position: &[f64]) -> bool {
        position.len() == self.dimension()
            && position
                .iter()
                .zip(self.lower.iter().zip(&self.upper))
                .all(|(x, (lo, hi))| *lo <= *x && *x <= *hi)
    }

    /// Saturates every coordinate into its interval.
    pub fn clamp_in_place(&self, position: &mut [f64]) {
        debug_assert_eq!(position.len(), self.dimension());
        for (x, (lo, hi)) in position.iter_mut().zip(self.lower.iter().zip(&self.upper)) {
            *x = x.clamp(*lo, *hi);
        }
    }
}

/// Returns `position` saturated into `bounds`.
///
/// ```
/// use swarmnet::objective::{clamp, Bounds};
///
/// let bounds = Bounds::uniform(2, -5.0, 5.0).unwrap();
/// assert_eq!(clamp(&[6.0, -7.0], &bounds).unwrap(), vec![5.0, -5.0]);
/// ```
pub fn clamp(position: &[f64], bounds: &Bounds) -> Result<Vec<f64>> {
    check_len(bounds.dimension(), position.len())?;
    let mut out = position.to_vec();
    bounds.clamp_in_place(&mut out);
    Ok(out)
}

type LossFn = dyn Fn(&[f64]) -> f64 + Send + Sync;

/// Dimension, bounds and loss of a minimization problem.
///
/// The loss must be deterministic and safe to call from several threads at
/// once.
#[derive(Clone)]
pub struct ObjectiveSpec {
    bounds: Bounds,
    loss: Arc<LossFn>,
}

impl ObjectiveSpec {
    pub fn new<F>(bounds: Bounds, loss: F) -> Self
    where
        F: Fn(&[f64]) -> f64 + Send + Sync + 'static,
    {
        Self {
            bounds,
            loss: Arc::new(loss),
        }
    }

    pub fn dimension(&self) -> usize {
        self.bounds.dimension()
    }

    pub fn bounds(&self) -> &Bounds {
        &self.bounds
    }

    pub fn evaluate(&self, position: &[f64]) -> f64 {
        debug_assert_eq!(position.len(), self.dimension());
        (self.loss)(position)
    }

    pub fn clamp(&self, position: &[f64]) -> Result<Vec<f64>> {
        clamp(position, &self.bounds)
    }
}

impl fmt::Debug for ObjectiveSpec {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_struct("ObjectiveSpec")
            .field("dimension", &self.dimension())
            .finish_non_exhaustive()
    }
}
