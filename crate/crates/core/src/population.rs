//! Candidates and ranked populations.

use rayon::prelude::*;

use crate::error::{Error, Result};
use crate::objective::{Bounds, ObjectiveSpec};
use crate::rng::UniformSource;

/// One agent: a position in the search space and its cached loss.
#[derive(Debug, Clone, PartialEq)]
pub struct Candidate {
    pub position: Vec<f64>,
    pub loss: f64,
}

impl Candidate {
    pub fn evaluated(position: Vec<f64>, spec: &ObjectiveSpec) -> Self {
        let loss = spec.evaluate(&position);
        Self { position, loss }
    }
}

/// A fixed-size set of candidates kept in rank order: index 0 holds the
/// lowest loss.
#[derive(Debug, Clone, PartialEq)]
pub struct Population {
    members: Vec<Candidate>,
}

impl Population {
    /// Builds a population and ranks it.
    pub fn from_candidates(members: Vec<Candidate>) -> Self {
        let mut pop = Self { members };
        pop.rerank();
        pop
    }

    pub fn len(&self) -> usize {
        self.members.len()
    }

    pub fn is_empty(&self) -> bool {
        self.members.is_empty()
    }

    /// Members in rank order.
    pub fn members(&self) -> &[Candidate] {
        &self.members
    }

    pub fn into_members(self) -> Vec<Candidate> {
        self.members
    }

    /// The rank-1 candidate.
    pub fn best(&self) -> &Candidate {
        &self.members[0]
    }

    /// 1-based rank lookup.
    pub fn rank(&self, rank: usize) -> &Candidate {
        &self.members[rank - 1]
    }

    /// Stable sort by ascending loss; ties keep their previous order.
    pub fn rerank(&mut self) {
        let order = rank_order(self.members.iter().map(|c| c.loss));
        let mut slots: Vec<Option<Candidate>> = self.members.drain(..).map(Some).collect();
        self.members = order
            .into_iter()
            .map(|i| slots[i].take().expect("rank order is a permutation"))
            .collect();
    }

    pub fn is_ranked(&self) -> bool {
        self.members
            .windows(2)
            .all(|w| w[0].loss.total_cmp(&w[1].loss).is_le())
    }
}

/// Permutation that sorts `losses` ascending, stable on ties. NaN sorts last.
pub fn rank_order(losses: impl IntoIterator<Item = f64>) -> Vec<usize> {
    let losses: Vec<f64> = losses.into_iter().collect();
    let mut order: Vec<usize> = (0..losses.len()).collect();
    order.sort_by(|&a, &b| losses[a].total_cmp(&losses[b]));
    order
}

/// A uniform random point inside `bounds`, drawn coordinate by coordinate.
pub fn random_position<R: UniformSource + ?Sized>(bounds: &Bounds, rng: &mut R) -> Vec<f64> {
    bounds
        .lower()
        .iter()
        .zip(bounds.upper())
        .map(|(&lo, &hi)| rng.uniform_in(lo, hi))
        .collect()
}

/// Evaluates every position. Work may be spread across threads; the output
/// order always matches the input order.
pub fn evaluate_all(spec: &ObjectiveSpec, positions: &[Vec<f64>]) -> Vec<f64> {
    positions.par_iter().map(|p| spec.evaluate(p)).collect()
}

/// `n` uniform random candidates, evaluated and ranked.
pub fn init_population<R: UniformSource + ?Sized>(
    n: usize,
    spec: &ObjectiveSpec,
    rng: &mut R,
) -> Result<Population> {
    if n < 2 {
        return Err(Error::config(format!(
            "population needs at least 2 members, got {n}"
        )));
    }
    let positions: Vec<Vec<f64>> = (0..n).map(|_| random_position(spec.bounds(), rng)).collect();
    let losses = evaluate_all(spec, &positions);
    Ok(Population::from_candidates(
        positions
            .into_iter()
            .zip(losses)
            .map(|(position, loss)| Candidate { position, loss })
            .collect(),
    ))
}

/// Budget of outer update sweeps.
#[derive(Debug, Clone, Copy, PartialEq, Eq, serde::Serialize, serde::Deserialize)]
pub struct StopCriterion {
    pub max_iterations: usize,
}

impl StopCriterion {
    pub fn iterations(max_iterations: usize) -> Self {
        Self { max_iterations }
    }
}
