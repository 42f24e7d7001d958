//! Seeded random streams.
//!
//! Every run owns one root [`RngStream`]. Sub-tasks (a fold, a SMOTE pass, an
//! optimizer run) receive a child stream via [`RngStream::fork`], always in
//! the same order, so results depend only on the root seed.
//!
//! The update rules draw their randomness through the [`UniformSource`]
//! trait, which lets tests pin individual draws with a [`SequenceSource`].

use std::collections::VecDeque;

use rand::{Rng, RngCore, SeedableRng};
use rand_chacha::ChaCha8Rng;

/// A source of uniform draws in `[0, 1)`.
pub trait UniformSource {
    fn next_uniform(&mut self) -> f64;

    /// Uniform draw in `[low, high]`. Returns `low` when the interval is empty.
    fn uniform_in(&mut self, low: f64, high: f64) -> f64 {
        let u = self.next_uniform();
        if high > low {
            low + u * (high - low)
        } else {
            low
        }
    }

    /// Uniform index in `0..n`. `n` must be non-zero.
    fn index(&mut self, n: usize) -> usize {
        debug_assert!(n > 0);
        ((self.next_uniform() * n as f64) as usize).min(n - 1)
    }
}

#[derive(Debug, Clone)]
pub struct RngStream {
    seed: u64,
    inner: ChaCha8Rng,
}

impl RngStream {
    pub fn new(seed: u64) -> Self {
        Self {
            seed,
            inner: ChaCha8Rng::seed_from_u64(seed),
        }
    }

    pub fn seed(&self) -> u64 {
        self.seed
    }

    /// Derives an independent child stream. Consumes one draw from `self`.
    pub fn fork(&mut self) -> RngStream {
        RngStream::new(self.inner.next_u64())
    }

    pub fn shuffle<T>(&mut self, items: &mut [T]) {
        // Fisher-Yates, driven through `index` so the sequence is stable
        // across `rand` versions.
        for i in (1..items.len()).rev() {
            let j = self.index(i + 1);
            items.swap(i, j);
        }
    }
}

impl UniformSource for RngStream {
    fn next_uniform(&mut self) -> f64 {
        self.inner.random::<f64>()
    }
}

/// Replays a fixed list of draws, then panics if asked for more.
#[derive(Debug, Clone, Default)]
pub struct SequenceSource {
    values: VecDeque<f64>,
}

impl SequenceSource {
    pub fn new(values: impl IntoIterator<Item = f64>) -> Self {
        Self {
            values: values.into_iter().collect(),
        }
    }

    pub fn remaining(&self) -> usize {
        self.values.len()
    }
}

impl UniformSource for SequenceSource {
    fn next_uniform(&mut self) -> f64 {
        self.values
            .pop_front()
            .expect("SequenceSource exhausted")
    }
}

impl<U: UniformSource + ?Sized> UniformSource for &mut U {
    fn next_uniform(&mut self) -> f64 {
        (**self).next_uniform()
    }
}
