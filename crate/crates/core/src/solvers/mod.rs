//! Classical QUBO baselines.

mod anneal;
mod exhaustive;
mod random;
mod sample;

use std::time::Instant;

use thiserror::Error;

use crate::qubo::QuboModel;

pub use anneal::{simulated_annealing, simulated_annealing_until, AnnealSchedule, SimulatedAnnealer};
pub use exhaustive::{brute_force, brute_force_until, BruteForce, BRUTE_FORCE_LIMIT};
pub use random::{random_sampling, random_sampling_until, UniformSampler};
pub use sample::{bits_from_hex, bits_to_hex, Sample, SampleSet};

#[derive(Debug, Error, Clone, PartialEq)]
pub enum SolverError {
    #[error("{n} variables exceed the exhaustive-search limit of {limit}")]
    TooManyVariables { n: usize, limit: usize },
    #[error("model has no variables")]
    EmptyModel,
    #[error("invalid anneal schedule: {0}")]
    InvalidSchedule(String),
    #[error("invalid parameter: {0}")]
    InvalidParameter(String),
}

pub type Result<T> = std::result::Result<T, SolverError>;

/// Anything that turns a QUBO into samples. Implementations must be
/// deterministic in `(model, seed)` when no deadline is given.
pub trait QuboSolver: Send + Sync {
    fn name(&self) -> &str;

    fn solve(&self, q: &QuboModel, seed: u64, deadline: Option<Instant>) -> Result<SampleSet>;
}

/// Maintains `field_i = linear_i + Σ_j Q_ij b_j` under single-bit flips.
/// Flipping bit `i` changes the energy by `±field_i`.
pub(crate) struct LocalFields {
    offsets: Vec<usize>,
    neigh: Vec<(u32, f64)>,
    pub(crate) field: Vec<f64>,
}

impl LocalFields {
    pub(crate) fn new(q: &QuboModel) -> Self {
        let adj = q.adjacency();
        let mut offsets = Vec::with_capacity(adj.len() + 1);
        let mut neigh = Vec::new();
        offsets.push(0);
        for row in &adj {
            neigh.extend(row.iter().map(|&(j, v)| (j as u32, v)));
            offsets.push(neigh.len());
        }
        Self { offsets, neigh, field: q.linear().to_vec() }
    }

    pub(crate) fn reset(&mut self, q: &QuboModel, bits: &[bool]) {
        self.field.copy_from_slice(q.linear());
        for i in 0..bits.len() {
            if bits[i] {
                for &(j, v) in &self.neigh[self.offsets[i]..self.offsets[i + 1]] {
                    self.field[j as usize] += v;
                }
            }
        }
    }

    #[inline]
    pub(crate) fn delta(&self, bits: &[bool], i: usize) -> f64 {
        if bits[i] {
            -self.field[i]
        } else {
            self.field[i]
        }
    }

    /// Flip bit `i` and update the neighbours' fields.
    #[inline]
    pub(crate) fn flip(&mut self, bits: &mut [bool], i: usize) {
        bits[i] = !bits[i];
        let sign = if bits[i] { 1.0 } else { -1.0 };
        for &(j, v) in &self.neigh[self.offsets[i]..self.offsets[i + 1]] {
            self.field[j as usize] += sign * v;
        }
    }
}

pub(crate) fn past(deadline: Option<Instant>) -> bool {
    deadline.is_some_and(|d| Instant::now() >= d)
}
