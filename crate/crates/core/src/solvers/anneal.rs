use std::time::Instant;

use rand::Rng as _;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use super::{past, LocalFields, QuboSolver, Result, SampleSet, SolverError};
use crate::qubo::QuboModel;
use crate::rng::{derive_seed, rng_from_seed};

/// Geometric inverse-temperature schedule over `sweeps` sweeps, repeated for
/// `reads` independent chains.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct AnnealSchedule {
    pub sweeps: usize,
    pub beta_start: f64,
    pub beta_end: f64,
    pub reads: usize,
}

impl AnnealSchedule {
    /// Scale-aware defaults: `beta_start = 0.1 / ΔE_max` and
    /// `beta_end = 10 / ΔE_min`, where `ΔE_max` bounds any single-flip change
    /// and `ΔE_min` is the smallest non-zero coefficient magnitude.
    pub fn auto(q: &QuboModel, sweeps: usize, reads: usize) -> Self {
        let mut max_flip: f64 = 0.0;
        let adj = q.adjacency();
        for (i, row) in adj.iter().enumerate() {
            let d = q.linear()[i].abs() + row.iter().map(|(_, v)| v.abs()).sum::<f64>();
            max_flip = max_flip.max(d);
        }
        let min_coef = q
            .linear()
            .iter()
            .chain(q.quadratic().values())
            .map(|v| v.abs())
            .filter(|&v| v > 0.0)
            .fold(f64::INFINITY, f64::min);
        let beta_start = if max_flip > 0.0 { 0.1 / max_flip } else { 0.1 };
        let beta_end = if min_coef.is_finite() { 10.0 / min_coef } else { 10.0 };
        Self { sweeps, beta_start, beta_end: beta_end.max(beta_start), reads }
    }

    pub fn validate(&self) -> Result<()> {
        if self.sweeps == 0 || self.reads == 0 {
            return Err(SolverError::InvalidSchedule("sweeps and reads must be at least 1".into()));
        }
        if !(self.beta_start > 0.0 && self.beta_end >= self.beta_start && self.beta_end.is_finite()) {
            return Err(SolverError::InvalidSchedule(format!(
                "need 0 < beta_start <= beta_end, got {} and {}",
                self.beta_start, self.beta_end
            )));
        }
        Ok(())
    }

    fn beta(&self, sweep: usize) -> f64 {
        if self.sweeps == 1 {
            return self.beta_end;
        }
        let f = sweep as f64 / (self.sweeps - 1) as f64;
        self.beta_start * (self.beta_end / self.beta_start).powf(f)
    }
}

pub fn simulated_annealing(q: &QuboModel, sched: &AnnealSchedule, seed: u64) -> Result<SampleSet> {
    simulated_annealing_until(q, sched, seed, None)
}

/// Single-flip Metropolis annealing. Each read starts from a uniformly
/// random state drawn from its own derived seed and reports the lowest
/// state it visited (checked at the end of every sweep). Reads run in
/// parallel; the result does not depend on the thread count.
pub fn simulated_annealing_until(
    q: &QuboModel,
    sched: &AnnealSchedule,
    seed: u64,
    deadline: Option<Instant>,
) -> Result<SampleSet> {
    if q.n_vars() == 0 {
        return Err(SolverError::EmptyModel);
    }
    sched.validate()?;
    let start = Instant::now();
    let betas: Vec<f64> = (0..sched.sweeps).map(|s| sched.beta(s)).collect();
    let chains: Vec<Option<(Vec<bool>, bool)>> = (0..sched.reads)
        .into_par_iter()
        .map(|r| {
            if r > 0 && past(deadline) {
                return None;
            }
            Some(run_chain(q, &betas, derive_seed(seed, r as u64), deadline))
        })
        .collect();
    let mut set = SampleSet::new("simulated_annealing", seed);
    for (bits, cut_short) in chains.into_iter().flatten() {
        set.timed_out |= cut_short;
        let e = q.energy_unchecked(&bits);
        set.push(bits, e);
    }
    set.timed_out |= set.samples.len() < sched.reads;
    set.finalize();
    set.runtime_s = start.elapsed().as_secs_f64();
    Ok(set)
}

fn run_chain(q: &QuboModel, betas: &[f64], seed: u64, deadline: Option<Instant>) -> (Vec<bool>, bool) {
    let n = q.n_vars();
    let mut rng = rng_from_seed(seed);
    let mut bits: Vec<bool> = (0..n).map(|_| rng.random::<bool>()).collect();
    let mut fields = LocalFields::new(q);
    fields.reset(q, &bits);
    let mut energy = q.energy_unchecked(&bits);
    let mut best = bits.clone();
    let mut best_energy = energy;
    for &beta in betas {
        for i in 0..n {
            let delta = fields.delta(&bits, i);
            let accept = delta <= 0.0 || {
                let x = beta * delta;
                x < 40.0 && rng.random::<f64>() < (-x).exp()
            };
            if accept {
                fields.flip(&mut bits, i);
                energy += delta;
            }
        }
        if energy < best_energy {
            best_energy = energy;
            best.copy_from_slice(&bits);
        }
        if past(deadline) {
            return (best, true);
        }
    }
    (best, false)
}

/// [`QuboSolver`] wrapper. With `beta_range = None` the schedule comes from
/// [`AnnealSchedule::auto`].
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SimulatedAnnealer {
    pub sweeps: usize,
    pub reads: usize,
    pub beta_range: Option<(f64, f64)>,
}

impl SimulatedAnnealer {
    pub fn new(sweeps: usize, reads: usize) -> Self {
        Self { sweeps, reads, beta_range: None }
    }

    pub fn schedule(&self, q: &QuboModel) -> AnnealSchedule {
        match self.beta_range {
            Some((beta_start, beta_end)) => AnnealSchedule { sweeps: self.sweeps, beta_start, beta_end, reads: self.reads },
            None => AnnealSchedule::auto(q, self.sweeps, self.reads),
        }
    }
}

impl QuboSolver for SimulatedAnnealer {
    fn name(&self) -> &str {
        "simulated_annealing"
    }

    fn solve(&self, q: &QuboModel, seed: u64, deadline: Option<Instant>) -> Result<SampleSet> {
        simulated_annealing_until(q, &self.schedule(q), seed, deadline)
    }
}
