use std::time::Instant;

use rand::Rng as _;
use serde::{Deserialize, Serialize};

use super::{past, QuboSolver, Result, SampleSet, SolverError};
use crate::qubo::QuboModel;
use crate::rng::rng_from_seed;

pub fn random_sampling(q: &QuboModel, n_samples: usize, seed: u64) -> Result<SampleSet> {
    random_sampling_until(q, n_samples, seed, None)
}

/// Independent uniform bitstrings. `mean_energy` is the sample mean.
pub fn random_sampling_until(
    q: &QuboModel,
    n_samples: usize,
    seed: u64,
    deadline: Option<Instant>,
) -> Result<SampleSet> {
    if n_samples == 0 {
        return Err(SolverError::InvalidParameter("n_samples must be at least 1".into()));
    }
    let start = Instant::now();
    let mut rng = rng_from_seed(seed);
    let mut set = SampleSet::new("random_sampling", seed);
    for k in 0..n_samples {
        if k > 0 && k % 1024 == 0 && past(deadline) {
            set.timed_out = true;
            break;
        }
        let bits: Vec<bool> = (0..q.n_vars()).map(|_| rng.random::<bool>()).collect();
        let e = q.energy_unchecked(&bits);
        set.push(bits, e);
    }
    set.finalize();
    set.runtime_s = start.elapsed().as_secs_f64();
    Ok(set)
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct UniformSampler {
    pub n_samples: usize,
}

impl QuboSolver for UniformSampler {
    fn name(&self) -> &str {
        "random_sampling"
    }

    fn solve(&self, q: &QuboModel, seed: u64, deadline: Option<Instant>) -> Result<SampleSet> {
        random_sampling_until(q, self.n_samples, seed, deadline)
    }
}
