use std::time::Instant;

use serde::{Deserialize, Serialize};

use super::{past, LocalFields, QuboSolver, Result, SampleSet, SolverError};
use crate::qubo::QuboModel;

pub const BRUTE_FORCE_LIMIT: usize = 30;

const RESYNC: u64 = 1 << 16;

pub fn brute_force(q: &QuboModel, max_optima: usize) -> Result<SampleSet> {
    brute_force_until(q, max_optima, None)
}

/// Exhaustive Gray-code enumeration. Returns every optimal bitstring (up to
/// `max_optima` of them), each with count 1 and an exactly recomputed
/// energy. Running energies are resynchronised periodically so that
/// rounding drift cannot hide a tie.
pub fn brute_force_until(q: &QuboModel, max_optima: usize, deadline: Option<Instant>) -> Result<SampleSet> {
    let n = q.n_vars();
    if n > BRUTE_FORCE_LIMIT {
        return Err(SolverError::TooManyVariables { n, limit: BRUTE_FORCE_LIMIT });
    }
    if max_optima == 0 {
        return Err(SolverError::InvalidParameter("max_optima must be at least 1".into()));
    }
    let start = Instant::now();
    let scale = 1.0 + q.linear().iter().chain(q.quadratic().values()).map(|v| v.abs()).sum::<f64>();
    let tol = 1e-9 * scale;

    let mut bits = vec![false; n];
    let mut fields = LocalFields::new(q);
    let mut energy = q.offset();
    let mut best = energy;
    let mut candidates: Vec<u64> = vec![0];
    let mut mask: u64 = 0;
    let mut set = SampleSet::new("brute_force", 0);
    let total: u64 = 1 << n;
    for k in 1..total {
        let i = k.trailing_zeros() as usize;
        energy += fields.delta(&bits, i);
        fields.flip(&mut bits, i);
        mask ^= 1 << i;
        if k % RESYNC == 0 {
            energy = q.energy_unchecked(&bits);
            fields.reset(q, &bits);
            if past(deadline) {
                set.timed_out = true;
                break;
            }
        }
        if energy < best - tol {
            best = energy;
            candidates.clear();
            candidates.push(mask);
        } else if energy <= best + tol && candidates.len() < 4 * max_optima {
            candidates.push(mask);
        }
    }

    let mut exact: Vec<(f64, Vec<bool>)> = candidates
        .into_iter()
        .map(|m| {
            let b: Vec<bool> = (0..n).map(|i| (m >> i) & 1 == 1).collect();
            (q.energy_unchecked(&b), b)
        })
        .collect();
    let min = exact.iter().map(|(e, _)| *e).fold(f64::INFINITY, f64::min);
    exact.retain(|(e, _)| *e <= min + tol);
    for (e, b) in exact {
        set.push(b, e);
    }
    set.finalize();
    set.samples.truncate(max_optima);
    set.mean_energy = set.best().map(|s| s.energy);
    set.runtime_s = start.elapsed().as_secs_f64();
    Ok(set)
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct BruteForce {
    pub max_optima: usize,
}

impl Default for BruteForce {
    fn default() -> Self {
        Self { max_optima: 64 }
    }
}

impl QuboSolver for BruteForce {
    fn name(&self) -> &str {
        "brute_force"
    }

    fn solve(&self, q: &QuboModel, seed: u64, deadline: Option<Instant>) -> Result<SampleSet> {
        let mut set = brute_force_until(q, self.max_optima, deadline)?;
        set.seed = seed;
        Ok(set)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn enumerate(q: &QuboModel) -> (f64, usize) {
        let n = q.n_vars();
        let energies: Vec<f64> = (0..1u64 << n)
            .map(|m| q.energy_unchecked(&(0..n).map(|i| (m >> i) & 1 == 1).collect::<Vec<_>>()))
            .collect();
        let min = energies.iter().copied().fold(f64::INFINITY, f64::min);
        (min, energies.iter().filter(|&&e| (e - min).abs() < 1e-9).count())
    }

    #[test]
    fn matches_plain_enumeration() {
        use rand::Rng as _;
        let mut rng = crate::rng::rng_from_seed(7);
        for trial in 0..20 {
            let n = 1 + trial % 9;
            let mut q = QuboModel::new(n);
            q.add_offset(rng.random_range(-2.0..2.0));
            for i in 0..n {
                q.add_linear(i, rng.random_range(-3i32..=3) as f64);
                for j in i + 1..n {
                    q.add_quadratic(i, j, rng.random_range(-3i32..=3) as f64);
                }
            }
            let (min, count) = enumerate(&q);
            let set = brute_force(&q, 1 << 10).unwrap();
            assert!((set.best().unwrap().energy - min).abs() < 1e-9);
            assert_eq!(set.samples.len(), count);
        }
    }

    #[test]
    fn size_guard() {
        let q = QuboModel::new(31);
        assert_eq!(brute_force(&q, 1), Err(SolverError::TooManyVariables { n: 31, limit: 30 }));
    }

    #[test]
    fn empty_model_has_one_state() {
        let mut q = QuboModel::new(0);
        q.add_offset(1.5);
        let set = brute_force(&q, 4).unwrap();
        assert_eq!(set.samples.len(), 1);
        assert_eq!(set.samples[0].energy, 1.5);
    }
}
