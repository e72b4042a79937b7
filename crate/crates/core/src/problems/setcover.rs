use rand::Rng as _;
use serde::{Deserialize, Serialize};

use super::{Assignment, DomainSolution, ProblemError, Result, Sense, Violation};
use crate::rng::rng_from_seed;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Subset {
    pub cost: f64,
    /// Sorted, unique element indices.
    pub elements: Vec<usize>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SetCoverInstance {
    pub universe_size: usize,
    pub subsets: Vec<Subset>,
}

impl SetCoverInstance {
    /// Validates costs and indices and that the subsets cover the universe.
    pub fn new(universe_size: usize, subsets: Vec<(f64, Vec<usize>)>) -> Result<Self> {
        let mut covered = vec![false; universe_size];
        let mut out = Vec::with_capacity(subsets.len());
        for (cost, mut elements) in subsets {
            if !(cost >= 0.0 && cost.is_finite()) {
                return Err(ProblemError::InvalidInstance(format!("subset cost {cost} must be finite and >= 0")));
            }
            elements.sort_unstable();
            elements.dedup();
            for &e in &elements {
                if e >= universe_size {
                    return Err(ProblemError::IndexOutOfRange { index: e, limit: universe_size });
                }
                covered[e] = true;
            }
            out.push(Subset { cost, elements });
        }
        if let Some(e) = covered.iter().position(|c| !c) {
            return Err(ProblemError::InvalidInstance(format!("element {e} is not covered by any subset")));
        }
        Ok(Self { universe_size, subsets: out })
    }

    /// Subsets containing element `e`.
    pub fn covering(&self, e: usize) -> Vec<usize> {
        self.subsets
            .iter()
            .enumerate()
            .filter(|(_, s)| s.elements.binary_search(&e).is_ok())
            .map(|(j, _)| j)
            .collect()
    }

    pub fn max_cost(&self) -> f64 {
        self.subsets.iter().map(|s| s.cost).fold(0.0, f64::max)
    }
}

/// Random instance: each subset takes each element with probability
/// `density`, then every uncovered element joins a random subset. Costs are
/// integers in `1..=5`.
pub fn gen_setcover(universe_size: usize, n_subsets: usize, density: f64, seed: u64) -> Result<SetCoverInstance> {
    if universe_size == 0 || n_subsets == 0 {
        return Err(ProblemError::InvalidParameter("universe and subset counts must be positive".into()));
    }
    if !(0.0..=1.0).contains(&density) {
        return Err(ProblemError::InvalidParameter(format!("density {density} not in [0,1]")));
    }
    let mut rng = rng_from_seed(seed);
    let mut sets: Vec<Vec<usize>> = (0..n_subsets)
        .map(|_| (0..universe_size).filter(|_| rng.random::<f64>() < density).collect())
        .collect();
    for e in 0..universe_size {
        if !sets.iter().any(|s| s.contains(&e)) {
            let j = rng.random_range(0..n_subsets);
            sets[j].push(e);
        }
    }
    let subsets = sets
        .into_iter()
        .map(|s| (rng.random_range(1..=5) as f64, s))
        .collect();
    SetCoverInstance::new(universe_size, subsets)
}

pub fn eval_setcover(inst: &SetCoverInstance, chosen: &[usize]) -> Result<DomainSolution> {
    let mut chosen = chosen.to_vec();
    chosen.sort_unstable();
    chosen.dedup();
    let mut covered = vec![false; inst.universe_size];
    let mut cost = 0.0;
    for &j in &chosen {
        let s = inst
            .subsets
            .get(j)
            .ok_or(ProblemError::IndexOutOfRange { index: j, limit: inst.subsets.len() })?;
        cost += s.cost;
        for &e in &s.elements {
            covered[e] = true;
        }
    }
    let violations = covered
        .iter()
        .enumerate()
        .filter(|(_, c)| !**c)
        .map(|(e, _)| Violation::new("cover", format!("element {e} uncovered")))
        .collect();
    Ok(DomainSolution::new("set_cover", Assignment::Subsets(chosen), cost, Sense::Minimize, violations))
}

/// Classic cost-per-new-element greedy.
pub fn greedy_setcover(inst: &SetCoverInstance) -> DomainSolution {
    let mut covered = vec![false; inst.universe_size];
    let mut chosen = Vec::new();
    while covered.iter().any(|c| !c) {
        let best = inst
            .subsets
            .iter()
            .enumerate()
            .filter(|(j, _)| !chosen.contains(j))
            .filter_map(|(j, s)| {
                let gain = s.elements.iter().filter(|&&e| !covered[e]).count();
                (gain > 0).then(|| (j, s.cost / gain as f64))
            })
            .min_by(|a, b| a.1.total_cmp(&b.1));
        let Some((j, _)) = best else { break };
        for &e in &inst.subsets[j].elements {
            covered[e] = true;
        }
        chosen.push(j);
    }
    eval_setcover(inst, &chosen).expect("indices come from the instance")
}

/// Cheapest feasible cover by enumerating all `2^n_subsets` choices.
pub fn setcover_optimum_exhaustive(inst: &SetCoverInstance) -> DomainSolution {
    let m = inst.subsets.len();
    assert!(m <= 24, "exhaustive set cover limited to 24 subsets");
    let full: u64 = if inst.universe_size == 64 { u64::MAX } else { (1u64 << inst.universe_size) - 1 };
    assert!(inst.universe_size <= 64);
    let masks: Vec<u64> = inst
        .subsets
        .iter()
        .map(|s| s.elements.iter().fold(0u64, |acc, &e| acc | (1 << e)))
        .collect();
    let mut best: Option<(f64, u64)> = None;
    for pick in 0u64..(1u64 << m) {
        let mut cov = 0u64;
        let mut cost = 0.0;
        for j in 0..m {
            if (pick >> j) & 1 == 1 {
                cov |= masks[j];
                cost += inst.subsets[j].cost;
            }
        }
        if cov == full && best.is_none_or(|(c, _)| cost < c) {
            best = Some((cost, pick));
        }
    }
    let (_, pick) = best.expect("instances are feasible by construction");
    let chosen: Vec<usize> = (0..m).filter(|j| (pick >> j) & 1 == 1).collect();
    eval_setcover(inst, &chosen).expect("valid indices")
}
