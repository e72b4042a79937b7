use std::time::{Duration, Instant};

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use super::{beta_score, MetricsError, Result};
use crate::problems::gen_maxcut;
use crate::qubo::maxcut_to_qubo;
use crate::rng::derive_seed_path;
use crate::solvers::{brute_force, random_sampling, QuboSolver};

/// Which per-instance cut value feeds `C(N)`.
#[derive(Debug, Clone, Copy, Default, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum ScoreStatistic {
    /// Best cut among the solver's samples.
    #[default]
    Best,
    /// Mean cut over all samples, with multiplicity.
    Mean,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct QScoreConfig {
    pub sizes: Vec<usize>,
    pub instances_per_size: usize,
    /// Per-instance solver budget; `None` runs untimed.
    pub time_limit_s: Option<f64>,
    pub threshold: f64,
    pub edge_prob: f64,
    /// Uniform samples per instance for `C_rand`.
    pub rand_samples: usize,
    pub statistic: ScoreStatistic,
    /// Report the largest passing size anywhere instead of stopping at the
    /// first failure.
    pub scan_all: bool,
    /// Largest size whose optimum is computed exhaustively.
    pub exact_limit: usize,
    pub seed: u64,
}

impl QScoreConfig {
    pub fn new(sizes: Vec<usize>) -> Self {
        Self {
            sizes,
            instances_per_size: 20,
            time_limit_s: Some(60.0),
            threshold: 0.2,
            edge_prob: 0.5,
            rand_samples: 1000,
            statistic: ScoreStatistic::Best,
            scan_all: false,
            exact_limit: 26,
            seed: 0,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SizeResult {
    pub n: usize,
    pub c: f64,
    pub c_opt: f64,
    pub c_rand: f64,
    pub beta: f64,
    pub elapsed_s: f64,
    /// `c_opt` comes from [`expected_max_cut`] rather than exhaustive search.
    pub c_opt_estimated: bool,
    /// Instances on which the solver hit the time limit.
    pub timed_out: usize,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct QScoreResult {
    pub per_size: Vec<SizeResult>,
    pub q_score: Option<usize>,
    pub threshold: f64,
    pub time_limit_s: Option<f64>,
    pub statistic: ScoreStatistic,
    pub scan_all: bool,
}

/// Expected maximum cut of `G(N, 1/2)`: `N²/8 + 0.178·N^{3/2}`.
pub fn expected_max_cut(n: usize) -> f64 {
    let n = n as f64;
    n * n / 8.0 + 0.178 * n.powf(1.5)
}

fn select(per_size: &[SizeResult], threshold: f64, scan_all: bool) -> Option<usize> {
    if scan_all {
        return per_size.iter().filter(|s| s.beta >= threshold).map(|s| s.n).max();
    }
    per_size.iter().take_while(|s| s.beta >= threshold).last().map(|s| s.n)
}

impl QScoreResult {
    /// Score the stored sizes against another threshold.
    pub fn rescore(&self, threshold: f64) -> Option<usize> {
        select(&self.per_size, threshold, self.scan_all)
    }

    /// Check that every stored β agrees with its components.
    pub fn audit(&self) -> Result<()> {
        for s in &self.per_size {
            let recomputed = beta_score(s.c, s.c_opt, s.c_rand)?;
            if (recomputed - s.beta).abs() > 1e-12 * (1.0 + s.beta.abs()) {
                return Err(MetricsError::Inconsistent { n: s.n, stored: s.beta, recomputed });
            }
        }
        Ok(())
    }

    pub fn from_json(text: &str) -> Result<Self> {
        let r: Self = serde_json::from_str(text).map_err(|e| MetricsError::InvalidInput(e.to_string()))?;
        r.audit()?;
        Ok(r)
    }

    pub fn to_csv(&self) -> String {
        let mut out = String::from("n,c,c_opt,c_rand,beta,elapsed_s,c_opt_estimated,timed_out\n");
        for s in &self.per_size {
            out.push_str(&format!(
                "{},{},{},{},{},{},{},{}\n",
                s.n, s.c, s.c_opt, s.c_rand, s.beta, s.elapsed_s, s.c_opt_estimated, s.timed_out
            ));
        }
        out
    }
}

struct Instance {
    c: f64,
    c_opt: f64,
    c_rand: f64,
    timed_out: bool,
}

fn run_instance(solver: &dyn QuboSolver, cfg: &QScoreConfig, n: usize, i: usize) -> Result<Instance> {
    let path = |k: u64| derive_seed_path(cfg.seed, &[n as u64, i as u64, k]);
    let g = gen_maxcut(n, cfg.edge_prob, path(0)).map_err(|e| MetricsError::InvalidInput(e.to_string()))?;
    let q = maxcut_to_qubo(&g);
    let deadline = cfg.time_limit_s.map(|t| Instant::now() + Duration::from_secs_f64(t));
    let set = solver.solve(&q, path(1), deadline)?;
    let energy = match cfg.statistic {
        ScoreStatistic::Best => set.best().map(|s| s.energy),
        ScoreStatistic::Mean => set.mean_energy,
    }
    .ok_or_else(|| MetricsError::InvalidInput(format!("{} returned no samples", solver.name())))?;
    let c_rand = -random_sampling(&q, cfg.rand_samples, path(2))?.mean_energy.expect("non-empty");
    let c_opt = if n <= cfg.exact_limit {
        -brute_force(&q, 1)?.best().expect("non-empty").energy
    } else {
        expected_max_cut(n)
    };
    Ok(Instance { c: -energy, c_opt, c_rand, timed_out: set.timed_out })
}

/// Q-score scan over MaxCut instances on `G(N, p)`. For each size the
/// solver's mean cut `C`, the uniform-sampling mean `C_rand` and the optimum
/// `C_opt` are averaged over instances, then combined into β. Instances run
/// in parallel with per-instance derived seeds; aggregation order is fixed.
pub fn q_score(solver: &dyn QuboSolver, cfg: &QScoreConfig) -> Result<QScoreResult> {
    if cfg.sizes.is_empty() {
        return Err(MetricsError::EmptySizes);
    }
    if cfg.sizes.windows(2).any(|w| w[0] >= w[1]) {
        return Err(MetricsError::InvalidInput("sizes must be strictly ascending".into()));
    }
    if cfg.instances_per_size == 0 || cfg.rand_samples == 0 {
        return Err(MetricsError::InvalidInput("instances_per_size and rand_samples must be positive".into()));
    }
    if cfg.edge_prob != 0.5 && cfg.sizes.iter().any(|&n| n > cfg.exact_limit) {
        return Err(MetricsError::InvalidInput("the C_opt estimate assumes edge probability 1/2".into()));
    }
    let mut per_size = Vec::new();
    for &n in &cfg.sizes {
        let start = Instant::now();
        let runs: Vec<Instance> = (0..cfg.instances_per_size)
            .into_par_iter()
            .map(|i| run_instance(solver, cfg, n, i))
            .collect::<Result<_>>()?;
        let k = runs.len() as f64;
        let c = runs.iter().map(|r| r.c).sum::<f64>() / k;
        let c_opt = runs.iter().map(|r| r.c_opt).sum::<f64>() / k;
        let c_rand = runs.iter().map(|r| r.c_rand).sum::<f64>() / k;
        let beta = beta_score(c, c_opt, c_rand)?;
        per_size.push(SizeResult {
            n,
            c,
            c_opt,
            c_rand,
            beta,
            elapsed_s: start.elapsed().as_secs_f64(),
            c_opt_estimated: n > cfg.exact_limit,
            timed_out: runs.iter().filter(|r| r.timed_out).count(),
        });
        if beta < cfg.threshold && !cfg.scan_all {
            break;
        }
    }
    Ok(QScoreResult {
        q_score: select(&per_size, cfg.threshold, cfg.scan_all),
        per_size,
        threshold: cfg.threshold,
        time_limit_s: cfg.time_limit_s,
        statistic: cfg.statistic,
        scan_all: cfg.scan_all,
    })
}
