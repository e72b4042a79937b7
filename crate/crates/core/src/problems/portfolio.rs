use nalgebra::DMatrix;
use rand::Rng as _;
use rand_distr::StandardNormal;
use serde::{Deserialize, Serialize};

use super::{parse_err, Assignment, DomainSolution, ProblemError, Result, Sense, Violation};
use crate::rng::rng_from_seed;

/// Which Markowitz variant to optimize, with its constraint level.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum Formulation {
    /// Minimize variance subject to `μ ≥ r_min`.
    Minvola { r_min: f64 },
    /// Maximize return subject to `σ² ≤ v_max`.
    Maxret { v_max: f64 },
    /// Maximize `μ − λσ²`.
    Multiobj { lambda: f64 },
}

impl Formulation {
    pub fn name(&self) -> &'static str {
        match self {
            Formulation::Minvola { .. } => "minvola",
            Formulation::Maxret { .. } => "maxret",
            Formulation::Multiobj { .. } => "multiobj",
        }
    }

    fn sense(&self) -> Sense {
        match self {
            Formulation::Minvola { .. } => Sense::Minimize,
            _ => Sense::Maximize,
        }
    }
}

/// Cardinality-constrained equal-weight portfolio selection: pick exactly
/// `k` assets, each weighted `1/k`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct PortfolioInstance {
    pub returns: Vec<f64>,
    pub covariance: Vec<Vec<f64>>,
    pub formulation: Formulation,
    pub k: usize,
}

const PSD_FLOOR: f64 = -1e-9;

impl PortfolioInstance {
    pub fn new(returns: Vec<f64>, covariance: Vec<Vec<f64>>, formulation: Formulation, k: usize) -> Result<Self> {
        let n = returns.len();
        if n == 0 {
            return Err(ProblemError::InvalidInstance("no assets".into()));
        }
        if k == 0 || k > n {
            return Err(ProblemError::InvalidInstance(format!("cardinality {k} not in 1..={n}")));
        }
        if covariance.len() != n || covariance.iter().any(|row| row.len() != n) {
            return Err(ProblemError::InvalidInstance("covariance must be n x n".into()));
        }
        for i in 0..n {
            for j in 0..n {
                let a = covariance[i][j];
                if !a.is_finite() || (a - covariance[j][i]).abs() > 1e-12 * (1.0 + a.abs()) {
                    return Err(ProblemError::InvalidInstance(format!("covariance not symmetric at ({i},{j})")));
                }
            }
        }
        let m = DMatrix::from_fn(n, n, |i, j| covariance[i][j]);
        let min_eig = m.symmetric_eigenvalues().min();
        if min_eig < PSD_FLOOR {
            return Err(ProblemError::InvalidInstance(format!("covariance not PSD (min eigenvalue {min_eig:e})")));
        }
        if returns.iter().any(|r| !r.is_finite()) {
            return Err(ProblemError::InvalidInstance("returns must be finite".into()));
        }
        Ok(Self { returns, covariance, formulation, k })
    }

    pub fn n(&self) -> usize {
        self.returns.len()
    }

    /// Parse CSV with one header row; each row is `id, return, cov_0, …, cov_{n-1}`.
    pub fn from_csv(text: &str, formulation: Formulation, k: usize) -> Result<Self> {
        let mut returns = Vec::new();
        let mut cov = Vec::new();
        for (ln, line) in text.lines().enumerate().skip(1) {
            if line.trim().is_empty() {
                continue;
            }
            let fields: Vec<&str> = line.split(',').map(str::trim).collect();
            if fields.len() < 3 {
                return Err(parse_err(ln + 1, "expected id, return and covariance entries"));
            }
            let r: f64 = fields[1].parse().map_err(|_| parse_err(ln + 1, "bad return"))?;
            let row = fields[2..]
                .iter()
                .map(|f| f.parse::<f64>().map_err(|_| parse_err(ln + 1, "bad covariance entry")))
                .collect::<Result<Vec<_>>>()?;
            returns.push(r);
            cov.push(row);
        }
        Self::new(returns, cov, formulation, k)
    }

    pub fn to_csv(&self) -> String {
        let n = self.n();
        let mut s = String::from("asset,return");
        for j in 0..n {
            s.push_str(&format!(",cov_{j}"));
        }
        s.push('\n');
        for i in 0..n {
            s.push_str(&format!("a{i},{}", self.returns[i]));
            for j in 0..n {
                s.push_str(&format!(",{}", self.covariance[i][j]));
            }
            s.push('\n');
        }
        s
    }
}

/// Synthetic instance: `Σ = A·Aᵀ/n` with `A` standard normal scaled by 0.2,
/// and returns drawn uniformly from `[0.02, 0.12]` snapped to a 0.01 grid.
pub fn gen_portfolio(n: usize, k: usize, formulation: Formulation, seed: u64) -> Result<PortfolioInstance> {
    if n == 0 {
        return Err(ProblemError::InvalidParameter("need at least one asset".into()));
    }
    let mut rng = rng_from_seed(seed);
    let a = DMatrix::<f64>::from_fn(n, n, |_, _| 0.2 * rng.sample::<f64, _>(StandardNormal));
    let sigma = &a * a.transpose() / n as f64;
    let covariance = (0..n)
        .map(|i| (0..n).map(|j| if i <= j { sigma[(i, j)] } else { sigma[(j, i)] }).collect())
        .collect();
    let returns = (0..n).map(|_| rng.random_range(2..=12) as f64 / 100.0).collect();
    PortfolioInstance::new(returns, covariance, formulation, k)
}

/// `(μ, σ²)` of the equal-weight selection with weights `1/k`.
pub fn portfolio_stats(inst: &PortfolioInstance, selection: &[bool]) -> Result<(f64, f64)> {
    if selection.len() != inst.n() {
        return Err(ProblemError::LengthMismatch { expected: inst.n(), found: selection.len() });
    }
    let w = 1.0 / inst.k as f64;
    let picked: Vec<usize> = (0..inst.n()).filter(|&i| selection[i]).collect();
    let mu = picked.iter().map(|&i| w * inst.returns[i]).sum();
    let var = picked
        .iter()
        .flat_map(|&i| picked.iter().map(move |&j| (i, j)))
        .map(|(i, j)| w * w * inst.covariance[i][j])
        .sum();
    Ok((mu, var))
}

pub fn portfolio_objective(inst: &PortfolioInstance, selection: &[bool]) -> Result<DomainSolution> {
    let (mu, var) = portfolio_stats(inst, selection)?;
    let count = selection.iter().filter(|&&b| b).count();
    if count == 0 {
        return Err(ProblemError::EmptySelection);
    }
    let mut violations = Vec::new();
    if count != inst.k {
        violations.push(Violation::new("cardinality", format!("{count} assets selected, expected {}", inst.k)));
    }
    let objective = match inst.formulation {
        Formulation::Minvola { r_min } => {
            if mu < r_min - 1e-12 {
                violations.push(Violation::new("return_floor", format!("return {mu} below {r_min}")));
            }
            var
        }
        Formulation::Maxret { v_max } => {
            if var > v_max + 1e-12 {
                violations.push(Violation::new("volatility_cap", format!("variance {var} above {v_max}")));
            }
            -mu
        }
        Formulation::Multiobj { lambda } => -(mu - lambda * var),
    };
    let assets = (0..inst.n()).filter(|&i| selection[i]).collect();
    Ok(DomainSolution::new(
        format!("portfolio_{}", inst.formulation.name()),
        Assignment::Assets(assets),
        objective,
        inst.formulation.sense(),
        violations,
    ))
}

/// Best feasible k-subset by enumerating all `C(n, k)` selections.
pub fn portfolio_optimum_exhaustive(inst: &PortfolioInstance) -> Option<DomainSolution> {
    let n = inst.n();
    assert!(n <= 24, "exhaustive portfolio search limited to 24 assets");
    let mut best: Option<DomainSolution> = None;
    for mask in 0u32..(1u32 << n) {
        if mask.count_ones() as usize != inst.k {
            continue;
        }
        let sel: Vec<bool> = (0..n).map(|i| (mask >> i) & 1 == 1).collect();
        let sol = portfolio_objective(inst, &sel).expect("non-empty selection");
        if sol.feasible && best.as_ref().is_none_or(|b| sol.objective < b.objective) {
            best = Some(sol);
        }
    }
    best
}
