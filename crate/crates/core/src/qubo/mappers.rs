use super::penalty::{add_inequality, add_squared, objective_range_bound};
use super::{LinearExpr, Origin, PenaltyConfig, QuboError, QuboModel, Result, VarRole};
use crate::problems::{Formulation, PortfolioInstance, ProblemGraph, SalbpInstance, SetCoverInstance};

/// `energy(b) = −cut(b)`: each edge contributes `−w·(b_u + b_v − 2·b_u·b_v)`.
pub fn maxcut_to_qubo(g: &ProblemGraph) -> QuboModel {
    let mut q = QuboModel::with_roles((0..g.n()).map(VarRole::Vertex).collect(), Origin::MaxCut(g.clone()));
    for e in g.edges() {
        q.add_linear(e.u, -e.weight);
        q.add_linear(e.v, -e.weight);
        q.add_quadratic(e.u, e.v, 2.0 * e.weight);
    }
    q
}

/// Minimize total cost subject to every element being covered. Each
/// element `e` covered by `n_e` subsets gets the constraint
/// `Σ_{j∋e} b_j − 1 ≥ 0` with a surplus range of `n_e − 1`.
pub fn setcover_to_qubo(inst: &SetCoverInstance, cfg: &PenaltyConfig) -> Result<QuboModel> {
    cfg.validate()?;
    let m = inst.subsets.len();
    let mut q = QuboModel::with_roles((0..m).map(VarRole::Subset).collect(), Origin::SetCover(inst.clone()));
    for (j, s) in inst.subsets.iter().enumerate() {
        q.add_linear(j, s.cost);
    }
    let lambda = cfg.weight(objective_range_bound(&q));
    if cfg.method == super::PenaltyMethod::Slack && lambda <= inst.max_cost() {
        return Err(QuboError::InvalidConfig(format!(
            "lagrange {lambda} must exceed the largest subset cost {}",
            inst.max_cost()
        )));
    }
    for e in 0..inst.universe_size {
        let cover = inst.covering(e);
        if cover.is_empty() {
            return Err(QuboError::Infeasible(format!("element {e} is in no subset")));
        }
        let residual = cover.iter().fold(LinearExpr::constant(-1.0), |acc, &j| acc.term(j, 1.0));
        add_inequality(&mut q, cfg, lambda, &format!("cover e={e}"), residual, cover.len() as u64 - 1);
    }
    check_budget(&q, cfg)?;
    q.prune_zeros();
    Ok(q)
}

/// Stations-minimizing SALBP: variables `x[t,s]` and `y[s]`, objective
/// `Σ s·y_s`, plus penalties for single assignment, station capacity and
/// precedence order. Task times and the cycle time are expressed in units
/// of `resolution` (default 1) and must be integral in those units.
pub fn salbp_to_qubo(inst: &SalbpInstance, cfg: &PenaltyConfig) -> Result<QuboModel> {
    cfg.validate()?;
    let n = inst.n_tasks();
    let stations = inst.max_stations;
    let res = cfg.resolution.unwrap_or(1.0);
    let units = |v: f64, what: &str| -> Result<u64> {
        let u = v / res;
        if (u - u.round()).abs() > 1e-9 {
            return Err(QuboError::Unencodable(format!("{what} {v} is not a multiple of resolution {res}")));
        }
        Ok(u.round() as u64)
    };
    let times = inst
        .times
        .iter()
        .enumerate()
        .map(|(t, &v)| units(v, &format!("task {t} time")))
        .collect::<Result<Vec<_>>>()?;
    let cycle = (inst.cycle_time / res + 1e-9).floor() as u64;

    let cap_bits = super::slack_coefficients(cycle).len();
    let prec_bits = super::slack_coefficients(stations as u64 - 1).len();
    let needed = n * stations + stations + stations * cap_bits + inst.precedence.len() * prec_bits;
    if needed > cfg.max_vars {
        return Err(QuboError::BudgetExceeded { needed, budget: cfg.max_vars });
    }

    let x = |t: usize, s: usize| t * stations + (s - 1);
    let y = |s: usize| n * stations + (s - 1);
    let mut roles: Vec<VarRole> = (0..n)
        .flat_map(|task| (1..=stations).map(move |station| VarRole::Task { task, station }))
        .collect();
    roles.extend((1..=stations).map(VarRole::Station));
    let mut q = QuboModel::with_roles(roles, Origin::Salbp(inst.clone()));

    for s in 1..=stations {
        q.add_linear(y(s), s as f64);
    }
    let lambda = cfg.weight(objective_range_bound(&q));

    for t in 0..n {
        let expr = (1..=stations).fold(LinearExpr::constant(-1.0), |acc, s| acc.term(x(t, s), 1.0));
        add_squared(&mut q, &expr, lambda);
    }
    for s in 1..=stations {
        // c·y_s − Σ_t v_t·x_ts ≥ 0
        let residual = (0..n).fold(LinearExpr::default().term(y(s), cycle as f64), |acc, t| {
            acc.term(x(t, s), -(times[t] as f64))
        });
        add_inequality(&mut q, cfg, lambda, &format!("cap s={s}"), residual, cycle);
    }
    for &(a, b) in &inst.precedence {
        // Σ_s s·x_bs − Σ_s s·x_as ≥ 0
        let residual = (1..=stations).fold(LinearExpr::default(), |acc, s| {
            acc.term(x(b, s), s as f64).term(x(a, s), -(s as f64))
        });
        add_inequality(&mut q, cfg, lambda, &format!("prec {a}>{b}"), residual, stations as u64 - 1);
    }
    check_budget(&q, cfg)?;
    q.prune_zeros();
    Ok(q)
}

/// Equal-weight cardinality-`k` selection. Asset bits come first, slack
/// bits (if any) after them.
///
/// - Minvola: `σ²(b) + λ(Σb − k)²` plus the return floor `Σ r_i b_i ≥ k·R_min`
///   on the `resolution` grid (default 0.01).
/// - Multiobj: `−(μ − λ_t σ²) + λ(Σb − k)²`.
/// - Maxret: `−μ + λ(Σb − k)² + λ·l1·(σ² − V_max)`. A slack or squared
///   penalty on the quadratic volatility constraint would be quartic, so only
///   the first-order unbalanced term is used; decoded solutions are checked
///   against the exact cap.
pub fn portfolio_to_qubo(inst: &PortfolioInstance, cfg: &PenaltyConfig) -> Result<QuboModel> {
    cfg.validate()?;
    let n = inst.n();
    let k = inst.k as f64;
    let mut q = QuboModel::with_roles((0..n).map(VarRole::Asset).collect(), Origin::Portfolio(inst.clone()));
    let add_variance = |q: &mut QuboModel, scale: f64| {
        for i in 0..n {
            q.add_linear(i, scale * inst.covariance[i][i] / (k * k));
            for j in i + 1..n {
                q.add_quadratic(i, j, scale * 2.0 * inst.covariance[i][j] / (k * k));
            }
        }
    };
    let add_return = |q: &mut QuboModel, scale: f64| {
        for i in 0..n {
            q.add_linear(i, scale * inst.returns[i] / k);
        }
    };
    match inst.formulation {
        Formulation::Minvola { .. } => add_variance(&mut q, 1.0),
        Formulation::Maxret { .. } => add_return(&mut q, -1.0),
        Formulation::Multiobj { lambda } => {
            add_return(&mut q, -1.0);
            add_variance(&mut q, lambda);
        }
    }
    let lambda = cfg.weight(objective_range_bound(&q));
    let card = (0..n).fold(LinearExpr::constant(-k), |acc, i| acc.term(i, 1.0));
    add_squared(&mut q, &card, lambda);

    match inst.formulation {
        Formulation::Minvola { r_min } => {
            let res = cfg.resolution.unwrap_or(0.01);
            let scaled: Vec<i64> = inst.returns.iter().map(|r| (r / res).round() as i64).collect();
            let floor = (k * r_min / res - 1e-9).ceil() as i64;
            let mut best = scaled.clone();
            best.sort_unstable_by(|a, b| b.cmp(a));
            let best_sum: i64 = best[..inst.k].iter().sum();
            if best_sum < floor {
                return Err(QuboError::Infeasible(format!("no {}-asset selection reaches return {r_min}", inst.k)));
            }
            let residual = (0..n).fold(LinearExpr::constant(-(floor as f64)), |acc, i| acc.term(i, scaled[i] as f64));
            add_inequality(&mut q, cfg, lambda, "ret", residual, (best_sum - floor) as u64);
        }
        Formulation::Maxret { v_max } => {
            add_variance(&mut q, lambda * cfg.unbalanced_l1);
            q.add_offset(-lambda * cfg.unbalanced_l1 * v_max);
        }
        Formulation::Multiobj { .. } => {}
    }
    check_budget(&q, cfg)?;
    q.prune_zeros();
    Ok(q)
}

fn check_budget(q: &QuboModel, cfg: &PenaltyConfig) -> Result<()> {
    if q.n_vars() > cfg.max_vars {
        return Err(QuboError::BudgetExceeded { needed: q.n_vars(), budget: cfg.max_vars });
    }
    Ok(())
}
