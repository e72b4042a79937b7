use serde::{Deserialize, Serialize};

use super::{QuboError, QuboModel, Result, VarRole};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize, Default)]
#[serde(rename_all = "snake_case")]
pub enum PenaltyMethod {
    /// Inequalities become equalities with a binary-expanded slack, then squared.
    #[default]
    Slack,
    /// Slack-free `l1·g + l2·g²` on the signed violation `g` (positive when violated).
    Unbalanced,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default)]
pub struct PenaltyConfig {
    pub method: PenaltyMethod,
    /// Constraint weight. `None` selects twice the objective range bound.
    pub lagrange: Option<f64>,
    pub unbalanced_l1: f64,
    pub unbalanced_l2: f64,
    /// Grid onto which real-valued inequality data is scaled before slack
    /// expansion. `None` selects the mapper's default.
    pub resolution: Option<f64>,
    pub max_vars: usize,
}

impl Default for PenaltyConfig {
    fn default() -> Self {
        Self {
            method: PenaltyMethod::Slack,
            lagrange: None,
            unbalanced_l1: 0.96,
            unbalanced_l2: 0.0371,
            resolution: None,
            max_vars: 4096,
        }
    }
}

impl PenaltyConfig {
    pub fn slack() -> Self {
        Self::default()
    }

    pub fn unbalanced(l1: f64, l2: f64) -> Self {
        Self { method: PenaltyMethod::Unbalanced, unbalanced_l1: l1, unbalanced_l2: l2, ..Self::default() }
    }

    pub fn with_lagrange(mut self, lagrange: f64) -> Self {
        self.lagrange = Some(lagrange);
        self
    }

    pub fn validate(&self) -> Result<()> {
        let positive = |v: f64, name: &str| {
            if v > 0.0 && v.is_finite() {
                Ok(())
            } else {
                Err(QuboError::InvalidConfig(format!("{name} must be positive, got {v}")))
            }
        };
        if let Some(l) = self.lagrange {
            positive(l, "lagrange")?;
        }
        if let Some(r) = self.resolution {
            positive(r, "resolution")?;
        }
        positive(self.unbalanced_l1, "unbalanced_l1")?;
        positive(self.unbalanced_l2, "unbalanced_l2")
    }

    /// Explicit weight, or the default rule applied to `objective_bound`.
    pub(crate) fn weight(&self, objective_bound: f64) -> f64 {
        self.lagrange.unwrap_or_else(|| default_lagrange(objective_bound))
    }
}

/// Twice the bound on the unpenalized objective range. Every constraint
/// penalty used here is at least one unit times λ when violated, so any λ
/// above the range bound keeps infeasible bitstrings above the feasible
/// optimum.
pub fn default_lagrange(objective_bound: f64) -> f64 {
    if objective_bound > 0.0 {
        2.0 * objective_bound
    } else {
        1.0
    }
}

/// `Σ|linear| + Σ|quadratic|`: no two bitstrings differ by more than this.
pub(crate) fn objective_range_bound(q: &QuboModel) -> f64 {
    q.linear().iter().map(|v| v.abs()).sum::<f64>() + q.quadratic().values().map(|v| v.abs()).sum::<f64>()
}

/// Coefficients of a binary expansion covering exactly `0..=range`:
/// powers of two, with the remainder on the top bit. Uses
/// `ceil(log2(range + 1))` bits.
pub fn slack_coefficients(range: u64) -> Vec<u64> {
    if range == 0 {
        return Vec::new();
    }
    let bits = 64 - range.leading_zeros() as usize;
    let mut coefs: Vec<u64> = (0..bits - 1).map(|k| 1u64 << k).collect();
    let covered: u64 = coefs.iter().sum();
    coefs.push(range - covered);
    coefs
}

/// `constant + Σ coef·b_var`.
#[derive(Debug, Clone, PartialEq, Default, Serialize, Deserialize)]
pub struct LinearExpr {
    pub terms: Vec<(usize, f64)>,
    pub constant: f64,
}

impl LinearExpr {
    pub fn constant(c: f64) -> Self {
        Self { terms: Vec::new(), constant: c }
    }

    pub fn term(mut self, var: usize, coef: f64) -> Self {
        self.terms.push((var, coef));
        self
    }

    pub fn eval(&self, bits: &[bool]) -> f64 {
        self.constant + self.terms.iter().filter(|(v, _)| bits[*v]).map(|(_, c)| c).sum::<f64>()
    }

    fn merged(&self) -> Vec<(usize, f64)> {
        let mut t = self.terms.clone();
        t.sort_by_key(|(v, _)| *v);
        let mut out: Vec<(usize, f64)> = Vec::with_capacity(t.len());
        for (v, c) in t {
            match out.last_mut() {
                Some((lv, lc)) if *lv == v => *lc += c,
                _ => out.push((v, c)),
            }
        }
        out
    }
}

/// Binary slack attached to one inequality: the model penalizes
/// `residual − Σ coefs_k·z_k ≠ 0`, so a feasible assignment needs the slack
/// to equal `residual`, which always lies in `0..=Σ coefs`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SlackGroup {
    pub name: String,
    pub vars: Vec<usize>,
    pub coefs: Vec<u64>,
    pub residual: LinearExpr,
}

impl SlackGroup {
    pub fn range(&self) -> u64 {
        self.coefs.iter().sum()
    }

    /// Slack bits representing `value`, if it is representable.
    pub fn bits_for(&self, value: u64) -> Option<Vec<bool>> {
        if value > self.range() {
            return None;
        }
        let m = self.coefs.len();
        let low_cap: u64 = self.coefs[..m.saturating_sub(1)].iter().sum();
        let (top, rest) = if value > low_cap { (true, value - self.coefs[m - 1]) } else { (false, value) };
        let mut bits: Vec<bool> = (0..m.saturating_sub(1)).map(|k| (rest >> k) & 1 == 1).collect();
        if m > 0 {
            bits.push(top);
        }
        Some(bits)
    }
}

/// Adds `weight·expr²`, expanded with `b² = b`.
pub(crate) fn add_squared(q: &mut QuboModel, expr: &LinearExpr, weight: f64) {
    let t = expr.merged();
    let c = expr.constant;
    q.add_offset(weight * c * c);
    for (k, &(i, a)) in t.iter().enumerate() {
        q.add_linear(i, weight * (a * a + 2.0 * c * a));
        for &(j, b) in &t[k + 1..] {
            q.add_quadratic(i, j, 2.0 * weight * a * b);
        }
    }
}

pub(crate) fn add_linear_expr(q: &mut QuboModel, expr: &LinearExpr, weight: f64) {
    q.add_offset(weight * expr.constant);
    for &(i, a) in &expr.terms {
        q.add_linear(i, weight * a);
    }
}

/// Encodes `residual ≥ 0` (in integer units, at most `range`).
///
/// Slack: `λ·(residual − slack)²` with fresh slack variables.
/// Unbalanced: `l1·g + l2·g²` with `g = −residual`.
pub(crate) fn add_inequality(
    q: &mut QuboModel,
    cfg: &PenaltyConfig,
    lambda: f64,
    name: &str,
    residual: LinearExpr,
    range: u64,
) {
    match cfg.method {
        PenaltyMethod::Slack => {
            let coefs = slack_coefficients(range);
            let vars: Vec<usize> = (0..coefs.len())
                .map(|bit| q.push_var(VarRole::Slack { group: name.to_string(), bit }))
                .collect();
            let mut expr = residual.clone();
            for (&v, &c) in vars.iter().zip(&coefs) {
                expr.terms.push((v, -(c as f64)));
            }
            add_squared(q, &expr, lambda);
            q.push_slack_group(SlackGroup { name: name.to_string(), vars, coefs, residual });
        }
        PenaltyMethod::Unbalanced => {
            let g = LinearExpr {
                terms: residual.terms.iter().map(|&(v, c)| (v, -c)).collect(),
                constant: -residual.constant,
            };
            add_linear_expr(q, &g, cfg.unbalanced_l1);
            add_squared(q, &g, cfg.unbalanced_l2);
        }
    }
}
