//! QUBO models and penalty-based mappings from the domain problems.
//!
//! A [`QuboModel`] minimizes `offset + Σ linear_i b_i + Σ_{i<j} quadratic_ij b_i b_j`
//! over binary `b`. Every variable carries a [`VarRole`] label so that
//! bitstrings can be decoded back into domain solutions.

mod decode;
mod label;
mod mappers;
mod penalty;

use std::collections::BTreeMap;

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::problems::{PortfolioInstance, ProblemError, ProblemGraph, SalbpInstance, SetCoverInstance};

pub use decode::{decode, encode};
pub use label::VarRole;
pub use mappers::{maxcut_to_qubo, portfolio_to_qubo, salbp_to_qubo, setcover_to_qubo};
pub use penalty::{default_lagrange, slack_coefficients, LinearExpr, PenaltyConfig, PenaltyMethod, SlackGroup};

#[derive(Debug, Error, Clone, PartialEq)]
pub enum QuboError {
    #[error("bitstring length {found} does not match {expected} variables")]
    LengthMismatch { expected: usize, found: usize },
    #[error("variable index {0} out of range")]
    IndexOutOfRange(usize),
    #[error("coefficient is not finite")]
    NonFinite,
    #[error("model needs {needed} variables, budget is {budget}")]
    BudgetExceeded { needed: usize, budget: usize },
    #[error("invalid penalty configuration: {0}")]
    InvalidConfig(String),
    #[error("instance cannot be encoded: {0}")]
    Unencodable(String),
    #[error("instance is infeasible: {0}")]
    Infeasible(String),
    #[error("model has no domain problem to decode into")]
    NoDomain,
    #[error("malformed model: {0}")]
    Malformed(String),
    #[error(transparent)]
    Problem(#[from] ProblemError),
}

pub type Result<T> = std::result::Result<T, QuboError>;

/// The domain instance a model was built from.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize, Default)]
#[serde(tag = "problem", content = "instance", rename_all = "snake_case")]
pub enum Origin {
    #[default]
    Raw,
    MaxCut(ProblemGraph),
    SetCover(SetCoverInstance),
    Portfolio(PortfolioInstance),
    Salbp(SalbpInstance),
}

impl Origin {
    pub fn name(&self) -> &'static str {
        match self {
            Origin::Raw => "raw",
            Origin::MaxCut(_) => "maxcut",
            Origin::SetCover(_) => "set_cover",
            Origin::Portfolio(_) => "portfolio",
            Origin::Salbp(_) => "salbp",
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct QuboModel {
    linear: Vec<f64>,
    quadratic: BTreeMap<(usize, usize), f64>,
    offset: f64,
    decode_map: Vec<VarRole>,
    slack_groups: Vec<SlackGroup>,
    origin: Origin,
}

impl QuboModel {
    /// An all-zero model over `n` generically labelled variables.
    pub fn new(n: usize) -> Self {
        Self::with_roles((0..n).map(VarRole::Generic).collect(), Origin::Raw)
    }

    pub fn with_roles(decode_map: Vec<VarRole>, origin: Origin) -> Self {
        Self {
            linear: vec![0.0; decode_map.len()],
            quadratic: BTreeMap::new(),
            offset: 0.0,
            decode_map,
            slack_groups: Vec::new(),
            origin,
        }
    }

    /// Append a variable and return its index.
    pub fn push_var(&mut self, role: VarRole) -> usize {
        self.linear.push(0.0);
        self.decode_map.push(role);
        self.linear.len() - 1
    }

    pub fn n_vars(&self) -> usize {
        self.linear.len()
    }

    pub fn linear(&self) -> &[f64] {
        &self.linear
    }

    pub fn quadratic(&self) -> &BTreeMap<(usize, usize), f64> {
        &self.quadratic
    }

    pub fn offset(&self) -> f64 {
        self.offset
    }

    pub fn decode_map(&self) -> &[VarRole] {
        &self.decode_map
    }

    pub fn slack_groups(&self) -> &[SlackGroup] {
        &self.slack_groups
    }

    pub fn origin(&self) -> &Origin {
        &self.origin
    }

    pub fn problem(&self) -> &'static str {
        self.origin.name()
    }

    pub fn add_offset(&mut self, v: f64) {
        self.offset += v;
    }

    pub fn add_linear(&mut self, i: usize, v: f64) {
        self.linear[i] += v;
    }

    /// Adds `v·b_i·b_j`. The diagonal folds into the linear term since `b² = b`.
    pub fn add_quadratic(&mut self, i: usize, j: usize, v: f64) {
        if i == j {
            self.linear[i] += v;
            return;
        }
        let key = if i < j { (i, j) } else { (j, i) };
        *self.quadratic.entry(key).or_insert(0.0) += v;
    }

    pub(crate) fn push_slack_group(&mut self, group: SlackGroup) {
        self.slack_groups.push(group);
    }

    /// Drops quadratic entries that cancelled to exactly zero.
    pub fn prune_zeros(&mut self) {
        self.quadratic.retain(|_, v| *v != 0.0);
    }

    pub fn energy(&self, bits: &[bool]) -> Result<f64> {
        if bits.len() != self.n_vars() {
            return Err(QuboError::LengthMismatch { expected: self.n_vars(), found: bits.len() });
        }
        Ok(self.energy_unchecked(bits))
    }

    pub(crate) fn energy_unchecked(&self, bits: &[bool]) -> f64 {
        let lin: f64 = self.linear.iter().zip(bits).filter(|(_, &b)| b).map(|(v, _)| *v).sum();
        let quad: f64 = self
            .quadratic
            .iter()
            .filter(|((i, j), _)| bits[*i] && bits[*j])
            .map(|(_, v)| *v)
            .sum();
        self.offset + lin + quad
    }

    /// Symmetric adjacency lists `(neighbour, coefficient)` for every variable.
    pub fn adjacency(&self) -> Vec<Vec<(usize, f64)>> {
        let mut adj = vec![Vec::new(); self.n_vars()];
        for (&(i, j), &v) in &self.quadratic {
            adj[i].push((j, v));
            adj[j].push((i, v));
        }
        adj
    }

    /// Checks the structural invariants; used after deserialization.
    pub fn validate(&self) -> Result<()> {
        if self.decode_map.len() != self.linear.len() {
            return Err(QuboError::Malformed("decode_map does not cover every variable".into()));
        }
        if !self.offset.is_finite() || self.linear.iter().any(|v| !v.is_finite()) {
            return Err(QuboError::NonFinite);
        }
        for (&(i, j), v) in &self.quadratic {
            if i >= j || j >= self.n_vars() {
                return Err(QuboError::Malformed(format!("quadratic key ({i},{j}) not strictly upper triangular")));
            }
            if !v.is_finite() {
                return Err(QuboError::NonFinite);
            }
        }
        for g in &self.slack_groups {
            if g.vars.iter().chain(g.residual.terms.iter().map(|(v, _)| v)).any(|&v| v >= self.n_vars()) {
                return Err(QuboError::Malformed("slack group references unknown variable".into()));
            }
        }
        Ok(())
    }

    /// Sparse structured text form. Serializing a parsed model reproduces the
    /// input byte for byte.
    pub fn to_json(&self) -> String {
        serde_json::to_string_pretty(&QuboFile::from(self)).expect("model serializes")
    }

    pub fn from_json(text: &str) -> Result<Self> {
        let file: QuboFile = serde_json::from_str(text).map_err(|e| QuboError::Malformed(e.to_string()))?;
        file.try_into()
    }

    /// Spin form under `s = 1 − 2b`.
    pub fn to_ising(&self) -> IsingModel {
        let n = self.n_vars();
        let mut h: Vec<f64> = self.linear.iter().map(|l| -l / 2.0).collect();
        let mut offset = self.offset + self.linear.iter().sum::<f64>() / 2.0;
        let mut coupling = BTreeMap::new();
        for (&(i, j), &q) in &self.quadratic {
            h[i] -= q / 4.0;
            h[j] -= q / 4.0;
            offset += q / 4.0;
            coupling.insert((i, j), q / 4.0);
        }
        debug_assert_eq!(h.len(), n);
        IsingModel { h, coupling, offset }
    }
}

impl Serialize for QuboModel {
    fn serialize<S: serde::Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        QuboFile::from(self).serialize(s)
    }
}

impl<'de> Deserialize<'de> for QuboModel {
    fn deserialize<D: serde::Deserializer<'de>>(d: D) -> std::result::Result<Self, D::Error> {
        QuboFile::deserialize(d)?.try_into().map_err(serde::de::Error::custom)
    }
}

#[derive(Serialize, Deserialize)]
struct QuboFile {
    n_vars: usize,
    offset: f64,
    linear: Vec<(usize, f64)>,
    quadratic: Vec<(usize, usize, f64)>,
    decode_map: Vec<String>,
    #[serde(default, skip_serializing_if = "Vec::is_empty")]
    slack_groups: Vec<SlackGroup>,
    #[serde(default)]
    origin: Origin,
}

impl From<&QuboModel> for QuboFile {
    fn from(m: &QuboModel) -> Self {
        Self {
            n_vars: m.n_vars(),
            offset: m.offset,
            linear: m.linear.iter().copied().enumerate().filter(|(_, v)| *v != 0.0).collect(),
            quadratic: m.quadratic.iter().map(|(&(i, j), &v)| (i, j, v)).collect(),
            decode_map: m.decode_map.iter().map(ToString::to_string).collect(),
            slack_groups: m.slack_groups.clone(),
            origin: m.origin.clone(),
        }
    }
}

impl TryFrom<QuboFile> for QuboModel {
    type Error = QuboError;

    fn try_from(f: QuboFile) -> Result<Self> {
        if f.decode_map.len() != f.n_vars {
            return Err(QuboError::Malformed(format!(
                "decode_map has {} labels for {} variables",
                f.decode_map.len(),
                f.n_vars
            )));
        }
        let roles = f
            .decode_map
            .iter()
            .map(|s| s.parse::<VarRole>())
            .collect::<std::result::Result<Vec<_>, _>>()
            .map_err(QuboError::Malformed)?;
        let mut m = QuboModel::with_roles(roles, f.origin);
        m.offset = f.offset;
        for (i, v) in f.linear {
            if i >= f.n_vars {
                return Err(QuboError::IndexOutOfRange(i));
            }
            m.linear[i] += v;
        }
        for (i, j, v) in f.quadratic {
            if i >= j || j >= f.n_vars {
                return Err(QuboError::Malformed(format!("quadratic key ({i},{j}) not strictly upper triangular")));
            }
            m.quadratic.insert((i, j), v);
        }
        m.slack_groups = f.slack_groups;
        m.validate()?;
        Ok(m)
    }
}

/// `offset + Σ h_i s_i + Σ_{i<j} J_ij s_i s_j` over spins `s ∈ {−1, +1}`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct IsingModel {
    pub h: Vec<f64>,
    pub coupling: BTreeMap<(usize, usize), f64>,
    pub offset: f64,
}

impl IsingModel {
    pub fn energy(&self, spins: &[i8]) -> f64 {
        let s = |i: usize| spins[i] as f64;
        self.offset
            + self.h.iter().enumerate().map(|(i, h)| h * s(i)).sum::<f64>()
            + self.coupling.iter().map(|(&(i, j), c)| c * s(i) * s(j)).sum::<f64>()
    }
}
