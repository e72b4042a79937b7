//! Dense statevector simulation and parametrized-circuit metrics.
//!
//! Qubit `q` is bit `q` of the amplitude index.

mod ansatz;
mod expr;
mod state;

use std::collections::BTreeMap;
use std::fmt;
use std::str::FromStr;

use serde::{Deserialize, Serialize};
use thiserror::Error;

pub use ansatz::{bell_template, euler_template, identity_template, qcnn_ansatz, strongly_entangling_layer};
pub use expr::{
    expressibility, fidelity_histogram, haar_bin_probabilities, haar_fidelity_pdf, haar_histogram, jsd,
    meyer_wallach, meyer_wallach_with, mw_of_template, FidelityHistogram, MwForm,
};
pub use state::{fidelity, haar_state, simulate, Pauli, Statevector};

pub const MAX_QUBITS: usize = 24;

pub type Params = BTreeMap<String, f64>;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum CircuitError {
    #[error("{0} qubits requested; supported range is 1..={MAX_QUBITS}")]
    QubitCount(usize),
    #[error("target {target} out of range for {n} qubits")]
    TargetOutOfRange { target: usize, n: usize },
    #[error("two-qubit gate needs distinct targets, got {0} twice")]
    DuplicateTargets(usize),
    #[error("{kind} takes {expected} target(s) and {param} parameter")]
    Arity { kind: GateKind, expected: usize, param: &'static str },
    #[error("unbound symbol `{0}`")]
    UnboundSymbol(String),
    #[error("dimension mismatch: {0} vs {1} qubits")]
    DimensionMismatch(usize, usize),
    #[error("state norm {0} is not 1")]
    NotNormalized(f64),
    #[error("invalid argument: {0}")]
    InvalidArgument(String),
    #[error("line {line}: {message}")]
    Parse { line: usize, message: String },
}

pub type Result<T> = std::result::Result<T, CircuitError>;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub enum GateKind {
    H,
    X,
    RX,
    RY,
    RZ,
    CNOT,
    CZ,
    RZZ,
}

impl GateKind {
    pub fn arity(self) -> usize {
        match self {
            GateKind::CNOT | GateKind::CZ | GateKind::RZZ => 2,
            _ => 1,
        }
    }

    pub fn is_parametric(self) -> bool {
        matches!(self, GateKind::RX | GateKind::RY | GateKind::RZ | GateKind::RZZ)
    }
}

impl fmt::Display for GateKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        fmt::Debug::fmt(self, f)
    }
}

impl FromStr for GateKind {
    type Err = String;

    fn from_str(s: &str) -> std::result::Result<Self, String> {
        Ok(match s {
            "H" => GateKind::H,
            "X" => GateKind::X,
            "RX" => GateKind::RX,
            "RY" => GateKind::RY,
            "RZ" => GateKind::RZ,
            "CNOT" => GateKind::CNOT,
            "CZ" => GateKind::CZ,
            "RZZ" => GateKind::RZZ,
            other => return Err(format!("unknown gate `{other}`")),
        })
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(untagged)]
pub enum Param {
    Literal(f64),
    Symbol(String),
}

impl Param {
    pub fn resolve(&self, params: &Params) -> Result<f64> {
        match self {
            Param::Literal(v) => Ok(*v),
            Param::Symbol(s) => params.get(s).copied().ok_or_else(|| CircuitError::UnboundSymbol(s.clone())),
        }
    }
}

impl From<f64> for Param {
    fn from(v: f64) -> Self {
        Param::Literal(v)
    }
}

impl From<&str> for Param {
    fn from(s: &str) -> Self {
        Param::Symbol(s.to_string())
    }
}

impl From<String> for Param {
    fn from(s: String) -> Self {
        Param::Symbol(s)
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Gate {
    pub kind: GateKind,
    pub targets: Vec<usize>,
    pub param: Option<Param>,
}

impl Gate {
    pub fn new(kind: GateKind, targets: Vec<usize>, param: Option<Param>) -> Self {
        Self { kind, targets, param }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Circuit {
    n_qubits: usize,
    gates: Vec<Gate>,
}

impl Circuit {
    pub fn new(n_qubits: usize) -> Result<Self> {
        if n_qubits == 0 || n_qubits > MAX_QUBITS {
            return Err(CircuitError::QubitCount(n_qubits));
        }
        Ok(Self { n_qubits, gates: Vec::new() })
    }

    pub fn n_qubits(&self) -> usize {
        self.n_qubits
    }

    pub fn gates(&self) -> &[Gate] {
        &self.gates
    }

    pub fn len(&self) -> usize {
        self.gates.len()
    }

    pub fn is_empty(&self) -> bool {
        self.gates.is_empty()
    }

    pub fn add(&mut self, gate: Gate) -> Result<&mut Self> {
        let kind = gate.kind;
        if gate.targets.len() != kind.arity() || gate.param.is_some() != kind.is_parametric() {
            return Err(CircuitError::Arity {
                kind,
                expected: kind.arity(),
                param: if kind.is_parametric() { "one" } else { "no" },
            });
        }
        for &t in &gate.targets {
            if t >= self.n_qubits {
                return Err(CircuitError::TargetOutOfRange { target: t, n: self.n_qubits });
            }
        }
        if kind.arity() == 2 && gate.targets[0] == gate.targets[1] {
            return Err(CircuitError::DuplicateTargets(gate.targets[0]));
        }
        self.gates.push(gate);
        Ok(self)
    }

    fn push(&mut self, kind: GateKind, targets: Vec<usize>, param: Option<Param>) -> &mut Self {
        if let Err(e) = self.add(Gate::new(kind, targets, param)) {
            panic!("invalid gate: {e}");
        }
        self
    }

    /// Builder shorthands; these panic on invalid targets. Use [`Circuit::add`]
    /// for untrusted input.
    pub fn h(&mut self, q: usize) -> &mut Self {
        self.push(GateKind::H, vec![q], None)
    }

    pub fn x(&mut self, q: usize) -> &mut Self {
        self.push(GateKind::X, vec![q], None)
    }

    pub fn rx(&mut self, q: usize, p: impl Into<Param>) -> &mut Self {
        self.push(GateKind::RX, vec![q], Some(p.into()))
    }

    pub fn ry(&mut self, q: usize, p: impl Into<Param>) -> &mut Self {
        self.push(GateKind::RY, vec![q], Some(p.into()))
    }

    pub fn rz(&mut self, q: usize, p: impl Into<Param>) -> &mut Self {
        self.push(GateKind::RZ, vec![q], Some(p.into()))
    }

    pub fn cnot(&mut self, control: usize, target: usize) -> &mut Self {
        self.push(GateKind::CNOT, vec![control, target], None)
    }

    pub fn cz(&mut self, a: usize, b: usize) -> &mut Self {
        self.push(GateKind::CZ, vec![a, b], None)
    }

    pub fn rzz(&mut self, a: usize, b: usize, p: impl Into<Param>) -> &mut Self {
        self.push(GateKind::RZZ, vec![a, b], Some(p.into()))
    }

    pub fn append(&mut self, other: &Circuit) -> Result<&mut Self> {
        if other.n_qubits > self.n_qubits {
            return Err(CircuitError::DimensionMismatch(self.n_qubits, other.n_qubits));
        }
        self.gates.extend(other.gates.iter().cloned());
        Ok(self)
    }

    /// Distinct symbols in order of first appearance.
    pub fn symbols(&self) -> Vec<String> {
        let mut seen = std::collections::BTreeSet::new();
        let mut out = Vec::new();
        for g in &self.gates {
            if let Some(Param::Symbol(s)) = &g.param {
                if seen.insert(s.clone()) {
                    out.push(s.clone());
                }
            }
        }
        out
    }

    /// Number of layers when every gate is scheduled as early as possible.
    pub fn depth(&self) -> usize {
        let mut level = vec![0usize; self.n_qubits];
        for g in &self.gates {
            let l = g.targets.iter().map(|&t| level[t]).max().unwrap_or(0) + 1;
            for &t in &g.targets {
                level[t] = l;
            }
        }
        level.into_iter().max().unwrap_or(0)
    }

    pub fn gate_counts(&self) -> BTreeMap<GateKind, usize> {
        let mut counts = BTreeMap::new();
        for g in &self.gates {
            *counts.entry(g.kind).or_insert(0) += 1;
        }
        counts
    }

    pub fn two_qubit_count(&self) -> usize {
        self.gates.iter().filter(|g| g.kind.arity() == 2).count()
    }

    /// Apply the relabeling `q → perm[q]` to every target.
    pub fn relabeled(&self, perm: &[usize]) -> Result<Circuit> {
        let mut sorted = perm.to_vec();
        sorted.sort_unstable();
        if sorted != (0..self.n_qubits).collect::<Vec<_>>() {
            return Err(CircuitError::InvalidArgument("relabeling must be a permutation of the qubits".into()));
        }
        let mut c = self.clone();
        for g in &mut c.gates {
            for t in &mut g.targets {
                *t = perm[*t];
            }
        }
        Ok(c)
    }

    /// `QUBITS n` followed by one `KIND t1[,t2] [param]` line per gate.
    /// Literal angles carry 17 significant digits.
    pub fn to_text(&self) -> String {
        let mut out = format!("QUBITS {}\n", self.n_qubits);
        for g in &self.gates {
            let targets: Vec<String> = g.targets.iter().map(|t| t.to_string()).collect();
            out.push_str(&format!("{} {}", g.kind, targets.join(",")));
            match &g.param {
                Some(Param::Literal(v)) => out.push_str(&format!(" {v:.16e}")),
                Some(Param::Symbol(s)) => out.push_str(&format!(" {s}")),
                None => {}
            }
            out.push('\n');
        }
        out
    }

    pub fn parse_text(text: &str) -> Result<Self> {
        let err = |line: usize, message: String| CircuitError::Parse { line, message };
        let mut lines = text.lines().enumerate().map(|(i, l)| (i + 1, l.trim())).filter(|(_, l)| !l.is_empty());
        let (ln, header) = lines.next().ok_or_else(|| err(1, "empty circuit file".into()))?;
        let n = header
            .strip_prefix("QUBITS ")
            .and_then(|v| v.trim().parse::<usize>().ok())
            .ok_or_else(|| err(ln, format!("expected `QUBITS n`, found `{header}`")))?;
        let mut c = Circuit::new(n)?;
        for (ln, line) in lines {
            let mut parts = line.split_whitespace();
            let kind: GateKind = parts.next().unwrap_or_default().parse().map_err(|m| err(ln, m))?;
            let targets = parts
                .next()
                .ok_or_else(|| err(ln, "missing targets".into()))?
                .split(',')
                .map(|t| t.parse::<usize>().map_err(|e| err(ln, format!("bad target `{t}`: {e}"))))
                .collect::<Result<Vec<_>>>()?;
            let param = parts.next().map(|p| match p.parse::<f64>() {
                Ok(v) => Param::Literal(v),
                Err(_) => Param::Symbol(p.to_string()),
            });
            if let Some(extra) = parts.next() {
                return Err(err(ln, format!("unexpected token `{extra}`")));
            }
            c.add(Gate::new(kind, targets, param)).map_err(|e| err(ln, e.to_string()))?;
        }
        Ok(c)
    }
}
