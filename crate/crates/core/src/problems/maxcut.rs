use std::collections::BTreeSet;
use std::fmt::Write as _;

use rand::Rng as _;
use serde::{Deserialize, Serialize};

use super::{parse_err, ProblemError, Result};
use crate::rng::rng_from_seed;

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Edge {
    pub u: usize,
    pub v: usize,
    pub weight: f64,
}

/// Undirected simple weighted graph. Edges are stored with `u < v`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ProblemGraph {
    n: usize,
    edges: Vec<Edge>,
}

impl ProblemGraph {
    pub fn new(n: usize, edges: impl IntoIterator<Item = (usize, usize, f64)>) -> Result<Self> {
        let mut seen = BTreeSet::new();
        let mut out = Vec::new();
        for (a, b, weight) in edges {
            let (u, v) = if a < b { (a, b) } else { (b, a) };
            if u == v {
                return Err(ProblemError::InvalidInstance(format!("self loop at vertex {u}")));
            }
            if v >= n {
                return Err(ProblemError::IndexOutOfRange { index: v, limit: n });
            }
            if !weight.is_finite() {
                return Err(ProblemError::InvalidInstance(format!("edge ({u},{v}) weight not finite")));
            }
            if !seen.insert((u, v)) {
                return Err(ProblemError::InvalidInstance(format!("duplicate edge ({u},{v})")));
            }
            out.push(Edge { u, v, weight });
        }
        Ok(Self { n, edges: out })
    }

    pub fn n(&self) -> usize {
        self.n
    }

    pub fn edges(&self) -> &[Edge] {
        &self.edges
    }

    pub fn total_weight(&self) -> f64 {
        self.edges.iter().map(|e| e.weight).sum()
    }

    /// Returns a copy with one more edge.
    pub fn with_edge(&self, u: usize, v: usize, weight: f64) -> Result<Self> {
        let edges = self
            .edges
            .iter()
            .map(|e| (e.u, e.v, e.weight))
            .chain(std::iter::once((u, v, weight)));
        Self::new(self.n, edges)
    }

    /// Edge-list text: header `n m`, then one `u v weight` line per edge.
    pub fn to_edge_list(&self) -> String {
        let mut s = format!("{} {}\n", self.n, self.edges.len());
        for e in &self.edges {
            let _ = writeln!(s, "{} {} {}", e.u, e.v, e.weight);
        }
        s
    }

    pub fn parse_edge_list(text: &str) -> Result<Self> {
        let mut lines = text
            .lines()
            .enumerate()
            .map(|(i, l)| (i + 1, l.trim()))
            .filter(|(_, l)| !l.is_empty() && !l.starts_with('#'));
        let (hl, header) = lines.next().ok_or_else(|| parse_err(1, "missing header"))?;
        let head: Vec<&str> = header.split_whitespace().collect();
        if head.len() != 2 {
            return Err(parse_err(hl, "header must be `n m`"));
        }
        let n: usize = head[0].parse().map_err(|_| parse_err(hl, "bad vertex count"))?;
        let m: usize = head[1].parse().map_err(|_| parse_err(hl, "bad edge count"))?;
        let mut edges = Vec::with_capacity(m);
        for (ln, line) in lines {
            let f: Vec<&str> = line.split_whitespace().collect();
            if f.len() != 3 {
                return Err(parse_err(ln, "edge line must be `u v weight`"));
            }
            let u = f[0].parse().map_err(|_| parse_err(ln, "bad vertex"))?;
            let v = f[1].parse().map_err(|_| parse_err(ln, "bad vertex"))?;
            let w = f[2].parse().map_err(|_| parse_err(ln, "bad weight"))?;
            edges.push((u, v, w));
        }
        if edges.len() != m {
            return Err(parse_err(hl, format!("header declares {m} edges, found {}", edges.len())));
        }
        Self::new(n, edges)
    }
}

/// Erdős–Rényi G(n, p) with unit weights.
pub fn gen_maxcut(n: usize, edge_prob: f64, seed: u64) -> Result<ProblemGraph> {
    if n < 2 {
        return Err(ProblemError::InvalidParameter(format!("need n >= 2, got {n}")));
    }
    if !(edge_prob > 0.0 && edge_prob <= 1.0) {
        return Err(ProblemError::InvalidParameter(format!("edge_prob {edge_prob} not in (0,1]")));
    }
    let mut rng = rng_from_seed(seed);
    let mut edges = Vec::new();
    for u in 0..n {
        for v in u + 1..n {
            if rng.random::<f64>() < edge_prob {
                edges.push((u, v, 1.0));
            }
        }
    }
    ProblemGraph::new(n, edges)
}

pub fn eval_cut(g: &ProblemGraph, side: &[bool]) -> Result<f64> {
    if side.len() != g.n {
        return Err(ProblemError::LengthMismatch { expected: g.n, found: side.len() });
    }
    Ok(g.edges.iter().filter(|e| side[e.u] != side[e.v]).map(|e| e.weight).sum())
}

/// Best cut by enumerating every bipartition with vertex `n-1` fixed to
/// one side. Returns `(value, side)`.
pub fn max_cut_exhaustive(g: &ProblemGraph) -> (f64, Vec<bool>) {
    assert!(g.n <= 30, "exhaustive max cut limited to 30 vertices");
    let free = g.n.saturating_sub(1);
    let mut best = (f64::NEG_INFINITY, vec![false; g.n]);
    for mask in 0u64..(1u64 << free) {
        let side: Vec<bool> = (0..g.n).map(|i| (mask >> i) & 1 == 1).collect();
        let c = eval_cut(g, &side).expect("length matches");
        if c > best.0 {
            best = (c, side);
        }
    }
    best
}
