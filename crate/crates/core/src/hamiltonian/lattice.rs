use serde::{Deserialize, Serialize};

use super::{HamiltonianError, Result};

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum LatticeKind {
    Chain { n: usize },
    Square { rows: usize, cols: usize },
    KagomePatch { cells_x: usize, cells_y: usize },
    Custom,
}

/// Sites with an undirected neighbour list. Pairs are stored once with
/// `i < j`; boundaries are open.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Lattice {
    pub kind: LatticeKind,
    pub n_sites: usize,
    pub edges: Vec<(usize, usize)>,
}

impl Lattice {
    pub fn from_edges(n_sites: usize, edges: Vec<(usize, usize)>) -> Result<Self> {
        Self::build(LatticeKind::Custom, n_sites, edges)
    }

    fn build(kind: LatticeKind, n_sites: usize, edges: Vec<(usize, usize)>) -> Result<Self> {
        if n_sites == 0 {
            return Err(HamiltonianError::InvalidLattice("lattice has no sites".into()));
        }
        let mut norm: Vec<(usize, usize)> = Vec::with_capacity(edges.len());
        for (a, b) in edges {
            if a == b || a.max(b) >= n_sites {
                return Err(HamiltonianError::InvalidLattice(format!("bad pair ({a}, {b})")));
            }
            let e = (a.min(b), a.max(b));
            if norm.contains(&e) {
                return Err(HamiltonianError::InvalidLattice(format!("duplicate pair ({a}, {b})")));
            }
            norm.push(e);
        }
        Ok(Self { kind, n_sites, edges: norm })
    }

    pub fn chain(n: usize) -> Result<Self> {
        Self::build(LatticeKind::Chain { n }, n, (1..n).map(|i| (i - 1, i)).collect())
    }

    /// Row-major sites `r·cols + c`.
    pub fn square(rows: usize, cols: usize) -> Result<Self> {
        let mut edges = Vec::new();
        for r in 0..rows {
            for c in 0..cols {
                let i = r * cols + c;
                if c + 1 < cols {
                    edges.push((i, i + 1));
                }
                if r + 1 < rows {
                    edges.push((i, i + cols));
                }
            }
        }
        Self::build(LatticeKind::Square { rows, cols }, rows * cols, edges)
    }

    /// Open patch of `cells_x × cells_y` kagome unit cells. Cell `(a, b)` sits
    /// at `a·(2, 0) + b·(1, √3)` and holds the corner sites at offsets
    /// `(0, 0)`, `(1, 0)` and `(1/2, √3/2)`; sites at unit distance are
    /// neighbours.
    pub fn kagome_patch(cells_x: usize, cells_y: usize) -> Result<Self> {
        let h = 3f64.sqrt() / 2.0;
        let mut pos = Vec::new();
        for b in 0..cells_y {
            for a in 0..cells_x {
                let (ox, oy) = (2.0 * a as f64 + b as f64, 2.0 * h * b as f64);
                pos.push((ox, oy));
                pos.push((ox + 1.0, oy));
                pos.push((ox + 0.5, oy + h));
            }
        }
        let mut edges = Vec::new();
        for i in 0..pos.len() {
            for j in i + 1..pos.len() {
                let d = ((pos[i].0 - pos[j].0).powi(2) + (pos[i].1 - pos[j].1).powi(2)).sqrt();
                if (d - 1.0).abs() < 1e-9 {
                    edges.push((i, j));
                }
            }
        }
        Self::build(LatticeKind::KagomePatch { cells_x, cells_y }, pos.len(), edges)
    }

    pub fn neighbors(&self, i: usize) -> Vec<usize> {
        self.edges
            .iter()
            .filter_map(|&(a, b)| if a == i { Some(b) } else if b == i { Some(a) } else { None })
            .collect()
    }

    /// Sites occupied in the charge-density-wave pattern: checkerboard on
    /// square lattices, even indices otherwise.
    pub fn cdw_occupied(&self, i: usize) -> bool {
        match self.kind {
            LatticeKind::Square { cols, .. } => (i / cols + i % cols) % 2 == 0,
            _ => i % 2 == 0,
        }
    }

    /// A dimer cover (perfect matching of the neighbour graph) if one
    /// exists, found by backtracking from the lowest unmatched site.
    pub fn perfect_matching(&self) -> Option<Vec<(usize, usize)>> {
        if self.n_sites % 2 == 1 {
            return None;
        }
        let adj: Vec<Vec<usize>> = (0..self.n_sites).map(|i| self.neighbors(i)).collect();
        let mut partner = vec![usize::MAX; self.n_sites];
        fn search(adj: &[Vec<usize>], partner: &mut [usize]) -> bool {
            let Some(i) = partner.iter().position(|&p| p == usize::MAX) else {
                return true;
            };
            for &j in &adj[i] {
                if partner[j] == usize::MAX {
                    partner[i] = j;
                    partner[j] = i;
                    if search(adj, partner) {
                        return true;
                    }
                    partner[i] = usize::MAX;
                    partner[j] = usize::MAX;
                }
            }
            false
        }
        search(&adj, &mut partner)
            .then(|| (0..self.n_sites).filter(|&i| i < partner[i]).map(|i| (i, partner[i])).collect())
    }

    pub fn adjacency_matrix(&self) -> nalgebra::DMatrix<f64> {
        let mut a = nalgebra::DMatrix::zeros(self.n_sites, self.n_sites);
        for &(i, j) in &self.edges {
            a[(i, j)] = 1.0;
            a[(j, i)] = 1.0;
        }
        a
    }
}
