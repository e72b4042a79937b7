//! Lattice Hamiltonians as Pauli sums, Trotterized dynamics, adiabatic
//! state preparation and exact reference solvers.
//!
//! Fermions are mapped with Jordan–Wigner; mode `σ·n_sites + i` holds spin
//! `σ` on site `i` (spin-major, sites row-major), and an occupied mode is
//! qubit value 1.

mod adiabatic;
mod dynamics;
mod exact;
mod lattice;
mod pauli;
mod trotter;

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::circuit::{CircuitError, Pauli, Statevector, MAX_QUBITS};

pub use adiabatic::{adiabatic_prepare, dimer_singlet_state, AdiabaticConfig};
pub use dynamics::{cdw_state, evolve_dynamics, free_fermion_oracle, imbalance, DynamicsConfig, Trace, TracePoint};
pub use exact::{dense_matrix, evolve_exact, ground_energy_dense, ground_energy_lanczos, sector_matrix};
pub use lattice::{Lattice, LatticeKind};
pub use pauli::{apply_terms, expectation_complex, PauliString, PauliTerm};
pub use trotter::{pauli_rotation, run_noisy, trotter_step_circuit, NoiseModel};

#[derive(Debug, Error, Clone, PartialEq)]
pub enum HamiltonianError {
    #[error("invalid lattice: {0}")]
    InvalidLattice(String),
    #[error("invalid parameter: {0}")]
    InvalidParameter(String),
    #[error("{0} qubits exceed the simulator limit of {MAX_QUBITS}")]
    TooManyQubits(usize),
    #[error("lattice has no perfect matching")]
    NoPerfectMatching,
    #[error("dimension mismatch: state has {state} qubits, Hamiltonian {hamiltonian}")]
    DimensionMismatch { state: usize, hamiltonian: usize },
    #[error("expectation has imaginary residue {0}")]
    NonHermitian(f64),
    #[error(transparent)]
    Circuit(#[from] CircuitError),
}

pub type Result<T> = std::result::Result<T, HamiltonianError>;

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(tag = "model", rename_all = "snake_case")]
pub enum Model {
    Hubbard { t: f64, v: f64, spinful: bool },
    /// `coupling · Σ (XX + YY + ZZ)`.
    Heisenberg { coupling: f64 },
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct HamiltonianSpec {
    pub model: Model,
    pub lattice: Lattice,
    pub n_qubits: usize,
    /// Ordered as they are Trotterized. Hubbard: all hopping terms, then
    /// density terms. Heisenberg: XX, YY, ZZ for each edge in turn.
    pub terms: Vec<PauliTerm>,
}

impl HamiltonianSpec {
    pub fn from_terms(model: Model, lattice: Lattice, n_qubits: usize, terms: Vec<PauliTerm>) -> Result<Self> {
        if n_qubits == 0 || n_qubits > MAX_QUBITS {
            return Err(HamiltonianError::TooManyQubits(n_qubits));
        }
        if let Some(t) = terms.iter().find(|t| t.pauli.max_qubit().is_some_and(|q| q >= n_qubits)) {
            return Err(HamiltonianError::InvalidParameter(format!("term {} exceeds {n_qubits} qubits", t.pauli)));
        }
        if terms.iter().any(|t| !t.coeff.is_finite()) {
            return Err(HamiltonianError::InvalidParameter("non-finite coefficient".into()));
        }
        Ok(Self { model, lattice, n_qubits, terms })
    }

    /// `Σ |coeff|`, an upper bound on the spectral radius.
    pub fn norm_bound(&self) -> f64 {
        self.terms.iter().map(|t| t.coeff.abs()).sum()
    }

    pub fn n_sites(&self) -> usize {
        self.lattice.n_sites
    }
}

fn pair_string(n_a: usize, n_b: usize, p: Pauli) -> PauliString {
    let (lo, hi) = (n_a.min(n_b), n_a.max(n_b));
    let mut s = PauliString::identity().with(lo, p).with(hi, p);
    for q in lo + 1..hi {
        s = s.with(q, Pauli::Z);
    }
    s
}

/// `H = −t Σ_{⟨i,j⟩,σ} (c†_{iσ} c_{jσ} + h.c.) + V Σ_i (n_{i↑} n_{i↓} − 1/4)`.
///
/// Each hopping pair becomes `−t/2 (X Z…Z X + Y Z…Z Y)` and each on-site
/// interaction `V/4 (−Z_{i↑} − Z_{i↓} + Z_{i↑} Z_{i↓})`. The spinless model
/// has no interaction, so `V` must be 0 there.
pub fn build_hubbard(lattice: &Lattice, t: f64, v: f64, spinful: bool) -> Result<HamiltonianSpec> {
    if !t.is_finite() || !v.is_finite() {
        return Err(HamiltonianError::InvalidParameter("t and V must be finite".into()));
    }
    if !spinful && v != 0.0 {
        return Err(HamiltonianError::InvalidParameter("on-site interaction needs spinful fermions".into()));
    }
    let n = lattice.n_sites;
    let spins = if spinful { 2 } else { 1 };
    let mut terms = Vec::new();
    if t != 0.0 {
        for s in 0..spins {
            for &(i, j) in &lattice.edges {
                let (a, b) = (s * n + i, s * n + j);
                terms.push(PauliTerm { coeff: -t / 2.0, pauli: pair_string(a, b, Pauli::X) });
                terms.push(PauliTerm { coeff: -t / 2.0, pauli: pair_string(a, b, Pauli::Y) });
            }
        }
    }
    if v != 0.0 {
        for i in 0..n {
            let (up, dn) = (i, n + i);
            terms.push(PauliTerm { coeff: -v / 4.0, pauli: PauliString::from_ops(&[(up, Pauli::Z)]) });
            terms.push(PauliTerm { coeff: -v / 4.0, pauli: PauliString::from_ops(&[(dn, Pauli::Z)]) });
            terms.push(PauliTerm { coeff: v / 4.0, pauli: PauliString::from_ops(&[(up, Pauli::Z), (dn, Pauli::Z)]) });
        }
    }
    HamiltonianSpec::from_terms(Model::Hubbard { t, v, spinful }, lattice.clone(), spins * n, terms)
}

/// `H = −Σ_{⟨i,j⟩} (X_i X_j + Y_i Y_j + Z_i Z_j)`.
pub fn build_heisenberg(lattice: &Lattice) -> Result<HamiltonianSpec> {
    build_heisenberg_with(lattice, -1.0)
}

/// `H = J Σ_{⟨i,j⟩} (X_i X_j + Y_i Y_j + Z_i Z_j)`; `J > 0` is antiferromagnetic.
///
/// Terms are grouped per edge as XX, YY, ZZ. The three commute, so one
/// Trotter step is exact on each edge and only inter-edge errors remain.
pub fn build_heisenberg_with(lattice: &Lattice, coupling: f64) -> Result<HamiltonianSpec> {
    if !coupling.is_finite() {
        return Err(HamiltonianError::InvalidParameter("coupling must be finite".into()));
    }
    let pair = |i, j, p| PauliTerm { coeff: coupling, pauli: PauliString::from_ops(&[(i, p), (j, p)]) };
    let mut terms = Vec::new();
    for &(i, j) in &lattice.edges {
        terms.push(pair(i, j, Pauli::X));
        terms.push(pair(i, j, Pauli::Y));
        terms.push(pair(i, j, Pauli::Z));
    }
    HamiltonianSpec::from_terms(Model::Heisenberg { coupling }, lattice.clone(), lattice.n_sites, terms)
}

/// `⟨ψ|H|ψ⟩`; fails if the imaginary residue exceeds `1e−10·(1 + Σ|c|)`.
pub fn energy_expectation(state: &Statevector, h: &HamiltonianSpec) -> Result<f64> {
    if state.n_qubits() != h.n_qubits {
        return Err(HamiltonianError::DimensionMismatch { state: state.n_qubits(), hamiltonian: h.n_qubits });
    }
    let e = expectation_complex(&h.terms, state.amplitudes());
    if e.im.abs() > 1e-10 * (1.0 + h.norm_bound()) {
        return Err(HamiltonianError::NonHermitian(e.im));
    }
    Ok(e.re)
}
