use nalgebra::{DMatrix, SymmetricEigen};
use num_complex::Complex64;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use super::{trotter_step_circuit, HamiltonianError, HamiltonianSpec, Lattice, Model, NoiseModel, Result};
use super::trotter::run_noisy;
use crate::circuit::{Circuit, Statevector};
use crate::rng::{derive_seed, rng_from_seed};

/// Settings shared by the Trotterized dynamics and adiabatic runs.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct DynamicsConfig {
    pub total_time: f64,
    pub steps: usize,
    pub noise: NoiseModel,
    /// Number of noisy trajectories; ignored when the run is noiseless.
    pub shots: usize,
    pub seed: u64,
}

impl DynamicsConfig {
    pub fn noiseless(total_time: f64, steps: usize) -> Self {
        Self { total_time, steps, noise: NoiseModel::noiseless(), shots: 1, seed: 0 }
    }

    pub(crate) fn validate(&self) -> Result<()> {
        if self.steps == 0 {
            return Err(HamiltonianError::InvalidParameter("steps must be at least 1".into()));
        }
        if !self.total_time.is_finite() {
            return Err(HamiltonianError::InvalidParameter("total time must be finite".into()));
        }
        NoiseModel::new(self.noise.p)?;
        if !self.noise.is_noiseless() && self.shots == 0 {
            return Err(HamiltonianError::InvalidParameter("noisy runs need at least one shot".into()));
        }
        Ok(())
    }

    fn trajectories(&self) -> usize {
        if self.noise.is_noiseless() {
            1
        } else {
            self.shots
        }
    }

    pub fn dt(&self) -> f64 {
        self.total_time / self.steps as f64
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct TracePoint {
    pub steps: usize,
    pub observable: f64,
    pub stderr: f64,
}

/// Observable after `j` Trotter steps for `j = 0..=steps`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Trace {
    pub observable: String,
    pub p: f64,
    pub shots: usize,
    pub seed: u64,
    pub points: Vec<TracePoint>,
}

impl Trace {
    pub fn last(&self) -> f64 {
        self.points.last().map_or(f64::NAN, |p| p.observable)
    }

    pub fn min_observable(&self) -> f64 {
        self.points.iter().map(|p| p.observable).fold(f64::INFINITY, f64::min)
    }

    pub fn values(&self) -> Vec<f64> {
        self.points.iter().map(|p| p.observable).collect()
    }

    pub fn to_csv(&self) -> String {
        let mut s = String::from("steps,observable,stderr,p,shots,seed\n");
        for pt in &self.points {
            s.push_str(&format!("{},{},{},{},{},{}\n", pt.steps, pt.observable, pt.stderr, self.p, self.shots, self.seed));
        }
        s
    }
}

/// Pairwise (cascade) summation; the result depends only on the order of
/// `xs`.
pub(crate) fn pairwise_sum(xs: &[f64]) -> f64 {
    if xs.len() <= 8 {
        return xs.iter().sum();
    }
    let mid = xs.len() / 2;
    pairwise_sum(&xs[..mid]) + pairwise_sum(&xs[mid..])
}

/// Runs every trajectory through `circuits` in order, calling `observe`
/// before the first and after each circuit. Result is indexed
/// `[trajectory][step][component]`; trajectory `k` uses seed
/// `derive_seed(seed, k)`.
pub(crate) fn run_trajectories<F>(
    initial: &Statevector,
    circuits: &[&Circuit],
    cfg: &DynamicsConfig,
    observe: F,
) -> Result<Vec<Vec<Vec<f64>>>>
where
    F: Fn(&Statevector) -> Vec<f64> + Sync,
{
    (0..cfg.trajectories() as u64)
        .into_par_iter()
        .map(|k| {
            let mut rng = rng_from_seed(derive_seed(cfg.seed, k));
            let mut psi = initial.clone();
            let mut out = Vec::with_capacity(circuits.len() + 1);
            out.push(observe(&psi));
            for c in circuits {
                run_noisy(&mut psi, c, &cfg.noise, &mut rng)?;
                out.push(observe(&psi));
            }
            Ok(out)
        })
        .collect()
}

fn require_hubbard(h: &HamiltonianSpec) -> Result<bool> {
    match h.model {
        Model::Hubbard { spinful, .. } => Ok(spinful),
        Model::Heisenberg { .. } => Err(HamiltonianError::InvalidParameter("imbalance needs a Hubbard model".into())),
    }
}

fn sublattice_counts(psi: &Statevector, lattice: &Lattice, spins: usize) -> (f64, f64) {
    let n = lattice.n_sites;
    let (mut occ, mut unocc) = (0.0, 0.0);
    for s in 0..spins {
        for i in 0..n {
            let density = (1.0 - psi.expect_z(s * n + i)) / 2.0;
            if lattice.cdw_occupied(i) {
                occ += density;
            } else {
                unocc += density;
            }
        }
    }
    (occ, unocc)
}

/// Charge-density-wave product state: every mode on a site with
/// `lattice.cdw_occupied(i)` is filled, for each spin.
pub fn cdw_state(h: &HamiltonianSpec) -> Result<Statevector> {
    let spins = if require_hubbard(h)? { 2 } else { 1 };
    let n = h.lattice.n_sites;
    let mut idx = 0usize;
    for s in 0..spins {
        for i in (0..n).filter(|&i| h.lattice.cdw_occupied(i)) {
            idx |= 1 << (s * n + i);
        }
    }
    Ok(Statevector::basis(h.n_qubits, idx)?)
}

/// `(N_occ − N_unocc)/(N_occ + N_unocc)` over the CDW sublattices.
pub fn imbalance(psi: &Statevector, h: &HamiltonianSpec) -> Result<f64> {
    let spins = if require_hubbard(h)? { 2 } else { 1 };
    if psi.n_qubits() != h.n_qubits {
        return Err(HamiltonianError::DimensionMismatch { state: psi.n_qubits(), hamiltonian: h.n_qubits });
    }
    let (occ, unocc) = sublattice_counts(psi, &h.lattice, spins);
    Ok((occ - unocc) / (occ + unocc))
}

/// Imbalance after each of `cfg.steps` first-order Trotter steps of length
/// `total_time/steps`, starting from the CDW state. Noisy runs average
/// `shots` trajectories; the ratio is taken of the trajectory sums and its
/// standard error comes from the delta method.
pub fn evolve_dynamics(h: &HamiltonianSpec, cfg: &DynamicsConfig) -> Result<Trace> {
    cfg.validate()?;
    let spins = if require_hubbard(h)? { 2 } else { 1 };
    let step = trotter_step_circuit(h, cfg.dt())?;
    let circuits = vec![&step; cfg.steps];
    let initial = cdw_state(h)?;
    let runs = run_trajectories(&initial, &circuits, cfg, |psi| {
        let (o, u) = sublattice_counts(psi, &h.lattice, spins);
        vec![o - u, o + u]
    })?;
    let n = runs.len() as f64;
    let points = (0..=cfg.steps)
        .map(|j| {
            let a: Vec<f64> = runs.iter().map(|r| r[j][0]).collect();
            let b: Vec<f64> = runs.iter().map(|r| r[j][1]).collect();
            let (sa, sb) = (pairwise_sum(&a), pairwise_sum(&b));
            let ratio = sa / sb;
            let stderr = if runs.len() > 1 {
                let resid: Vec<f64> = a.iter().zip(&b).map(|(x, y)| (x - ratio * y).powi(2)).collect();
                (pairwise_sum(&resid) / (n * (n - 1.0))).sqrt() / (sb / n)
            } else {
                0.0
            };
            TracePoint { steps: j, observable: ratio, stderr }
        })
        .collect();
    Ok(Trace { observable: "imbalance".into(), p: cfg.noise.p, shots: runs.len(), seed: cfg.seed, points })
}

/// Exact site occupations `⟨n_i(T)⟩ = Σ_{j occupied} |U_ij|²` with
/// `U = exp(−i h T)` and single-particle hopping matrix `h = −t·A`.
pub fn free_fermion_oracle(lattice: &Lattice, t: f64, occupied: &[bool], time: f64) -> Result<Vec<f64>> {
    let n = lattice.n_sites;
    if occupied.len() != n {
        return Err(HamiltonianError::DimensionMismatch { state: occupied.len(), hamiltonian: n });
    }
    let eig = SymmetricEigen::new(lattice.adjacency_matrix() * -t);
    let q = eig.eigenvectors.map(|x| Complex64::new(x, 0.0));
    let phases = DMatrix::from_diagonal(&eig.eigenvalues.map(|e| Complex64::from_polar(1.0, -e * time)));
    let u = &q * phases * q.transpose();
    Ok((0..n).map(|i| (0..n).filter(|&j| occupied[j]).map(|j| u[(i, j)].norm_sqr()).sum()).collect())
}
