use nalgebra::{DMatrix, SymmetricEigen};
use num_complex::Complex64;
use rand_distr::{Distribution, StandardNormal};

use super::{apply_terms, HamiltonianError, HamiltonianSpec, Result};
use crate::circuit::Statevector;
use crate::rng::rng_from_seed;

const DENSE_LIMIT: usize = 12;
const SECTOR_LIMIT: usize = 4000;

/// Full `2^n × 2^n` matrix, for `n ≤ 12`.
pub fn dense_matrix(h: &HamiltonianSpec) -> Result<DMatrix<Complex64>> {
    if h.n_qubits > DENSE_LIMIT {
        return Err(HamiltonianError::TooManyQubits(h.n_qubits));
    }
    let dim = 1 << h.n_qubits;
    let mut m = DMatrix::zeros(dim, dim);
    for t in &h.terms {
        let ph = t.pauli.y_phase() * t.coeff;
        for b in 0..dim {
            let (to, phase) = t.pauli.act(b, ph);
            m[(to, b)] += phase;
        }
    }
    Ok(m)
}

/// Real symmetric block on the basis states with `popcount` ones. Every
/// term must conserve the number of ones once summed, and the block must be
/// real; both are checked.
pub fn sector_matrix(h: &HamiltonianSpec, popcount: usize) -> Result<(Vec<usize>, DMatrix<f64>)> {
    let basis: Vec<usize> = (0..1usize << h.n_qubits).filter(|b| b.count_ones() as usize == popcount).collect();
    if basis.len() > SECTOR_LIMIT {
        return Err(HamiltonianError::TooManyQubits(h.n_qubits));
    }
    let index: std::collections::HashMap<usize, usize> = basis.iter().enumerate().map(|(i, &b)| (b, i)).collect();
    let mut m = DMatrix::<Complex64>::zeros(basis.len(), basis.len());
    let mut leak = std::collections::HashMap::<(usize, usize), Complex64>::new();
    for t in &h.terms {
        let ph = t.pauli.y_phase() * t.coeff;
        for (col, &b) in basis.iter().enumerate() {
            let (to, phase) = t.pauli.act(b, ph);
            match index.get(&to) {
                Some(&row) => m[(row, col)] += phase,
                None => *leak.entry((to, col)).or_default() += phase,
            }
        }
    }
    let tol = 1e-12 * (1.0 + h.norm_bound());
    if let Some(v) = leak.values().find(|v| v.norm() > tol) {
        return Err(HamiltonianError::InvalidParameter(format!("Hamiltonian does not conserve the sector ({v})")));
    }
    if let Some(v) = m.iter().find(|v| v.im.abs() > tol) {
        return Err(HamiltonianError::NonHermitian(v.im));
    }
    Ok((basis, m.map(|v| v.re)))
}

/// Lowest eigenvalue by dense diagonalization of every particle-number
/// sector.
pub fn ground_energy_dense(h: &HamiltonianSpec) -> Result<f64> {
    let mut best = f64::INFINITY;
    for k in 0..=h.n_qubits {
        let (_, m) = sector_matrix(h, k)?;
        let e = SymmetricEigen::new(m).eigenvalues.min();
        best = best.min(e);
    }
    Ok(best)
}

fn apply(h: &HamiltonianSpec, v: &[Complex64]) -> Vec<Complex64> {
    let mut out = vec![Complex64::new(0.0, 0.0); v.len()];
    apply_terms(&h.terms, v, &mut out);
    out
}

fn dot(a: &[Complex64], b: &[Complex64]) -> Complex64 {
    a.iter().zip(b).map(|(x, y)| x.conj() * y).sum()
}

fn norm(a: &[Complex64]) -> f64 {
    a.iter().map(|x| x.norm_sqr()).sum::<f64>().sqrt()
}

/// Lanczos with full reorthogonalization. Returns `(alpha, beta, basis)`
/// for at most `m` steps starting from the normalized `start`.
fn lanczos(
    h: &HamiltonianSpec,
    start: Vec<Complex64>,
    m: usize,
    mut stop: impl FnMut(&[f64], &[f64]) -> bool,
) -> (Vec<f64>, Vec<f64>, Vec<Vec<Complex64>>) {
    let scale = 1.0 + h.norm_bound();
    let mut basis = vec![start];
    let (mut alpha, mut beta) = (Vec::new(), Vec::new());
    for j in 0..m {
        let mut w = apply(h, &basis[j]);
        let a = dot(&basis[j], &w).re;
        alpha.push(a);
        for _ in 0..2 {
            for v in &basis {
                let c = dot(v, &w);
                for (x, y) in w.iter_mut().zip(v) {
                    *x -= c * y;
                }
            }
        }
        if stop(&alpha, &beta) || j + 1 == m {
            break;
        }
        let b = norm(&w);
        if b < 1e-13 * scale {
            break;
        }
        beta.push(b);
        for x in &mut w {
            *x /= b;
        }
        basis.push(w);
    }
    basis.truncate(alpha.len());
    (alpha, beta, basis)
}

fn tridiagonal(alpha: &[f64], beta: &[f64]) -> DMatrix<f64> {
    let k = alpha.len();
    let mut t = DMatrix::zeros(k, k);
    for i in 0..k {
        t[(i, i)] = alpha[i];
        if i + 1 < k {
            t[(i, i + 1)] = beta[i];
            t[(i + 1, i)] = beta[i];
        }
    }
    t
}

/// Lowest eigenvalue by Lanczos from a seeded random start vector. Stops
/// when the estimate changes by less than `tol` over 5 iterations.
pub fn ground_energy_lanczos(h: &HamiltonianSpec, max_iter: usize, tol: f64, seed: u64) -> Result<f64> {
    if h.n_qubits > crate::circuit::MAX_QUBITS {
        return Err(HamiltonianError::TooManyQubits(h.n_qubits));
    }
    let mut rng = rng_from_seed(seed);
    let dim = 1usize << h.n_qubits;
    let mut v: Vec<Complex64> =
        (0..dim).map(|_| Complex64::new(StandardNormal.sample(&mut rng), StandardNormal.sample(&mut rng))).collect();
    let n0 = norm(&v);
    for x in &mut v {
        *x /= n0;
    }
    let mut history: Vec<f64> = Vec::new();
    let (alpha, beta, _) = lanczos(h, v, max_iter.max(2), |a, b| {
        if a.len() < 2 || a.len() % 5 != 0 {
            return false;
        }
        let e = SymmetricEigen::new(tridiagonal(a, &b[..a.len() - 1])).eigenvalues.min();
        let done = history.last().is_some_and(|&prev| (prev - e).abs() < tol);
        history.push(e);
        done
    });
    let k = alpha.len();
    Ok(SymmetricEigen::new(tridiagonal(&alpha, &beta[..k - 1])).eigenvalues.min())
}

/// `exp(−iHt)|ψ⟩` by Krylov substeps with `‖H‖·dt ≤ 4` and up to 40
/// Lanczos vectors each.
pub fn evolve_exact(h: &HamiltonianSpec, state: &Statevector, t: f64) -> Result<Statevector> {
    if state.n_qubits() != h.n_qubits {
        return Err(HamiltonianError::DimensionMismatch { state: state.n_qubits(), hamiltonian: h.n_qubits });
    }
    let bound = h.norm_bound();
    let mut v = state.amplitudes().to_vec();
    if bound == 0.0 || t == 0.0 {
        return Ok(state.clone());
    }
    let substeps = (bound * t.abs() / 4.0).ceil().max(1.0) as usize;
    let dt = t / substeps as f64;
    for _ in 0..substeps {
        let nv = norm(&v);
        let start: Vec<Complex64> = v.iter().map(|x| x / nv).collect();
        let (alpha, beta, basis) = lanczos(h, start, 40, |_, _| false);
        let k = alpha.len();
        let eig = SymmetricEigen::new(tridiagonal(&alpha, &beta[..k - 1]));
        // y = Q exp(−iΛdt) Qᵀ e₁
        let y: Vec<Complex64> = (0..k)
            .map(|i| {
                (0..k)
                    .map(|l| {
                        let q = eig.eigenvectors[(i, l)] * eig.eigenvectors[(0, l)];
                        Complex64::from_polar(q, -eig.eigenvalues[l] * dt)
                    })
                    .sum::<Complex64>()
            })
            .collect();
        let mut next = vec![Complex64::new(0.0, 0.0); v.len()];
        for (b, c) in basis.iter().zip(&y) {
            let c = c * nv;
            for (x, bv) in next.iter_mut().zip(b) {
                *x += c * bv;
            }
        }
        v = next;
    }
    Ok(Statevector::normalized(v)?)
}
