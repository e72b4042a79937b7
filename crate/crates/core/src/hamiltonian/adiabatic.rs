use std::f64::consts::FRAC_1_SQRT_2;

use num_complex::Complex64;

use super::dynamics::{pairwise_sum, run_trajectories, DynamicsConfig, Trace, TracePoint};
use super::trotter::terms_circuit;
use super::{energy_expectation, HamiltonianError, HamiltonianSpec, PauliTerm, Result};
use crate::circuit::Statevector;

pub type AdiabaticConfig = DynamicsConfig;

/// Product of two-qubit singlets `(|01⟩ − |10⟩)/√2` on the given pairs, with
/// the first qubit of each pair carrying the `+` sign on `|a=0, b=1⟩`.
pub fn dimer_singlet_state(n_qubits: usize, pairs: &[(usize, usize)]) -> Result<Statevector> {
    let mut seen = 0u64;
    for &(a, b) in pairs {
        if a == b || a.max(b) >= n_qubits || (seen >> a & 1) == 1 || (seen >> b & 1) == 1 {
            return Err(HamiltonianError::InvalidParameter(format!("bad dimer ({a}, {b})")));
        }
        seen |= 1 << a | 1 << b;
    }
    let mut amps = vec![Complex64::new(0.0, 0.0); 1 << n_qubits];
    let norm = FRAC_1_SQRT_2.powi(pairs.len() as i32);
    for choice in 0..1usize << pairs.len() {
        let mut idx = 0usize;
        let mut sign = 1.0;
        for (k, &(a, b)) in pairs.iter().enumerate() {
            if choice >> k & 1 == 0 {
                idx |= 1 << b;
            } else {
                idx |= 1 << a;
                sign = -sign;
            }
        }
        amps[idx] = Complex64::new(sign * norm, 0.0);
    }
    Ok(Statevector::from_amplitudes(amps)?)
}

/// Linear interpolation from the intra-dimer part of `h_final` to `h_final`.
///
/// The dimers come from the lattice's perfect matching and the walk starts
/// in their singlet product. Step `j` applies one first-order Trotter step of
/// `H(s_j) = (1−s_j)·H_init + s_j·h_final` with `s_j = j/steps` for
/// `total_time/steps`. The trace holds `⟨h_final⟩/n_sites` after each step,
/// averaged over trajectories when noisy.
pub fn adiabatic_prepare(h_final: &HamiltonianSpec, cfg: &AdiabaticConfig) -> Result<Trace> {
    cfg.validate()?;
    if h_final.n_qubits != h_final.lattice.n_sites {
        return Err(HamiltonianError::InvalidParameter("adiabatic preparation needs one qubit per site".into()));
    }
    let dimers = h_final.lattice.perfect_matching().ok_or(HamiltonianError::NoPerfectMatching)?;
    let in_dimer = |t: &PauliTerm| {
        let m = t.pauli.x | t.pauli.z;
        dimers.iter().any(|&(a, b)| m & !(1u64 << a | 1u64 << b) == 0)
    };
    let mask: Vec<bool> = h_final.terms.iter().map(in_dimer).collect();
    let dt = cfg.dt();
    let circuits = (1..=cfg.steps)
        .map(|j| {
            let s = j as f64 / cfg.steps as f64;
            let terms: Vec<PauliTerm> = h_final
                .terms
                .iter()
                .zip(&mask)
                .map(|(t, &d)| PauliTerm { coeff: t.coeff * (s + if d { 1.0 - s } else { 0.0 }), pauli: t.pauli })
                .filter(|t| t.coeff != 0.0)
                .collect();
            terms_circuit(h_final.n_qubits, &terms, dt)
        })
        .collect::<Result<Vec<_>>>()?;
    let refs: Vec<_> = circuits.iter().collect();
    let initial = dimer_singlet_state(h_final.n_qubits, &dimers)?;
    let sites = h_final.lattice.n_sites as f64;
    let err = std::sync::Mutex::new(None);
    let runs = run_trajectories(&initial, &refs, cfg, |psi| match energy_expectation(psi, h_final) {
        Ok(e) => vec![e / sites],
        Err(e) => {
            *err.lock().expect("poisoned") = Some(e);
            vec![f64::NAN]
        }
    })?;
    if let Some(e) = err.into_inner().expect("poisoned") {
        return Err(e);
    }
    let n = runs.len() as f64;
    let points = (0..=cfg.steps)
        .map(|j| {
            let xs: Vec<f64> = runs.iter().map(|r| r[j][0]).collect();
            let mean = pairwise_sum(&xs) / n;
            let stderr = if runs.len() > 1 {
                let dev: Vec<f64> = xs.iter().map(|x| (x - mean).powi(2)).collect();
                (pairwise_sum(&dev) / (n * (n - 1.0))).sqrt()
            } else {
                0.0
            };
            TracePoint { steps: j, observable: mean, stderr }
        })
        .collect();
    Ok(Trace { observable: "energy_density".into(), p: cfg.noise.p, shots: runs.len(), seed: cfg.seed, points })
}
