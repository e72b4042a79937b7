use std::f64::consts::FRAC_PI_2;

use rand::Rng as _;
use serde::{Deserialize, Serialize};

use super::{HamiltonianError, HamiltonianSpec, PauliString, PauliTerm, Result};
use crate::circuit::{Circuit, Params, Pauli, Statevector};
use crate::rng::Rng;

/// Two-qubit depolarizing noise: after every two-qubit gate, with
/// probability `p` one of the 15 non-identity two-qubit Paulis is applied
/// uniformly at random.
#[derive(Debug, Clone, Copy, Default, PartialEq, Serialize, Deserialize)]
pub struct NoiseModel {
    pub p: f64,
}

impl NoiseModel {
    pub fn new(p: f64) -> Result<Self> {
        if !(0.0..=1.0).contains(&p) {
            return Err(HamiltonianError::InvalidParameter(format!("error rate {p} outside [0, 1]")));
        }
        Ok(Self { p })
    }

    pub fn noiseless() -> Self {
        Self { p: 0.0 }
    }

    pub fn is_noiseless(&self) -> bool {
        self.p == 0.0
    }
}

/// Append `exp(−iθP)`: rotate each X/Y factor to Z, entangle the support
/// with a CNOT ladder (or a single RZZ for weight 2), rotate, and undo.
pub fn pauli_rotation(c: &mut Circuit, p: PauliString, theta: f64) {
    let support = p.support();
    if support.is_empty() {
        return;
    }
    for &q in &support {
        match p.get(q) {
            Pauli::X => {
                c.h(q);
            }
            Pauli::Y => {
                c.rx(q, FRAC_PI_2);
            }
            _ => {}
        }
    }
    match support.len() {
        1 => {
            c.rz(support[0], 2.0 * theta);
        }
        2 => {
            c.rzz(support[0], support[1], 2.0 * theta);
        }
        _ => {
            for w in support.windows(2) {
                c.cnot(w[0], w[1]);
            }
            c.rz(*support.last().expect("non-empty"), 2.0 * theta);
            for w in support.windows(2).rev() {
                c.cnot(w[0], w[1]);
            }
        }
    }
    for &q in &support {
        match p.get(q) {
            Pauli::X => {
                c.h(q);
            }
            Pauli::Y => {
                c.rx(q, -FRAC_PI_2);
            }
            _ => {}
        }
    }
}

pub(crate) fn terms_circuit(n_qubits: usize, terms: &[PauliTerm], dt: f64) -> Result<Circuit> {
    if !dt.is_finite() {
        return Err(HamiltonianError::InvalidParameter("dt must be finite".into()));
    }
    let mut c = Circuit::new(n_qubits)?;
    for t in terms {
        pauli_rotation(&mut c, t.pauli, t.coeff * dt);
    }
    Ok(c)
}

/// One first-order Trotter step `Π_k exp(−i c_k dt P_k)` in term order.
pub fn trotter_step_circuit(h: &HamiltonianSpec, dt: f64) -> Result<Circuit> {
    terms_circuit(h.n_qubits, &h.terms, dt)
}

/// Run a circuit with literal angles under `noise`. Returns the number of
/// injected errors. With `p = 0` no random numbers are drawn; otherwise every
/// two-qubit gate consumes one uniform and one Pauli index whether or not an
/// error fires, so two error rates run on the same seed see nested error
/// sets.
pub fn run_noisy(state: &mut Statevector, c: &Circuit, noise: &NoiseModel, rng: &mut Rng) -> Result<usize> {
    let empty = Params::new();
    let mut errors = 0;
    const PAULIS: [Pauli; 4] = [Pauli::I, Pauli::X, Pauli::Y, Pauli::Z];
    for g in c.gates() {
        let angle = match &g.param {
            Some(p) => p.resolve(&empty)?,
            None => 0.0,
        };
        state.apply(g.kind, &g.targets, angle)?;
        if g.kind.arity() == 2 && noise.p > 0.0 {
            let u = rng.random::<f64>();
            let k = rng.random_range(1..16);
            if u < noise.p {
                state.apply_pauli(g.targets[0], PAULIS[k / 4])?;
                state.apply_pauli(g.targets[1], PAULIS[k % 4])?;
                errors += 1;
            }
        }
    }
    Ok(errors)
}
