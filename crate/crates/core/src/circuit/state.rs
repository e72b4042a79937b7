use num_complex::Complex64;
use rand::Rng;
use rand_distr::StandardNormal;
use serde::{Deserialize, Serialize};

use super::{Circuit, CircuitError, GateKind, Params, Result, MAX_QUBITS};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum Pauli {
    I,
    X,
    Y,
    Z,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Statevector {
    n_qubits: usize,
    amps: Vec<Complex64>,
}

impl Statevector {
    /// `|0…0⟩`.
    pub fn zero(n_qubits: usize) -> Result<Self> {
        Self::basis(n_qubits, 0)
    }

    pub fn basis(n_qubits: usize, index: usize) -> Result<Self> {
        if n_qubits == 0 || n_qubits > MAX_QUBITS {
            return Err(CircuitError::QubitCount(n_qubits));
        }
        if index >= 1 << n_qubits {
            return Err(CircuitError::InvalidArgument(format!("basis index {index} out of range")));
        }
        let mut amps = vec![Complex64::new(0.0, 0.0); 1 << n_qubits];
        amps[index] = Complex64::new(1.0, 0.0);
        Ok(Self { n_qubits, amps })
    }

    /// Wrap amplitudes whose norm is 1 within 1e-10.
    pub fn from_amplitudes(amps: Vec<Complex64>) -> Result<Self> {
        let n = amps.len().trailing_zeros() as usize;
        if amps.len() != 1 << n || n == 0 || n > MAX_QUBITS {
            return Err(CircuitError::InvalidArgument(format!("{} amplitudes is not 2^n for n in 1..=24", amps.len())));
        }
        let s = Self { n_qubits: n, amps };
        let norm = s.norm();
        if (norm - 1.0).abs() > 1e-10 {
            return Err(CircuitError::NotNormalized(norm));
        }
        Ok(s)
    }

    /// Normalize arbitrary non-zero amplitudes.
    pub fn normalized(mut amps: Vec<Complex64>) -> Result<Self> {
        let norm = amps.iter().map(|a| a.norm_sqr()).sum::<f64>().sqrt();
        if norm == 0.0 || !norm.is_finite() {
            return Err(CircuitError::NotNormalized(norm));
        }
        for a in &mut amps {
            *a /= norm;
        }
        Self::from_amplitudes(amps)
    }

    pub fn n_qubits(&self) -> usize {
        self.n_qubits
    }

    pub fn amplitudes(&self) -> &[Complex64] {
        &self.amps
    }

    pub fn norm(&self) -> f64 {
        self.amps.iter().map(|a| a.norm_sqr()).sum::<f64>().sqrt()
    }

    pub fn probabilities(&self) -> Vec<f64> {
        self.amps.iter().map(|a| a.norm_sqr()).collect()
    }

    pub fn inner(&self, other: &Statevector) -> Result<Complex64> {
        if self.n_qubits != other.n_qubits {
            return Err(CircuitError::DimensionMismatch(self.n_qubits, other.n_qubits));
        }
        Ok(self.amps.iter().zip(&other.amps).map(|(a, b)| a.conj() * b).sum())
    }

    /// `⟨Z_q⟩`.
    pub fn expect_z(&self, q: usize) -> f64 {
        self.amps.iter().enumerate().map(|(i, a)| if i >> q & 1 == 0 { a.norm_sqr() } else { -a.norm_sqr() }).sum()
    }

    fn check(&self, q: usize) -> Result<()> {
        if q >= self.n_qubits {
            return Err(CircuitError::TargetOutOfRange { target: q, n: self.n_qubits });
        }
        Ok(())
    }

    fn apply_1q(&mut self, q: usize, m: [[Complex64; 2]; 2]) {
        let bit = 1 << q;
        for i in 0..self.amps.len() {
            if i & bit == 0 {
                let (a0, a1) = (self.amps[i], self.amps[i | bit]);
                self.amps[i] = m[0][0] * a0 + m[0][1] * a1;
                self.amps[i | bit] = m[1][0] * a0 + m[1][1] * a1;
            }
        }
    }

    /// Apply one gate. `angle` is ignored for non-parametric kinds.
    pub fn apply(&mut self, kind: GateKind, targets: &[usize], angle: f64) -> Result<()> {
        if targets.len() != kind.arity() {
            return Err(CircuitError::Arity {
                kind,
                expected: kind.arity(),
                param: if kind.is_parametric() { "one" } else { "no" },
            });
        }
        for &t in targets {
            self.check(t)?;
        }
        if kind.arity() == 2 && targets[0] == targets[1] {
            return Err(CircuitError::DuplicateTargets(targets[0]));
        }
        let c = |re: f64, im: f64| Complex64::new(re, im);
        let (co, si) = ((angle / 2.0).cos(), (angle / 2.0).sin());
        match kind {
            GateKind::H => {
                let h = std::f64::consts::FRAC_1_SQRT_2;
                self.apply_1q(targets[0], [[c(h, 0.0), c(h, 0.0)], [c(h, 0.0), c(-h, 0.0)]]);
            }
            GateKind::X => self.apply_pauli(targets[0], Pauli::X)?,
            GateKind::RX => self.apply_1q(targets[0], [[c(co, 0.0), c(0.0, -si)], [c(0.0, -si), c(co, 0.0)]]),
            GateKind::RY => self.apply_1q(targets[0], [[c(co, 0.0), c(-si, 0.0)], [c(si, 0.0), c(co, 0.0)]]),
            GateKind::RZ => {
                let bit = 1 << targets[0];
                let (p0, p1) = (c(co, -si), c(co, si));
                for (i, a) in self.amps.iter_mut().enumerate() {
                    *a *= if i & bit == 0 { p0 } else { p1 };
                }
            }
            GateKind::CNOT => {
                let (cb, tb) = (1 << targets[0], 1 << targets[1]);
                for i in 0..self.amps.len() {
                    if i & cb != 0 && i & tb == 0 {
                        self.amps.swap(i, i | tb);
                    }
                }
            }
            GateKind::CZ => {
                let mask = (1 << targets[0]) | (1 << targets[1]);
                for (i, a) in self.amps.iter_mut().enumerate() {
                    if i & mask == mask {
                        *a = -*a;
                    }
                }
            }
            GateKind::RZZ => {
                let (a, b) = (targets[0], targets[1]);
                let (even, odd) = (c(co, -si), c(co, si));
                for (i, amp) in self.amps.iter_mut().enumerate() {
                    *amp *= if (i >> a ^ i >> b) & 1 == 0 { even } else { odd };
                }
            }
        }
        Ok(())
    }

    pub fn apply_pauli(&mut self, q: usize, p: Pauli) -> Result<()> {
        self.check(q)?;
        let bit = 1 << q;
        match p {
            Pauli::I => {}
            Pauli::X => {
                for i in 0..self.amps.len() {
                    if i & bit == 0 {
                        self.amps.swap(i, i | bit);
                    }
                }
            }
            Pauli::Z => {
                for (i, a) in self.amps.iter_mut().enumerate() {
                    if i & bit != 0 {
                        *a = -*a;
                    }
                }
            }
            Pauli::Y => {
                let im = Complex64::new(0.0, 1.0);
                for i in 0..self.amps.len() {
                    if i & bit == 0 {
                        let (a0, a1) = (self.amps[i], self.amps[i | bit]);
                        self.amps[i] = -im * a1;
                        self.amps[i | bit] = im * a0;
                    }
                }
            }
        }
        Ok(())
    }

    /// Apply every gate of `c` in order.
    pub fn run(&mut self, c: &Circuit, params: &Params) -> Result<()> {
        if c.n_qubits() != self.n_qubits {
            return Err(CircuitError::DimensionMismatch(self.n_qubits, c.n_qubits()));
        }
        for g in c.gates() {
            let angle = match &g.param {
                Some(p) => p.resolve(params)?,
                None => 0.0,
            };
            self.apply(g.kind, &g.targets, angle)?;
        }
        Ok(())
    }
}

/// Run `c` on `|0…0⟩`.
pub fn simulate(c: &Circuit, params: &Params) -> Result<Statevector> {
    let mut s = Statevector::zero(c.n_qubits())?;
    s.run(c, params)?;
    Ok(s)
}

/// `|⟨a|b⟩|²`.
pub fn fidelity(a: &Statevector, b: &Statevector) -> Result<f64> {
    Ok(a.inner(b)?.norm_sqr().min(1.0))
}

/// Haar-random state from normalized i.i.d. complex Gaussians.
pub fn haar_state<R: Rng + ?Sized>(n_qubits: usize, rng: &mut R) -> Result<Statevector> {
    if n_qubits == 0 || n_qubits > MAX_QUBITS {
        return Err(CircuitError::QubitCount(n_qubits));
    }
    let amps: Vec<Complex64> =
        (0..1usize << n_qubits).map(|_| Complex64::new(rng.sample(StandardNormal), rng.sample(StandardNormal))).collect();
    Statevector::normalized(amps)
}
