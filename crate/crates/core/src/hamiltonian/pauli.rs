use std::fmt;
use std::str::FromStr;

use num_complex::Complex64;
use serde::{Deserialize, Deserializer, Serialize, Serializer};

use crate::circuit::Pauli;

/// Tensor product of single-qubit Paulis stored as bit masks: qubit `q`
/// carries X if bit `q` of `x` is set, Z if bit `q` of `z` is set, Y if both.
/// Acting on a basis state: `P|b⟩ = i^{#Y} (−1)^{|b ∧ z|} |b ⊕ x⟩`.
#[derive(Debug, Clone, Copy, Default, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct PauliString {
    pub x: u64,
    pub z: u64,
}

impl PauliString {
    pub fn identity() -> Self {
        Self::default()
    }

    pub fn from_ops(ops: &[(usize, Pauli)]) -> Self {
        let mut s = Self::identity();
        for &(q, p) in ops {
            s = s.with(q, p);
        }
        s
    }

    pub fn with(mut self, q: usize, p: Pauli) -> Self {
        let bit = 1u64 << q;
        self.x &= !bit;
        self.z &= !bit;
        match p {
            Pauli::I => {}
            Pauli::X => self.x |= bit,
            Pauli::Z => self.z |= bit,
            Pauli::Y => {
                self.x |= bit;
                self.z |= bit;
            }
        }
        self
    }

    pub fn get(&self, q: usize) -> Pauli {
        match (self.x >> q & 1, self.z >> q & 1) {
            (0, 0) => Pauli::I,
            (1, 0) => Pauli::X,
            (0, 1) => Pauli::Z,
            _ => Pauli::Y,
        }
    }

    pub fn support(&self) -> Vec<usize> {
        let m = self.x | self.z;
        (0..64).filter(|q| m >> q & 1 == 1).collect()
    }

    pub fn weight(&self) -> usize {
        (self.x | self.z).count_ones() as usize
    }

    pub fn max_qubit(&self) -> Option<usize> {
        let m = self.x | self.z;
        (m != 0).then(|| 63 - m.leading_zeros() as usize)
    }

    pub fn is_diagonal(&self) -> bool {
        self.x == 0
    }

    /// `i^{#Y}`.
    pub fn y_phase(&self) -> Complex64 {
        match (self.x & self.z).count_ones() % 4 {
            0 => Complex64::new(1.0, 0.0),
            1 => Complex64::new(0.0, 1.0),
            2 => Complex64::new(-1.0, 0.0),
            _ => Complex64::new(0.0, -1.0),
        }
    }

    /// Image of basis state `b`: `(b ⊕ x, phase)`.
    #[inline]
    pub fn act(&self, b: usize, y_phase: Complex64) -> (usize, Complex64) {
        let sign = if ((b as u64) & self.z).count_ones() % 2 == 0 { 1.0 } else { -1.0 };
        (b ^ self.x as usize, y_phase * sign)
    }

    pub fn commutes_with(&self, other: &PauliString) -> bool {
        ((self.x & other.z).count_ones() + (self.z & other.x).count_ones()) % 2 == 0
    }
}

/// Sparse label such as `X0 Z1 X2`; the identity is `I`.
impl fmt::Display for PauliString {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let support = self.support();
        if support.is_empty() {
            return f.write_str("I");
        }
        let parts: Vec<String> = support.iter().map(|&q| format!("{:?}{q}", self.get(q))).collect();
        f.write_str(&parts.join(" "))
    }
}

impl FromStr for PauliString {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, String> {
        let s = s.trim();
        if s == "I" {
            return Ok(Self::identity());
        }
        let mut out = Self::identity();
        for tok in s.split_whitespace() {
            let (p, q) = tok.split_at(1);
            let q: usize = q.parse().map_err(|_| format!("bad qubit in `{tok}`"))?;
            if q >= 64 {
                return Err(format!("qubit {q} out of range"));
            }
            let p = match p {
                "X" => Pauli::X,
                "Y" => Pauli::Y,
                "Z" => Pauli::Z,
                _ => return Err(format!("bad Pauli in `{tok}`")),
            };
            if out.get(q) != Pauli::I {
                return Err(format!("qubit {q} repeated"));
            }
            out = out.with(q, p);
        }
        Ok(out)
    }
}

impl Serialize for PauliString {
    fn serialize<S: Serializer>(&self, s: S) -> Result<S::Ok, S::Error> {
        s.collect_str(self)
    }
}

impl<'de> Deserialize<'de> for PauliString {
    fn deserialize<D: Deserializer<'de>>(d: D) -> Result<Self, D::Error> {
        String::deserialize(d)?.parse().map_err(serde::de::Error::custom)
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct PauliTerm {
    pub coeff: f64,
    pub pauli: PauliString,
}

/// `out += Σ coeff·P·ψ`.
pub fn apply_terms(terms: &[PauliTerm], psi: &[Complex64], out: &mut [Complex64]) {
    for t in terms {
        let ph = t.pauli.y_phase() * t.coeff;
        for (b, a) in psi.iter().enumerate() {
            let (to, phase) = t.pauli.act(b, ph);
            out[to] += phase * a;
        }
    }
}

/// `⟨ψ|Σ coeff·P|ψ⟩`, without the imaginary residue check.
pub fn expectation_complex(terms: &[PauliTerm], psi: &[Complex64]) -> Complex64 {
    let mut total = Complex64::new(0.0, 0.0);
    for t in terms {
        let ph = t.pauli.y_phase();
        let mut acc = Complex64::new(0.0, 0.0);
        for (b, a) in psi.iter().enumerate() {
            let (to, phase) = t.pauli.act(b, ph);
            acc += psi[to].conj() * phase * a;
        }
        total += acc * t.coeff;
    }
    total
}
