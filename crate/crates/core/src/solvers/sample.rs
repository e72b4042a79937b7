use serde::{Deserialize, Deserializer, Serialize, Serializer};

/// Hex encoding of a bitstring read as an integer with variable 0 as the
/// least significant bit; most significant nibble first, `ceil(n/4)` digits.
pub fn bits_to_hex(bits: &[bool]) -> String {
    let digits = bits.len().div_ceil(4);
    (0..digits)
        .rev()
        .map(|d| {
            let nibble = (0..4)
                .filter(|k| bits.get(4 * d + k).copied().unwrap_or(false))
                .fold(0u32, |acc, k| acc | (1 << k));
            char::from_digit(nibble, 16).expect("nibble < 16")
        })
        .collect()
}

pub fn bits_from_hex(hex: &str, n: usize) -> Option<Vec<bool>> {
    if hex.len() != n.div_ceil(4) {
        return None;
    }
    let mut bits = vec![false; n];
    for (d, c) in hex.chars().rev().enumerate() {
        let nibble = c.to_digit(16)?;
        for k in 0..4 {
            let set = (nibble >> k) & 1 == 1;
            match bits.get_mut(4 * d + k) {
                Some(b) => *b = set,
                None if set => return None,
                None => {}
            }
        }
    }
    Some(bits)
}

#[derive(Debug, Clone, PartialEq)]
pub struct Sample {
    pub bits: Vec<bool>,
    pub energy: f64,
    pub count: usize,
}

#[derive(Serialize, Deserialize)]
struct SampleRepr {
    n: usize,
    bits: String,
    energy: f64,
    count: usize,
}

impl Serialize for Sample {
    fn serialize<S: Serializer>(&self, s: S) -> Result<S::Ok, S::Error> {
        SampleRepr { n: self.bits.len(), bits: bits_to_hex(&self.bits), energy: self.energy, count: self.count }
            .serialize(s)
    }
}

impl<'de> Deserialize<'de> for Sample {
    fn deserialize<D: Deserializer<'de>>(d: D) -> Result<Self, D::Error> {
        let r = SampleRepr::deserialize(d)?;
        let bits = bits_from_hex(&r.bits, r.n).ok_or_else(|| serde::de::Error::custom("bad hex bitstring"))?;
        Ok(Sample { bits, energy: r.energy, count: r.count })
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SampleSet {
    pub solver: String,
    pub seed: u64,
    pub runtime_s: f64,
    /// Mean energy over every drawn sample (with multiplicity).
    pub mean_energy: Option<f64>,
    /// Set when a deadline cut the run short.
    #[serde(default)]
    pub timed_out: bool,
    pub samples: Vec<Sample>,
}

impl SampleSet {
    pub fn new(solver: impl Into<String>, seed: u64) -> Self {
        Self { solver: solver.into(), seed, runtime_s: 0.0, mean_energy: None, timed_out: false, samples: Vec::new() }
    }

    pub fn push(&mut self, bits: Vec<bool>, energy: f64) {
        self.samples.push(Sample { bits, energy, count: 1 });
    }

    /// Merge duplicate bitstrings and sort by `(energy, bitstring)`.
    pub fn finalize(&mut self) {
        let total: usize = self.samples.iter().map(|s| s.count).sum();
        if total > 0 {
            let sum: f64 = self.samples.iter().map(|s| s.energy * s.count as f64).sum();
            self.mean_energy = Some(sum / total as f64);
        }
        self.samples.sort_by(|a, b| a.bits.cmp(&b.bits));
        let mut merged: Vec<Sample> = Vec::with_capacity(self.samples.len());
        for s in self.samples.drain(..) {
            match merged.last_mut() {
                Some(last) if last.bits == s.bits => last.count += s.count,
                _ => merged.push(s),
            }
        }
        merged.sort_by(|a, b| a.energy.total_cmp(&b.energy).then_with(|| a.bits.cmp(&b.bits)));
        self.samples = merged;
    }

    pub fn best(&self) -> Option<&Sample> {
        self.samples.iter().min_by(|a, b| a.energy.total_cmp(&b.energy).then_with(|| a.bits.cmp(&b.bits)))
    }

    pub fn total_count(&self) -> usize {
        self.samples.iter().map(|s| s.count).sum()
    }

    /// Keep only the lowest-energy sample.
    pub fn truncate_to_best(&mut self) {
        if let Some(best) = self.best().cloned() {
            self.samples = vec![best];
        }
    }
}
