use rand::Rng as _;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use super::{fidelity, haar_state, simulate, Circuit, CircuitError, Params, Result, Statevector};
use crate::rng::{derive_seed, rng_from_seed};

/// Density of the fidelity between two Haar-random states on `n` qubits:
/// `(d−1)(1−F)^{d−2}` with `d = 2^n`.
pub fn haar_fidelity_pdf(f: f64, n_qubits: usize) -> f64 {
    let d = (1u64 << n_qubits) as f64;
    (d - 1.0) * (1.0 - f).powf(d - 2.0)
}

/// Exact Haar probability mass of each of `bins` equal bins on `[0, 1]`.
pub fn haar_bin_probabilities(n_qubits: usize, bins: usize) -> Vec<f64> {
    let d = (1u64 << n_qubits) as f64;
    let tail = |x: f64| (1.0 - x).powf(d - 1.0);
    (0..bins).map(|k| tail(k as f64 / bins as f64) - tail((k + 1) as f64 / bins as f64)).collect()
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct FidelityHistogram {
    pub bins: usize,
    pub counts: Vec<u64>,
    pub n_samples: u64,
}

impl FidelityHistogram {
    pub fn new(bins: usize) -> Result<Self> {
        if bins == 0 {
            return Err(CircuitError::InvalidArgument("histogram needs at least one bin".into()));
        }
        Ok(Self { bins, counts: vec![0; bins], n_samples: 0 })
    }

    /// `F = 1` falls in the last bin.
    pub fn add(&mut self, f: f64) {
        let k = ((f.clamp(0.0, 1.0) * self.bins as f64) as usize).min(self.bins - 1);
        self.counts[k] += 1;
        self.n_samples += 1;
    }

    pub fn merge(mut self, other: &FidelityHistogram) -> Self {
        for (a, b) in self.counts.iter_mut().zip(&other.counts) {
            *a += b;
        }
        self.n_samples += other.n_samples;
        self
    }

    pub fn probabilities(&self) -> Vec<f64> {
        self.counts.iter().map(|&c| c as f64 / self.n_samples.max(1) as f64).collect()
    }

    /// Divergence from the binned Haar distribution on `n_qubits`.
    pub fn jsd_to_haar(&self, n_qubits: usize) -> f64 {
        jsd(&self.probabilities(), &haar_bin_probabilities(n_qubits, self.bins))
    }
}

/// Jensen–Shannon divergence in bits; zero-probability terms contribute 0.
pub fn jsd(p: &[f64], q: &[f64]) -> f64 {
    let kl_to_mix = |a: &[f64], b: &[f64]| -> f64 {
        a.iter()
            .zip(b)
            .filter(|(&x, _)| x > 0.0)
            .map(|(&x, &y)| x * (2.0 * x / (x + y)).log2())
            .sum()
    };
    (0.5 * kl_to_mix(p, q) + 0.5 * kl_to_mix(q, p)).clamp(0.0, 1.0)
}

fn sample_params(template: &Circuit, seed: u64) -> Params {
    let mut rng = rng_from_seed(seed);
    template
        .symbols()
        .into_iter()
        .map(|s| (s, rng.random_range(0.0..std::f64::consts::TAU)))
        .collect()
}

/// Histogram of fidelities between the template's outputs at independent
/// uniform parameter draws. Pair `k` uses seeds derived from `(seed, k)`.
pub fn fidelity_histogram(template: &Circuit, n_pairs: usize, bins: usize, seed: u64) -> Result<FidelityHistogram> {
    let empty = FidelityHistogram::new(bins)?;
    (0..n_pairs as u64)
        .into_par_iter()
        .map(|k| {
            let a = simulate(template, &sample_params(template, derive_seed(seed, 2 * k)))?;
            let b = simulate(template, &sample_params(template, derive_seed(seed, 2 * k + 1)))?;
            fidelity(&a, &b)
        })
        .try_fold(|| empty.clone(), |mut h, f| {
            h.add(f?);
            Ok(h)
        })
        .try_reduce(|| empty.clone(), |a, b| Ok(a.merge(&b)))
}

/// The same histogram for pairs of Haar-random states.
pub fn haar_histogram(n_qubits: usize, n_pairs: usize, bins: usize, seed: u64) -> Result<FidelityHistogram> {
    let empty = FidelityHistogram::new(bins)?;
    (0..n_pairs as u64)
        .into_par_iter()
        .map(|k| {
            let mut rng = rng_from_seed(derive_seed(seed, k));
            let a = haar_state(n_qubits, &mut rng)?;
            let b = haar_state(n_qubits, &mut rng)?;
            fidelity(&a, &b)
        })
        .try_fold(|| empty.clone(), |mut h, f| {
            h.add(f?);
            Ok(h)
        })
        .try_reduce(|| empty.clone(), |a, b| Ok(a.merge(&b)))
}

/// `Expr = 1 − JSD(P_template, P_Haar)`.
pub fn expressibility(template: &Circuit, n_pairs: usize, bins: usize, seed: u64) -> Result<f64> {
    if n_pairs < 100 {
        return Err(CircuitError::InvalidArgument(format!("need at least 100 pairs, got {n_pairs}")));
    }
    let h = fidelity_histogram(template, n_pairs, bins, seed)?;
    Ok(1.0 - h.jsd_to_haar(template.n_qubits()))
}

/// Entropy used for the single-qubit marginals.
#[derive(Debug, Clone, Copy, Default, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum MwForm {
    /// `2(1 − Tr ρ²)`, the standard measure.
    #[default]
    Linear,
    /// Von Neumann entropy in bits, for comparison.
    VonNeumann,
}

pub fn meyer_wallach(s: &Statevector) -> Result<f64> {
    meyer_wallach_with(s, MwForm::Linear)
}

/// Mean single-qubit marginal entropy. In linear form this is
/// `Q = 2(1 − (1/n) Σ_k Tr ρ_k²)`.
pub fn meyer_wallach_with(s: &Statevector, form: MwForm) -> Result<f64> {
    let n = s.n_qubits();
    if n < 2 {
        return Err(CircuitError::InvalidArgument("Meyer–Wallach needs at least 2 qubits".into()));
    }
    let amps = s.amplitudes();
    let mut total = 0.0;
    for k in 0..n {
        let bit = 1 << k;
        let (mut p0, mut p1) = (0.0, 0.0);
        let mut off = num_complex::Complex64::new(0.0, 0.0);
        for i in 0..amps.len() {
            if i & bit == 0 {
                let (a0, a1) = (amps[i], amps[i | bit]);
                p0 += a0.norm_sqr();
                p1 += a1.norm_sqr();
                off += a0 * a1.conj();
            }
        }
        total += match form {
            MwForm::Linear => 2.0 * (1.0 - (p0 * p0 + p1 * p1 + 2.0 * off.norm_sqr())),
            MwForm::VonNeumann => {
                let disc = ((p0 - p1).powi(2) + 4.0 * off.norm_sqr()).sqrt();
                [(1.0 + disc) / 2.0, (1.0 - disc) / 2.0]
                    .iter()
                    .filter(|&&l| l > 1e-300)
                    .map(|&l| -l * l.log2())
                    .sum::<f64>()
            }
        };
    }
    Ok((total / n as f64).clamp(0.0, 1.0))
}

/// Mean Meyer–Wallach value over uniform parameter draws.
pub fn mw_of_template(template: &Circuit, n_samples: usize, seed: u64, form: MwForm) -> Result<f64> {
    if n_samples == 0 {
        return Err(CircuitError::InvalidArgument("need at least one sample".into()));
    }
    let values: Vec<f64> = (0..n_samples as u64)
        .into_par_iter()
        .map(|k| meyer_wallach_with(&simulate(template, &sample_params(template, derive_seed(seed, k)))?, form))
        .collect::<Result<_>>()?;
    Ok(values.iter().sum::<f64>() / n_samples as f64)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn pdf_values() {
        assert_eq!(haar_fidelity_pdf(0.3, 1), 1.0);
        assert_eq!(haar_fidelity_pdf(0.0, 2), 3.0);
        assert_eq!(haar_fidelity_pdf(1.0, 2), 0.0);
    }

    #[test]
    fn pdf_integrates_to_one() {
        for n in 1..=3 {
            let m = 20_000;
            let h = 1.0 / m as f64;
            // Composite Simpson.
            let s: f64 = (0..=m)
                .map(|i| {
                    let w = if i == 0 || i == m { 1.0 } else if i % 2 == 1 { 4.0 } else { 2.0 };
                    w * haar_fidelity_pdf(i as f64 * h, n)
                })
                .sum();
            assert!((s * h / 3.0 - 1.0).abs() < 1e-9);
        }
    }

    #[test]
    fn bin_probabilities_sum_to_one() {
        for n in 1..=4 {
            let p = haar_bin_probabilities(n, 75);
            assert!((p.iter().sum::<f64>() - 1.0).abs() < 1e-12);
            assert!(p.iter().all(|&x| x >= 0.0));
        }
    }

    #[test]
    fn jsd_bounds() {
        assert_eq!(jsd(&[0.5, 0.5], &[0.5, 0.5]), 0.0);
        assert!((jsd(&[1.0, 0.0], &[0.0, 1.0]) - 1.0).abs() < 1e-15);
    }

    #[test]
    fn zero_bins_rejected() {
        assert!(FidelityHistogram::new(0).is_err());
    }
}
