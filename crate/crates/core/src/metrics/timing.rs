use serde::{Deserialize, Serialize};

use super::{MetricsError, Result};
use crate::pipeline::{BenchmarkRun, TimeTag};

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct TimeSplit {
    pub quantum_s: f64,
    pub classical_s: f64,
    /// `quantum_s / (quantum_s + classical_s)`.
    pub ratio: f64,
}

/// Sum pre- and postprocess time per module according to its time tag.
pub fn time_split(run: &BenchmarkRun) -> Result<TimeSplit> {
    let (mut quantum_s, mut classical_s) = (0.0, 0.0);
    for (spec, t) in run.pipeline.modules.iter().zip(&run.wall_times) {
        match spec.tag {
            TimeTag::Quantum => quantum_s += t.pre_s + t.post_s,
            TimeTag::Classical => classical_s += t.pre_s + t.post_s,
        }
    }
    let total = quantum_s + classical_s;
    if total <= 0.0 {
        return Err(MetricsError::ZeroTime);
    }
    Ok(TimeSplit { quantum_s, classical_s, ratio: quantum_s / total })
}
