//! Solution quality, the β-score/Q-score procedure and time accounting.

mod qscore;
mod timing;

use serde::{Deserialize, Serialize};
use thiserror::Error;

pub use qscore::{expected_max_cut, q_score, QScoreConfig, QScoreResult, ScoreStatistic, SizeResult};
pub use timing::{time_split, TimeSplit};

#[derive(Debug, Error, Clone, PartialEq)]
pub enum MetricsError {
    #[error("invalid input: {0}")]
    InvalidInput(String),
    #[error("degenerate denominator: C_opt = C_rand = {0}")]
    DegenerateDenominator(f64),
    #[error("no sizes to score")]
    EmptySizes,
    #[error("total time is zero")]
    ZeroTime,
    #[error("inconsistent result at N={n}: stored beta {stored}, recomputed {recomputed}")]
    Inconsistent { n: usize, stored: f64, recomputed: f64 },
    #[error(transparent)]
    Solver(#[from] crate::solvers::SolverError),
}

pub type Result<T> = std::result::Result<T, MetricsError>;

/// Optimality gaps of a heuristic value against the optimum. The relative
/// fields are `None` when `f_opt = 0`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct QualityReport {
    pub f_qc: f64,
    pub f_opt: f64,
    pub delta_abs: f64,
    pub delta_rel: Option<f64>,
    pub theta: Option<f64>,
}

pub fn quality(f_qc: f64, f_opt: f64) -> Result<QualityReport> {
    if !(f_qc >= 0.0 && f_opt >= 0.0) || !f_qc.is_finite() || !f_opt.is_finite() {
        return Err(MetricsError::InvalidInput(format!("need finite f_qc, f_opt >= 0, got {f_qc}, {f_opt}")));
    }
    let delta_abs = f_qc - f_opt;
    let (delta_rel, theta) = if f_opt > 0.0 {
        // theta is formed from delta_rel so that theta = 1 + delta_rel holds bit for bit.
        let rel = delta_abs / f_opt;
        (Some(rel), Some(1.0 + rel))
    } else {
        (None, None)
    };
    Ok(QualityReport { f_qc, f_opt, delta_abs, delta_rel, theta })
}

/// `β = (C − C_rand) / (C_opt − C_rand)`, unclamped.
pub fn beta_score(c: f64, c_opt: f64, c_rand: f64) -> Result<f64> {
    let denom = c_opt - c_rand;
    let scale = c_opt.abs().max(c_rand.abs()).max(1.0);
    if denom.abs() <= f64::EPSILON * scale {
        return Err(MetricsError::DegenerateDenominator(c_opt));
    }
    Ok((c - c_rand) / denom)
}
