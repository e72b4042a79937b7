//! Problem instances and their domain-level evaluators.
//!
//! Every evaluator returns a [`DomainSolution`] whose objective is stored in
//! minimization form. Maximization problems (MaxCut, return-seeking
//! portfolios) store the negated value and un-negate it in
//! [`DomainSolution::reported_objective`].

mod maxcut;
mod portfolio;
mod salbp;
mod setcover;
mod solution;

pub use maxcut::{eval_cut, gen_maxcut, max_cut_exhaustive, Edge, ProblemGraph};
pub use portfolio::{
    gen_portfolio, portfolio_objective, portfolio_optimum_exhaustive, portfolio_stats,
    Formulation, PortfolioInstance,
};
pub use salbp::{eval_salbp, gen_salbp, salbp_optimum_exhaustive, SalbpInstance};
pub use setcover::{
    eval_setcover, gen_setcover, greedy_setcover, setcover_optimum_exhaustive, SetCoverInstance,
    Subset,
};
pub use solution::{Assignment, DomainSolution, Sense, Violation};

use thiserror::Error;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum ProblemError {
    #[error("invalid parameter: {0}")]
    InvalidParameter(String),
    #[error("invalid instance: {0}")]
    InvalidInstance(String),
    #[error("length mismatch: expected {expected}, found {found}")]
    LengthMismatch { expected: usize, found: usize },
    #[error("index {index} out of range (limit {limit})")]
    IndexOutOfRange { index: usize, limit: usize },
    #[error("no assets selected")]
    EmptySelection,
    #[error("parse error at line {line}: {message}")]
    Parse { line: usize, message: String },
}

pub type Result<T> = std::result::Result<T, ProblemError>;

pub(crate) fn parse_err(line: usize, message: impl Into<String>) -> ProblemError {
    ProblemError::Parse { line, message: message.into() }
}
