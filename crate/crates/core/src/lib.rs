//! Application-centric benchmarking for quantum-computing workloads.
//!
//! A benchmark is a [`pipeline::Pipeline`] of typed modules. Each module
//! implements a `preprocess` step (run front to back) and a `postprocess`
//! step (run back to front), exchanging [`pipeline::PipelinePayload`]
//! values whose kinds must match between neighbours. Modules emit
//! [`pipeline::MetricRecord`]s into a per-run append-only log.
//!
//! The building blocks are usable on their own:
//!
//! - [`problems`]: MaxCut, set cover, portfolio selection and assembly line
//!   balancing instances with domain-level evaluators.
//! - [`qubo`]: penalty-based QUBO mappings (slack or unbalanced) and decoding.
//! - [`solvers`]: simulated annealing, exhaustive search, uniform sampling.
//! - [`metrics`]: optimality gaps, the β-ratio and Q-score scan, time split.
//! - [`circuit`]: dense statevector simulation, expressibility and
//!   Meyer–Wallach entanglement of parametrized circuits.
//! - [`hamiltonian`]: Jordan–Wigner Hubbard and Heisenberg models, Trotter
//!   circuits, noisy trajectory dynamics and adiabatic state preparation.
//!
//! The `qbench` binary wraps the pipeline engine (see [`cli`]).

pub mod circuit;
pub mod cli;
pub mod hamiltonian;
pub mod metrics;
pub mod pipeline;
pub mod problems;
pub mod qubo;
pub mod rng;
pub mod solvers;
