use serde::{Deserialize, Serialize};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Sense {
    Minimize,
    Maximize,
}

/// Problem-specific decision.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "type", content = "value", rename_all = "snake_case")]
pub enum Assignment {
    /// Side of every vertex.
    Cut(Vec<bool>),
    /// Indices of the chosen subsets, ascending.
    Subsets(Vec<usize>),
    /// Indices of the selected assets, ascending.
    Assets(Vec<usize>),
    /// Stations (1-based) each task is placed on. A well-formed plan has
    /// exactly one station per task.
    Stations(Vec<Vec<usize>>),
}

/// A named constraint breach.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Violation {
    pub constraint: String,
    pub detail: String,
}

impl Violation {
    pub fn new(constraint: impl Into<String>, detail: impl Into<String>) -> Self {
        Self { constraint: constraint.into(), detail: detail.into() }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct DomainSolution {
    pub problem: String,
    pub assignment: Assignment,
    /// Objective in minimization form.
    pub objective: f64,
    pub sense: Sense,
    pub feasible: bool,
    pub violations: Vec<Violation>,
}

impl DomainSolution {
    pub fn new(
        problem: impl Into<String>,
        assignment: Assignment,
        objective: f64,
        sense: Sense,
        violations: Vec<Violation>,
    ) -> Self {
        Self {
            problem: problem.into(),
            assignment,
            objective,
            sense,
            feasible: violations.is_empty(),
            violations,
        }
    }

    /// Objective in the problem's natural orientation.
    pub fn reported_objective(&self) -> f64 {
        match self.sense {
            Sense::Minimize => self.objective,
            Sense::Maximize => -self.objective,
        }
    }
}
