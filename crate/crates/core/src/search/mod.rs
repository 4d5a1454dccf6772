//! Conflict-based search: optimal CBS and its bounded-suboptimal focal
//! variant, plus the shared high-level engine reused by the flow and
//! package solvers.

mod cbs;
pub mod constraint;
pub(crate) mod high_level;
pub mod low_level;
pub mod reachability;

use std::time::Instant;

use serde::Serialize;

pub use cbs::{cbs_solve, ecbs_solve, ecbs_solve_guided};
pub use constraint::{Constraint, ConstraintKind, ConstraintTable};
pub use low_level::low_level_search;

use crate::model::{Instance, Solution};

/// Search budgets. Node counts are the reproducible budget; wall-clock
/// limits are optional.
#[derive(Debug, Clone, PartialEq)]
pub struct Limits {
    /// Maximum number of high-level nodes expanded.
    pub max_nodes: usize,
    pub max_seconds: Option<f64>,
    /// Last timestep any path may use; defaults to `|V| + movers`.
    pub horizon_cap: Option<usize>,
}

impl Default for Limits {
    fn default() -> Self {
        Limits {
            max_nodes: 100_000,
            max_seconds: None,
            horizon_cap: None,
        }
    }
}

impl Limits {
    pub fn with_nodes(max_nodes: usize) -> Self {
        Limits {
            max_nodes,
            ..Default::default()
        }
    }

    pub fn horizon_for(&self, instance: &Instance) -> usize {
        self.horizon_cap
            .unwrap_or(instance.workspace().num_vertices() + instance.num_movers())
    }

    pub(crate) fn out_of_time(&self, started: Instant) -> bool {
        self.max_seconds
            .is_some_and(|s| started.elapsed().as_secs_f64() > s)
    }
}

#[derive(Debug, Clone, PartialEq)]
pub enum Outcome {
    Solved(Solution),
    /// No solution exists within the horizon cap.
    Infeasible,
    BudgetExhausted,
}

#[derive(Debug, Clone, Copy, Default, PartialEq, Eq, Serialize)]
pub struct SearchStats {
    pub high_level_expanded: usize,
    pub high_level_generated: usize,
    pub low_level_expansions: usize,
    /// Conflicting mover pairs in the root node.
    pub root_conflicts: usize,
}

#[derive(Debug, Clone, PartialEq)]
pub struct SolveReport {
    pub outcome: Outcome,
    pub stats: SearchStats,
    pub runtime_s: f64,
}

impl SolveReport {
    pub fn solution(&self) -> Option<&Solution> {
        match &self.outcome {
            Outcome::Solved(s) => Some(s),
            _ => None,
        }
    }

    pub fn into_solution(self) -> Option<Solution> {
        match self.outcome {
            Outcome::Solved(s) => Some(s),
            _ => None,
        }
    }

    pub fn makespan(&self) -> Option<usize> {
        self.solution().map(|s| s.metrics().makespan)
    }

    pub fn is_infeasible(&self) -> bool {
        self.outcome == Outcome::Infeasible
    }

    pub fn is_budget_exhausted(&self) -> bool {
        self.outcome == Outcome::BudgetExhausted
    }
}

#[derive(Debug, thiserror::Error, PartialEq)]
pub enum SolveError {
    #[error("{algorithm} does not accept {flavor} instances")]
    WrongFlavor {
        algorithm: &'static str,
        flavor: crate::model::Flavor,
    },
    #[error("suboptimality factor must be at least 1, got {0}")]
    BadFactor(f64),
    #[error("highway guidance is only available for ecbs, not {0}")]
    HighwayNeedsEcbs(&'static str),
}
