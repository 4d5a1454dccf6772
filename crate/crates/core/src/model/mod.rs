//! Workspaces, instances, solutions, conflict semantics and file formats.

use thiserror::Error;

pub mod instance;
pub mod map_format;
pub mod oracle;
pub mod scenario;
pub mod solution;
pub mod solution_json;
pub mod validate;
pub mod workspace;

pub use instance::{Flavor, Group, Instance, InstanceError, MotionSemantics, Mover};
pub use map_format::{parse_map, write_map};
pub use oracle::{joint_state_oracle, OracleError};
pub use scenario::{parse_scenario, write_scenario, ScenarioError};
pub use solution::{last_motion, pad_paths, Exchange, Metrics, Path, Solution};
pub use solution_json::{parse_solution, write_solution, SolutionFormatError};
pub use validate::{validate, validate_with, Issue, ValidationReport};
pub use workspace::{Cell, GridMeta, VertexId, Workspace, WorkspaceError};

/// Syntax error with a 1-based position (0 when the document ends early).
#[derive(Debug, Clone, Error, PartialEq, Eq)]
#[error("line {line}, column {column}: {message}")]
pub struct ParseError {
    pub line: usize,
    pub column: usize,
    pub message: String,
}

impl ParseError {
    pub fn new(line: usize, column: usize, message: impl Into<String>) -> Self {
        ParseError {
            line,
            column,
            message: message.into(),
        }
    }
}
