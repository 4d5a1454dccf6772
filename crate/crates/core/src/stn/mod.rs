//! Continuous-time post-processing of discrete plans: a simple temporal
//! network over location entries, its earliest/latest schedule, and a
//! delay simulation that exploits the slack.

mod network;
mod schedule;
mod simulate;

use thiserror::Error;

use crate::model::VertexId;

pub use network::{build_stn, ConstraintKind, Event, Kinematics, StnConstraint, TemporalNetwork};
pub use schedule::{compute_schedule, Schedule, ScheduledEvent};
pub use simulate::{
    simulate_execution, DelayCap, DelayDistribution, DelayModel, DelayOverride, ExecutionTrace,
};

#[derive(Debug, Error, PartialEq)]
pub enum StnError {
    #[error("bad kinematics: {0}")]
    BadKinematics(String),
    #[error("deadline must be a non-negative number of seconds, got {0}")]
    BadDeadline(f64),
    #[error("mover {mover} visits unknown vertex {vertex}")]
    UnknownVertex { mover: usize, vertex: VertexId },
    #[error("mover {mover} jumps from {from} to {to}")]
    NotAnEdge { mover: usize, from: VertexId, to: VertexId },
    #[error("movers {first} and {second} conflict at vertex {vertex}")]
    Conflict { vertex: VertexId, first: usize, second: usize },
    #[error("constraint references a missing event")]
    DanglingConstraint,
    #[error("constraint bounds [{lb}, {ub:?}] are empty")]
    BadBounds { lb: f64, ub: Option<f64> },
    #[error("inconsistent temporal network, negative cycle through {}", format_cycle(.cycle))]
    Inconsistent {
        /// Event ids along the cycle; `None` is the global start.
        cycle: Vec<Option<usize>>,
    },
    #[error("lower bounds order the events cyclically")]
    CyclicOrdering,
    #[error("bad delay model: {0}")]
    BadDelay(String),
}

fn format_cycle(cycle: &[Option<usize>]) -> String {
    cycle
        .iter()
        .map(|e| e.map_or_else(|| "X0".to_string(), |e| format!("e{e}")))
        .collect::<Vec<_>>()
        .join(" -> ")
}

/// Default deadline: twice the earliest makespan of the unbounded schedule.
pub fn default_deadline(earliest: &Schedule) -> f64 {
    2.0 * earliest.makespan_s()
}
