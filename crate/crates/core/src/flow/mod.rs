//! Flow-based solvers: anonymous MAPF on time-expanded networks and
//! conflict-based min-cost flow (CBM) for teams.

mod anonymous;
mod cbm;
pub mod network;
mod time_expanded;

pub use anonymous::{anonymous_lower_bound, anonymous_solve};
pub use cbm::{cbm_solve, cbm_solve_with};
pub use network::FlowNetwork;
pub use time_expanded::{
    build_network, max_flow, min_cost_flow, FlowPaths, NetworkError, TeamConstraintSet,
    TimeExpandedNetwork,
};
