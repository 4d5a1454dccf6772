//! Multi-agent path finding on graphs and four real-world generalizations:
//! team target assignment (TAPF), package-exchange routing (PERR/K-PERR),
//! highway-biased bounded-suboptimal search, and post-processing of discrete
//! plans into delay-tolerant continuous-time schedules.

pub mod model;
pub mod perr;
pub mod algorithm;
pub mod assets;
pub mod bench;
pub mod flow;
pub mod generate;
pub mod highways;
pub mod search;
pub mod stn;

pub use model::*;
