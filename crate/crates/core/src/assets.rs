//! Bundled maps, highways and scenarios.
//!
//! The Kiva-like warehouse is a lattice of one-cell corridors (rows 0, 3,
//! 6, 9, 12 and columns 0, 6, 12, 18) around storage blocks. Its hand-made
//! highway alternates directions between neighbouring corridors.

pub const KIVA_MAP: &str = include_str!("../assets/kiva.map");
pub const KIVA_HIGHWAY: &str = include_str!("../assets/kiva.hwy");
/// One agent per corridor travelling in the hand-made highway direction.
pub const KIVA_TRAFFIC: &str = include_str!("../assets/kiva_traffic.scen");
/// Two parallel corridors joined at both ends, with a clockwise highway.
pub const TWO_CORRIDOR_MAP: &str = include_str!("../assets/two_corridor.map");
pub const TWO_CORRIDOR_HIGHWAY: &str = include_str!("../assets/two_corridor.hwy");
/// Two agents swapping the ends of the two-corridor map.
pub const TWO_CORRIDOR_SCENARIO: &str = include_str!("../assets/two_corridor.scen");
/// 1x3 corridor.
pub const HEAD_ON_MAP: &str = include_str!("../assets/head_on.map");
/// Agents swapping the corridor ends; infeasible without exchanges.
pub const HEAD_ON_SCENARIO: &str = include_str!("../assets/head_on.scen");
/// The same motion as two packages of distinct types.
pub const HEAD_ON_PACKAGES: &str = include_str!("../assets/head_on_packages.scen");
