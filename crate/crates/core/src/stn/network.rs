use std::collections::BTreeMap;

use serde::{Deserialize, Serialize};

use super::StnError;
use crate::model::{Solution, VertexId, Workspace};

/// Physical limits of the fleet.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Kinematics {
    /// Meters per second, one entry per mover, or a single entry shared by
    /// all of them.
    pub v_max: Vec<f64>,
    /// Seconds per 90 degree heading change.
    pub rot_time: f64,
    /// Meters.
    pub safety_distance: f64,
}

impl Default for Kinematics {
    fn default() -> Self {
        Kinematics::uniform(1.0, 0.0, 0.0)
    }
}

impl Kinematics {
    pub fn uniform(v_max: f64, rot_time: f64, safety_distance: f64) -> Self {
        Kinematics {
            v_max: vec![v_max],
            rot_time,
            safety_distance,
        }
    }

    pub fn v_max(&self, mover: usize) -> f64 {
        if self.v_max.len() == 1 {
            self.v_max[0]
        } else {
            self.v_max[mover]
        }
    }

    pub fn check(&self, ws: &Workspace, movers: usize) -> Result<(), StnError> {
        let bad = |msg: String| Err(StnError::BadKinematics(msg));
        if self.v_max.len() != 1 && self.v_max.len() != movers {
            return bad(format!(
                "{} velocities given for {} movers",
                self.v_max.len(),
                movers
            ));
        }
        if let Some(v) = self.v_max.iter().find(|v| !(**v > 0.0) || !v.is_finite()) {
            return bad(format!("v_max must be positive and finite, got {v}"));
        }
        if !(self.rot_time >= 0.0) || !self.rot_time.is_finite() {
            return bad(format!("rot_time must be non-negative, got {}", self.rot_time));
        }
        let min_edge = ws.min_edge_length();
        if !(self.safety_distance >= 0.0) || self.safety_distance >= min_edge {
            return bad(format!(
                "safety distance {} must lie in [0, {min_edge})",
                self.safety_distance
            ));
        }
        Ok(())
    }
}

/// A mover entering a location. `index` is the path step of the entry.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct Event {
    pub mover: usize,
    pub index: usize,
    pub vertex: VertexId,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum ConstraintKind {
    /// Global start to a mover's first event.
    Start,
    /// Consecutive events of one mover.
    Motion,
    /// Exit of an earlier visitor to entry of a later one.
    Separation,
    /// Global start to a mover's last event, bounded above.
    Deadline,
}

/// `lb <= t(to) - t(from) <= ub`; a missing `from` is the global start
/// event, pinned at time zero, and a missing `ub` is unbounded.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct StnConstraint {
    pub from: Option<usize>,
    pub to: usize,
    pub lb: f64,
    pub ub: Option<f64>,
    pub kind: ConstraintKind,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct TemporalNetwork {
    pub events: Vec<Event>,
    pub constraints: Vec<StnConstraint>,
}

impl TemporalNetwork {
    pub fn constraints_of(&self, kind: ConstraintKind) -> impl Iterator<Item = &StnConstraint> {
        self.constraints.iter().filter(move |c| c.kind == kind)
    }

    /// Events of `mover` in path order.
    pub fn mover_events(&self, mover: usize) -> Vec<usize> {
        (0..self.events.len())
            .filter(|&e| self.events[e].mover == mover)
            .collect()
    }
}

/// One stay of a mover at a location, as discrete steps.
struct Visit {
    event: usize,
    mover: usize,
    entry: usize,
    /// Step at which the mover enters its next location; `None` if it
    /// stays for good.
    exit: Option<usize>,
    next_event: Option<usize>,
}

fn quarter_turns(a: (i32, i32), b: (i32, i32)) -> u32 {
    if a == b {
        0
    } else if a.0 == -b.0 && a.1 == -b.1 {
        2
    } else {
        1
    }
}

fn reject_swaps(sol: &Solution) -> Result<(), StnError> {
    let horizon = sol.paths.iter().map(|p| p.len()).max().unwrap_or(0);
    for t in 1..horizon {
        let mut moves = BTreeMap::new();
        for (m, p) in sol.paths.iter().enumerate() {
            if t < p.len() && p[t - 1] != p[t] {
                moves.insert((p[t - 1], p[t]), m);
            }
        }
        for (&(u, v), &a) in &moves {
            if let Some(&b) = moves.get(&(v, u)) {
                return Err(StnError::Conflict {
                    vertex: u,
                    first: a,
                    second: b,
                });
            }
        }
    }
    Ok(())
}

/// Builds the temporal network of `sol`. Waits are folded into the
/// bounds, so consecutive path entries at one vertex share one event.
///
/// Heading changes are charged only on grid workspaces; the first move of
/// a mover is free of rotation.
pub fn build_stn(
    sol: &Solution,
    ws: &Workspace,
    kin: &Kinematics,
    deadline: Option<f64>,
) -> Result<TemporalNetwork, StnError> {
    kin.check(ws, sol.paths.len())?;
    if let Some(d) = deadline {
        if !(d >= 0.0) || !d.is_finite() {
            return Err(StnError::BadDeadline(d));
        }
    }
    reject_swaps(sol)?;
    let mut events = Vec::new();
    let mut constraints = Vec::new();
    let mut visits: BTreeMap<VertexId, Vec<Visit>> = BTreeMap::new();

    for (m, path) in sol.paths.iter().enumerate() {
        let v = kin.v_max(m);
        let mut heading: Option<(i32, i32)> = None;
        let mut previous: Option<usize> = None;
        let mut mover_visits: Vec<Visit> = Vec::new();
        for (i, &vertex) in path.iter().enumerate() {
            if !ws.contains(vertex) {
                return Err(StnError::UnknownVertex { mover: m, vertex });
            }
            if i > 0 && path[i - 1] == vertex {
                continue;
            }
            let e = events.len();
            events.push(Event {
                mover: m,
                index: i,
                vertex,
            });
            match previous {
                None => constraints.push(StnConstraint {
                    from: None,
                    to: e,
                    lb: 0.0,
                    ub: None,
                    kind: ConstraintKind::Start,
                }),
                Some(p) => {
                    let u = events[p].vertex;
                    if !ws.has_edge(u, vertex) {
                        return Err(StnError::NotAnEdge { mover: m, from: u, to: vertex });
                    }
                    let mut lb = ws.edge_length(u, vertex) / v;
                    if ws.grid().is_some() {
                        let (a, b) = (ws.cell(u), ws.cell(vertex));
                        let dir = (b.0 - a.0, b.1 - a.1);
                        if let Some(h) = heading {
                            lb += kin.rot_time * quarter_turns(h, dir) as f64;
                        }
                        heading = Some(dir);
                    }
                    constraints.push(StnConstraint {
                        from: Some(p),
                        to: e,
                        lb,
                        ub: None,
                        kind: ConstraintKind::Motion,
                    });
                }
            }
            if let Some(last) = mover_visits.last_mut() {
                last.exit = Some(i);
                last.next_event = Some(e);
            }
            mover_visits.push(Visit {
                event: e,
                mover: m,
                entry: i,
                exit: None,
                next_event: None,
            });
            previous = Some(e);
        }
        if let (Some(d), Some(last)) = (deadline, previous) {
            constraints.push(StnConstraint {
                from: None,
                to: last,
                lb: 0.0,
                ub: Some(d),
                kind: ConstraintKind::Deadline,
            });
        }
        for visit in mover_visits {
            visits.entry(events[visit.event].vertex).or_default().push(visit);
        }
    }

    // consecutive visitors of a vertex; later ones follow by transitivity
    for (&vertex, list) in visits.iter_mut() {
        list.sort_by_key(|v| (v.entry, v.mover));
        for pair in list.windows(2) {
            let (a, b) = (&pair[0], &pair[1]);
            if a.mover == b.mover {
                continue;
            }
            let (Some(exit), Some(next)) = (a.exit, a.next_event) else {
                return Err(StnError::Conflict {
                    vertex,
                    first: a.mover,
                    second: b.mover,
                });
            };
            if exit > b.entry {
                return Err(StnError::Conflict {
                    vertex,
                    first: a.mover,
                    second: b.mover,
                });
            }
            constraints.push(StnConstraint {
                from: Some(next),
                to: b.event,
                lb: kin.safety_distance / kin.v_max(a.mover),
                ub: None,
                kind: ConstraintKind::Separation,
            });
        }
    }
    Ok(TemporalNetwork {
        events,
        constraints,
    })
}
