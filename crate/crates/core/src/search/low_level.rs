//! Single-agent search in space-time `(vertex, timestep)` under constraints.

use std::cmp::Reverse;
use std::collections::{BinaryHeap, HashMap};

use super::constraint::ConstraintTable;
use crate::model::{Path, VertexId, Workspace};

/// Occupancy of the already-planned paths of other units, used to count
/// the conflicts a candidate path would create.
#[derive(Debug, Default)]
pub struct ConflictAvoidance {
    occupancy: HashMap<(VertexId, usize), u32>,
    moves: HashMap<(VertexId, VertexId, usize), u32>,
    parked: HashMap<VertexId, u32>,
    horizon: usize,
    count_swaps: bool,
}

impl ConflictAvoidance {
    pub fn new<'a>(paths: impl IntoIterator<Item = &'a Path>, count_swaps: bool) -> Self {
        let mut cat = ConflictAvoidance {
            count_swaps,
            ..Default::default()
        };
        let paths: Vec<&Path> = paths.into_iter().filter(|p| !p.is_empty()).collect();
        cat.horizon = paths.iter().map(|p| p.len() - 1).max().unwrap_or(0);
        for p in paths {
            for t in 0..=cat.horizon {
                let v = p[t.min(p.len() - 1)];
                *cat.occupancy.entry((v, t)).or_default() += 1;
                if t > 0 {
                    let u = p[(t - 1).min(p.len() - 1)];
                    if u != v {
                        *cat.moves.entry((u, v, t)).or_default() += 1;
                    }
                }
            }
            *cat.parked.entry(*p.last().unwrap()).or_default() += 1;
        }
        cat
    }

    fn at(&self, v: VertexId, t: usize) -> u32 {
        if t <= self.horizon {
            self.occupancy.get(&(v, t)).copied().unwrap_or(0)
        } else {
            self.parked.get(&v).copied().unwrap_or(0)
        }
    }

    /// Conflicts caused by stepping `u -> v` and arriving at `t`.
    fn step(&self, u: VertexId, v: VertexId, t: usize) -> u32 {
        let mut c = self.at(v, t);
        if self.count_swaps && u != v && t <= self.horizon {
            c += self.moves.get(&(v, u, t)).copied().unwrap_or(0);
        }
        c
    }

    /// Conflicts caused by resting on `v` at every time after `t`.
    fn rest(&self, v: VertexId, t: usize) -> u32 {
        if t >= self.horizon {
            return self.parked.get(&v).copied().unwrap_or(0);
        }
        (t + 1..=self.horizon).map(|s| self.at(v, s)).sum()
    }
}

/// Inputs shared by the low-level searches.
pub struct SpaceTimeQuery<'a> {
    pub ws: &'a Workspace,
    pub start: VertexId,
    pub goal: VertexId,
    pub constraints: &'a ConstraintTable,
    /// Exact distance to `goal` per vertex; used for pruning.
    pub distance: &'a [Option<usize>],
    /// Last timestep a path may use.
    pub horizon: usize,
}

#[derive(Debug, Clone)]
pub struct SpaceTimeResult {
    /// Path from `t = 0` up to and including the arrival timestep.
    pub path: Path,
    pub conflicts: u32,
    pub expansions: usize,
}

/// Finds a path to `goal` arriving no later than `bound` after which the
/// agent can rest at the goal forever. Among such paths it minimises the
/// conflicts counted by `avoid` and breaks ties by the smallest
/// `t + guidance(v)`, preferring deeper states, then smaller vertex ids.
///
/// With `avoid = None` and exact distances as guidance this returns a
/// minimum-arrival path.
pub fn bounded_search(
    q: &SpaceTimeQuery<'_>,
    bound: usize,
    guidance: &[f64],
    avoid: Option<&ConflictAvoidance>,
) -> Option<SpaceTimeResult> {
    let bound = bound.min(q.horizon);
    let reachable = |v: VertexId, t: usize| q.distance[v].is_some_and(|d| t + d <= bound);
    if !reachable(q.start, 0) || q.constraints.vertex_blocked(q.start, 0) {
        return None;
    }

    // key: (conflicts, f, depth preference, vertex, time, terminal)
    type Key = (u32, OrdF64, Reverse<usize>, VertexId, usize, bool);
    let mut heap: BinaryHeap<Reverse<Key>> = BinaryHeap::new();
    let mut best: HashMap<(VertexId, usize), (u32, VertexId)> = HashMap::new();
    let mut closed: HashMap<(VertexId, usize), ()> = HashMap::new();
    let f = |v: VertexId, t: usize| OrdF64(t as f64 + guidance[v]);

    best.insert((q.start, 0), (0, q.start));
    heap.push(Reverse((0, f(q.start, 0), Reverse(0), q.start, 0, false)));
    let mut expansions = 0;

    while let Some(Reverse((c, _, _, v, t, terminal))) = heap.pop() {
        if terminal {
            let mut path = vec![v; t + 1];
            let mut cur = (v, t);
            while cur.1 > 0 {
                let (_, parent) = best[&cur];
                path[cur.1 - 1] = parent;
                cur = (parent, cur.1 - 1);
            }
            return Some(SpaceTimeResult {
                path,
                conflicts: c,
                expansions,
            });
        }
        if closed.insert((v, t), ()).is_some() || best[&(v, t)].0 < c {
            continue;
        }
        expansions += 1;
        if v == q.goal && q.constraints.can_rest(v, t) {
            let total = c + avoid.map_or(0, |a| a.rest(v, t));
            heap.push(Reverse((total, f(v, t), Reverse(t), v, t, true)));
        }
        if t == bound {
            continue;
        }
        let nt = t + 1;
        for &w in std::iter::once(&v).chain(q.ws.neighbors(v)) {
            if !reachable(w, nt) || q.constraints.vertex_blocked(w, nt) {
                continue;
            }
            if w != v && q.constraints.edge_blocked(v, w, nt) {
                continue;
            }
            if closed.contains_key(&(w, nt)) {
                continue;
            }
            let nc = c + avoid.map_or(0, |a| a.step(v, w, nt));
            match best.get(&(w, nt)) {
                Some(&(old, _)) if old <= nc => continue,
                _ => {}
            }
            best.insert((w, nt), (nc, v));
            heap.push(Reverse((nc, f(w, nt), Reverse(nt), w, nt, false)));
        }
    }
    None
}

/// Minimum arrival time under the constraints, or `None` if the goal cannot
/// be reached and held within the horizon.
pub fn min_arrival(q: &SpaceTimeQuery<'_>) -> Option<SpaceTimeResult> {
    let exact: Vec<f64> = q
        .distance
        .iter()
        .map(|d| d.map_or(f64::INFINITY, |d| d as f64))
        .collect();
    bounded_search(q, q.horizon, &exact, None)
}

/// Space-time single-agent search.
///
/// Returns a minimum-arrival path that violates no constraint and can rest
/// at `goal` through the horizon. With `focal_bound = Some(w)` any path
/// arriving within `w` times the minimum is acceptable, and among those the
/// one with the smallest `t + heuristic(v)` profile is chosen.
pub fn low_level_search(
    ws: &Workspace,
    start: VertexId,
    goal: VertexId,
    constraints: &ConstraintTable,
    heuristic: &[f64],
    horizon: usize,
    focal_bound: Option<f64>,
) -> Option<Path> {
    let distance = ws.distances_to(goal);
    let q = SpaceTimeQuery {
        ws,
        start,
        goal,
        constraints,
        distance: &distance,
        horizon,
    };
    let best = min_arrival(&q)?;
    match focal_bound {
        None => Some(best.path),
        Some(w) => {
            let arrival = best.path.len() - 1;
            let bound = scaled_bound(w, arrival);
            bounded_search(&q, bound, heuristic, None).map(|r| r.path)
        }
    }
}

/// `floor(w * x)` with a tolerance for representation error.
pub fn scaled_bound(w: f64, x: usize) -> usize {
    (w * x as f64 + 1e-9).floor() as usize
}

/// Total order over finite-or-infinite floats.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct OrdF64(pub f64);

impl Eq for OrdF64 {}

impl PartialOrd for OrdF64 {
    fn partial_cmp(&self, other: &Self) -> Option<std::cmp::Ordering> {
        Some(self.cmp(other))
    }
}

impl Ord for OrdF64 {
    fn cmp(&self, other: &Self) -> std::cmp::Ordering {
        self.0.total_cmp(&other.0)
    }
}
