use std::collections::{BTreeMap, BTreeSet};

use serde::Serialize;

use super::instance::{Instance, MotionSemantics};
use super::solution::{Exchange, Solution};
use super::workspace::VertexId;

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum Issue {
    MoverCount { expected: usize, found: usize },
    WrongStart { mover: usize, expected: VertexId, found: VertexId },
    HorizonMismatch { mover: usize, length: usize, expected: usize },
    UnknownVertex { mover: usize, time: usize, vertex: VertexId },
    Discontinuity { mover: usize, time: usize, from: VertexId, to: VertexId },
    VertexConflict { a: usize, b: usize, vertex: VertexId, time: usize },
    /// `a` moves `from -> to` and `b` moves `to -> from` between `time` and
    /// `time + 1`.
    SwapConflict { a: usize, b: usize, from: VertexId, to: VertexId, time: usize },
    ExchangeNotAllowed { time: usize, a: usize, b: usize },
    InvalidExchange { time: usize, a: usize, b: usize, reason: String },
    UnmetTarget { group: u32 },
    AssignmentMismatch { index: usize, expected: VertexId, found: VertexId },
}

#[derive(Debug, Clone, Default, PartialEq, Eq, Serialize)]
pub struct ValidationReport {
    pub issues: Vec<Issue>,
}

impl ValidationReport {
    pub fn is_valid(&self) -> bool {
        self.issues.is_empty()
    }

    pub fn vertex_conflicts(&self) -> usize {
        self.issues
            .iter()
            .filter(|i| matches!(i, Issue::VertexConflict { .. }))
            .count()
    }

    pub fn swap_conflicts(&self) -> usize {
        self.issues
            .iter()
            .filter(|i| matches!(i, Issue::SwapConflict { .. }))
            .count()
    }
}

/// Checks `sol` against `instance` under the instance's own semantics.
pub fn validate(instance: &Instance, sol: &Solution) -> ValidationReport {
    validate_with(instance, sol, instance.semantics())
}

/// Checks `sol` against `instance` with explicit motion semantics. Swap
/// conflicts are reported only when `semantics.allow_swap` is false.
pub fn validate_with(
    instance: &Instance,
    sol: &Solution,
    semantics: MotionSemantics,
) -> ValidationReport {
    let ws = instance.workspace();
    let mut issues = Vec::new();
    let n = instance.num_movers();
    if sol.paths.len() != n {
        issues.push(Issue::MoverCount {
            expected: n,
            found: sol.paths.len(),
        });
        return ValidationReport { issues };
    }
    let horizon = sol.horizon();
    let mut structural = false;
    for (m, path) in sol.paths.iter().enumerate() {
        if path.len() != horizon + 1 {
            issues.push(Issue::HorizonMismatch {
                mover: m,
                length: path.len(),
                expected: horizon + 1,
            });
            structural = true;
            continue;
        }
        if let Some((t, &v)) = path.iter().enumerate().find(|(_, &v)| !ws.contains(v)) {
            issues.push(Issue::UnknownVertex { mover: m, time: t, vertex: v });
            structural = true;
            continue;
        }
        let start = instance.movers()[m].start;
        if path[0] != start {
            issues.push(Issue::WrongStart {
                mover: m,
                expected: start,
                found: path[0],
            });
        }
        for t in 0..horizon {
            let (u, v) = (path[t], path[t + 1]);
            if u != v && !ws.has_edge(u, v) {
                issues.push(Issue::Discontinuity { mover: m, time: t, from: u, to: v });
            }
        }
    }
    if structural {
        return ValidationReport { issues };
    }

    for t in 0..=horizon {
        let mut at: BTreeMap<VertexId, Vec<usize>> = BTreeMap::new();
        for (m, path) in sol.paths.iter().enumerate() {
            at.entry(path[t]).or_default().push(m);
        }
        for (&v, movers) in &at {
            for (i, &a) in movers.iter().enumerate() {
                for &b in &movers[i + 1..] {
                    issues.push(Issue::VertexConflict { a, b, vertex: v, time: t });
                }
            }
        }
        if t < horizon && !semantics.allow_swap {
            let mut moves: BTreeMap<(VertexId, VertexId), usize> = BTreeMap::new();
            for (m, path) in sol.paths.iter().enumerate() {
                if path[t] != path[t + 1] {
                    moves.insert((path[t], path[t + 1]), m);
                }
            }
            for (&(u, v), &a) in &moves {
                if u < v {
                    if let Some(&b) = moves.get(&(v, u)) {
                        issues.push(Issue::SwapConflict { a, b, from: u, to: v, time: t });
                    }
                }
            }
        }
    }

    let package_flavor = instance.flavor().is_package_flavor();
    let mut exchanges_ok = true;
    if !package_flavor {
        for e in &sol.exchanges {
            issues.push(Issue::ExchangeNotAllowed { time: e.time, a: e.a, b: e.b });
            exchanges_ok = false;
        }
    } else {
        exchanges_ok = check_exchanges(instance, sol, &mut issues);
    }

    // final positions of the routed entities
    let finals: Vec<VertexId> = if package_flavor {
        if !exchanges_ok {
            return ValidationReport { issues };
        }
        let packages = sol.package_paths().expect("exchanges checked");
        packages.iter().map(|p| p[horizon]).collect()
    } else {
        sol.paths.iter().map(|p| p[horizon]).collect()
    };
    for g in instance.groups() {
        let reached: BTreeSet<VertexId> = g.members.iter().map(|&m| finals[m]).collect();
        let wanted: BTreeSet<VertexId> = g.targets.iter().copied().collect();
        if reached != wanted {
            issues.push(Issue::UnmetTarget { group: g.label });
        }
    }
    if sol.assignment.len() != n {
        issues.push(Issue::MoverCount {
            expected: n,
            found: sol.assignment.len(),
        });
    } else {
        for (i, (&expected, &found)) in finals.iter().zip(&sol.assignment).enumerate() {
            if expected != found {
                issues.push(Issue::AssignmentMismatch { index: i, expected, found });
            }
        }
    }
    ValidationReport { issues }
}

fn check_exchanges(instance: &Instance, sol: &Solution, issues: &mut Vec<Issue>) -> bool {
    let ws = instance.workspace();
    let n = sol.paths.len();
    let horizon = sol.horizon();
    let mut ok = true;
    let mut busy: BTreeSet<(usize, usize)> = BTreeSet::new();
    let bad = |e: &Exchange, reason: &str, issues: &mut Vec<Issue>| {
        issues.push(Issue::InvalidExchange {
            time: e.time,
            a: e.a,
            b: e.b,
            reason: reason.to_string(),
        });
    };
    for (i, e) in sol.exchanges.iter().enumerate() {
        if i > 0 && sol.exchanges[i - 1].time > e.time {
            bad(e, "exchanges are not sorted by time", issues);
            ok = false;
            continue;
        }
        if e.a == e.b || e.a >= n || e.b >= n {
            bad(e, "exchange needs two distinct movers", issues);
            ok = false;
            continue;
        }
        if e.time >= horizon {
            bad(e, "exchange after the horizon", issues);
            ok = false;
            continue;
        }
        if !busy.insert((e.time, e.a)) || !busy.insert((e.time, e.b)) {
            bad(e, "mover takes part in two exchanges in one step", issues);
            ok = false;
            continue;
        }
        let (pa, pb) = (&sol.paths[e.a], &sol.paths[e.b]);
        let adjacent = |u: VertexId, v: VertexId| ws.has_edge(u, v) || ws.has_edge(v, u);
        if !adjacent(pa[e.time], pb[e.time]) && !adjacent(pa[e.time + 1], pb[e.time + 1]) {
            bad(e, "movers are not adjacent", issues);
            ok = false;
        }
    }
    ok
}
