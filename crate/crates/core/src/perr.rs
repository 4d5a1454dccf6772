//! Package-exchange robot routing. Packages are planned as agents whose
//! swaps are legal; mover paths and the exchange list are rebuilt from the
//! package motions.

use std::collections::VecDeque;
use std::time::Instant;

use crate::flow::cbm_solve_with;
use crate::model::{Flavor, Instance, MotionSemantics, Path, Solution, VertexId, Workspace};
use crate::search::low_level::{min_arrival, SpaceTimeQuery};
use crate::search::{cbs_solve, ConstraintKind, ConstraintTable, Limits, Outcome, SearchStats, SolveError, SolveReport};

fn check(instance: &Instance, flavor: Flavor, algorithm: &'static str) -> Result<(), SolveError> {
    if instance.flavor() != flavor {
        return Err(SolveError::WrongFlavor {
            algorithm,
            flavor: instance.flavor(),
        });
    }
    Ok(())
}

fn from_package_view(report: SolveReport) -> SolveReport {
    let outcome = match report.outcome {
        Outcome::Solved(sol) => Outcome::Solved(Solution::from_package_paths(&sol.paths)),
        other => other,
    };
    SolveReport { outcome, ..report }
}

/// Optimal makespan for PERR: conflict-based search over packages with
/// swap conflicts legal, each swap realised as an exchange.
pub fn perr_solve_optimal(instance: &Instance, limits: &Limits) -> Result<SolveReport, SolveError> {
    check(instance, Flavor::Perr, "perr-opt")?;
    let report = cbs_solve(&instance.package_view(), MotionSemantics::EXCHANGE, limits)?;
    Ok(from_package_view(report))
}

/// Optimal makespan for K-PERR: conflict-based min-cost flow with one team
/// per package type and exchanges legal inside and across teams.
pub fn kperr_solve(instance: &Instance, limits: &Limits) -> Result<SolveReport, SolveError> {
    check(instance, Flavor::Kperr, "kperr")?;
    let report = cbm_solve_with(&instance.package_view(), MotionSemantics::EXCHANGE, limits)?;
    Ok(from_package_view(report))
}

/// Feasible PERR plan without optimality guarantee.
///
/// First tries prioritized planning: packages in index order, each taking
/// a minimum-arrival path around the packages already planned. If that
/// fails, falls back to a complete constructive routine that fills the
/// vertices of each component from the deepest (in breadth-first order)
/// inwards, bringing the owning package along a shortest path by
/// exchanges, or pushing an intruder out to the nearest empty vertex.
pub fn perr_solve_fast(instance: &Instance, limits: &Limits) -> Result<SolveReport, SolveError> {
    check(instance, Flavor::Perr, "perr-fast")?;
    let started = Instant::now();
    let ws = instance.workspace();
    let starts = instance.starts();
    let goals: Vec<VertexId> = (0..instance.num_movers())
        .map(|m| instance.fixed_target(m).expect("PERR groups are singletons"))
        .collect();
    let mut stats = SearchStats::default();
    let finish = |outcome, stats| SolveReport {
        outcome,
        stats,
        runtime_s: started.elapsed().as_secs_f64(),
    };
    let comp = ws.components();
    if starts.iter().zip(&goals).any(|(&s, &g)| comp[s] != comp[g]) {
        return Ok(finish(Outcome::Infeasible, stats));
    }
    let horizon = limits.horizon_for(instance);
    let paths = match prioritized(ws, &starts, &goals, horizon, &mut stats.low_level_expansions) {
        Some(paths) => paths,
        None => constructive(ws, &starts, &goals, &mut stats.low_level_expansions),
    };
    Ok(finish(Outcome::Solved(Solution::from_package_paths(&paths)), stats))
}

fn prioritized(
    ws: &Workspace,
    starts: &[VertexId],
    goals: &[VertexId],
    horizon: usize,
    expansions: &mut usize,
) -> Option<Vec<Path>> {
    let mut reserved = ConstraintTable::new();
    let mut paths: Vec<Path> = Vec::new();
    for (&s, &g) in starts.iter().zip(goals) {
        let distance = ws.distances_to(g);
        let q = SpaceTimeQuery {
            ws,
            start: s,
            goal: g,
            constraints: &reserved,
            distance: &distance,
            horizon,
        };
        let found = min_arrival(&q)?;
        *expansions += found.expansions;
        for t in 0..=horizon {
            reserved.add(ConstraintKind::Vertex(found.path[t.min(found.path.len() - 1)]), t);
        }
        paths.push(found.path);
    }
    crate::model::pad_paths(&mut paths, 0);
    Some(paths)
}

/// Complete routine over tokens that may swap across any edge or move into
/// an empty vertex, one action per timestep and component.
fn constructive(
    ws: &Workspace,
    starts: &[VertexId],
    goals: &[VertexId],
    expansions: &mut usize,
) -> Vec<Path> {
    let n = starts.len();
    let nv = ws.num_vertices();
    let comp = ws.components();
    let mut paths: Vec<Path> = starts.iter().map(|&s| vec![s]).collect();
    let count = comp.iter().copied().max().map_or(0, |c| c + 1);
    let mut occupant: Vec<Option<usize>> = vec![None; nv];
    for (p, &s) in starts.iter().enumerate() {
        occupant[s] = Some(p);
    }
    let mut owner: Vec<Option<usize>> = vec![None; nv];
    for (p, &g) in goals.iter().enumerate() {
        owner[g] = Some(p);
    }

    for c in 0..count {
        let members: Vec<VertexId> = (0..nv).filter(|&v| comp[v] == c).collect();
        if !members.iter().any(|&v| occupant[v].is_some()) {
            continue;
        }
        let mut pos: Vec<VertexId> = (0..n).map(|p| *paths[p].last().unwrap()).collect();
        let mut in_r = vec![false; nv];
        for &v in &members {
            in_r[v] = true;
        }
        // deepest first from the smallest vertex of the component
        let depth = ws.distances_from(members[0]);
        let mut order = members.clone();
        order.sort_by_key(|&v| (std::cmp::Reverse(depth[v]), v));
        // each step moves some packages of this component; others wait
        let mut steps: Vec<Vec<(usize, VertexId)>> = Vec::new();

        for &l in &order {
            match owner[l] {
                Some(p) => {
                    let route = bfs_path(ws, &in_r, pos[p], |v| v == l, expansions);
                    for w in route.windows(2) {
                        let (u, v) = (w[0], w[1]);
                        let mut step = vec![(p, v)];
                        if let Some(q) = occupant[v] {
                            step.push((q, u));
                            pos[q] = u;
                        }
                        occupant[u] = occupant[v];
                        occupant[v] = Some(p);
                        pos[p] = v;
                        steps.push(step);
                    }
                }
                None => {
                    if occupant[l].is_some() {
                        let route = bfs_path(ws, &in_r, l, |v| v != l && occupant[v].is_none(), expansions);
                        // shift every package on the route one vertex along it
                        let mut step = Vec::new();
                        for i in (0..route.len() - 1).rev() {
                            let q = occupant[route[i]].expect("route interior is occupied");
                            occupant[route[i + 1]] = Some(q);
                            pos[q] = route[i + 1];
                            step.push((q, route[i + 1]));
                        }
                        occupant[l] = None;
                        steps.push(step);
                    }
                }
            }
            in_r[l] = false;
        }
        for step in steps {
            for p in 0..n {
                let last = *paths[p].last().unwrap();
                paths[p].push(last);
            }
            for (p, v) in step {
                *paths[p].last_mut().unwrap() = v;
            }
        }
    }
    crate::model::pad_paths(&mut paths, 0);
    paths
}

/// Shortest path inside `allowed` from `from` to the first vertex
/// satisfying `done`, ties broken by adjacency order.
fn bfs_path(
    ws: &Workspace,
    allowed: &[bool],
    from: VertexId,
    done: impl Fn(VertexId) -> bool,
    expansions: &mut usize,
) -> Path {
    let mut prev = vec![usize::MAX; ws.num_vertices()];
    prev[from] = from;
    let mut queue = VecDeque::from([from]);
    while let Some(u) = queue.pop_front() {
        *expansions += 1;
        if done(u) {
            let mut path = vec![u];
            let mut v = u;
            while v != from {
                v = prev[v];
                path.push(v);
            }
            path.reverse();
            return path;
        }
        for &v in ws.neighbors(u) {
            if allowed[v] && prev[v] == usize::MAX {
                prev[v] = u;
                queue.push_back(v);
            }
        }
    }
    unreachable!("the remaining vertices stay connected and hold a free vertex or the target")
}
