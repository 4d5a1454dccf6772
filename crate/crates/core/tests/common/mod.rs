//! Instance suites and reference oracles shared by the integration tests.
//! The oracles here only use workspace adjacency and the joint-state BFS.

#![allow(dead_code)]

use std::collections::VecDeque;
use std::io::Write;
use std::sync::Arc;

use mapfgen::generate::{generate_instance, InstanceParams};
use mapfgen::highways::Highway;
use mapfgen::stn::{Kinematics, Schedule};
use mapfgen::{joint_state_oracle, Flavor, Instance, VertexId, Workspace};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

/// One line on stderr that survives the test harness' output capture.
pub fn report_line(text: &str) {
    let _ = writeln!(std::io::stderr(), "{text}");
}

/// `count` random grid instances: sides in `2..=max_side`, a mover count
/// in `movers`, blocked share in `0..=max_blocked` percent (steps of 5).
pub fn random_suite(
    count: usize,
    max_side: usize,
    movers: std::ops::RangeInclusive<usize>,
    max_blocked: u32,
    flavor: Flavor,
    groups: usize,
    salt: u64,
) -> Vec<(u64, Instance)> {
    let mut out = Vec::new();
    let mut seed = salt;
    while out.len() < count {
        seed += 1;
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let params = InstanceParams {
            width: rng.random_range(2..=max_side),
            height: rng.random_range(2..=max_side),
            blocked_percent: (rng.random_range(0..=max_blocked / 5) * 5) as f64,
            flavor,
            movers: rng.random_range(movers.clone()),
            groups,
        };
        if let Ok(inst) = generate_instance(&params, seed) {
            out.push((seed, inst));
        }
    }
    out
}

/// Optimal makespan by joint-state BFS; `None` if unsolvable.
pub fn oracle_makespan(instance: &Instance) -> Option<usize> {
    joint_state_oracle(instance, None)
        .expect("oracle scale")
        .map(|s| s.metrics().makespan)
}

fn permutations(items: &[VertexId]) -> Vec<Vec<VertexId>> {
    if items.len() <= 1 {
        return vec![items.to_vec()];
    }
    let mut out = Vec::new();
    for i in 0..items.len() {
        let mut rest = items.to_vec();
        let head = rest.remove(i);
        for mut tail in permutations(&rest) {
            tail.insert(0, head);
            out.push(tail);
        }
    }
    out
}

/// Minimum over every within-team target assignment of the optimal MAPF
/// makespan of the induced fixed-target instance.
pub fn assignment_oracle(instance: &Instance) -> Option<usize> {
    let ws = instance.workspace_arc().clone();
    let groups = instance.groups();
    let per_group: Vec<Vec<Vec<VertexId>>> = groups.iter().map(|g| permutations(&g.targets)).collect();
    let mut best: Option<usize> = None;
    let mut choice = vec![0usize; groups.len()];
    loop {
        let mut pairs = Vec::new();
        for (g, group) in groups.iter().enumerate() {
            for (k, &m) in group.members.iter().enumerate() {
                pairs.push((instance.movers()[m].start, per_group[g][choice[g]][k]));
            }
        }
        let mapf = Instance::mapf(ws.clone(), &pairs).expect("distinct starts and targets");
        if let Some(ms) = oracle_makespan(&mapf) {
            best = Some(best.map_or(ms, |b| b.min(ms)));
        }
        // odometer over the assignment choices
        let mut g = 0;
        loop {
            if g == groups.len() {
                return best;
            }
            choice[g] += 1;
            if choice[g] < per_group[g].len() {
                break;
            }
            choice[g] = 0;
            g += 1;
        }
    }
}

/// Unit-cost BFS distance from every vertex to `goal`.
pub fn bfs_to(ws: &Workspace, goal: VertexId) -> Vec<Option<usize>> {
    let mut reverse = vec![Vec::new(); ws.num_vertices()];
    for u in 0..ws.num_vertices() {
        for &v in ws.neighbors(u) {
            reverse[v].push(u);
        }
    }
    let mut dist = vec![None; ws.num_vertices()];
    dist[goal] = Some(0);
    let mut queue = VecDeque::from([goal]);
    while let Some(v) = queue.pop_front() {
        for &u in &reverse[v] {
            if dist[u].is_none() {
                dist[u] = Some(dist[v].unwrap() + 1);
                queue.push_back(u);
            }
        }
    }
    dist
}

/// Each undirected edge joins the highway with probability one half, in a
/// random direction.
pub fn random_highway(ws: &Workspace, seed: u64) -> Highway {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut edges = Vec::new();
    for (u, v) in ws.edges() {
        if u < v && rng.random_bool(0.5) {
            edges.push(if rng.random_bool(0.5) { (u, v) } else { (v, u) });
        }
    }
    Highway::new(ws, edges).expect("workspace edges")
}

pub fn open_grid(w: usize, h: usize) -> Arc<Workspace> {
    Arc::new(Workspace::from_grid(w, h, vec![false; w * h]))
}

/// Checks from events and realized times alone that two movers never hold
/// a vertex within the safety margin of each other.
pub fn separation_ok(schedule: &Schedule, realized: &[f64], kin: &Kinematics) -> bool {
    let mut visits: Vec<(usize, f64, f64, usize)> = Vec::new();
    for (i, e) in schedule.events.iter().enumerate() {
        let next = schedule
            .events
            .iter()
            .enumerate()
            .filter(|(_, f)| f.mover == e.mover && f.index > e.index)
            .min_by_key(|(_, f)| f.index)
            .map(|(j, _)| realized[j]);
        visits.push((e.vertex, realized[i], next.unwrap_or(f64::INFINITY), e.mover));
    }
    visits.sort_by(|a, b| (a.0, a.1).partial_cmp(&(b.0, b.1)).unwrap());
    visits.windows(2).all(|p| {
        let (a, b) = (p[0], p[1]);
        a.0 != b.0 || a.3 == b.3 || b.1 >= a.2 + kin.safety_distance / kin.v_max(a.3) - 1e-9
    })
}
