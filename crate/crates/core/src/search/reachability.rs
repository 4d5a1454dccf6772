//! Exact joint-configuration reachability for small instances.
//!
//! Conflict-driven search explores an exponential number of constraint
//! sets before it can declare an instance infeasible (three agents on a
//! ring that must change their cyclic order already exhaust large node
//! budgets). When the joint configuration space is small we decide
//! reachability up front instead.

use std::collections::{HashSet, VecDeque};

use crate::model::{Instance, MotionSemantics, VertexId};

/// Largest number of joint configurations the pre-check will explore.
pub const REACHABILITY_STATE_LIMIT: u64 = 250_000;

/// `Some(reachable)` when the configuration space is small enough to
/// decide, `None` otherwise. Makespan is ignored.
pub fn goal_reachable(instance: &Instance, semantics: MotionSemantics) -> Option<bool> {
    let ws = instance.workspace();
    let nv = ws.num_vertices() as u64;
    let n = instance.num_movers();
    let mut space: u64 = 1;
    for k in 0..n as u64 {
        space = space.saturating_mul(nv.saturating_sub(k));
        if space > REACHABILITY_STATE_LIMIT {
            return None;
        }
    }
    let goals: Vec<(Vec<usize>, Vec<VertexId>)> = instance
        .groups()
        .iter()
        .map(|g| {
            let mut t = g.targets.clone();
            t.sort_unstable();
            (g.members.clone(), t)
        })
        .collect();
    let is_goal = |pos: &[VertexId]| {
        goals.iter().all(|(members, targets)| {
            let mut at: Vec<VertexId> = members.iter().map(|&m| pos[m]).collect();
            at.sort_unstable();
            at == *targets
        })
    };

    let start = instance.starts();
    let mut seen: HashSet<Vec<VertexId>> = HashSet::new();
    let mut queue = VecDeque::new();
    seen.insert(start.clone());
    queue.push_back(start);
    let mut next = Vec::with_capacity(n);
    while let Some(cur) = queue.pop_front() {
        if is_goal(&cur) {
            return Some(true);
        }
        let mut found = Vec::new();
        successors(instance, semantics, &cur, &mut next, &mut found);
        for s in found {
            if seen.insert(s.clone()) {
                queue.push_back(s);
            }
        }
    }
    Some(false)
}

fn successors(
    instance: &Instance,
    semantics: MotionSemantics,
    cur: &[VertexId],
    next: &mut Vec<VertexId>,
    out: &mut Vec<Vec<VertexId>>,
) {
    let i = next.len();
    if i == cur.len() {
        out.push(next.clone());
        return;
    }
    let here = cur[i];
    let ws = instance.workspace();
    for v in std::iter::once(here).chain(ws.neighbors(here).iter().copied()) {
        let clash = (0..i).any(|j| {
            next[j] == v || (!semantics.allow_swap && v != here && cur[j] == v && next[j] == here)
        });
        if clash {
            continue;
        }
        next.push(v);
        successors(instance, semantics, cur, next, out);
        next.pop();
    }
}
