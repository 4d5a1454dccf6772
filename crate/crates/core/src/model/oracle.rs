//! Exhaustive breadth-first search over joint configurations.
//!
//! Used as the independent reference for every solver: it shares nothing
//! with the search or flow code beyond the workspace adjacency.

use std::collections::HashMap;

use thiserror::Error;

use super::instance::Instance;
use super::solution::{Path, Solution};
use super::workspace::VertexId;

pub const ORACLE_MAX_MOVERS: usize = 4;
pub const ORACLE_MAX_VERTICES: usize = 36;

#[derive(Debug, Error, PartialEq)]
pub enum OracleError {
    #[error("oracle scale exceeded: {movers} movers on {vertices} vertices (limit {ORACLE_MAX_MOVERS} movers, {ORACLE_MAX_VERTICES} vertices)")]
    ScaleExceeded { movers: usize, vertices: usize },
}

struct Joint<'a> {
    instance: &'a Instance,
    base: u64,
    n: usize,
    allow_swap: bool,
    goal_sets: Vec<(Vec<usize>, Vec<VertexId>)>,
}

impl Joint<'_> {
    fn encode(&self, pos: &[VertexId]) -> u64 {
        pos.iter().rev().fold(0, |acc, &v| acc * self.base + v as u64)
    }

    fn decode(&self, mut code: u64, out: &mut Vec<VertexId>) {
        out.clear();
        for _ in 0..self.n {
            out.push((code % self.base) as VertexId);
            code /= self.base;
        }
    }

    fn is_goal(&self, pos: &[VertexId]) -> bool {
        self.goal_sets.iter().all(|(members, targets)| {
            let mut at: Vec<VertexId> = members.iter().map(|&m| pos[m]).collect();
            at.sort_unstable();
            at == *targets
        })
    }

    fn successors(&self, cur: &[VertexId], next: &mut Vec<VertexId>, out: &mut Vec<u64>) {
        let i = next.len();
        if i == self.n {
            out.push(self.encode(next));
            return;
        }
        let ws = self.instance.workspace();
        let here = cur[i];
        let options = std::iter::once(here).chain(ws.neighbors(here).iter().copied());
        'option: for v in options {
            for j in 0..i {
                if next[j] == v {
                    continue 'option;
                }
                if !self.allow_swap && v != here && cur[j] == v && next[j] == here {
                    continue 'option;
                }
            }
            next.push(v);
            self.successors(cur, next, out);
            next.pop();
        }
    }
}

/// Minimum-makespan solution by BFS over joint positions, or `None` when no
/// goal configuration is reachable within `horizon_cap` steps (unbounded if
/// `None`). Package flavors search over package positions with swaps legal.
pub fn joint_state_oracle(
    instance: &Instance,
    horizon_cap: Option<usize>,
) -> Result<Option<Solution>, OracleError> {
    let n = instance.num_movers();
    let vertices = instance.workspace().num_vertices();
    if n > ORACLE_MAX_MOVERS || vertices > ORACLE_MAX_VERTICES {
        return Err(OracleError::ScaleExceeded { movers: n, vertices });
    }
    let goal_sets = instance
        .groups()
        .iter()
        .map(|g| {
            let mut t = g.targets.clone();
            t.sort_unstable();
            (g.members.clone(), t)
        })
        .collect();
    let joint = Joint {
        instance,
        base: vertices as u64,
        n,
        allow_swap: instance.semantics().allow_swap,
        goal_sets,
    };

    let start_pos = instance.starts();
    let start = joint.encode(&start_pos);
    let mut parent: HashMap<u64, u64> = HashMap::new();
    parent.insert(start, start);
    let mut goal = joint.is_goal(&start_pos).then_some(start);
    let mut frontier = vec![start];
    let mut depth = 0;
    let mut pos = Vec::with_capacity(n);
    let mut next = Vec::with_capacity(n);
    let mut succ = Vec::new();
    while goal.is_none() && !frontier.is_empty() && horizon_cap.is_none_or(|cap| depth < cap) {
        let mut layer = Vec::new();
        'expand: for &code in &frontier {
            joint.decode(code, &mut pos);
            succ.clear();
            joint.successors(&pos, &mut next, &mut succ);
            for &s in &succ {
                if parent.contains_key(&s) {
                    continue;
                }
                parent.insert(s, code);
                let mut p = Vec::with_capacity(n);
                joint.decode(s, &mut p);
                if joint.is_goal(&p) {
                    goal = Some(s);
                    break 'expand;
                }
                layer.push(s);
            }
        }
        frontier = layer;
        depth += 1;
    }
    let Some(goal) = goal else {
        return Ok(None);
    };

    let mut chain = vec![goal];
    while let Some(&p) = parent.get(chain.last().unwrap()) {
        if p == *chain.last().unwrap() {
            break;
        }
        chain.push(p);
    }
    chain.reverse();
    let mut paths: Vec<Path> = vec![Vec::with_capacity(chain.len()); n];
    for &code in &chain {
        joint.decode(code, &mut pos);
        for (i, &v) in pos.iter().enumerate() {
            paths[i].push(v);
        }
    }
    Ok(Some(Solution::from_entity_paths(instance, paths)))
}
