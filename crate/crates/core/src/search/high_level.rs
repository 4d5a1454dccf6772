//! Conflict tree shared by CBS, ECBS, CBM and the package solvers.
//!
//! A *unit* is what receives constraints: a single agent for CBS, a whole
//! team for CBM. Each unit owns one or more *entities* (the things that
//! occupy vertices). Conflicts are detected between entities of different
//! units and resolved by constraining both units.

use std::collections::{BTreeMap, BTreeSet};
use std::sync::Arc;
use std::time::Instant;

use super::constraint::{Constraint, ConstraintKind, ConstraintTable};
use super::low_level::scaled_bound;
use super::{Limits, SearchStats};
use crate::model::{last_motion, Path, VertexId};

pub(crate) struct UnitPlan {
    /// One path per entity of the unit, in the unit's entity order. Each
    /// path ends where the entity rests forever.
    pub paths: Vec<Path>,
    /// Lower bound on the unit's cost under its constraints.
    pub lb: usize,
}

pub(crate) trait UnitPlanner {
    fn num_units(&self) -> usize;
    fn entities(&self, unit: usize) -> &[usize];
    fn num_entities(&self) -> usize;
    /// Plans `unit`. `paths` holds the current paths of every entity (the
    /// unit's own entries are stale) and `floor` is the largest cost among
    /// the other units, which the planner may use freely.
    fn plan(
        &mut self,
        unit: usize,
        constraints: &ConstraintTable,
        paths: &[Arc<Path>],
        floor: usize,
    ) -> Option<UnitPlan>;
    /// Total low-level expansions so far.
    fn expansions(&self) -> usize;
}

pub(crate) struct EngineConfig {
    /// Suboptimality factor applied to the best lower bound.
    pub w: f64,
    /// Whether opposite traversals of an edge are conflicts.
    pub swap_conflicts: bool,
}

pub(crate) enum EngineResult {
    Solved(Vec<Path>),
    Infeasible,
    BudgetExhausted,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
enum Conflict {
    Vertex { a: usize, b: usize, v: VertexId, t: usize },
    /// `a` moves `u -> v` and `b` moves `v -> u`, arriving at `t`.
    Swap { a: usize, b: usize, u: VertexId, v: VertexId, t: usize },
}

struct Node {
    parent: Option<usize>,
    constraint: Option<Constraint>,
    depth: usize,
    paths: Vec<Arc<Path>>,
    unit_cost: Vec<usize>,
    unit_lb: Vec<usize>,
    cost: usize,
    lb: usize,
    conflicts: usize,
    first: Option<Conflict>,
}

fn at(p: &Path, t: usize) -> VertexId {
    p[t.min(p.len() - 1)]
}

/// Number of conflicting entity pairs across units and the earliest
/// conflict (vertex conflicts at `t` before swaps arriving at `t + 1`).
fn find_conflicts(
    paths: &[Arc<Path>],
    unit_of: &[usize],
    swap_conflicts: bool,
) -> (usize, Option<Conflict>) {
    let horizon = paths.iter().map(|p| p.len() - 1).max().unwrap_or(0);
    let mut pairs: BTreeSet<(usize, usize)> = BTreeSet::new();
    let mut first = None;
    let mut occupied: BTreeMap<VertexId, Vec<usize>> = BTreeMap::new();
    let mut moves: BTreeMap<(VertexId, VertexId), Vec<usize>> = BTreeMap::new();
    for t in 0..=horizon {
        occupied.clear();
        for (e, p) in paths.iter().enumerate() {
            occupied.entry(at(p, t)).or_default().push(e);
        }
        for (&v, es) in &occupied {
            for (i, &a) in es.iter().enumerate() {
                for &b in &es[i + 1..] {
                    if unit_of[a] != unit_of[b] {
                        pairs.insert((a, b));
                        first.get_or_insert(Conflict::Vertex { a, b, v, t });
                    }
                }
            }
        }
        if swap_conflicts && t < horizon {
            moves.clear();
            for (e, p) in paths.iter().enumerate() {
                let (u, v) = (at(p, t), at(p, t + 1));
                if u != v {
                    moves.entry((u, v)).or_default().push(e);
                }
            }
            for (&(u, v), es) in &moves {
                if u > v {
                    continue;
                }
                let Some(back) = moves.get(&(v, u)) else {
                    continue;
                };
                for &a in es {
                    for &b in back {
                        if unit_of[a] != unit_of[b] {
                            pairs.insert((a.min(b), a.max(b)));
                            first.get_or_insert(Conflict::Swap { a, b, u, v, t: t + 1 });
                        }
                    }
                }
            }
        }
    }
    (pairs.len(), first)
}

pub(crate) struct Engine<'p, P: UnitPlanner> {
    planner: &'p mut P,
    config: EngineConfig,
    nodes: Vec<Node>,
    unit_of: Vec<usize>,
    pub stats: SearchStats,
}

impl<'p, P: UnitPlanner> Engine<'p, P> {
    pub fn new(planner: &'p mut P, config: EngineConfig) -> Self {
        let mut unit_of = vec![0; planner.num_entities()];
        for u in 0..planner.num_units() {
            for &e in planner.entities(u) {
                unit_of[e] = u;
            }
        }
        Engine {
            planner,
            config,
            nodes: Vec::new(),
            unit_of,
            stats: SearchStats::default(),
        }
    }

    fn constraints_of(&self, mut node: Option<usize>, unit: usize) -> ConstraintTable {
        let mut table = ConstraintTable::new();
        while let Some(i) = node {
            let n = &self.nodes[i];
            if let Some(c) = n.constraint {
                if c.unit == unit {
                    table.add(c.kind, c.time);
                }
            }
            node = n.parent;
        }
        table
    }

    fn finish(&mut self, mut node: Node) -> usize {
        node.cost = node.unit_cost.iter().copied().max().unwrap_or(0);
        node.lb = node.unit_lb.iter().copied().max().unwrap_or(0);
        let (conflicts, first) = find_conflicts(&node.paths, &self.unit_of, self.config.swap_conflicts);
        node.conflicts = conflicts;
        node.first = first;
        self.nodes.push(node);
        self.stats.high_level_generated += 1;
        self.nodes.len() - 1
    }

    fn unit_cost(&self, unit: usize, paths: &[Arc<Path>]) -> usize {
        self.planner
            .entities(unit)
            .iter()
            .map(|&e| last_motion(&paths[e]))
            .max()
            .unwrap_or(0)
    }

    fn root(&mut self) -> Option<usize> {
        let units = self.planner.num_units();
        let mut paths: Vec<Arc<Path>> = vec![Arc::new(Vec::new()); self.planner.num_entities()];
        let mut unit_cost = vec![0; units];
        let mut unit_lb = vec![0; units];
        let empty = ConstraintTable::new();
        let mut floor = 0;
        for u in 0..units {
            let plan = self.planner.plan(u, &empty, &paths, floor)?;
            for (&e, p) in self.planner.entities(u).iter().zip(plan.paths) {
                paths[e] = Arc::new(p);
            }
            unit_cost[u] = self.unit_cost(u, &paths);
            unit_lb[u] = plan.lb;
            floor = floor.max(unit_cost[u]);
        }
        let id = self.finish(Node {
            parent: None,
            constraint: None,
            depth: 0,
            paths,
            unit_cost,
            unit_lb,
            cost: 0,
            lb: 0,
            conflicts: 0,
            first: None,
        });
        self.stats.root_conflicts = self.nodes[id].conflicts;
        Some(id)
    }

    fn child(&mut self, parent: usize, constraint: Constraint) -> Option<usize> {
        let unit = constraint.unit;
        let mut table = self.constraints_of(Some(parent), unit);
        table.add(constraint.kind, constraint.time);
        let p = &self.nodes[parent];
        let floor = (0..self.planner.num_units())
            .filter(|&u| u != unit)
            .map(|u| p.unit_cost[u])
            .max()
            .unwrap_or(0);
        let mut paths = p.paths.clone();
        let mut unit_cost = p.unit_cost.clone();
        let mut unit_lb = p.unit_lb.clone();
        let depth = p.depth + 1;
        let plan = self.planner.plan(unit, &table, &paths, floor)?;
        for (&e, path) in self.planner.entities(unit).iter().zip(plan.paths) {
            paths[e] = Arc::new(path);
        }
        unit_cost[unit] = self.unit_cost(unit, &paths);
        unit_lb[unit] = plan.lb;
        Some(self.finish(Node {
            parent: Some(parent),
            constraint: Some(constraint),
            depth,
            paths,
            unit_cost,
            unit_lb,
            cost: 0,
            lb: 0,
            conflicts: 0,
            first: None,
        }))
    }

    fn branch(&self, conflict: Conflict) -> [Constraint; 2] {
        let unit = |e: usize| self.unit_of[e];
        match conflict {
            Conflict::Vertex { a, b, v, t } => [
                Constraint { unit: unit(a), kind: ConstraintKind::Vertex(v), time: t },
                Constraint { unit: unit(b), kind: ConstraintKind::Vertex(v), time: t },
            ],
            Conflict::Swap { a, b, u, v, t } => [
                Constraint { unit: unit(a), kind: ConstraintKind::Edge(u, v), time: t },
                Constraint { unit: unit(b), kind: ConstraintKind::Edge(v, u), time: t },
            ],
        }
    }

    /// Focal best-first search over the conflict tree. With `w = 1` every
    /// node in the focal list has cost equal to the best lower bound, so
    /// the first conflict-free node popped is optimal.
    pub fn run(&mut self, limits: &Limits, started: Instant) -> EngineResult {
        let result = self.search(limits, started);
        self.stats.low_level_expansions = self.planner.expansions();
        result
    }

    fn search(&mut self, limits: &Limits, started: Instant) -> EngineResult {
        let Some(root) = self.root() else {
            return EngineResult::Infeasible;
        };
        // open: (lb, id); focal: (conflicts, constraints, id); pending: (cost, id)
        let mut open: BTreeSet<(usize, usize)> = BTreeSet::new();
        let mut focal: BTreeSet<(usize, usize, usize)> = BTreeSet::new();
        let mut pending: BTreeSet<(usize, usize)> = BTreeSet::new();
        let mut threshold = 0;
        let focal_key = |n: &Node, id| (n.conflicts, n.depth, id);

        let insert = |id: usize,
                          nodes: &[Node],
                          threshold: usize,
                          open: &mut BTreeSet<(usize, usize)>,
                          focal: &mut BTreeSet<(usize, usize, usize)>,
                          pending: &mut BTreeSet<(usize, usize)>| {
            let n = &nodes[id];
            open.insert((n.lb, id));
            if n.cost <= threshold {
                focal.insert(focal_key(n, id));
            } else {
                pending.insert((n.cost, id));
            }
        };
        insert(root, &self.nodes, threshold, &mut open, &mut focal, &mut pending);

        loop {
            let Some(&(lb_min, _)) = open.first() else {
                return EngineResult::Infeasible;
            };
            let new_threshold = scaled_bound(self.config.w, lb_min);
            if new_threshold > threshold || focal.is_empty() {
                threshold = threshold.max(new_threshold);
                while let Some(&(cost, id)) = pending.first() {
                    if cost > threshold {
                        break;
                    }
                    pending.pop_first();
                    focal.insert(focal_key(&self.nodes[id], id));
                }
            }
            if focal.is_empty() {
                // cost <= w * lb keeps the best node in focal; this guards
                // planners that break that contract
                let (_, id) = open.first().copied().expect("open is not empty");
                pending.remove(&(self.nodes[id].cost, id));
                focal.insert(focal_key(&self.nodes[id], id));
            }
            let (_, _, id) = focal.pop_first().expect("focal is not empty");
            open.remove(&(self.nodes[id].lb, id));

            let Some(conflict) = self.nodes[id].first else {
                let paths = self.nodes[id].paths.iter().map(|p| p.as_ref().clone()).collect();
                return EngineResult::Solved(paths);
            };
            if self.stats.high_level_expanded >= limits.max_nodes || limits.out_of_time(started) {
                return EngineResult::BudgetExhausted;
            }
            self.stats.high_level_expanded += 1;
            for c in self.branch(conflict) {
                if let Some(child) = self.child(id, c) {
                    insert(child, &self.nodes, threshold, &mut open, &mut focal, &mut pending);
                }
            }
            // expanded nodes keep only what descendants need
            self.nodes[id].paths = Vec::new();
        }
    }
}
