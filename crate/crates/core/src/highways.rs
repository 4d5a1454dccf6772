//! Highways: directed edge sets that bias planning through inflated
//! heuristics without changing true path costs.

use std::cmp::Reverse;
use std::collections::{BTreeMap, BTreeSet, BinaryHeap};

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::model::{Instance, MotionSemantics, ParseError, Solution, VertexId, Workspace};
use crate::search::low_level::OrdF64;
use crate::search::{ecbs_solve_guided, Limits, SolveError, SolveReport};

pub const HIGHWAY_HEADER: &str = "mapfgen-hwy v1";

#[derive(Debug, Error, PartialEq)]
pub enum HighwayError {
    #[error(transparent)]
    Parse(#[from] ParseError),
    #[error("highway edge {0} -> {1} is not a workspace edge")]
    NotAnEdge(VertexId, VertexId),
    #[error("vertex {0} is not in the workspace")]
    UnknownVertex(VertexId),
    #[error("inflation factor must be at least 1, got {0}")]
    BadFactor(f64),
    #[error("highway files need a grid workspace")]
    NoGrid,
}

/// Set of directed workspace edges.
#[derive(Debug, Clone, Default, PartialEq, Eq)]
pub struct Highway {
    edges: BTreeSet<(VertexId, VertexId)>,
}

impl Highway {
    pub fn new(
        ws: &Workspace,
        edges: impl IntoIterator<Item = (VertexId, VertexId)>,
    ) -> Result<Self, HighwayError> {
        let mut set = BTreeSet::new();
        for (u, v) in edges {
            if !ws.has_edge(u, v) {
                return Err(HighwayError::NotAnEdge(u, v));
            }
            set.insert((u, v));
        }
        Ok(Highway { edges: set })
    }

    pub fn contains(&self, u: VertexId, v: VertexId) -> bool {
        self.edges.contains(&(u, v))
    }

    pub fn len(&self) -> usize {
        self.edges.len()
    }

    pub fn is_empty(&self) -> bool {
        self.edges.is_empty()
    }

    pub fn edges(&self) -> impl Iterator<Item = (VertexId, VertexId)> + '_ {
        self.edges.iter().copied()
    }

    /// The same edges traversed the other way.
    pub fn reversed(&self) -> Highway {
        Highway {
            edges: self.edges.iter().map(|&(u, v)| (v, u)).collect(),
        }
    }
}

/// Parses `mapfgen-hwy v1` text: one `edge x1 y1 x2 y2` line per directed
/// edge; blank lines and `#` comments are ignored.
pub fn parse_highway(text: &str, ws: &Workspace) -> Result<Highway, HighwayError> {
    let mut lines = text.lines().enumerate();
    let header = lines.by_ref().find(|(_, l)| {
        let l = l.trim();
        !l.is_empty() && !l.starts_with('#')
    });
    match header {
        Some((_, l)) if l.trim() == HIGHWAY_HEADER => {}
        Some((i, _)) => {
            return Err(ParseError::new(i + 1, 1, format!("expected header `{HIGHWAY_HEADER}`")).into())
        }
        None => return Err(ParseError::new(1, 1, "empty highway file").into()),
    }
    let mut edges = Vec::new();
    for (i, line) in lines {
        let content = line.split('#').next().unwrap_or("").trim();
        if content.is_empty() {
            continue;
        }
        let fields: Vec<&str> = content.split_whitespace().collect();
        if fields[0] != "edge" {
            return Err(ParseError::new(i + 1, 1, format!("unknown record `{}`", fields[0])).into());
        }
        if fields.len() != 5 {
            return Err(ParseError::new(i + 1, 1, "edge needs four coordinates").into());
        }
        let mut xy = [0i32; 4];
        for (k, f) in fields[1..].iter().enumerate() {
            xy[k] = f.parse().map_err(|_| {
                let col = line.find(f).map_or(1, |c| c + 1);
                ParseError::new(i + 1, col, format!("bad coordinate `{f}`"))
            })?;
        }
        let cell = |x: i32, y: i32| {
            ws.vertex_at((x, y))
                .ok_or_else(|| ParseError::new(i + 1, 1, format!("cell ({x}, {y}) is not free")))
        };
        let (u, v) = (cell(xy[0], xy[1])?, cell(xy[2], xy[3])?);
        if !ws.has_edge(u, v) {
            return Err(ParseError::new(i + 1, 1, "cells are not adjacent").into());
        }
        edges.push((u, v));
    }
    Highway::new(ws, edges)
}

pub fn write_highway(hw: &Highway, ws: &Workspace) -> Result<String, HighwayError> {
    if ws.grid().is_none() {
        return Err(HighwayError::NoGrid);
    }
    let mut out = format!("{HIGHWAY_HEADER}\n");
    for (u, v) in hw.edges() {
        let ((x1, y1), (x2, y2)) = (ws.cell(u), ws.cell(v));
        out.push_str(&format!("edge {x1} {y1} {x2} {y2}\n"));
    }
    Ok(out)
}

#[derive(Debug, Clone, PartialEq)]
pub struct InflatedHeuristicTable {
    pub goal: VertexId,
    pub w: f64,
    /// Cost-to-goal per vertex; infinite where the goal is unreachable.
    pub values: Vec<f64>,
}

/// Backward uniform-cost search from `goal` in which highway edges cost 1
/// and every other edge costs `w`.
pub fn build_inflated_heuristic(
    ws: &Workspace,
    goal: VertexId,
    hw: &Highway,
    w: f64,
) -> Result<InflatedHeuristicTable, HighwayError> {
    if !ws.contains(goal) {
        return Err(HighwayError::UnknownVertex(goal));
    }
    if !(w >= 1.0) {
        return Err(HighwayError::BadFactor(w));
    }
    let reverse = ws.reverse_adjacency();
    let mut values = vec![f64::INFINITY; ws.num_vertices()];
    values[goal] = 0.0;
    let mut heap = BinaryHeap::from([Reverse((OrdF64(0.0), goal))]);
    while let Some(Reverse((OrdF64(d), v))) = heap.pop() {
        if d > values[v] {
            continue;
        }
        for &u in &reverse[v] {
            let cost = if hw.contains(u, v) { 1.0 } else { w };
            if d + cost < values[u] {
                values[u] = d + cost;
                heap.push(Reverse((OrdF64(d + cost), u)));
            }
        }
    }
    Ok(InflatedHeuristicTable { goal, w, values })
}

/// Fraction of moves (not waits) that traverse a highway edge; `None` when
/// nothing moves.
pub fn highway_adherence(sol: &Solution, hw: &Highway) -> Option<f64> {
    let (mut on, mut total) = (0usize, 0usize);
    for p in &sol.paths {
        for w in p.windows(2) {
            if w[0] != w[1] {
                total += 1;
                on += usize::from(hw.contains(w[0], w[1]));
            }
        }
    }
    (total > 0).then(|| on as f64 / total as f64)
}

#[derive(Debug, Clone, PartialEq)]
pub struct HighwayReport {
    pub report: SolveReport,
    pub adherence: Option<f64>,
}

/// Focal search whose low level breaks ties by the `w1`-inflated highway
/// heuristic. The focal bound is `w1 * w2`, so the makespan is at most
/// `w1 * w2` times optimal.
pub fn ecbs_highway_solve(
    instance: &Instance,
    hw: &Highway,
    w1: f64,
    w2: f64,
    limits: &Limits,
) -> Result<HighwayReport, SolveError> {
    if !(w1 >= 1.0) {
        return Err(SolveError::BadFactor(w1));
    }
    if !(w2 >= 1.0) {
        return Err(SolveError::BadFactor(w2));
    }
    let ws = instance.workspace();
    let mut guidance = Vec::with_capacity(instance.num_movers());
    for m in 0..instance.num_movers() {
        let goal = instance.fixed_target(m).ok_or(SolveError::WrongFlavor {
            algorithm: "ecbs-highway",
            flavor: instance.flavor(),
        })?;
        let table = build_inflated_heuristic(ws, goal, hw, w1).expect("goal and factor checked");
        guidance.push(table.values);
    }
    let report = ecbs_solve_guided(instance, guidance, w1 * w2, MotionSemantics::STANDARD, limits)?;
    let adherence = report.solution().and_then(|s| highway_adherence(s, hw));
    Ok(HighwayReport { report, adherence })
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct HighwayParams {
    /// A direction is kept when it carries strictly more than this share of
    /// an edge's traffic.
    pub ratio: f64,
    /// Both endpoints of a kept edge have at most this many neighbours.
    pub corridor_degree: usize,
}

impl Default for HighwayParams {
    fn default() -> Self {
        HighwayParams {
            ratio: 0.7,
            corridor_degree: 3,
        }
    }
}

/// Direction-histogram highway: counts how often each directed edge is
/// used by the movers' individual shortest paths and keeps the dominant
/// direction of corridor edges. Team members are paired with their team's
/// targets in order.
pub fn generate_highways(ws: &Workspace, instance: &Instance, params: &HighwayParams) -> Highway {
    let mut counts: BTreeMap<(VertexId, VertexId), usize> = BTreeMap::new();
    for g in instance.groups() {
        for (&m, &target) in g.members.iter().zip(&g.targets) {
            if let Some(path) = ws.shortest_path(instance.movers()[m].start, target) {
                for w in path.windows(2) {
                    *counts.entry((w[0], w[1])).or_default() += 1;
                }
            }
        }
    }
    let mut edges = Vec::new();
    for (u, v) in ws.edges().filter(|&(u, v)| u < v) {
        let forward = counts.get(&(u, v)).copied().unwrap_or(0);
        let backward = counts.get(&(v, u)).copied().unwrap_or(0);
        let total = forward + backward;
        if total == 0
            || ws.degree(u) > params.corridor_degree
            || ws.degree(v) > params.corridor_degree
        {
            continue;
        }
        let dominant = forward.max(backward);
        if dominant as f64 > params.ratio * total as f64 {
            edges.push(if forward >= backward { (u, v) } else { (v, u) });
        }
    }
    Highway::new(ws, edges).expect("edges come from the workspace")
}
