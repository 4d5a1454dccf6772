use thiserror::Error;

use super::network::FlowNetwork;
use crate::model::{Path, VertexId, Workspace};
use crate::search::ConstraintTable;

/// Forbidden vertex and edge occupations of one team.
pub type TeamConstraintSet = ConstraintTable;

#[derive(Debug, Error, PartialEq, Eq)]
pub enum NetworkError {
    #[error("vertex {0} is not in the workspace")]
    UnknownVertex(VertexId),
    #[error("starts and targets must be non-empty")]
    Empty,
}

/// Unit-capacity network over `(vertex, timestep)` for `t = 0..=T`.
///
/// Each `(v, t)` is split into an in-node and an out-node joined by a
/// capacity-one arc. Waits run `out(v, t) -> in(v, t + 1)`. With anti-swap
/// enabled every undirected edge `{u, v}` and step gets a gadget
/// `out(u, t), out(v, t) -> g1 -> g2 -> in(u, t + 1), in(v, t + 1)` whose
/// middle arc admits one unit, so opposite traversals cannot share a step;
/// otherwise moves are plain arcs in both directions.
///
/// Arc costs: 1 for every move and every wait except waits on one of the
/// network's own targets, which are free.
#[derive(Debug, Clone)]
pub struct TimeExpandedNetwork {
    pub horizon: usize,
    pub anti_swap: bool,
    net: FlowNetwork,
    source: usize,
    sink: usize,
    demand: usize,
    is_target: Vec<bool>,
    /// `(vertex, t)` of every in-node.
    label: Vec<Option<(VertexId, usize)>>,
}

/// Result of a flow computation decomposed into unit paths.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct FlowPaths {
    pub value: usize,
    pub cost: i64,
    /// One path per unit of flow, each of length `T + 1`, sorted by start.
    pub paths: Vec<Path>,
}

pub fn build_network(
    ws: &Workspace,
    starts: &[VertexId],
    targets: &[VertexId],
    horizon: usize,
    anti_swap: bool,
    constraints: &TeamConstraintSet,
) -> Result<TimeExpandedNetwork, NetworkError> {
    if starts.is_empty() || targets.is_empty() {
        return Err(NetworkError::Empty);
    }
    if let Some(&v) = starts.iter().chain(targets).find(|&&v| !ws.contains(v)) {
        return Err(NetworkError::UnknownVertex(v));
    }
    let nv = ws.num_vertices();
    let layers = horizon + 1;
    let mut net = FlowNetwork::new();
    let mut label = Vec::new();
    let source = net.add_node();
    let sink = net.add_node();
    label.extend([None, None]);
    // in(v, t) = 2 + 2 * (t * nv + v), out = in + 1
    for t in 0..layers {
        for v in 0..nv {
            net.add_node();
            net.add_node();
            label.push(Some((v, t)));
            label.push(None);
        }
    }
    let inn = |v: VertexId, t: usize| 2 + 2 * (t * nv + v);
    let out = |v: VertexId, t: usize| inn(v, t) + 1;
    let mut is_target = vec![false; nv];
    for &g in targets {
        is_target[g] = true;
    }

    for t in 0..layers {
        for v in 0..nv {
            if !constraints.vertex_blocked(v, t) {
                net.add_arc(inn(v, t), out(v, t), 1, 0);
            }
        }
    }
    for t in 0..horizon {
        for v in 0..nv {
            net.add_arc(out(v, t), inn(v, t + 1), 1, i64::from(!is_target[v]));
        }
        for (u, v) in ws.edges().filter(|&(u, v)| u < v) {
            let uv = !constraints.edge_blocked(u, v, t + 1);
            let vu = !constraints.edge_blocked(v, u, t + 1);
            if anti_swap {
                let g1 = net.add_node();
                let g2 = net.add_node();
                label.extend([None, None]);
                if uv {
                    net.add_arc(out(u, t), g1, 1, 1);
                }
                if vu {
                    net.add_arc(out(v, t), g1, 1, 1);
                }
                net.add_arc(g1, g2, 1, 0);
                if uv {
                    net.add_arc(g2, inn(v, t + 1), 1, 0);
                }
                if vu {
                    net.add_arc(g2, inn(u, t + 1), 1, 0);
                }
            } else {
                if uv {
                    net.add_arc(out(u, t), inn(v, t + 1), 1, 1);
                }
                if vu {
                    net.add_arc(out(v, t), inn(u, t + 1), 1, 1);
                }
            }
        }
    }
    for &s in starts {
        net.add_arc(source, inn(s, 0), 1, 0);
    }
    for &g in targets {
        if constraints.can_rest(g, horizon) {
            net.add_arc(out(g, horizon), sink, 1, 0);
        }
    }
    Ok(TimeExpandedNetwork {
        horizon,
        anti_swap,
        net,
        source,
        sink,
        demand: starts.len(),
        is_target,
        label,
    })
}

impl TimeExpandedNetwork {
    pub fn demand(&self) -> usize {
        self.demand
    }

    pub fn num_nodes(&self) -> usize {
        self.net.num_nodes()
    }

    /// Follows flow-carrying arcs from the source, always taking the first
    /// one in insertion order, and consumes the flow it walks.
    fn decompose(&self) -> Vec<Path> {
        let mut remaining: Vec<Vec<i64>> = (0..self.net.num_nodes())
            .map(|u| self.net.arcs(u).iter().map(|a| a.flow()).collect())
            .collect();
        let mut paths = Vec::new();
        loop {
            let mut u = self.source;
            let mut path = Vec::with_capacity(self.horizon + 1);
            while u != self.sink {
                let Some(i) = remaining[u].iter().position(|&f| f > 0) else {
                    break;
                };
                remaining[u][i] -= 1;
                u = self.net.arcs(u)[i].to;
                if let Some((v, _)) = self.label[u] {
                    path.push(v);
                }
            }
            if u != self.sink {
                break;
            }
            paths.push(path);
        }
        paths.sort();
        paths
    }
}

/// Maximum flow decomposed into unit paths.
pub fn max_flow(net: &mut TimeExpandedNetwork) -> FlowPaths {
    let value = net.net.max_flow(net.source, net.sink) as usize;
    let paths = net.decompose();
    let cost = paths.iter().map(|p| path_cost(net, p)).sum();
    FlowPaths { value, cost, paths }
}

/// Maximum flow of minimum total cost, decomposed into unit paths.
pub fn min_cost_flow(net: &mut TimeExpandedNetwork) -> FlowPaths {
    let (value, cost) = net.net.min_cost_flow(net.source, net.sink, net.demand as i64);
    let paths = net.decompose();
    FlowPaths {
        value: value as usize,
        cost,
        paths,
    }
}

fn path_cost(net: &TimeExpandedNetwork, path: &Path) -> i64 {
    path.windows(2)
        .map(|w| i64::from(w[0] != w[1] || !net.is_target[w[0]]))
        .sum()
}
