use serde::{Deserialize, Serialize};

use super::network::{StnConstraint, TemporalNetwork};
use super::StnError;
use crate::model::VertexId;

const EPS: f64 = 1e-9;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ScheduledEvent {
    pub mover: usize,
    pub index: usize,
    pub vertex: VertexId,
    pub earliest_s: f64,
    /// `None` when unbounded.
    pub latest_s: Option<f64>,
    pub slack_s: Option<f64>,
}

/// Earliest and latest entry times of every event, together with the
/// constraints they were computed from. Constraint endpoints index into
/// `events`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Schedule {
    pub events: Vec<ScheduledEvent>,
    pub constraints: Vec<StnConstraint>,
}

impl Schedule {
    /// Latest earliest time over all events.
    pub fn makespan_s(&self) -> f64 {
        self.events.iter().map(|e| e.earliest_s).fold(0.0, f64::max)
    }

    /// Smallest finite slack, `None` if every event is unbounded.
    pub fn min_slack_s(&self) -> Option<f64> {
        self.events
            .iter()
            .filter_map(|e| e.slack_s)
            .min_by(|a, b| a.total_cmp(b))
    }

    pub fn to_json(&self) -> String {
        serde_json::to_string_pretty(self).expect("schedule serializes") + "\n"
    }

    pub fn from_json(text: &str) -> Result<Schedule, serde_json::Error> {
        serde_json::from_str(text)
    }
}

/// Bellman-Ford from node 0 over `arcs`. On a negative cycle returns its
/// nodes in traversal order.
fn shortest_from(nodes: usize, arcs: &[(usize, usize, f64)]) -> Result<Vec<f64>, Vec<usize>> {
    let mut dist = vec![f64::INFINITY; nodes];
    let mut pred = vec![usize::MAX; nodes];
    dist[0] = 0.0;
    let mut last_relaxed = None;
    for _ in 0..nodes {
        last_relaxed = None;
        for &(u, v, w) in arcs {
            if dist[u].is_finite() && dist[u] + w < dist[v] - EPS {
                dist[v] = dist[u] + w;
                pred[v] = u;
                last_relaxed = Some(v);
            }
        }
        if last_relaxed.is_none() {
            return Ok(dist);
        }
    }
    // a node relaxed in round `nodes` lies on or behind a negative cycle;
    // walking back `nodes` predecessors lands on the cycle itself
    let mut v = last_relaxed.expect("relaxed in the last round");
    for _ in 0..nodes {
        v = pred[v];
    }
    let mut cycle = vec![v];
    let mut u = pred[v];
    while u != v && cycle.len() <= nodes {
        cycle.push(u);
        u = pred[u];
    }
    cycle.reverse();
    Err(cycle)
}

/// Earliest times are longest paths from the global start over lower
/// bounds; latest times are shortest paths over upper bounds in the
/// distance graph. Fails with a cycle witness when the network is
/// inconsistent.
pub fn compute_schedule(stn: &TemporalNetwork) -> Result<Schedule, StnError> {
    let n = stn.events.len() + 1;
    let node = |e: Option<usize>| e.map_or(0, |e| e + 1);
    for c in &stn.constraints {
        if c.to >= stn.events.len() || c.from.is_some_and(|f| f >= stn.events.len()) {
            return Err(StnError::DanglingConstraint);
        }
        if !c.lb.is_finite() || c.ub.is_some_and(|ub| ub < c.lb) {
            return Err(StnError::BadBounds { lb: c.lb, ub: c.ub });
        }
    }
    // distance graph: a -> b with ub, b -> a with -lb
    let mut forward = Vec::new();
    for c in &stn.constraints {
        let (a, b) = (node(c.from), c.to + 1);
        if let Some(ub) = c.ub {
            forward.push((a, b, ub));
        }
        forward.push((b, a, -c.lb));
    }
    let witness = |cycle: Vec<usize>| StnError::Inconsistent {
        cycle: cycle.into_iter().map(|v| v.checked_sub(1)).collect(),
    };
    let latest = shortest_from(n, &forward).map_err(witness)?;
    let backward: Vec<_> = forward.iter().map(|&(a, b, w)| (b, a, w)).collect();
    let to_origin = shortest_from(n, &backward).map_err(witness)?;

    let events = stn
        .events
        .iter()
        .enumerate()
        .map(|(e, ev)| {
            // unconstrained events are free to start at time zero
            let earliest = if to_origin[e + 1].is_finite() {
                (-to_origin[e + 1]).max(0.0)
            } else {
                0.0
            };
            let latest_s = latest[e + 1].is_finite().then_some(latest[e + 1]);
            ScheduledEvent {
                mover: ev.mover,
                index: ev.index,
                vertex: ev.vertex,
                earliest_s: earliest,
                latest_s,
                slack_s: latest_s.map(|l| (l - earliest).max(0.0)),
            }
        })
        .collect();
    Ok(Schedule {
        events,
        constraints: stn.constraints.clone(),
    })
}
