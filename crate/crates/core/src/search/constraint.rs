use std::collections::{HashMap, HashSet};

use crate::model::VertexId;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum ConstraintKind {
    /// Forbid occupying the vertex at `time`.
    Vertex(VertexId),
    /// Forbid traversing `from -> to` and arriving at `time` (so `time >= 1`).
    Edge(VertexId, VertexId),
}

/// Forbids one unit (a mover, a package, or a whole team) from a location
/// at one timestep.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct Constraint {
    pub unit: usize,
    pub kind: ConstraintKind,
    pub time: usize,
}

/// Lookup structure for the constraints that apply to one unit.
#[derive(Debug, Clone, Default)]
pub struct ConstraintTable {
    vertex: HashSet<(VertexId, usize)>,
    edge: HashSet<(VertexId, VertexId, usize)>,
    latest_at: HashMap<VertexId, usize>,
    max_time: usize,
}

impl ConstraintTable {
    pub fn new() -> Self {
        Self::default()
    }

    /// Table for `unit` built from a mixed constraint list.
    pub fn for_unit<'a>(unit: usize, constraints: impl IntoIterator<Item = &'a Constraint>) -> Self {
        let mut table = ConstraintTable::new();
        for c in constraints.into_iter().filter(|c| c.unit == unit) {
            table.add(c.kind, c.time);
        }
        table
    }

    pub fn add(&mut self, kind: ConstraintKind, time: usize) {
        match kind {
            ConstraintKind::Vertex(v) => {
                self.vertex.insert((v, time));
                let latest = self.latest_at.entry(v).or_insert(time);
                *latest = (*latest).max(time);
            }
            ConstraintKind::Edge(u, v) => {
                self.edge.insert((u, v, time));
            }
        }
        self.max_time = self.max_time.max(time);
    }

    pub fn is_empty(&self) -> bool {
        self.vertex.is_empty() && self.edge.is_empty()
    }

    pub fn len(&self) -> usize {
        self.vertex.len() + self.edge.len()
    }

    pub fn vertex_blocked(&self, v: VertexId, time: usize) -> bool {
        self.vertex.contains(&(v, time))
    }

    pub fn edge_blocked(&self, from: VertexId, to: VertexId, time: usize) -> bool {
        self.edge.contains(&(from, to, time))
    }

    /// Whether a unit may sit on `v` forever from `time` on.
    pub fn can_rest(&self, v: VertexId, time: usize) -> bool {
        self.latest_at.get(&v).is_none_or(|&latest| latest <= time)
    }

    /// Latest timestep mentioned by any constraint.
    pub fn max_time(&self) -> usize {
        self.max_time
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn table_filters_by_unit_and_tracks_rest_times() {
        let cs = [
            Constraint { unit: 0, kind: ConstraintKind::Vertex(3), time: 4 },
            Constraint { unit: 1, kind: ConstraintKind::Vertex(3), time: 9 },
            Constraint { unit: 0, kind: ConstraintKind::Edge(1, 2), time: 2 },
        ];
        let t = ConstraintTable::for_unit(0, &cs);
        assert_eq!(t.len(), 2);
        assert!(t.vertex_blocked(3, 4));
        assert!(!t.vertex_blocked(3, 9));
        assert!(t.edge_blocked(1, 2, 2));
        assert!(!t.edge_blocked(2, 1, 2));
        assert!(!t.can_rest(3, 3));
        assert!(t.can_rest(3, 4));
        assert!(t.can_rest(7, 0));
    }
}
