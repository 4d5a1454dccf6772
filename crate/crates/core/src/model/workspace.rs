use std::collections::{BTreeMap, VecDeque};

use thiserror::Error;

/// Dense vertex index. Grid workspaces number unblocked cells row-major.
pub type VertexId = usize;

/// Grid cell coordinate: `x` is the column, `y` the row.
pub type Cell = (i32, i32);

#[derive(Debug, Error, PartialEq)]
pub enum WorkspaceError {
    #[error("edge ({0}, {1}) references a missing vertex")]
    MissingVertex(VertexId, VertexId),
    #[error("self-loop on vertex {0}")]
    SelfLoop(VertexId),
    #[error("edge length for ({0}, {1}) must be strictly positive")]
    NonPositiveLength(VertexId, VertexId),
    #[error("({0}, {1}) is not an edge")]
    NotAnEdge(VertexId, VertexId),
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct GridMeta {
    pub width: usize,
    pub height: usize,
    /// Row-major, `true` for blocked cells.
    pub blocked: Vec<bool>,
}

/// Directed graph with unit-time edges; the arena shared by every solver.
#[derive(Debug, Clone, PartialEq)]
pub struct Workspace {
    adjacency: Vec<Vec<VertexId>>,
    grid: Option<GridMeta>,
    cells: Vec<Cell>,
    cell_index: Vec<Option<VertexId>>,
    edge_lengths: BTreeMap<(VertexId, VertexId), f64>,
}

impl Workspace {
    /// 4-neighbour grid over the unblocked cells of `blocked` (row-major).
    pub fn from_grid(width: usize, height: usize, blocked: Vec<bool>) -> Self {
        assert_eq!(blocked.len(), width * height, "blocked mask size");
        let mut cell_index = vec![None; width * height];
        let mut cells = Vec::new();
        for y in 0..height {
            for x in 0..width {
                if !blocked[y * width + x] {
                    cell_index[y * width + x] = Some(cells.len());
                    cells.push((x as i32, y as i32));
                }
            }
        }
        let mut adjacency = vec![Vec::new(); cells.len()];
        for (v, &(x, y)) in cells.iter().enumerate() {
            for (dx, dy) in [(0, -1), (-1, 0), (1, 0), (0, 1)] {
                let (nx, ny) = (x + dx, y + dy);
                if nx < 0 || ny < 0 || nx as usize >= width || ny as usize >= height {
                    continue;
                }
                if let Some(u) = cell_index[ny as usize * width + nx as usize] {
                    adjacency[v].push(u);
                }
            }
            adjacency[v].sort_unstable();
        }
        Workspace {
            adjacency,
            grid: Some(GridMeta {
                width,
                height,
                blocked,
            }),
            cells,
            cell_index,
            edge_lengths: BTreeMap::new(),
        }
    }

    /// General graph from directed edges. No grid metadata; rotation and
    /// coordinate-based formats are unavailable.
    pub fn from_edges(
        num_vertices: usize,
        edges: &[(VertexId, VertexId)],
    ) -> Result<Self, WorkspaceError> {
        let mut adjacency = vec![Vec::new(); num_vertices];
        for &(u, v) in edges {
            if u >= num_vertices || v >= num_vertices {
                return Err(WorkspaceError::MissingVertex(u, v));
            }
            if u == v {
                return Err(WorkspaceError::SelfLoop(u));
            }
            adjacency[u].push(v);
        }
        for list in &mut adjacency {
            list.sort_unstable();
            list.dedup();
        }
        Ok(Workspace {
            adjacency,
            grid: None,
            cells: (0..num_vertices as i32).map(|v| (v, 0)).collect(),
            cell_index: Vec::new(),
            edge_lengths: BTreeMap::new(),
        })
    }

    pub fn num_vertices(&self) -> usize {
        self.adjacency.len()
    }

    /// Sorted out-neighbours.
    pub fn neighbors(&self, v: VertexId) -> &[VertexId] {
        &self.adjacency[v]
    }

    pub fn degree(&self, v: VertexId) -> usize {
        self.adjacency[v].len()
    }

    pub fn has_edge(&self, u: VertexId, v: VertexId) -> bool {
        self.adjacency
            .get(u)
            .is_some_and(|n| n.binary_search(&v).is_ok())
    }

    pub fn contains(&self, v: VertexId) -> bool {
        v < self.adjacency.len()
    }

    /// Directed edges in (source, target) lexicographic order.
    pub fn edges(&self) -> impl Iterator<Item = (VertexId, VertexId)> + '_ {
        self.adjacency
            .iter()
            .enumerate()
            .flat_map(|(u, n)| n.iter().map(move |&v| (u, v)))
    }

    pub fn num_directed_edges(&self) -> usize {
        self.adjacency.iter().map(Vec::len).sum()
    }

    pub fn grid(&self) -> Option<&GridMeta> {
        self.grid.as_ref()
    }

    pub fn cell(&self, v: VertexId) -> Cell {
        self.cells[v]
    }

    pub fn vertex_at(&self, cell: Cell) -> Option<VertexId> {
        let grid = self.grid.as_ref()?;
        let (x, y) = cell;
        if x < 0 || y < 0 || x as usize >= grid.width || y as usize >= grid.height {
            return None;
        }
        self.cell_index[y as usize * grid.width + x as usize]
    }

    pub fn edge_length(&self, u: VertexId, v: VertexId) -> f64 {
        let key = if u < v { (u, v) } else { (v, u) };
        self.edge_lengths.get(&key).copied().unwrap_or(1.0)
    }

    /// Physical length of the undirected edge {u, v} in meters.
    pub fn set_edge_length(
        &mut self,
        u: VertexId,
        v: VertexId,
        meters: f64,
    ) -> Result<(), WorkspaceError> {
        if !self.has_edge(u, v) && !self.has_edge(v, u) {
            return Err(WorkspaceError::NotAnEdge(u, v));
        }
        if !(meters > 0.0) || !meters.is_finite() {
            return Err(WorkspaceError::NonPositiveLength(u, v));
        }
        let key = if u < v { (u, v) } else { (v, u) };
        self.edge_lengths.insert(key, meters);
        Ok(())
    }

    pub fn min_edge_length(&self) -> f64 {
        self.edges()
            .map(|(u, v)| self.edge_length(u, v))
            .fold(f64::INFINITY, f64::min)
    }

    /// Unit-cost BFS distances from `source` along out-edges.
    pub fn distances_from(&self, source: VertexId) -> Vec<Option<usize>> {
        let mut dist = vec![None; self.num_vertices()];
        let mut queue = VecDeque::new();
        dist[source] = Some(0);
        queue.push_back(source);
        while let Some(u) = queue.pop_front() {
            let d = dist[u].unwrap();
            for &v in &self.adjacency[u] {
                if dist[v].is_none() {
                    dist[v] = Some(d + 1);
                    queue.push_back(v);
                }
            }
        }
        dist
    }

    /// Unit-cost BFS distances *to* `target` (reverse edges).
    pub fn distances_to(&self, target: VertexId) -> Vec<Option<usize>> {
        let reverse = self.reverse_adjacency();
        let mut dist = vec![None; self.num_vertices()];
        let mut queue = VecDeque::new();
        dist[target] = Some(0);
        queue.push_back(target);
        while let Some(u) = queue.pop_front() {
            let d = dist[u].unwrap();
            for &v in &reverse[u] {
                if dist[v].is_none() {
                    dist[v] = Some(d + 1);
                    queue.push_back(v);
                }
            }
        }
        dist
    }

    pub fn reverse_adjacency(&self) -> Vec<Vec<VertexId>> {
        let mut reverse = vec![Vec::new(); self.num_vertices()];
        for (u, v) in self.edges() {
            reverse[v].push(u);
        }
        reverse
    }

    /// Shortest path with lexicographically smallest vertex sequence among
    /// the shortest ones.
    pub fn shortest_path(&self, from: VertexId, to: VertexId) -> Option<Vec<VertexId>> {
        let dist = self.distances_to(to);
        dist[from]?;
        let mut path = vec![from];
        let mut cur = from;
        while cur != to {
            let d = dist[cur].unwrap();
            cur = *self.adjacency[cur]
                .iter()
                .find(|&&n| dist[n] == Some(d - 1))
                .expect("BFS layer has a predecessor");
            path.push(cur);
        }
        Some(path)
    }

    /// Connected component label per vertex, treating edges as undirected.
    pub fn components(&self) -> Vec<usize> {
        let reverse = self.reverse_adjacency();
        let mut label = vec![usize::MAX; self.num_vertices()];
        let mut next = 0;
        for root in 0..self.num_vertices() {
            if label[root] != usize::MAX {
                continue;
            }
            label[root] = next;
            let mut stack = vec![root];
            while let Some(u) = stack.pop() {
                for &v in self.adjacency[u].iter().chain(reverse[u].iter()) {
                    if label[v] == usize::MAX {
                        label[v] = next;
                        stack.push(v);
                    }
                }
            }
            next += 1;
        }
        label
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn grid_adjacency_is_symmetric_and_row_major() {
        let ws = Workspace::from_grid(3, 2, vec![false, true, false, false, false, false]);
        assert_eq!(ws.num_vertices(), 5);
        assert_eq!(ws.cell(0), (0, 0));
        assert_eq!(ws.cell(1), (2, 0));
        assert_eq!(ws.cell(2), (0, 1));
        for (u, v) in ws.edges() {
            assert!(ws.has_edge(v, u));
        }
        assert_eq!(ws.vertex_at((1, 0)), None);
        assert_eq!(ws.vertex_at((1, 1)), Some(3));
    }

    #[test]
    fn from_edges_rejects_bad_input() {
        assert_eq!(
            Workspace::from_edges(2, &[(0, 2)]),
            Err(WorkspaceError::MissingVertex(0, 2))
        );
        assert_eq!(
            Workspace::from_edges(2, &[(1, 1)]),
            Err(WorkspaceError::SelfLoop(1))
        );
    }

    #[test]
    fn edge_lengths_default_and_override() {
        let mut ws = Workspace::from_grid(3, 1, vec![false; 3]);
        assert_eq!(ws.edge_length(0, 1), 1.0);
        ws.set_edge_length(1, 0, 2.5).unwrap();
        assert_eq!(ws.edge_length(0, 1), 2.5);
        assert!(ws.set_edge_length(0, 2, 1.0).is_err());
        assert!(ws.set_edge_length(0, 1, 0.0).is_err());
    }

    #[test]
    fn shortest_path_prefers_small_ids() {
        let ws = Workspace::from_grid(2, 2, vec![false; 4]);
        assert_eq!(ws.shortest_path(0, 3), Some(vec![0, 1, 3]));
        let blocked = Workspace::from_grid(3, 1, vec![false, true, false]);
        assert_eq!(blocked.shortest_path(0, 1), None);
        assert_eq!(blocked.components(), vec![0, 1]);
    }
}
