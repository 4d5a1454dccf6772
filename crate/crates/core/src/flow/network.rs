//! Integral network flow: Edmonds–Karp maximum flow and successive
//! shortest paths for minimum-cost flow.

use std::cmp::Reverse;
use std::collections::{BinaryHeap, VecDeque};

#[derive(Debug, Clone)]
pub struct FlowArc {
    pub to: usize,
    /// Residual capacity.
    pub cap: i64,
    pub cost: i64,
    rev: usize,
    original: i64,
}

impl FlowArc {
    /// Flow currently carried (0 on reverse arcs).
    pub fn flow(&self) -> i64 {
        (self.original - self.cap).max(0)
    }
}

#[derive(Debug, Clone, Default)]
pub struct FlowNetwork {
    adj: Vec<Vec<FlowArc>>,
}

impl FlowNetwork {
    pub fn new() -> Self {
        Self::default()
    }

    pub fn add_node(&mut self) -> usize {
        self.adj.push(Vec::new());
        self.adj.len() - 1
    }

    pub fn num_nodes(&self) -> usize {
        self.adj.len()
    }

    pub fn arcs(&self, u: usize) -> &[FlowArc] {
        &self.adj[u]
    }

    pub fn add_arc(&mut self, u: usize, v: usize, cap: i64, cost: i64) {
        let (ru, rv) = (self.adj[v].len() + usize::from(u == v), self.adj[u].len());
        self.adj[u].push(FlowArc {
            to: v,
            cap,
            cost,
            rev: ru,
            original: cap,
        });
        self.adj[v].push(FlowArc {
            to: u,
            cap: 0,
            cost: -cost,
            rev: rv,
            original: 0,
        });
    }

    fn push(&mut self, u: usize, i: usize, amount: i64) {
        let FlowArc { to, rev, .. } = self.adj[u][i];
        self.adj[u][i].cap -= amount;
        self.adj[to][rev].cap += amount;
    }

    /// Augments along shortest (fewest-arc) residual paths until none is
    /// left. Arcs are scanned in insertion order, so the result is
    /// deterministic.
    pub fn max_flow(&mut self, s: usize, t: usize) -> i64 {
        let n = self.adj.len();
        let mut total = 0;
        loop {
            let mut prev: Vec<Option<(usize, usize)>> = vec![None; n];
            let mut seen = vec![false; n];
            seen[s] = true;
            let mut queue = VecDeque::from([s]);
            while let Some(u) = queue.pop_front() {
                if u == t {
                    break;
                }
                for (i, a) in self.adj[u].iter().enumerate() {
                    if a.cap > 0 && !seen[a.to] {
                        seen[a.to] = true;
                        prev[a.to] = Some((u, i));
                        queue.push_back(a.to);
                    }
                }
            }
            if !seen[t] {
                return total;
            }
            let mut bottleneck = i64::MAX;
            let mut v = t;
            while let Some((u, i)) = prev[v] {
                bottleneck = bottleneck.min(self.adj[u][i].cap);
                v = u;
            }
            let mut v = t;
            while let Some((u, i)) = prev[v] {
                self.push(u, i, bottleneck);
                v = u;
            }
            total += bottleneck;
        }
    }

    /// Sends up to `limit` units from `s` to `t` at minimum total cost by
    /// successive shortest paths (Dijkstra on reduced costs). Arc costs
    /// must be non-negative. Returns `(value, cost)`.
    pub fn min_cost_flow(&mut self, s: usize, t: usize, limit: i64) -> (i64, i64) {
        let n = self.adj.len();
        let mut potential = vec![0i64; n];
        let (mut value, mut cost) = (0, 0);
        while value < limit {
            let mut dist = vec![i64::MAX; n];
            let mut prev: Vec<Option<(usize, usize)>> = vec![None; n];
            dist[s] = 0;
            let mut heap = BinaryHeap::from([Reverse((0i64, s))]);
            while let Some(Reverse((d, u))) = heap.pop() {
                if d > dist[u] {
                    continue;
                }
                for (i, a) in self.adj[u].iter().enumerate() {
                    if a.cap <= 0 {
                        continue;
                    }
                    let nd = d + a.cost + potential[u] - potential[a.to];
                    if nd < dist[a.to] {
                        dist[a.to] = nd;
                        prev[a.to] = Some((u, i));
                        heap.push(Reverse((nd, a.to)));
                    }
                }
            }
            if dist[t] == i64::MAX {
                break;
            }
            for v in 0..n {
                if dist[v] < i64::MAX {
                    potential[v] += dist[v];
                }
            }
            let mut amount = limit - value;
            let mut v = t;
            while let Some((u, i)) = prev[v] {
                amount = amount.min(self.adj[u][i].cap);
                v = u;
            }
            let mut v = t;
            while let Some((u, i)) = prev[v] {
                cost += amount * self.adj[u][i].cost;
                self.push(u, i, amount);
                v = u;
            }
            value += amount;
        }
        (value, cost)
    }
}
