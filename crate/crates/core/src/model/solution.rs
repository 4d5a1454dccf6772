use serde::{Deserialize, Serialize};

use super::instance::Instance;
use super::workspace::VertexId;

/// Vertex occupied at each timestep `t = 0..=T`. Repeated entries are waits.
pub type Path = Vec<VertexId>;

/// Two movers hand over their packages during the step `time -> time + 1`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct Exchange {
    pub time: usize,
    pub a: usize,
    pub b: usize,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Solution {
    /// One path per mover index, all of length `horizon + 1`.
    pub paths: Vec<Path>,
    /// Final vertex per mover (MAPF/TAPF) or per package (PERR/K-PERR).
    pub assignment: Vec<VertexId>,
    /// Package exchanges, sorted by time (PERR flavors only).
    pub exchanges: Vec<Exchange>,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct Metrics {
    pub makespan: usize,
    pub flowtime: usize,
}

/// Time of the last vertex change on `path` (0 if it never moves).
pub fn last_motion(path: &[VertexId]) -> usize {
    (1..path.len())
        .rev()
        .find(|&t| path[t] != path[t - 1])
        .unwrap_or(0)
}

/// Pads every path with waits to a common horizon (at least `min_horizon`).
pub fn pad_paths(paths: &mut [Path], min_horizon: usize) -> usize {
    let horizon = paths
        .iter()
        .map(|p| p.len().saturating_sub(1))
        .max()
        .unwrap_or(0)
        .max(min_horizon);
    for p in paths.iter_mut() {
        let last = *p.last().expect("paths are non-empty");
        p.resize(horizon + 1, last);
    }
    horizon
}

impl Solution {
    pub fn horizon(&self) -> usize {
        self.paths.first().map_or(0, |p| p.len() - 1)
    }

    /// Makespan is the earliest time after which nothing moves: no mover
    /// changes vertex and no package changes hands. Flowtime sums each
    /// mover's own last motion.
    pub fn metrics(&self) -> Metrics {
        let mut last: Vec<usize> = self.paths.iter().map(|p| last_motion(p)).collect();
        for e in &self.exchanges {
            last[e.a] = last[e.a].max(e.time + 1);
            last[e.b] = last[e.b].max(e.time + 1);
        }
        Metrics {
            makespan: last.iter().copied().max().unwrap_or(0),
            flowtime: last.iter().sum(),
        }
    }

    /// Package positions over time, following carriers through the recorded
    /// exchanges. Package `i` starts on mover `i`. Returns `None` if an
    /// exchange references a mover outside the solution.
    pub fn package_paths(&self) -> Option<Vec<Path>> {
        let n = self.paths.len();
        let horizon = self.horizon();
        let mut carrier: Vec<usize> = (0..n).collect();
        let mut out: Vec<Path> = (0..n).map(|i| vec![self.paths[i][0]]).collect();
        let mut next = 0;
        for t in 0..horizon {
            // carried_by[m] = package on mover m
            let mut carried_by = vec![usize::MAX; n];
            for (p, &c) in carrier.iter().enumerate() {
                carried_by[c] = p;
            }
            while next < self.exchanges.len() && self.exchanges[next].time == t {
                let e = self.exchanges[next];
                if e.a >= n || e.b >= n {
                    return None;
                }
                let (pa, pb) = (carried_by[e.a], carried_by[e.b]);
                carrier[pa] = e.b;
                carrier[pb] = e.a;
                carried_by.swap(e.a, e.b);
                next += 1;
            }
            for (p, path) in out.iter_mut().enumerate() {
                path.push(self.paths[carrier[p]][t + 1]);
            }
        }
        Some(out)
    }

    /// Builds mover paths and exchanges from package paths in which two
    /// packages may cross one edge during a step. Carriers of crossing
    /// packages stay put and exchange; every other carrier moves with its
    /// package, so the mover paths never swap.
    pub fn from_package_paths(package_paths: &[Path]) -> Solution {
        let mut packages = package_paths.to_vec();
        let horizon = pad_paths(&mut packages, 0);
        let n = packages.len();
        let mut carrier: Vec<usize> = (0..n).collect();
        let mut movers: Vec<Path> = (0..n).map(|i| vec![packages[i][0]]).collect();
        let mut exchanges = Vec::new();
        for t in 0..horizon {
            let mut handled = vec![false; n];
            for p in 0..n {
                if handled[p] {
                    continue;
                }
                let (u, v) = (packages[p][t], packages[p][t + 1]);
                if u != v {
                    if let Some(q) = (p + 1..n)
                        .find(|&q| !handled[q] && packages[q][t] == v && packages[q][t + 1] == u)
                    {
                        let (cp, cq) = (carrier[p], carrier[q]);
                        movers[cp].push(u);
                        movers[cq].push(v);
                        let (a, b) = if cp < cq { (cp, cq) } else { (cq, cp) };
                        exchanges.push(Exchange { time: t, a, b });
                        carrier.swap(p, q);
                        handled[p] = true;
                        handled[q] = true;
                        continue;
                    }
                }
                movers[carrier[p]].push(v);
                handled[p] = true;
            }
        }
        exchanges.sort();
        let assignment = packages.iter().map(|p| p[horizon]).collect();
        Solution {
            paths: movers,
            assignment,
            exchanges,
        }
    }

    /// Solution for non-package flavors: assignment is each mover's final
    /// vertex.
    pub fn from_mover_paths(mut paths: Vec<Path>) -> Solution {
        let horizon = pad_paths(&mut paths, 0);
        let assignment = paths.iter().map(|p| p[horizon]).collect();
        Solution {
            paths,
            assignment,
            exchanges: Vec::new(),
        }
    }

    /// Dispatches on flavor: package flavors treat `paths` as package paths.
    pub fn from_entity_paths(instance: &Instance, paths: Vec<Path>) -> Solution {
        if instance.flavor().is_package_flavor() {
            Solution::from_package_paths(&paths)
        } else {
            Solution::from_mover_paths(paths)
        }
    }

    /// Drops the trailing steps after the makespan.
    pub fn trimmed(mut self) -> Solution {
        let makespan = self.metrics().makespan;
        for p in &mut self.paths {
            p.truncate(makespan + 1);
        }
        self
    }
}
