use std::time::Instant;

use super::time_expanded::{build_network, max_flow, min_cost_flow, TeamConstraintSet};
use crate::model::{Flavor, Instance, Path, Solution, VertexId, Workspace};
use crate::search::{Limits, Outcome, SearchStats, SolveError, SolveReport};

/// Largest, over movers and targets, of the distance to the nearest
/// opposite endpoint. `None` if some start or target sees no partner.
pub fn anonymous_lower_bound(
    ws: &Workspace,
    starts: &[VertexId],
    targets: &[VertexId],
) -> Option<usize> {
    let from_starts: Vec<Vec<Option<usize>>> = starts.iter().map(|&s| ws.distances_from(s)).collect();
    let mut bound = 0;
    for d in &from_starts {
        bound = bound.max(targets.iter().filter_map(|&g| d[g]).min()?);
    }
    for &g in targets {
        bound = bound.max(from_starts.iter().filter_map(|d| d[g]).min()?);
    }
    Some(bound)
}

/// Whether every connected component holds as many starts as targets.
pub(crate) fn components_balanced(ws: &Workspace, starts: &[VertexId], targets: &[VertexId]) -> bool {
    let comp = ws.components();
    let mut balance = vec![0i64; ws.num_vertices()];
    for &s in starts {
        balance[comp[s]] += 1;
    }
    for &g in targets {
        balance[comp[g]] -= 1;
    }
    balance.iter().all(|&b| b == 0)
}

pub(crate) enum HorizonSearch {
    Feasible(usize),
    Infeasible,
    OutOfTime,
}

/// Team routing on time-expanded networks under one constraint set.
pub(crate) struct TeamRouter<'a> {
    pub ws: &'a Workspace,
    pub starts: &'a [VertexId],
    pub targets: &'a [VertexId],
    pub anti_swap: bool,
    pub constraints: &'a TeamConstraintSet,
}

impl TeamRouter<'_> {
    /// Smallest horizon in `from..=cap` admitting a full flow. Feasibility
    /// is monotone in the horizon: a unit on a target may keep waiting
    /// there, and targets constrained later than the horizon are not sink
    /// candidates.
    pub fn min_horizon(
        &self,
        from: usize,
        cap: usize,
        networks: &mut usize,
        deadline: &dyn Fn() -> bool,
    ) -> HorizonSearch {
        for horizon in from..=cap {
            if deadline() {
                return HorizonSearch::OutOfTime;
            }
            *networks += 1;
            let mut net = build_network(
                self.ws,
                self.starts,
                self.targets,
                horizon,
                self.anti_swap,
                self.constraints,
            )
            .expect("team endpoints are workspace vertices");
            if max_flow(&mut net).value == self.starts.len() {
                return HorizonSearch::Feasible(horizon);
            }
        }
        HorizonSearch::Infeasible
    }

    /// Min-cost routing at `horizon`, one path per start in the order of
    /// `self.starts`; `None` if the flow is not full.
    pub fn route(&self, horizon: usize) -> Option<Vec<Path>> {
        let mut net = build_network(
            self.ws,
            self.starts,
            self.targets,
            horizon,
            self.anti_swap,
            self.constraints,
        )
        .expect("team endpoints are workspace vertices");
        let flow = min_cost_flow(&mut net);
        if flow.value < self.starts.len() {
            return None;
        }
        let mut by_start = flow.paths;
        Some(
            self.starts
                .iter()
                .map(|&s| {
                    let i = by_start.iter().position(|p| p[0] == s).expect("one path per start");
                    by_start.swap_remove(i)
                })
                .collect(),
        )
    }
}

/// Optimal makespan for a single team of interchangeable movers: the
/// smallest horizon whose time-expanded network carries a full flow.
pub fn anonymous_solve(instance: &Instance, limits: &Limits) -> Result<SolveReport, SolveError> {
    if instance.flavor() != Flavor::Tapf || instance.groups().len() != 1 {
        return Err(SolveError::WrongFlavor {
            algorithm: "flow-anon",
            flavor: instance.flavor(),
        });
    }
    let started = Instant::now();
    let ws = instance.workspace();
    let starts = instance.starts();
    let targets = instance.groups()[0].targets.clone();
    let mut stats = SearchStats::default();
    let finish = |outcome, stats| SolveReport {
        outcome,
        stats,
        runtime_s: started.elapsed().as_secs_f64(),
    };
    let lb = match anonymous_lower_bound(ws, &starts, &targets) {
        Some(lb) if components_balanced(ws, &starts, &targets) => lb,
        _ => return Ok(finish(Outcome::Infeasible, stats)),
    };
    let constraints = TeamConstraintSet::new();
    let router = TeamRouter {
        ws,
        starts: &starts,
        targets: &targets,
        anti_swap: true,
        constraints: &constraints,
    };
    let cap = limits.horizon_for(instance);
    let deadline = || limits.out_of_time(started);
    let horizon = match router.min_horizon(lb, cap, &mut stats.low_level_expansions, &deadline) {
        HorizonSearch::OutOfTime => return Ok(finish(Outcome::BudgetExhausted, stats)),
        HorizonSearch::Infeasible => return Ok(finish(Outcome::Infeasible, stats)),
        HorizonSearch::Feasible(h) => h,
    };
    let paths = router.route(horizon).expect("a full flow exists at this horizon");
    stats.low_level_expansions += 1;
    Ok(finish(Outcome::Solved(Solution::from_mover_paths(paths)), stats))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::model::validate;
    use std::sync::Arc;

    fn corridor() -> Arc<Workspace> {
        Arc::new(Workspace::from_grid(3, 1, vec![false; 3]))
    }

    #[test]
    fn identity_is_free() {
        let inst = Instance::tapf(corridor(), &[(vec![0, 2], vec![0, 2])]).unwrap();
        let r = anonymous_solve(&inst, &Limits::default()).unwrap();
        assert_eq!(r.makespan(), Some(0));
    }

    #[test]
    fn head_on_collapses_by_reassignment() {
        let inst = Instance::tapf(corridor(), &[(vec![0, 2], vec![2, 0])]).unwrap();
        let r = anonymous_solve(&inst, &Limits::default()).unwrap();
        assert_eq!(r.makespan(), Some(0));
        assert!(validate(&inst, r.solution().unwrap()).is_valid());
    }

    #[test]
    fn plus_shaped_map_two_agents() {
        let mut cells = vec![false; 9];
        for c in [0, 2, 6, 8] {
            cells[c] = true;
        }
        let ws = Arc::new(Workspace::from_grid(3, 3, cells));
        let v = |x, y| ws.vertex_at((x, y)).unwrap();
        let inst = Instance::tapf(ws.clone(), &[(vec![v(0, 1), v(1, 0)], vec![v(2, 1), v(1, 2)])]).unwrap();
        let oracle = crate::model::joint_state_oracle(&inst, None).unwrap().unwrap();
        let r = anonymous_solve(&inst, &Limits::default()).unwrap();
        assert_eq!(r.makespan(), Some(oracle.metrics().makespan));
        assert!(validate(&inst, r.solution().unwrap()).is_valid());
    }

    #[test]
    fn unbalanced_components_are_infeasible() {
        let ws = Arc::new(Workspace::from_grid(3, 1, vec![false, true, false]));
        let inst = Instance::tapf(ws, &[(vec![0], vec![1])]).unwrap();
        assert!(anonymous_solve(&inst, &Limits::default()).unwrap().is_infeasible());
    }

    #[test]
    fn requires_a_single_team() {
        let inst = Instance::mapf(corridor(), &[(0, 2)]).unwrap();
        assert!(anonymous_solve(&inst, &Limits::default()).is_err());
    }
}
