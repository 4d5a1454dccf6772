use std::cell::Cell;
use std::sync::Arc;
use std::time::Instant;

use super::anonymous::{anonymous_lower_bound, components_balanced, HorizonSearch, TeamRouter};
use crate::model::{Flavor, Instance, MotionSemantics, Path, Solution, VertexId, Workspace};
use crate::search::high_level::{Engine, EngineConfig, EngineResult, UnitPlan, UnitPlanner};
use crate::search::reachability::goal_reachable;
use crate::search::{ConstraintTable, Limits, Outcome, SolveError, SolveReport};

/// Low level of CBM: every team is one unit, routed optimally by min-cost
/// flow on its own time-expanded network.
struct TeamPlanner<'a> {
    ws: &'a Workspace,
    starts: Vec<Vec<VertexId>>,
    targets: Vec<Vec<VertexId>>,
    members: Vec<Vec<usize>>,
    static_lb: Vec<usize>,
    entities: usize,
    anti_swap: bool,
    cap: usize,
    networks: usize,
    limits: &'a Limits,
    started: Instant,
    timed_out: Cell<bool>,
}

impl UnitPlanner for TeamPlanner<'_> {
    fn num_units(&self) -> usize {
        self.members.len()
    }

    fn entities(&self, unit: usize) -> &[usize] {
        &self.members[unit]
    }

    fn num_entities(&self) -> usize {
        self.entities
    }

    fn plan(
        &mut self,
        unit: usize,
        constraints: &ConstraintTable,
        _paths: &[Arc<Path>],
        floor: usize,
    ) -> Option<UnitPlan> {
        let router = TeamRouter {
            ws: self.ws,
            starts: &self.starts[unit],
            targets: &self.targets[unit],
            anti_swap: self.anti_swap,
            constraints,
        };
        let deadline = || {
            let out = self.limits.out_of_time(self.started);
            if out {
                self.timed_out.set(true);
            }
            out
        };
        let from = self.static_lb[unit];
        let mut networks = 0;
        let found = router.min_horizon(from, self.cap, &mut networks, &deadline);
        self.networks += networks;
        let HorizonSearch::Feasible(lb) = found else {
            return None;
        };
        // any horizon up to the other teams' makespan is free; a longer one
        // leaves more room to avoid them
        let horizon = lb.max(floor).min(self.cap);
        self.networks += 1;
        let paths = router.route(horizon).expect("feasibility is monotone in the horizon");
        Some(UnitPlan { paths, lb })
    }

    fn expansions(&self) -> usize {
        self.networks
    }
}

/// Conflict-based min-cost flow for TAPF under standard motion.
pub fn cbm_solve(instance: &Instance, limits: &Limits) -> Result<SolveReport, SolveError> {
    cbm_solve_with(instance, MotionSemantics::STANDARD, limits)
}

/// CBM with explicit motion semantics. With `allow_swap` the team networks
/// carry no anti-swap gadgets and opposite traversals are not conflicts.
pub fn cbm_solve_with(
    instance: &Instance,
    semantics: MotionSemantics,
    limits: &Limits,
) -> Result<SolveReport, SolveError> {
    if instance.flavor() != Flavor::Tapf {
        return Err(SolveError::WrongFlavor {
            algorithm: "cbm",
            flavor: instance.flavor(),
        });
    }
    let started = Instant::now();
    let ws = instance.workspace();
    let starts: Vec<Vec<VertexId>> = instance
        .groups()
        .iter()
        .map(|g| g.members.iter().map(|&m| instance.movers()[m].start).collect())
        .collect();
    let targets: Vec<Vec<VertexId>> = instance.groups().iter().map(|g| g.targets.clone()).collect();
    let infeasible = || SolveReport {
        outcome: Outcome::Infeasible,
        stats: Default::default(),
        runtime_s: started.elapsed().as_secs_f64(),
    };
    let mut static_lb = Vec::new();
    for (s, g) in starts.iter().zip(&targets) {
        match anonymous_lower_bound(ws, s, g) {
            Some(lb) if components_balanced(ws, s, g) => static_lb.push(lb),
            _ => return Ok(infeasible()),
        }
    }
    if goal_reachable(instance, semantics) == Some(false) {
        return Ok(infeasible());
    }

    let mut planner = TeamPlanner {
        ws,
        starts,
        targets,
        members: instance.groups().iter().map(|g| g.members.clone()).collect(),
        static_lb,
        entities: instance.num_movers(),
        anti_swap: !semantics.allow_swap,
        cap: limits.horizon_for(instance),
        networks: 0,
        limits,
        started,
        timed_out: Cell::new(false),
    };
    let mut engine = Engine::new(
        &mut planner,
        EngineConfig {
            w: 1.0,
            swap_conflicts: !semantics.allow_swap,
        },
    );
    let result = engine.run(limits, started);
    let stats = engine.stats;
    let result = if planner.timed_out.get() {
        EngineResult::BudgetExhausted
    } else {
        result
    };
    let outcome = match result {
        EngineResult::Solved(paths) => Outcome::Solved(Solution::from_mover_paths(paths)),
        EngineResult::Infeasible => Outcome::Infeasible,
        EngineResult::BudgetExhausted => Outcome::BudgetExhausted,
    };
    Ok(SolveReport {
        outcome,
        stats,
        runtime_s: started.elapsed().as_secs_f64(),
    })
}
