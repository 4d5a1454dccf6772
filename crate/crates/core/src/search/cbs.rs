use std::sync::Arc;
use std::time::Instant;

use super::constraint::ConstraintTable;
use super::high_level::{Engine, EngineConfig, EngineResult, UnitPlan, UnitPlanner};
use super::low_level::{bounded_search, min_arrival, scaled_bound, ConflictAvoidance, SpaceTimeQuery};
use super::{reachability, Limits, Outcome, SolveError, SolveReport};
use crate::model::{Flavor, Instance, MotionSemantics, Path, Solution, VertexId, Workspace};

/// Low level for instances whose every entity has a fixed goal: each entity
/// is its own unit.
pub(crate) struct AgentPlanner<'a> {
    ws: &'a Workspace,
    starts: Vec<VertexId>,
    goals: Vec<VertexId>,
    distance: Vec<Vec<Option<usize>>>,
    guidance: Vec<Vec<f64>>,
    w: f64,
    horizon: usize,
    count_swaps: bool,
    units: Vec<Vec<usize>>,
    expansions: usize,
}

impl<'a> AgentPlanner<'a> {
    /// `guidance[i]` orders ties in the focal low level of entity `i`;
    /// exact distances when `None`.
    pub fn new(
        instance: &'a Instance,
        guidance: Option<Vec<Vec<f64>>>,
        w: f64,
        horizon: usize,
        count_swaps: bool,
    ) -> Self {
        let ws = instance.workspace();
        let n = instance.num_movers();
        let goals: Vec<VertexId> = (0..n)
            .map(|m| instance.fixed_target(m).expect("every group is a singleton"))
            .collect();
        let distance: Vec<Vec<Option<usize>>> = goals.iter().map(|&g| ws.distances_to(g)).collect();
        let guidance = guidance.unwrap_or_else(|| {
            distance
                .iter()
                .map(|d| d.iter().map(|d| d.map_or(f64::INFINITY, |d| d as f64)).collect())
                .collect()
        });
        AgentPlanner {
            ws,
            starts: instance.starts(),
            goals,
            distance,
            guidance,
            w,
            horizon,
            count_swaps,
            units: (0..n).map(|i| vec![i]).collect(),
            expansions: 0,
        }
    }
}

impl UnitPlanner for AgentPlanner<'_> {
    fn num_units(&self) -> usize {
        self.units.len()
    }

    fn entities(&self, unit: usize) -> &[usize] {
        &self.units[unit]
    }

    fn num_entities(&self) -> usize {
        self.units.len()
    }

    fn plan(
        &mut self,
        unit: usize,
        constraints: &ConstraintTable,
        paths: &[Arc<Path>],
        floor: usize,
    ) -> Option<UnitPlan> {
        let q = SpaceTimeQuery {
            ws: self.ws,
            start: self.starts[unit],
            goal: self.goals[unit],
            constraints,
            distance: &self.distance[unit],
            horizon: self.horizon,
        };
        let fastest = min_arrival(&q);
        let Some(fastest) = fastest else {
            self.expansions += 1;
            return None;
        };
        self.expansions += fastest.expansions;
        let lb = fastest.path.len() - 1;
        let bound = scaled_bound(self.w, lb).max(floor);
        let others = paths
            .iter()
            .enumerate()
            .filter(|&(e, _)| e != unit)
            .map(|(_, p)| p.as_ref());
        let cat = ConflictAvoidance::new(others, self.count_swaps);
        let chosen = bounded_search(&q, bound, &self.guidance[unit], Some(&cat))
            .expect("the minimum-arrival path fits the bound");
        self.expansions += chosen.expansions;
        Some(UnitPlan {
            paths: vec![chosen.path],
            lb,
        })
    }

    fn expansions(&self) -> usize {
        self.expansions
    }
}

pub(crate) fn report(
    instance: &Instance,
    result: EngineResult,
    stats: super::SearchStats,
    started: Instant,
) -> SolveReport {
    let outcome = match result {
        EngineResult::Solved(paths) => Outcome::Solved(Solution::from_entity_paths(instance, paths)),
        EngineResult::Infeasible => Outcome::Infeasible,
        EngineResult::BudgetExhausted => Outcome::BudgetExhausted,
    };
    SolveReport {
        outcome,
        stats,
        runtime_s: started.elapsed().as_secs_f64(),
    }
}

fn check_mapf(instance: &Instance, algorithm: &'static str) -> Result<(), SolveError> {
    if instance.flavor() != Flavor::Mapf {
        return Err(SolveError::WrongFlavor {
            algorithm,
            flavor: instance.flavor(),
        });
    }
    Ok(())
}

/// Makespan-optimal conflict-based search.
pub fn cbs_solve(
    instance: &Instance,
    semantics: MotionSemantics,
    limits: &Limits,
) -> Result<SolveReport, SolveError> {
    check_mapf(instance, "cbs")?;
    Ok(run(instance, None, 1.0, semantics, limits))
}

/// Bounded-suboptimal focal search: makespan at most `w` times optimal.
pub fn ecbs_solve(
    instance: &Instance,
    w: f64,
    semantics: MotionSemantics,
    limits: &Limits,
) -> Result<SolveReport, SolveError> {
    check_mapf(instance, "ecbs")?;
    if !(w >= 1.0) {
        return Err(SolveError::BadFactor(w));
    }
    Ok(run(instance, None, w, semantics, limits))
}

/// Focal search with caller-supplied tie-breaking heuristics per mover.
/// The makespan is at most `w` times optimal whatever the guidance.
pub fn ecbs_solve_guided(
    instance: &Instance,
    guidance: Vec<Vec<f64>>,
    w: f64,
    semantics: MotionSemantics,
    limits: &Limits,
) -> Result<SolveReport, SolveError> {
    check_mapf(instance, "ecbs")?;
    if !(w >= 1.0) {
        return Err(SolveError::BadFactor(w));
    }
    Ok(run(instance, Some(guidance), w, semantics, limits))
}

fn run(
    instance: &Instance,
    guidance: Option<Vec<Vec<f64>>>,
    w: f64,
    semantics: MotionSemantics,
    limits: &Limits,
) -> SolveReport {
    let started = Instant::now();
    if reachability::goal_reachable(instance, semantics) == Some(false) {
        return report(instance, EngineResult::Infeasible, Default::default(), started);
    }
    let swaps = !semantics.allow_swap;
    let mut planner = AgentPlanner::new(instance, guidance, w, limits.horizon_for(instance), swaps);
    let mut engine = Engine::new(
        &mut planner,
        EngineConfig {
            w,
            swap_conflicts: swaps,
        },
    );
    let result = engine.run(limits, started);
    let stats = engine.stats;
    report(instance, result, stats, started)
}
