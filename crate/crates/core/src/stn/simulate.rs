use std::collections::VecDeque;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rand_distr::{Distribution, Exp};
use serde::{Deserialize, Serialize};

use super::network::ConstraintKind;
use super::schedule::Schedule;
use super::StnError;

const EPS: f64 = 1e-9;

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum DelayDistribution {
    None,
    /// Uniform on `[0, max_s]`.
    Uniform { max_s: f64 },
    Exponential { mean_s: f64 },
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum DelayCap {
    Uncapped,
    /// Clip each sampled delay so the event still meets its latest time.
    RemainingSlack,
}

/// A delay forced onto one event, applied after sampling and never capped.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct DelayOverride {
    pub event: usize,
    pub delay_s: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct DelayModel {
    pub distribution: DelayDistribution,
    pub cap: DelayCap,
    pub seed: u64,
    #[serde(default)]
    pub overrides: Vec<DelayOverride>,
}

impl DelayModel {
    pub fn zero() -> Self {
        DelayModel {
            distribution: DelayDistribution::None,
            cap: DelayCap::Uncapped,
            seed: 0,
            overrides: Vec::new(),
        }
    }

    /// One delay per event, drawn in event order.
    fn sample(&self, events: usize) -> Result<Vec<f64>, StnError> {
        let mut rng = ChaCha8Rng::seed_from_u64(self.seed);
        let delays = match self.distribution {
            DelayDistribution::None => vec![0.0; events],
            DelayDistribution::Uniform { max_s } => {
                if !(max_s >= 0.0) || !max_s.is_finite() {
                    return Err(StnError::BadDelay(format!("uniform bound {max_s}")));
                }
                (0..events).map(|_| rng.random::<f64>() * max_s).collect()
            }
            DelayDistribution::Exponential { mean_s } => {
                let exp = Exp::new(1.0 / mean_s)
                    .ok()
                    .filter(|_| mean_s > 0.0 && mean_s.is_finite())
                    .ok_or_else(|| StnError::BadDelay(format!("exponential mean {mean_s}")))?;
                (0..events).map(|_| exp.sample(&mut rng)).collect()
            }
        };
        for o in &self.overrides {
            if o.event >= events || !(o.delay_s >= 0.0) {
                return Err(StnError::BadDelay(format!(
                    "override of {} s on event {}",
                    o.delay_s, o.event
                )));
            }
        }
        Ok(delays)
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ExecutionTrace {
    pub realized_s: Vec<f64>,
    /// Delay actually applied to each event after capping.
    pub applied_delay_s: Vec<f64>,
    /// Constraints whose lower bound the realized times break.
    pub ordering_violations: usize,
    /// Smallest realized gap over separation constraints.
    pub min_separation_s: Option<f64>,
    /// Events realized after their latest time.
    pub late_events: Vec<usize>,
    pub replan_needed: bool,
    pub makespan_s: f64,
}

impl ExecutionTrace {
    pub fn to_json(&self) -> String {
        serde_json::to_string_pretty(self).expect("trace serializes") + "\n"
    }
}

/// Dispatches every event at `max(earliest, ready + delay)`, where `ready`
/// is the first time all of its lower-bound predecessors allow.
pub fn simulate_execution(schedule: &Schedule, delays: &DelayModel) -> Result<ExecutionTrace, StnError> {
    let n = schedule.events.len();
    let sampled = delays.sample(n)?;
    let mut forced = vec![None; n];
    for o in &delays.overrides {
        forced[o.event] = Some(o.delay_s);
    }

    let mut preds: Vec<Vec<(usize, f64)>> = vec![Vec::new(); n];
    let mut succs: Vec<Vec<usize>> = vec![Vec::new(); n];
    let mut indegree = vec![0usize; n];
    for c in &schedule.constraints {
        if c.to >= n || c.from.is_some_and(|f| f >= n) {
            return Err(StnError::DanglingConstraint);
        }
        if let Some(f) = c.from {
            preds[c.to].push((f, c.lb));
            succs[f].push(c.to);
            indegree[c.to] += 1;
        }
    }
    let mut queue: VecDeque<usize> = (0..n).filter(|&e| indegree[e] == 0).collect();
    let mut realized = vec![f64::NAN; n];
    let mut applied = vec![0.0; n];
    let mut dispatched = 0;
    while let Some(e) = queue.pop_front() {
        dispatched += 1;
        let ev = &schedule.events[e];
        let ready = preds[e]
            .iter()
            .map(|&(p, lb)| realized[p] + lb)
            .fold(0.0, f64::max);
        let delay = match forced[e] {
            Some(d) => d,
            None => match (delays.cap, ev.latest_s) {
                (DelayCap::RemainingSlack, Some(latest)) => sampled[e].min((latest - ready).max(0.0)),
                _ => sampled[e],
            },
        };
        applied[e] = delay;
        realized[e] = ev.earliest_s.max(ready + delay);
        for &s in &succs[e] {
            indegree[s] -= 1;
            if indegree[s] == 0 {
                queue.push_back(s);
            }
        }
    }
    if dispatched < n {
        return Err(StnError::CyclicOrdering);
    }

    let mut violations = 0;
    let mut min_sep: Option<f64> = None;
    for c in &schedule.constraints {
        let start = c.from.map_or(0.0, |f| realized[f]);
        let gap = realized[c.to] - start;
        if gap < c.lb - EPS {
            violations += 1;
        }
        if c.kind == ConstraintKind::Separation {
            min_sep = Some(min_sep.map_or(gap, |m| m.min(gap)));
        }
    }
    let late_events: Vec<usize> = (0..n)
        .filter(|&e| schedule.events[e].latest_s.is_some_and(|l| realized[e] > l + EPS))
        .collect();
    Ok(ExecutionTrace {
        makespan_s: realized.iter().copied().fold(0.0, f64::max),
        replan_needed: !late_events.is_empty(),
        late_events,
        ordering_violations: violations,
        min_separation_s: min_sep,
        applied_delay_s: applied,
        realized_s: realized,
    })
}
