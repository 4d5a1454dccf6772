//! Benchmark harness: runs every (instance, configuration) cell, collects
//! one row per run and summarises them per configuration and per pair of
//! configurations compared on identical instances.

use std::collections::{BTreeMap, BTreeSet};

use rayon::prelude::*;
use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::algorithm::{run_algorithm, HighwayGuidance, RunSpec};
use crate::highways::Highway;
use crate::model::{validate, Instance};
use crate::search::Outcome;

#[derive(Debug, Error)]
pub enum BenchError {
    #[error("could not start {0} workers: {1}")]
    Pool(usize, String),
    #[error("duplicate configuration label `{0}`")]
    DuplicateLabel(String),
    #[error("comparison names unknown configuration `{0}`")]
    UnknownLabel(String),
    #[error("csv output failed: {0}")]
    Csv(#[from] csv::Error),
}

#[derive(Debug, Clone)]
pub struct BenchInstance {
    pub id: String,
    pub instance: Instance,
    /// Highway over this instance's workspace, used by configurations
    /// with `highway_w1`.
    pub highway: Option<Highway>,
}

/// A labelled solver configuration, run on every instance.
#[derive(Debug, Clone)]
pub struct BenchConfig {
    pub label: String,
    pub spec: RunSpec,
    /// Guide ECBS with the instance's highway at this inflation.
    pub highway_w1: Option<f64>,
}

#[derive(Debug, Clone, Default)]
pub struct Suite {
    pub instances: Vec<BenchInstance>,
    pub configs: Vec<BenchConfig>,
    /// `(baseline, candidate)` label pairs.
    pub comparisons: Vec<(String, String)>,
    pub workers: usize,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct BenchRow {
    pub instance_id: String,
    pub config: String,
    pub algorithm: String,
    pub success: bool,
    /// `solved`, `infeasible`, `budget_exhausted` or `error`.
    pub outcome: String,
    pub makespan: Option<usize>,
    pub flowtime: Option<usize>,
    pub runtime_s: f64,
    pub high_level_nodes: usize,
    pub low_level_expansions: usize,
    pub adherence: Option<f64>,
    pub valid: Option<bool>,
    pub error: Option<String>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Aggregate {
    pub config: String,
    pub runs: usize,
    pub successes: usize,
    pub success_rate: f64,
    pub median_makespan: Option<f64>,
    pub median_runtime_s: Option<f64>,
    pub median_high_level_nodes: Option<f64>,
    pub mean_adherence: Option<f64>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Comparison {
    pub baseline: String,
    pub candidate: String,
    pub instances: usize,
    pub baseline_successes: usize,
    pub candidate_successes: usize,
    pub both_solved: usize,
    /// Over instances both solved.
    pub candidate_lower_makespan: usize,
    pub candidate_higher_makespan: usize,
    /// Over all paired instances, counting runs that ran out of budget as
    /// expanding all of it.
    pub candidate_nodes_le_baseline: usize,
}

#[derive(Debug, Clone, Default, PartialEq, Serialize, Deserialize)]
pub struct BenchmarkReport {
    pub rows: Vec<BenchRow>,
    pub aggregates: Vec<Aggregate>,
    pub comparisons: Vec<Comparison>,
}

pub const CSV_HEADER: [&str; 13] = [
    "instance_id",
    "config",
    "algorithm",
    "success",
    "outcome",
    "makespan",
    "flowtime",
    "runtime_s",
    "high_level_nodes",
    "low_level_expansions",
    "adherence",
    "valid",
    "error",
];

impl BenchmarkReport {
    pub fn to_csv(&self) -> Result<String, BenchError> {
        let mut w = csv::WriterBuilder::new().has_headers(false).from_writer(Vec::new());
        w.write_record(CSV_HEADER)?;
        for row in &self.rows {
            w.serialize(row)?;
        }
        let bytes = w.into_inner().map_err(|e| BenchError::Csv(e.into_error().into()))?;
        Ok(String::from_utf8(bytes).expect("csv output is utf-8"))
    }

    pub fn to_json(&self) -> String {
        serde_json::to_string_pretty(self).expect("report serializes") + "\n"
    }
}

fn median(mut xs: Vec<f64>) -> Option<f64> {
    if xs.is_empty() {
        return None;
    }
    xs.sort_by(f64::total_cmp);
    let n = xs.len();
    Some(if n % 2 == 1 {
        xs[n / 2]
    } else {
        (xs[n / 2 - 1] + xs[n / 2]) / 2.0
    })
}

/// Per-configuration summaries, in order of first appearance.
pub fn aggregate(rows: &[BenchRow]) -> Vec<Aggregate> {
    let mut order: Vec<&str> = Vec::new();
    for r in rows {
        if !order.contains(&r.config.as_str()) {
            order.push(&r.config);
        }
    }
    order
        .into_iter()
        .map(|config| {
            let mine: Vec<&BenchRow> = rows.iter().filter(|r| r.config == config).collect();
            let solved: Vec<&&BenchRow> = mine.iter().filter(|r| r.success).collect();
            let adherence: Vec<f64> = solved.iter().filter_map(|r| r.adherence).collect();
            Aggregate {
                config: config.to_string(),
                runs: mine.len(),
                successes: solved.len(),
                success_rate: if mine.is_empty() {
                    0.0
                } else {
                    solved.len() as f64 / mine.len() as f64
                },
                median_makespan: median(solved.iter().filter_map(|r| r.makespan.map(|m| m as f64)).collect()),
                median_runtime_s: median(solved.iter().map(|r| r.runtime_s).collect()),
                median_high_level_nodes: median(solved.iter().map(|r| r.high_level_nodes as f64).collect()),
                mean_adherence: (!adherence.is_empty())
                    .then(|| adherence.iter().sum::<f64>() / adherence.len() as f64),
            }
        })
        .collect()
}

pub fn compare(rows: &[BenchRow], baseline: &str, candidate: &str, node_budget: usize) -> Comparison {
    let by_instance = |label: &str| -> BTreeMap<&str, &BenchRow> {
        rows.iter()
            .filter(|r| r.config == label)
            .map(|r| (r.instance_id.as_str(), r))
            .collect()
    };
    let (a, b) = (by_instance(baseline), by_instance(candidate));
    let mut c = Comparison {
        baseline: baseline.to_string(),
        candidate: candidate.to_string(),
        instances: 0,
        baseline_successes: 0,
        candidate_successes: 0,
        both_solved: 0,
        candidate_lower_makespan: 0,
        candidate_higher_makespan: 0,
        candidate_nodes_le_baseline: 0,
    };
    let nodes = |r: &BenchRow| {
        if r.outcome == "budget_exhausted" {
            node_budget.max(r.high_level_nodes)
        } else {
            r.high_level_nodes
        }
    };
    for (id, ra) in &a {
        let Some(rb) = b.get(id) else { continue };
        c.instances += 1;
        c.baseline_successes += ra.success as usize;
        c.candidate_successes += rb.success as usize;
        if nodes(rb) <= nodes(ra) {
            c.candidate_nodes_le_baseline += 1;
        }
        if ra.success && rb.success {
            c.both_solved += 1;
            match rb.makespan.cmp(&ra.makespan) {
                std::cmp::Ordering::Less => c.candidate_lower_makespan += 1,
                std::cmp::Ordering::Greater => c.candidate_higher_makespan += 1,
                std::cmp::Ordering::Equal => {}
            }
        }
    }
    c
}

fn run_cell(inst: &BenchInstance, cfg: &BenchConfig) -> BenchRow {
    let mut row = BenchRow {
        instance_id: inst.id.clone(),
        config: cfg.label.clone(),
        algorithm: cfg.spec.algorithm.name().to_string(),
        success: false,
        outcome: "error".to_string(),
        makespan: None,
        flowtime: None,
        runtime_s: 0.0,
        high_level_nodes: 0,
        low_level_expansions: 0,
        adherence: None,
        valid: None,
        error: None,
    };
    let mut spec = cfg.spec.clone();
    if let Some(w1) = cfg.highway_w1 {
        match &inst.highway {
            Some(highway) => {
                spec.highway = Some(HighwayGuidance {
                    highway: highway.clone(),
                    w1,
                })
            }
            None => {
                row.error = Some(format!("instance {} has no highway", inst.id));
                return row;
            }
        }
    }
    match run_algorithm(&inst.instance, &spec) {
        Err(e) => row.error = Some(e.to_string()),
        Ok(result) => {
            let report = &result.report;
            row.runtime_s = report.runtime_s;
            row.high_level_nodes = report.stats.high_level_expanded;
            row.low_level_expansions = report.stats.low_level_expansions;
            row.adherence = result.adherence;
            match &report.outcome {
                Outcome::Solved(sol) => {
                    let metrics = sol.metrics();
                    row.success = true;
                    row.outcome = "solved".to_string();
                    row.makespan = Some(metrics.makespan);
                    row.flowtime = Some(metrics.flowtime);
                    row.valid = Some(validate(&result.instance, sol).is_valid());
                }
                Outcome::Infeasible => row.outcome = "infeasible".to_string(),
                Outcome::BudgetExhausted => row.outcome = "budget_exhausted".to_string(),
            }
        }
    }
    row
}

/// Runs the full instance by configuration grid. Rows come out in instance
/// order, then configuration order, whatever the worker count.
pub fn run_suite(suite: &Suite) -> Result<BenchmarkReport, BenchError> {
    let mut labels = BTreeSet::new();
    for cfg in &suite.configs {
        if !labels.insert(cfg.label.as_str()) {
            return Err(BenchError::DuplicateLabel(cfg.label.clone()));
        }
    }
    for (a, b) in &suite.comparisons {
        for l in [a, b] {
            if !labels.contains(l.as_str()) {
                return Err(BenchError::UnknownLabel(l.clone()));
            }
        }
    }
    let workers = suite.workers.max(1);
    let pool = rayon::ThreadPoolBuilder::new()
        .num_threads(workers)
        .build()
        .map_err(|e| BenchError::Pool(workers, e.to_string()))?;
    let cells: Vec<(&BenchInstance, &BenchConfig)> = suite
        .instances
        .iter()
        .flat_map(|i| suite.configs.iter().map(move |c| (i, c)))
        .collect();
    let rows: Vec<BenchRow> = pool.install(|| cells.par_iter().map(|(i, c)| run_cell(i, c)).collect());
    let aggregates = aggregate(&rows);
    let comparisons = suite
        .comparisons
        .iter()
        .map(|(a, b)| {
            let budget = suite
                .configs
                .iter()
                .filter(|c| &c.label == a || &c.label == b)
                .map(|c| c.spec.limits.max_nodes)
                .max()
                .unwrap_or(0);
            compare(&rows, a, b, budget)
        })
        .collect();
    Ok(BenchmarkReport {
        rows,
        aggregates,
        comparisons,
    })
}
