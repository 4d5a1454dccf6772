//! Acceptance checks. Each test prints one `[PRIMARY]` line with its verdict
//! before asserting, so `cargo test -- --nocapture` is not needed to read
//! the summary.

mod common;

use std::sync::Arc;
use std::time::Instant;

use common::*;
use mapfgen::flow::{anonymous_solve, cbm_solve};
use mapfgen::generate::{generate_instance, populate, InstanceParams};
use mapfgen::highways::{
    build_inflated_heuristic, ecbs_highway_solve, generate_highways, parse_highway, write_highway,
    HighwayParams,
};
use mapfgen::perr::perr_solve_optimal;
use mapfgen::search::{cbs_solve, ecbs_solve, Limits};
use mapfgen::stn::{
    build_stn, compute_schedule, default_deadline, simulate_execution, DelayCap, DelayDistribution,
    DelayModel, DelayOverride, Kinematics, Schedule, StnError,
};
use mapfgen::{
    assets, parse_map, parse_scenario, parse_solution, validate, write_map, write_scenario,
    write_solution, Flavor, Instance, MotionSemantics, Solution,
};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

const STD: MotionSemantics = MotionSemantics::STANDARD;
/// Float tolerance for schedule comparisons.
const TOL: f64 = 1e-9;

fn verdict(criterion: u32, name: &str, ok: bool, detail: &str) {
    let status = if ok { "PASS" } else { "FAIL" };
    report_line(&format!("[PRIMARY] criterion {criterion} {name}: {status} ({detail})"));
}

fn mapf_suite() -> Vec<(u64, Instance)> {
    random_suite(200, 6, 1..=3, 20, Flavor::Mapf, 0, 0)
}

fn limits() -> Limits {
    Limits::with_nodes(20_000)
}

fn valid(instance: &Instance, sol: &Solution) -> bool {
    validate(instance, sol).is_valid()
}

#[test]
fn criterion_1_cbs_matches_oracle() {
    let suite = mapf_suite();
    let started = Instant::now();
    let mut bad = Vec::new();
    for (seed, inst) in &suite {
        let report = cbs_solve(inst, STD, &limits()).unwrap();
        let expected = oracle_makespan(inst);
        let ok = match (report.solution(), expected) {
            (Some(sol), Some(opt)) => sol.metrics().makespan == opt && valid(inst, sol),
            (None, None) => report.is_infeasible(),
            _ => false,
        };
        if !ok {
            bad.push(*seed);
        }
    }
    let secs = started.elapsed().as_secs_f64();
    let ok = bad.is_empty() && secs < 120.0;
    verdict(
        1,
        "cbs optimal makespan on 200 small instances",
        ok,
        &format!("{} mismatches, {secs:.1} s", bad.len()),
    );
    assert!(ok, "mismatching seeds {bad:?}, {secs} s");
}

#[test]
fn criterion_2_ecbs_bound() {
    let suite = mapf_suite();
    let mut bad = Vec::new();
    let mut runs = 0;
    for (seed, inst) in &suite {
        let opt = oracle_makespan(inst);
        for w in [1.2, 1.5, 2.0] {
            runs += 1;
            let report = ecbs_solve(inst, w, STD, &limits()).unwrap();
            let ok = match (report.solution(), opt) {
                (Some(sol), Some(opt)) => {
                    sol.metrics().makespan as f64 <= w * opt as f64 + TOL && valid(inst, sol)
                }
                (None, None) => report.is_infeasible(),
                _ => false,
            };
            if !ok {
                bad.push((*seed, w));
            }
        }
    }
    let ok = bad.is_empty();
    verdict(
        2,
        "ecbs makespan within w of optimal",
        ok,
        &format!("{runs} runs, {} violations", bad.len()),
    );
    assert!(ok, "violations {bad:?}");
}

#[test]
fn criterion_3_anonymous_flow() {
    let suite = random_suite(100, 5, 1..=3, 20, Flavor::Tapf, 1, 5000);
    let mut bad = Vec::new();
    for (seed, inst) in &suite {
        let report = anonymous_solve(inst, &limits()).unwrap();
        let ok = match (report.solution(), assignment_oracle(inst)) {
            (Some(sol), Some(opt)) => sol.metrics().makespan == opt && valid(inst, sol),
            (None, None) => true,
            _ => false,
        };
        if !ok {
            bad.push(*seed);
        }
    }

    let params = InstanceParams {
        width: 20,
        height: 20,
        blocked_percent: 0.0,
        flavor: Flavor::Tapf,
        movers: 50,
        groups: 1,
    };
    let big = generate_instance(&params, 7).unwrap();
    let started = Instant::now();
    let report = anonymous_solve(&big, &limits()).unwrap();
    let secs = started.elapsed().as_secs_f64();
    let big_ok = report.solution().is_some_and(|s| valid(&big, s)) && secs < 10.0;

    let ok = bad.is_empty() && big_ok;
    verdict(
        3,
        "anonymous flow optimal, 50 movers on 20x20",
        ok,
        &format!("{} mismatches of 100, large instance {secs:.2} s", bad.len()),
    );
    assert!(ok, "mismatching seeds {bad:?}, large solved {big_ok} in {secs} s");
}

#[test]
fn criterion_4_cbm() {
    let mut bad = Vec::new();
    for (seed, inst) in &random_suite(50, 4, 4..=4, 20, Flavor::Tapf, 2, 6000) {
        let report = cbm_solve(inst, &limits()).unwrap();
        let ok = match (report.solution(), assignment_oracle(inst)) {
            (Some(sol), Some(opt)) => sol.metrics().makespan == opt && valid(inst, sol),
            (None, None) => true,
            _ => false,
        };
        if !ok {
            bad.push(("teams", *seed));
        }
    }
    // singleton teams behave like cbs
    for (seed, inst) in &random_suite(30, 5, 1..=3, 20, Flavor::Mapf, 0, 6100) {
        let tapf = inst.with_flavor(Flavor::Tapf).unwrap();
        let a = cbm_solve(&tapf, &limits()).unwrap().makespan();
        let b = cbs_solve(inst, STD, &limits()).unwrap().makespan();
        if a != b {
            bad.push(("singletons", *seed));
        }
    }
    // a single team behaves like the anonymous flow
    for (seed, inst) in &random_suite(30, 5, 1..=3, 20, Flavor::Tapf, 1, 6200) {
        let a = cbm_solve(inst, &limits()).unwrap().makespan();
        let b = anonymous_solve(inst, &limits()).unwrap().makespan();
        if a != b {
            bad.push(("one team", *seed));
        }
    }
    let ok = bad.is_empty();
    verdict(
        4,
        "cbm optimal over assignments, degenerates to cbs and flow",
        ok,
        &format!("110 instances, {} mismatches", bad.len()),
    );
    assert!(ok, "mismatches {bad:?}");
}

#[test]
fn criterion_5_package_exchange() {
    let mut bad = Vec::new();
    for (seed, inst) in &random_suite(100, 5, 1..=3, 20, Flavor::Mapf, 0, 8000) {
        let packages = inst.as_packages();
        let perr = perr_solve_optimal(&packages, &limits()).unwrap();
        let mapf = cbs_solve(inst, STD, &limits()).unwrap().makespan();
        let opt = oracle_makespan(&packages);
        let dominated = match (perr.makespan(), mapf) {
            (Some(p), Some(m)) => p <= m,
            (Some(_), None) => true,
            (None, m) => m.is_none(),
        };
        let optimal = perr.makespan() == opt && perr.solution().is_none_or(|s| valid(&packages, s));
        if !(dominated && optimal) {
            bad.push(*seed);
        }
    }

    let ws = Arc::new(parse_map(assets::HEAD_ON_MAP).unwrap());
    let head_on = parse_scenario(assets::HEAD_ON_SCENARIO, ws.clone()).unwrap();
    let packages = parse_scenario(assets::HEAD_ON_PACKAGES, ws).unwrap();
    let mapf_infeasible = cbs_solve(&head_on, STD, &limits()).unwrap().is_infeasible()
        && oracle_makespan(&head_on).is_none();
    let perr = perr_solve_optimal(&packages, &limits()).unwrap();
    let head_on_ok = mapf_infeasible
        && perr.makespan() == Some(3)
        && oracle_makespan(&packages) == Some(3)
        && perr.solution().is_some_and(|s| valid(&packages, s));

    // congested: same node budget for both
    let budget = Limits::with_nodes(1000);
    let (mut mapf_ok, mut perr_ok) = (0, 0);
    for (_, inst) in &random_suite(30, 6, 14..=14, 10, Flavor::Mapf, 0, 9000) {
        mapf_ok += usize::from(cbs_solve(inst, STD, &budget).unwrap().solution().is_some());
        perr_ok += usize::from(
            perr_solve_optimal(&inst.as_packages(), &budget)
                .unwrap()
                .solution()
                .is_some(),
        );
    }

    let ok = bad.is_empty() && head_on_ok && perr_ok >= mapf_ok;
    verdict(
        5,
        "package exchange never worse than fixed identities",
        ok,
        &format!(
            "{} mismatches of 100, head-on {head_on_ok}, congested solved perr {perr_ok} vs mapf {mapf_ok} of 30",
            bad.len()
        ),
    );
    assert!(ok, "seeds {bad:?}, head-on {head_on_ok}, congested {perr_ok} vs {mapf_ok}");
}

fn kiva_nodes(seed: u64) -> (Option<usize>, Option<usize>) {
    let ws = Arc::new(parse_map(assets::KIVA_MAP).unwrap());
    let hw = parse_highway(assets::KIVA_HIGHWAY, &ws).unwrap();
    let params = InstanceParams {
        width: 0,
        height: 0,
        blocked_percent: 0.0,
        flavor: Flavor::Mapf,
        movers: 20,
        groups: 0,
    };
    let inst = populate(ws, &params, &mut ChaCha8Rng::seed_from_u64(seed)).unwrap();
    let plain = ecbs_solve(&inst, 1.5, STD, &limits()).unwrap();
    let guided = ecbs_highway_solve(&inst, &hw, 2.0, 1.5, &limits()).unwrap().report;
    let nodes = |r: &mapfgen::search::SolveReport| r.solution().map(|_| r.stats.high_level_expanded);
    (nodes(&plain), nodes(&guided))
}

#[test]
fn criterion_6_highway_guardrail() {
    let mut bad = Vec::new();
    for (seed, inst) in &mapf_suite() {
        let opt = oracle_makespan(inst);
        let hw = random_highway(inst.workspace(), *seed);
        for (w1, w2) in [(1.5, 1.2), (2.0, 1.5)] {
            let r = ecbs_highway_solve(inst, &hw, w1, w2, &limits()).unwrap().report;
            let ok = match (r.solution(), opt) {
                (Some(sol), Some(opt)) => {
                    sol.metrics().makespan as f64 <= w1 * w2 * opt as f64 + TOL && valid(inst, sol)
                }
                (None, None) => r.is_infeasible(),
                _ => false,
            };
            if !ok {
                bad.push((*seed, w1, w2));
            }
        }
    }

    // inflated tables stay between the true distance and w times it
    let mut rng = ChaCha8Rng::seed_from_u64(66);
    let suite = random_suite(50, 8, 1..=1, 30, Flavor::Mapf, 0, 6600);
    let mut probe_failures = 0;
    for probe in 0..1000 {
        let (seed, inst) = &suite[probe % suite.len()];
        let ws = inst.workspace();
        let hw = random_highway(ws, seed + probe as u64);
        let goal = rng.random_range(0..ws.num_vertices());
        let w = rng.random_range(1.0..3.0);
        let table = build_inflated_heuristic(ws, goal, &hw, w).unwrap();
        let truth = bfs_to(ws, goal);
        for v in 0..ws.num_vertices() {
            let h = table.values[v];
            let ok = match truth[v] {
                Some(d) => h >= d as f64 - TOL && h <= w * d as f64 + TOL,
                None => h.is_infinite(),
            };
            if !ok {
                probe_failures += 1;
            }
        }
    }

    let wins = (0..10)
        .filter(|&seed| match kiva_nodes(seed) {
            (Some(plain), Some(guided)) => guided <= plain,
            _ => false,
        })
        .count();

    let ok = bad.is_empty() && probe_failures == 0 && wins >= 8;
    verdict(
        6,
        "highway search bounded by w1*w2, fewer nodes on the warehouse map",
        ok,
        &format!(
            "{} bound violations in 400 runs, {probe_failures} heuristic violations, guided <= plain nodes on {wins} of 10 seeds",
            bad.len()
        ),
    );
    assert!(ok, "bound {bad:?}, heuristic {probe_failures}, kiva wins {wins}");
}

/// Solutions for the schedule checks, each with its own kinematics, and the
/// number of solutions skipped because they rotate movers around a cycle
/// (bumper-to-bumper rotations cannot keep a positive safety margin).
fn stn_cases() -> (Vec<(Instance, Solution, Kinematics)>, usize) {
    let mut rng = ChaCha8Rng::seed_from_u64(77);
    let mut out = Vec::new();
    let mut rotations = 0;
    for (_, inst) in random_suite(80, 8, 2..=5, 20, Flavor::Mapf, 0, 7700) {
        if out.len() == 50 {
            break;
        }
        let Some(sol) = ecbs_solve(&inst, 1.5, STD, &limits()).unwrap().into_solution() else {
            continue;
        };
        let kin = Kinematics::uniform(
            rng.random_range(0.5..2.0),
            rng.random_range(0.0..0.5),
            rng.random_range(0.0..0.9),
        );
        let stn = build_stn(&sol, inst.workspace(), &kin, None).unwrap();
        if matches!(compute_schedule(&stn), Err(StnError::Inconsistent { .. })) {
            rotations += 1;
            continue;
        }
        out.push((inst, sol, kin));
    }
    (out, rotations)
}

#[test]
fn criterion_7_stn() {
    let (cases, rotations) = stn_cases();
    let mut failures = Vec::new();
    let mut sims = 0;
    for (k, (inst, sol, kin)) in cases.iter().enumerate() {
        let ws = inst.workspace();
        let free = compute_schedule(&build_stn(sol, ws, kin, None).unwrap()).unwrap();
        let deadline = default_deadline(&free);
        let schedule = compute_schedule(&build_stn(sol, ws, kin, Some(deadline)).unwrap()).unwrap();

        let zero = simulate_execution(&schedule, &DelayModel::zero()).unwrap();
        let same = zero
            .realized_s
            .iter()
            .zip(&schedule.events)
            .all(|(r, e)| (r - e.earliest_s).abs() <= TOL);
        if !same || zero.replan_needed {
            failures.push((k, "zero delay"));
        }

        for seed in 0..100 {
            sims += 1;
            let model = DelayModel {
                distribution: DelayDistribution::Uniform { max_s: 1.0 },
                cap: DelayCap::RemainingSlack,
                seed,
                overrides: vec![],
            };
            let trace = simulate_execution(&schedule, &model).unwrap();
            if trace.ordering_violations != 0
                || trace.replan_needed
                || !separation_ok(&schedule, &trace.realized_s, kin)
            {
                failures.push((k, "random delays"));
                break;
            }
        }

        if schedule.makespan_s() > 0.0 {
            let target = schedule.events.len() - 1;
            let model = DelayModel {
                overrides: vec![DelayOverride {
                    event: target,
                    delay_s: schedule.events[target].latest_s.unwrap() + 1.0,
                }],
                ..DelayModel::zero()
            };
            let trace = simulate_execution(&schedule, &model).unwrap();
            if !trace.replan_needed || trace.ordering_violations != 0 {
                failures.push((k, "override"));
            }

            let tight = build_stn(sol, ws, kin, Some(0.5 * free.makespan_s())).unwrap();
            match compute_schedule(&tight) {
                Err(StnError::Inconsistent { cycle }) if cycle_is_negative(&tight, &cycle) => {}
                _ => failures.push((k, "tight deadline")),
            }
        }
    }
    let ok = cases.len() == 50 && failures.is_empty();
    verdict(
        7,
        "schedules consistent, delays absorbed, infeasible deadlines detected",
        ok,
        &format!(
            "{} solutions, {sims} simulations, {} failures, {rotations} rotating plans skipped",
            cases.len(),
            failures.len()
        ),
    );
    assert!(ok, "{} cases, failures {failures:?}", cases.len());
}

/// Sums the cheapest distance-graph arc between consecutive cycle nodes.
fn cycle_is_negative(stn: &mapfgen::stn::TemporalNetwork, cycle: &[Option<usize>]) -> bool {
    if cycle.is_empty() || !cycle.contains(&None) {
        return false;
    }
    let mut total = 0.0;
    for i in 0..cycle.len() {
        let (a, b) = (cycle[i], cycle[(i + 1) % cycle.len()]);
        let mut best = f64::INFINITY;
        for c in &stn.constraints {
            let to = Some(c.to);
            if c.from == a && to == b {
                if let Some(ub) = c.ub {
                    best = best.min(ub);
                }
            }
            if c.from == b && to == a {
                best = best.min(-c.lb);
            }
        }
        total += best;
    }
    total < -TOL
}

#[test]
fn criterion_8_round_trips() {
    let mut failures: Vec<String> = Vec::new();
    let mut check = |what: &str, a: &str, b: &str| {
        if a != b {
            failures.push(what.to_string());
        }
    };

    let ws = Arc::new(parse_map(assets::KIVA_MAP).unwrap());
    let map_text = write_map(&ws);
    check("kiva map", &map_text, &write_map(&parse_map(&map_text).unwrap()));
    let hw = parse_highway(assets::KIVA_HIGHWAY, &ws).unwrap();
    let hw_text = write_highway(&hw, &ws).unwrap();
    check(
        "kiva highway",
        &hw_text,
        &write_highway(&parse_highway(&hw_text, &ws).unwrap(), &ws).unwrap(),
    );
    let traffic = parse_scenario(assets::KIVA_TRAFFIC, ws.clone()).unwrap();
    let scen_text = write_scenario(&traffic);
    check(
        "kiva scenario",
        &scen_text,
        &write_scenario(&parse_scenario(&scen_text, ws.clone()).unwrap()),
    );

    let flavors = [
        (Flavor::Mapf, 0),
        (Flavor::Tapf, 2),
        (Flavor::Perr, 0),
        (Flavor::Kperr, 2),
    ];
    for (flavor, groups) in flavors {
        let params = InstanceParams {
            width: 7,
            height: 6,
            blocked_percent: 15.0,
            flavor,
            movers: 4,
            groups,
        };
        for seed in 0..5 {
            let a = generate_instance(&params, seed).unwrap();
            let b = generate_instance(&params, seed).unwrap();
            check("generator map", &write_map(a.workspace()), &write_map(b.workspace()));
            check("generator scenario", &write_scenario(&a), &write_scenario(&b));

            let map_text = write_map(a.workspace());
            let ws = Arc::new(parse_map(&map_text).unwrap());
            check("map", &map_text, &write_map(&ws));
            let scen_text = write_scenario(&a);
            let parsed = parse_scenario(&scen_text, ws.clone()).unwrap();
            check("scenario", &scen_text, &write_scenario(&parsed));

            let alg = mapfgen::algorithm::RunSpec::new(match flavor {
                Flavor::Mapf => mapfgen::algorithm::Algorithm::Cbs,
                Flavor::Tapf => mapfgen::algorithm::Algorithm::Cbm,
                Flavor::Perr => mapfgen::algorithm::Algorithm::PerrOpt,
                Flavor::Kperr => mapfgen::algorithm::Algorithm::Kperr,
            });
            let run = mapfgen::algorithm::run_algorithm(&parsed, &alg).unwrap();
            if let Some(sol) = run.report.solution() {
                let text = write_solution(&parsed, sol).unwrap();
                let back = parse_solution(&text, &parsed).unwrap();
                check("solution", &text, &write_solution(&parsed, &back).unwrap());
            }
        }
    }

    let hw_params = HighwayParams::default();
    check(
        "highway generator",
        &write_highway(&generate_highways(&ws, &traffic, &hw_params), &ws).unwrap(),
        &write_highway(&generate_highways(&ws, &traffic, &hw_params), &ws).unwrap(),
    );

    for (inst, sol, kin) in stn_cases().0.iter().take(10) {
        let stn = build_stn(sol, inst.workspace(), kin, None).unwrap();
        let schedule = compute_schedule(&stn).unwrap();
        let text = schedule.to_json();
        check("schedule", &text, &Schedule::from_json(&text).unwrap().to_json());
        let model = DelayModel {
            distribution: DelayDistribution::Exponential { mean_s: 0.3 },
            cap: DelayCap::Uncapped,
            seed: 5,
            overrides: vec![],
        };
        check(
            "simulation",
            &simulate_execution(&schedule, &model).unwrap().to_json(),
            &simulate_execution(&schedule, &model).unwrap().to_json(),
        );
    }

    let ok = failures.is_empty();
    verdict(
        8,
        "byte-stable formats and deterministic generators",
        ok,
        &format!("{} mismatches", failures.len()),
    );
    assert!(ok, "mismatches {failures:?}");
}
