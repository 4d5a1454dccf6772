use std::path::{Path, PathBuf};
use std::process::{Command, Output};

use serde_json::Value;
use tempfile::TempDir;

fn mapfgen(dir: &Path, args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_mapfgen"))
        .current_dir(dir)
        .args(args)
        .output()
        .expect("binary runs")
}

fn code(out: &Output) -> i32 {
    out.status.code().expect("exit code")
}

fn stdout_json(out: &Output) -> Value {
    serde_json::from_slice(&out.stdout).unwrap_or_else(|e| {
        panic!(
            "stdout is not JSON ({e}): {}\nstderr: {}",
            String::from_utf8_lossy(&out.stdout),
            String::from_utf8_lossy(&out.stderr)
        )
    })
}

fn write(dir: &Path, name: &str, text: &str) -> PathBuf {
    let p = dir.join(name);
    std::fs::write(&p, text).unwrap();
    p
}

fn corridor(dir: &Path) {
    write(dir, "c.map", "type octile\nheight 1\nwidth 3\nmap\n...\n");
    write(dir, "one.scen", "mapfgen-scen v1\nagent 0 0 0 2 0\n");
}

#[test]
fn solve_single_agent_corridor() {
    let dir = TempDir::new().unwrap();
    corridor(dir.path());
    let out = mapfgen(dir.path(), &["solve", "--map", "c.map", "--scen", "one.scen", "--alg", "cbs"]);
    assert_eq!(code(&out), 0);
    assert_eq!(stdout_json(&out)["makespan"], 2);
}

#[test]
fn head_on_is_infeasible_for_cbs() {
    let dir = TempDir::new().unwrap();
    let out = mapfgen(dir.path(), &["solve", "--map", "@head-on", "--scen", "@head-on", "--alg", "cbs"]);
    assert_eq!(code(&out), 2);
    assert_eq!(stdout_json(&out)["outcome"], "infeasible");
}

#[test]
fn head_on_packages_exchange_once() {
    let dir = TempDir::new().unwrap();
    let out = mapfgen(
        dir.path(),
        &["solve", "--map", "@head-on", "--scen", "@head-on-packages", "--alg", "perr-opt"],
    );
    assert_eq!(code(&out), 0);
    let v = stdout_json(&out);
    assert_eq!(v["makespan"], 3);
    assert_eq!(v["exchanges"], 1);
}

#[test]
fn highway_without_w1_is_a_usage_error() {
    let dir = TempDir::new().unwrap();
    let out = mapfgen(
        dir.path(),
        &["solve", "--map", "@kiva", "--scen", "@kiva-traffic", "--alg", "ecbs", "--w", "1.5", "--highway", "@kiva"],
    );
    assert_eq!(code(&out), 1);
    assert!(String::from_utf8_lossy(&out.stderr).contains("--w1"));
}

#[test]
fn bad_flags_and_factors_exit_1() {
    let dir = TempDir::new().unwrap();
    assert_eq!(code(&mapfgen(dir.path(), &["frobnicate"])), 1);
    let out = mapfgen(dir.path(), &["solve", "--map", "@head-on", "--scen", "@head-on", "--alg", "ecbs", "--w", "0.5"]);
    assert_eq!(code(&out), 1);
    let out = mapfgen(dir.path(), &["solve", "--map", "@head-on", "--scen", "@head-on", "--alg", "flow-anon"]);
    assert_eq!(code(&out), 1, "flavor mismatch");
    assert_eq!(code(&mapfgen(dir.path(), &["--help"])), 0);
}

#[test]
fn node_budget_exhaustion_exits_3() {
    let dir = TempDir::new().unwrap();
    // swapping the ends of a corridor with a middle pocket needs several
    // high-level expansions
    write(dir.path(), "g.map", "type octile\nheight 2\nwidth 3\nmap\n...\n@.@\n");
    write(dir.path(), "x.scen", "mapfgen-scen v1\nagent 0 0 0 2 0\nagent 1 2 0 0 0\n");
    let out = mapfgen(
        dir.path(),
        &["--budget-nodes", "1", "solve", "--map", "g.map", "--scen", "x.scen", "--alg", "cbs"],
    );
    assert_eq!(code(&out), 3, "{}", String::from_utf8_lossy(&out.stdout));
}

#[test]
fn solve_then_validate_round_trip() {
    let dir = TempDir::new().unwrap();
    for (alg, scen) in [
        ("cbs", "@kiva-traffic"),
        ("ecbs", "@kiva-traffic"),
        ("cbm", "@kiva-traffic"),
        ("perr-fast", "@kiva-traffic"),
    ] {
        let out = mapfgen(
            dir.path(),
            &["--out", "sol.json", "solve", "--map", "@kiva", "--scen", scen, "--alg", alg, "--w", "1.5"],
        );
        assert_eq!(code(&out), 0, "{alg}: {}", String::from_utf8_lossy(&out.stderr));
        // packages are validated under the flavor the solver used
        let check_scen = if alg == "perr-fast" { "perr.scen" } else { scen };
        if alg == "perr-fast" {
            let text = mapfgen::write_scenario(
                &mapfgen::parse_scenario(mapfgen::assets::KIVA_TRAFFIC, std::sync::Arc::new(mapfgen::parse_map(mapfgen::assets::KIVA_MAP).unwrap()))
                    .unwrap()
                    .as_packages(),
            );
            write(dir.path(), "perr.scen", &text);
        }
        let out = mapfgen(dir.path(), &["validate", "--map", "@kiva", "--scen", check_scen, "--solution", "sol.json"]);
        assert_eq!(code(&out), 0, "{alg}: {}", String::from_utf8_lossy(&out.stdout));
        assert_eq!(stdout_json(&out)["valid"], true);
    }
}

#[test]
fn gen_instance_is_deterministic() {
    let dir = TempDir::new().unwrap();
    let args = |out: &'static str| {
        vec!["--seed", "42", "--out", out, "gen-instance", "--width", "7", "--height", "6", "--blocked", "15", "--movers", "5"]
    };
    assert_eq!(code(&mapfgen(dir.path(), &args("a"))), 0);
    assert_eq!(code(&mapfgen(dir.path(), &args("b"))), 0);
    for ext in ["map", "scen"] {
        let a = std::fs::read(dir.path().join(format!("a.{ext}"))).unwrap();
        let b = std::fs::read(dir.path().join(format!("b.{ext}"))).unwrap();
        assert_eq!(a, b, "{ext}");
    }
}

#[test]
fn gen_instance_rejects_overfull_grids() {
    let dir = TempDir::new().unwrap();
    let out = mapfgen(dir.path(), &["--out", "x", "gen-instance", "--width", "2", "--height", "2", "--movers", "5"]);
    assert_eq!(code(&out), 1);
}

#[test]
fn gen_instance_teams() {
    let dir = TempDir::new().unwrap();
    let out = mapfgen(
        dir.path(),
        &["--seed", "3", "--out", "t", "gen-instance", "--width", "6", "--height", "6", "--flavor", "tapf", "--movers", "6", "--teams", "2"],
    );
    assert_eq!(code(&out), 0);
    let scen = std::fs::read_to_string(dir.path().join("t.scen")).unwrap();
    let teams: Vec<&str> = scen.lines().filter(|l| l.starts_with("team ")).collect();
    assert_eq!(teams.len(), 2);
    for t in teams {
        let targets = t.split(" targets ").nth(1).unwrap();
        assert_eq!(targets.split(';').count(), 3);
    }
}

#[test]
fn gen_highway_writes_a_loadable_file() {
    let dir = TempDir::new().unwrap();
    let out = mapfgen(dir.path(), &["--out", "h.hwy", "gen-highway", "--map", "@kiva", "--scen", "@kiva-traffic"]);
    assert_eq!(code(&out), 0);
    let out = mapfgen(
        dir.path(),
        &["solve", "--map", "@kiva", "--scen", "@kiva-traffic", "--alg", "ecbs", "--w", "1.5", "--highway", "h.hwy", "--w1", "2"],
    );
    assert_eq!(code(&out), 0);
    assert!(stdout_json(&out)["adherence"].as_f64().is_some());
}

fn chain_solution(dir: &Path) {
    corridor(dir);
    let out = mapfgen(dir, &["--out", "sol.json", "solve", "--map", "c.map", "--scen", "one.scen", "--alg", "cbs"]);
    assert_eq!(code(&out), 0);
}

#[test]
fn post_with_deadline_reports_slack() {
    let dir = TempDir::new().unwrap();
    chain_solution(dir.path());
    let out = mapfgen(
        dir.path(),
        &["post", "--map", "c.map", "--scen", "one.scen", "--solution", "sol.json", "--deadline", "4"],
    );
    assert_eq!(code(&out), 0);
    let v = stdout_json(&out);
    let slack: Vec<f64> = v["events"].as_array().unwrap().iter().map(|e| e["slack_s"].as_f64().unwrap()).collect();
    assert_eq!(slack, vec![2.0, 2.0, 2.0]);
}

#[test]
fn post_default_deadline_is_twice_the_makespan() {
    let dir = TempDir::new().unwrap();
    chain_solution(dir.path());
    let out = mapfgen(dir.path(), &["post", "--map", "c.map", "--scen", "one.scen", "--solution", "sol.json"]);
    let v = stdout_json(&out);
    let last = v["events"].as_array().unwrap().last().unwrap().clone();
    assert_eq!(last["latest_s"], 4.0);
}

#[test]
fn tight_deadline_exits_2_with_a_cycle() {
    let dir = TempDir::new().unwrap();
    chain_solution(dir.path());
    let out = mapfgen(
        dir.path(),
        &["post", "--map", "c.map", "--scen", "one.scen", "--solution", "sol.json", "--deadline", "1"],
    );
    assert_eq!(code(&out), 2);
    let v = stdout_json(&out);
    assert_eq!(v["consistent"], false);
    assert!(!v["cycle"].as_array().unwrap().is_empty());
    assert!(String::from_utf8_lossy(&out.stderr).contains("X0"));
}

#[test]
fn zero_delay_simulation_matches_the_schedule() {
    let dir = TempDir::new().unwrap();
    chain_solution(dir.path());
    let args = ["--map", "c.map", "--scen", "one.scen", "--solution", "sol.json", "--v-max", "0.7", "--rot-time", "0.3"];
    let post = stdout_json(&mapfgen(dir.path(), &[&["post"][..], &args[..]].concat()));
    let sim = stdout_json(&mapfgen(dir.path(), &[&["simulate"][..], &args[..]].concat()));
    let earliest: Vec<f64> = post["events"].as_array().unwrap().iter().map(|e| e["earliest_s"].as_f64().unwrap()).collect();
    let realized: Vec<f64> = sim["realized_s"].as_array().unwrap().iter().map(|e| e.as_f64().unwrap()).collect();
    assert_eq!(earliest, realized);
    assert_eq!(sim["replan_needed"], false);
}

#[test]
fn adversarial_override_flags_a_replan() {
    let dir = TempDir::new().unwrap();
    chain_solution(dir.path());
    let out = mapfgen(
        dir.path(),
        &["simulate", "--map", "c.map", "--scen", "one.scen", "--solution", "sol.json", "--deadline", "4", "--override", "1=5"],
    );
    assert_eq!(code(&out), 0);
    let v = stdout_json(&out);
    assert_eq!(v["replan_needed"], true);
    assert_eq!(v["ordering_violations"], 0);
}

#[test]
fn config_file_supplies_defaults() {
    let dir = TempDir::new().unwrap();
    corridor(dir.path());
    write(dir.path(), "run.toml", "version = 1\nalgorithm = \"ecbs\"\nw = 1.2\n");
    let out = mapfgen(dir.path(), &["--config", "run.toml", "solve", "--map", "c.map", "--scen", "one.scen"]);
    assert_eq!(code(&out), 0);
    assert_eq!(stdout_json(&out)["algorithm"], "ecbs");
    write(dir.path(), "bad.toml", "version = 2\n");
    let out = mapfgen(dir.path(), &["--config", "bad.toml", "solve", "--map", "c.map", "--scen", "one.scen"]);
    assert_eq!(code(&out), 1);
}

#[test]
fn empty_benchmark_writes_headers() {
    let dir = TempDir::new().unwrap();
    write(dir.path(), "suite.toml", "version = 1\n");
    let out = mapfgen(dir.path(), &["--out", "rep", "benchmark", "--suite", "suite.toml"]);
    assert_eq!(code(&out), 0);
    let csv = std::fs::read_to_string(dir.path().join("rep.csv")).unwrap();
    assert_eq!(csv.lines().count(), 1);
    assert!(csv.starts_with("instance_id,"));
    let json: Value = serde_json::from_str(&std::fs::read_to_string(dir.path().join("rep.json")).unwrap()).unwrap();
    assert_eq!(json["rows"].as_array().unwrap().len(), 0);
}

#[test]
fn paired_benchmarks() {
    let dir = TempDir::new().unwrap();
    let suite = r#"
version = 1
workers = 2
budget_nodes = 5000

[[instances]]
id = "kiva"
map = "@kiva"
scenario = "@kiva-traffic"
highway = "@kiva"

[[generate]]
prefix = "dense"
width = 4
height = 4
blocked_percent = 10.0
flavor = "mapf"
movers = 7
seeds = [1, 2, 3, 4, 5]

[[configs]]
label = "mapf"
algorithm = "cbs"

[[configs]]
label = "perr"
algorithm = "perr-fast"

[[configs]]
label = "ecbs"
algorithm = "ecbs"
w = 1.5

[[configs]]
label = "ecbs-hwy"
algorithm = "ecbs"
w = 1.5
w1 = 2.0

[[compare]]
baseline = "mapf"
candidate = "perr"

[[compare]]
baseline = "ecbs"
candidate = "ecbs-hwy"
"#;
    write(dir.path(), "suite.toml", suite);
    let out = mapfgen(dir.path(), &["--out", "rep", "benchmark", "--suite", "suite.toml"]);
    assert_eq!(code(&out), 0, "{}", String::from_utf8_lossy(&out.stderr));
    let report: Value = serde_json::from_str(&std::fs::read_to_string(dir.path().join("rep.json")).unwrap()).unwrap();
    let rows = report["rows"].as_array().unwrap();
    assert_eq!(rows.len(), 6 * 4);
    let kiva_hwy = rows
        .iter()
        .find(|r| r["instance_id"] == "kiva" && r["config"] == "ecbs-hwy")
        .unwrap();
    assert!(kiva_hwy["adherence"].as_f64().is_some());
    assert!(kiva_hwy["high_level_nodes"].as_u64().is_some());
    let cmp = &report["comparisons"][0];
    assert!(cmp["candidate_successes"].as_u64() >= cmp["baseline_successes"].as_u64());
    let csv = std::fs::read_to_string(dir.path().join("rep.csv")).unwrap();
    assert_eq!(csv.lines().count(), rows.len() + 1);
}
