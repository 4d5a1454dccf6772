mod config;
mod suite;

use std::path::{Path, PathBuf};
use std::process::ExitCode;
use std::sync::Arc;

use anyhow::{anyhow, bail, Context, Result};
use clap::{Args, Parser, Subcommand};
use mapfgen::algorithm::{run_algorithm, Algorithm, HighwayGuidance, RunSpec};
use mapfgen::bench::run_suite;
use mapfgen::generate::{generate_instance, InstanceParams};
use mapfgen::highways::{generate_highways, parse_highway, write_highway, HighwayParams};
use mapfgen::search::{Limits, Outcome};
use mapfgen::stn::{
    build_stn, compute_schedule, simulate_execution, DelayCap, DelayDistribution,
    DelayModel, DelayOverride, Kinematics, StnError,
};
use mapfgen::{
    parse_map, parse_scenario, parse_solution, validate, write_map, write_scenario, write_solution,
    Flavor, Instance, Solution,
};
use serde_json::json;

use config::{check_factor, RunConfig};
use suite::{load_suite, read_ref};

const EXIT_OK: u8 = 0;
const EXIT_USAGE: u8 = 1;
const EXIT_INFEASIBLE: u8 = 2;
const EXIT_BUDGET: u8 = 3;

#[derive(Parser, Debug)]
#[command(name = "mapfgen", version, about = "Multi-agent path finding and its generalizations")]
struct Cli {
    /// Random seed for generators and delay sampling.
    #[arg(long, global = true)]
    seed: Option<u64>,
    /// High-level node budget per search.
    #[arg(long, global = true)]
    budget_nodes: Option<usize>,
    /// Wall-clock budget per search.
    #[arg(long, global = true)]
    budget_seconds: Option<f64>,
    /// Output file (or file prefix for commands that write several).
    #[arg(long, global = true)]
    out: Option<PathBuf>,
    /// Versioned TOML run configuration; flags take precedence.
    #[arg(long, global = true)]
    config: Option<PathBuf>,
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand, Debug)]
enum Command {
    /// Solve an instance and print its metrics.
    Solve(SolveArgs),
    /// Check a solution file against an instance.
    Validate(ValidateArgs),
    /// Generate a random map and scenario.
    GenInstance(GenArgs),
    /// Derive a highway from the shortest paths of a scenario.
    GenHighway(GenHighwayArgs),
    /// Compute the earliest/latest schedule of a solution.
    Post(PostArgs),
    /// Simulate delayed execution of a schedule.
    Simulate(SimulateArgs),
    /// Run a benchmark suite.
    Benchmark(BenchmarkArgs),
}

/// Map and scenario; `@name` selects a bundled asset.
#[derive(Args, Debug)]
struct InstanceArgs {
    #[arg(long)]
    map: String,
    #[arg(long)]
    scen: String,
}

#[derive(Args, Debug)]
struct SolveArgs {
    #[command(flatten)]
    instance: InstanceArgs,
    #[arg(long)]
    alg: Option<Algorithm>,
    /// Focal factor for ecbs (w2 with a highway).
    #[arg(long)]
    w: Option<f64>,
    /// Highway file guiding ecbs; needs --w1.
    #[arg(long)]
    highway: Option<String>,
    /// Inflation of off-highway edges.
    #[arg(long)]
    w1: Option<f64>,
}

#[derive(Args, Debug)]
struct ValidateArgs {
    #[command(flatten)]
    instance: InstanceArgs,
    #[arg(long)]
    solution: PathBuf,
}

#[derive(Args, Debug)]
struct GenArgs {
    #[arg(long)]
    width: usize,
    #[arg(long)]
    height: usize,
    #[arg(long, default_value_t = 0.0)]
    blocked: f64,
    #[arg(long, value_parser = parse_flavor, default_value = "mapf")]
    flavor: Flavor,
    #[arg(long)]
    movers: usize,
    /// Teams (tapf) or package types (kperr).
    #[arg(long, visible_aliases = ["teams", "types"], default_value_t = 1)]
    groups: usize,
}

#[derive(Args, Debug)]
struct GenHighwayArgs {
    #[command(flatten)]
    instance: InstanceArgs,
    #[arg(long, default_value_t = 0.7)]
    ratio: f64,
    #[arg(long, default_value_t = 3)]
    corridor_degree: usize,
}

#[derive(Args, Debug, Clone)]
struct KinematicsArgs {
    /// Meters per second.
    #[arg(long)]
    v_max: Option<f64>,
    /// Seconds per 90 degree turn.
    #[arg(long)]
    rot_time: Option<f64>,
    /// Meters.
    #[arg(long)]
    safety: Option<f64>,
    /// Deadline in seconds; defaults to a multiple of the earliest makespan.
    #[arg(long)]
    deadline: Option<f64>,
    #[arg(long, default_value_t = 2.0)]
    deadline_factor: f64,
    /// Leave latest times unbounded.
    #[arg(long, conflicts_with = "deadline")]
    no_deadline: bool,
}

#[derive(Args, Debug)]
struct PostArgs {
    #[command(flatten)]
    instance: InstanceArgs,
    #[arg(long)]
    solution: PathBuf,
    #[command(flatten)]
    kinematics: KinematicsArgs,
}

#[derive(Args, Debug)]
struct SimulateArgs {
    #[command(flatten)]
    instance: InstanceArgs,
    #[arg(long)]
    solution: PathBuf,
    #[command(flatten)]
    kinematics: KinematicsArgs,
    /// `none`, `uniform:<max_s>` or `exp:<mean_s>`.
    #[arg(long, default_value = "none", value_parser = parse_delay)]
    delay: DelayDistribution,
    /// Clip sampled delays to the remaining slack.
    #[arg(long)]
    cap_to_slack: bool,
    /// Force `<event>=<seconds>` of delay on one event.
    #[arg(long = "override", value_parser = parse_override)]
    overrides: Vec<DelayOverride>,
}

#[derive(Args, Debug)]
struct BenchmarkArgs {
    #[arg(long)]
    suite: PathBuf,
}

fn parse_flavor(s: &str) -> Result<Flavor, String> {
    match s {
        "mapf" => Ok(Flavor::Mapf),
        "tapf" => Ok(Flavor::Tapf),
        "perr" => Ok(Flavor::Perr),
        "kperr" => Ok(Flavor::Kperr),
        _ => Err(format!("unknown flavor `{s}`")),
    }
}

fn parse_delay(s: &str) -> Result<DelayDistribution, String> {
    let number = |x: &str| x.parse::<f64>().map_err(|e| format!("{x}: {e}"));
    match s.split_once(':') {
        None if s == "none" => Ok(DelayDistribution::None),
        Some(("uniform", x)) => Ok(DelayDistribution::Uniform { max_s: number(x)? }),
        Some(("exp", x)) => Ok(DelayDistribution::Exponential { mean_s: number(x)? }),
        _ => Err(format!("unknown delay model `{s}`")),
    }
}

fn parse_override(s: &str) -> Result<DelayOverride, String> {
    let (e, d) = s.split_once('=').ok_or("expected <event>=<seconds>")?;
    Ok(DelayOverride {
        event: e.parse().map_err(|_| format!("bad event `{e}`"))?,
        delay_s: d.parse().map_err(|_| format!("bad delay `{d}`"))?,
    })
}

/// Global settings after merging the config file under the flags.
struct Globals {
    seed: u64,
    limits: Limits,
    out: Option<PathBuf>,
    config: RunConfig,
}

impl Globals {
    fn new(cli: &Cli) -> Result<Globals> {
        let config = match &cli.config {
            Some(p) => RunConfig::load(p)?,
            None => RunConfig::default(),
        };
        let mut limits = Limits::default();
        if let Some(n) = cli.budget_nodes.or(config.budget_nodes) {
            if n == 0 {
                bail!("--budget-nodes must be positive");
            }
            limits.max_nodes = n;
        }
        if let Some(s) = cli.budget_seconds.or(config.budget_seconds) {
            if !(s > 0.0) {
                bail!("--budget-seconds must be positive");
            }
            limits.max_seconds = Some(s);
        }
        Ok(Globals {
            seed: cli.seed.or(config.seed).unwrap_or(0),
            limits,
            out: cli.out.clone().or(config.out.clone()),
            config,
        })
    }

    /// Writes to `--out` if given, otherwise to stdout.
    fn emit(&self, text: &str) -> Result<()> {
        match &self.out {
            Some(p) => write_file(p, text),
            None => {
                print!("{text}");
                Ok(())
            }
        }
    }
}

fn write_file(path: &Path, text: &str) -> Result<()> {
    std::fs::write(path, text).with_context(|| format!("writing {}", path.display()))
}

fn load_instance(args: &InstanceArgs) -> Result<Instance> {
    let here = Path::new(".");
    let ws = parse_map(&read_ref(&args.map, "map", here)?).with_context(|| format!("parsing map {}", args.map))?;
    let text = read_ref(&args.scen, "scenario", here)?;
    parse_scenario(&text, Arc::new(ws)).with_context(|| format!("parsing scenario {}", args.scen))
}

fn load_solution(instance: &Instance, path: &Path) -> Result<Solution> {
    let text = std::fs::read_to_string(path).with_context(|| format!("reading {}", path.display()))?;
    Ok(parse_solution(&text, instance)?)
}

fn solve(g: &Globals, args: &SolveArgs) -> Result<u8> {
    let instance = load_instance(&args.instance)?;
    let algorithm = args
        .alg
        .or(g.config.algorithm)
        .ok_or_else(|| anyhow!("no algorithm given (--alg or config)"))?;
    let mut spec = RunSpec::new(algorithm);
    spec.w = check_factor("w", args.w.or(g.config.w).unwrap_or(1.0))?;
    spec.limits = g.limits.clone();
    let highway_ref = args
        .highway
        .clone()
        .or_else(|| g.config.highway.as_ref().map(|p| p.display().to_string()));
    if let Some(hw_ref) = highway_ref {
        let w1 = args
            .w1
            .or(g.config.w1)
            .ok_or_else(|| anyhow!("--highway requires --w1"))?;
        let text = read_ref(&hw_ref, "highway", Path::new("."))?;
        spec.highway = Some(HighwayGuidance {
            highway: parse_highway(&text, instance.workspace())?,
            w1: check_factor("w1", w1)?,
        });
    } else if args.w1.is_some() {
        bail!("--w1 needs --highway");
    }
    let result = run_algorithm(&instance, &spec)?;
    let report = &result.report;
    let (status, code) = match &report.outcome {
        Outcome::Solved(_) => ("solved", EXIT_OK),
        Outcome::Infeasible => ("infeasible", EXIT_INFEASIBLE),
        Outcome::BudgetExhausted => ("budget_exhausted", EXIT_BUDGET),
    };
    let mut summary = json!({
        "algorithm": algorithm.name(),
        "flavor": result.instance.flavor().to_string(),
        "outcome": status,
        "runtime_s": report.runtime_s,
        "stats": report.stats,
        "adherence": result.adherence,
    });
    if let Outcome::Solved(sol) = &report.outcome {
        let metrics = sol.metrics();
        summary["makespan"] = json!(metrics.makespan);
        summary["flowtime"] = json!(metrics.flowtime);
        summary["exchanges"] = json!(sol.exchanges.len());
        summary["valid"] = json!(validate(&result.instance, sol).is_valid());
        if let Some(out) = &g.out {
            write_file(out, &write_solution(&result.instance, sol)?)?;
        }
    }
    println!("{}", serde_json::to_string_pretty(&summary)?);
    Ok(code)
}

fn validate_cmd(args: &ValidateArgs) -> Result<u8> {
    let instance = load_instance(&args.instance)?;
    let sol = load_solution(&instance, &args.solution)?;
    let report = validate(&instance, &sol);
    println!(
        "{}",
        serde_json::to_string_pretty(&json!({
            "valid": report.is_valid(),
            "metrics": sol.metrics(),
            "issues": report.issues,
        }))?
    );
    Ok(if report.is_valid() { EXIT_OK } else { EXIT_INFEASIBLE })
}

fn gen_instance(g: &Globals, args: &GenArgs) -> Result<u8> {
    let prefix = g.out.clone().ok_or_else(|| anyhow!("gen-instance needs --out <prefix>"))?;
    let params = InstanceParams {
        width: args.width,
        height: args.height,
        blocked_percent: args.blocked,
        flavor: args.flavor,
        movers: args.movers,
        groups: args.groups,
    };
    let instance = generate_instance(&params, g.seed)?;
    let map_path = prefix.with_extension("map");
    let scen_path = prefix.with_extension("scen");
    write_file(&map_path, &write_map(instance.workspace()))?;
    write_file(&scen_path, &write_scenario(&instance))?;
    println!("{}\n{}", map_path.display(), scen_path.display());
    Ok(EXIT_OK)
}

fn gen_highway(g: &Globals, args: &GenHighwayArgs) -> Result<u8> {
    let instance = load_instance(&args.instance)?;
    let params = HighwayParams {
        ratio: args.ratio,
        corridor_degree: args.corridor_degree,
    };
    let hw = generate_highways(instance.workspace(), &instance, &params);
    g.emit(&write_highway(&hw, instance.workspace())?)?;
    Ok(EXIT_OK)
}

fn kinematics(g: &Globals, args: &KinematicsArgs) -> Kinematics {
    let mut kin = g.config.kinematics.clone().unwrap_or_default();
    if let Some(v) = args.v_max {
        kin.v_max = vec![v];
    }
    if let Some(r) = args.rot_time {
        kin.rot_time = r;
    }
    if let Some(s) = args.safety {
        kin.safety_distance = s;
    }
    kin
}

/// Builds and solves the temporal network; `Err(code)` after reporting an
/// inconsistent network.
fn schedule_for(
    g: &Globals,
    args: &InstanceArgs,
    solution: &Path,
    kin_args: &KinematicsArgs,
) -> Result<std::result::Result<mapfgen::stn::Schedule, u8>> {
    let instance = load_instance(args)?;
    let sol = load_solution(&instance, solution)?;
    let report = validate(&instance, &sol);
    if !report.is_valid() {
        bail!("solution is not valid: {:?}", report.issues);
    }
    let ws = instance.workspace();
    let kin = kinematics(g, kin_args);
    let deadline = if kin_args.no_deadline {
        None
    } else {
        match kin_args.deadline.or(g.config.deadline) {
            Some(d) => Some(d),
            None => {
                let free = compute_schedule(&build_stn(&sol, ws, &kin, None)?)?;
                Some(kin_args.deadline_factor * free.makespan_s())
            }
        }
    };
    let stn = build_stn(&sol, ws, &kin, deadline)?;
    match compute_schedule(&stn) {
        Ok(schedule) => Ok(Ok(schedule)),
        Err(e @ StnError::Inconsistent { .. }) => {
            let StnError::Inconsistent { cycle } = &e else { unreachable!() };
            eprintln!("error: {e}");
            println!(
                "{}",
                serde_json::to_string_pretty(&json!({ "consistent": false, "cycle": cycle }))?
            );
            Ok(Err(EXIT_INFEASIBLE))
        }
        Err(e) => Err(e.into()),
    }
}

fn post(g: &Globals, args: &PostArgs) -> Result<u8> {
    match schedule_for(g, &args.instance, &args.solution, &args.kinematics)? {
        Ok(schedule) => {
            g.emit(&schedule.to_json())?;
            Ok(EXIT_OK)
        }
        Err(code) => Ok(code),
    }
}

fn simulate(g: &Globals, args: &SimulateArgs) -> Result<u8> {
    let schedule = match schedule_for(g, &args.instance, &args.solution, &args.kinematics)? {
        Ok(s) => s,
        Err(code) => return Ok(code),
    };
    let model = DelayModel {
        distribution: args.delay,
        cap: if args.cap_to_slack {
            DelayCap::RemainingSlack
        } else {
            DelayCap::Uncapped
        },
        seed: g.seed,
        overrides: args.overrides.clone(),
    };
    let trace = simulate_execution(&schedule, &model)?;
    g.emit(&trace.to_json())?;
    Ok(EXIT_OK)
}

fn benchmark(g: &Globals, cli: &Cli, args: &BenchmarkArgs) -> Result<u8> {
    let suite = load_suite(&args.suite, cli.budget_nodes, cli.budget_seconds)?;
    let report = run_suite(&suite)?;
    let prefix = g.out.clone().unwrap_or_else(|| PathBuf::from("benchmark"));
    write_file(&prefix.with_extension("csv"), &report.to_csv()?)?;
    write_file(&prefix.with_extension("json"), &report.to_json())?;
    println!(
        "{}",
        serde_json::to_string_pretty(&json!({
            "aggregates": report.aggregates,
            "comparisons": report.comparisons,
        }))?
    );
    Ok(EXIT_OK)
}

fn run(cli: &Cli) -> Result<u8> {
    let g = Globals::new(cli)?;
    match &cli.command {
        Command::Solve(a) => solve(&g, a),
        Command::Validate(a) => validate_cmd(a),
        Command::GenInstance(a) => gen_instance(&g, a),
        Command::GenHighway(a) => gen_highway(&g, a),
        Command::Post(a) => post(&g, a),
        Command::Simulate(a) => simulate(&g, a),
        Command::Benchmark(a) => benchmark(&g, cli, a),
    }
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(cli) => cli,
        Err(e) => {
            let code = if e.use_stderr() { EXIT_USAGE } else { EXIT_OK };
            let _ = e.print();
            return ExitCode::from(code);
        }
    };
    match run(&cli) {
        Ok(code) => ExitCode::from(code),
        Err(e) => {
            eprintln!("error: {e:#}");
            ExitCode::from(EXIT_USAGE)
        }
    }
}
