//! Benchmark suite files (TOML).
//!
//! ```toml
//! version = 1
//! workers = 4
//! budget_nodes = 20000
//!
//! [[instances]]
//! id = "kiva"
//! map = "@kiva"            # bundled asset, or a path
//! scenario = "@kiva-traffic"
//! highway = "@kiva"        # optional, used by configs with w1
//!
//! [[generate]]
//! prefix = "open"
//! width = 8
//! height = 8
//! blocked_percent = 10.0
//! flavor = "mapf"
//! movers = 6
//! seeds = [1, 2, 3]
//!
//! [[configs]]
//! label = "ecbs-hwy"
//! algorithm = "ecbs"
//! w = 1.5
//! w1 = 2.0                 # guide by each instance's highway
//!
//! [[compare]]
//! baseline = "ecbs"
//! candidate = "ecbs-hwy"
//! ```

use std::path::{Path, PathBuf};
use std::sync::Arc;

use anyhow::{anyhow, bail, Context, Result};
use mapfgen::algorithm::{Algorithm, RunSpec};
use mapfgen::bench::{BenchConfig, BenchInstance, Suite};
use mapfgen::generate::{generate_instance, InstanceParams};
use mapfgen::highways::parse_highway;
use mapfgen::search::Limits;
use mapfgen::{assets, parse_map, parse_scenario, Flavor};
use serde::Deserialize;

use crate::config::check_factor;

#[derive(Debug, Deserialize)]
#[serde(deny_unknown_fields)]
struct SuiteFile {
    version: u32,
    #[serde(default = "one")]
    workers: usize,
    budget_nodes: Option<usize>,
    budget_seconds: Option<f64>,
    #[serde(default)]
    instances: Vec<FileInstance>,
    #[serde(default)]
    generate: Vec<GeneratedBatch>,
    #[serde(default)]
    configs: Vec<ConfigEntry>,
    #[serde(default)]
    compare: Vec<CompareEntry>,
}

fn one() -> usize {
    1
}

#[derive(Debug, Deserialize)]
#[serde(deny_unknown_fields)]
struct FileInstance {
    id: String,
    map: String,
    scenario: String,
    highway: Option<String>,
}

#[derive(Debug, Deserialize)]
#[serde(deny_unknown_fields)]
struct GeneratedBatch {
    prefix: String,
    width: usize,
    height: usize,
    #[serde(default)]
    blocked_percent: f64,
    flavor: Flavor,
    movers: usize,
    #[serde(default)]
    groups: usize,
    seeds: Vec<u64>,
}

#[derive(Debug, Deserialize)]
#[serde(deny_unknown_fields)]
struct ConfigEntry {
    label: String,
    algorithm: Algorithm,
    #[serde(default = "unit")]
    w: f64,
    w1: Option<f64>,
}

fn unit() -> f64 {
    1.0
}

#[derive(Debug, Deserialize)]
#[serde(deny_unknown_fields)]
struct CompareEntry {
    baseline: String,
    candidate: String,
}

/// Bundled text for `@name` references.
fn bundled(name: &str, kind: &str) -> Option<&'static str> {
    Some(match (kind, name) {
        ("map", "kiva") => assets::KIVA_MAP,
        ("map", "two-corridor") => assets::TWO_CORRIDOR_MAP,
        ("map", "head-on") => assets::HEAD_ON_MAP,
        ("scenario", "kiva-traffic") => assets::KIVA_TRAFFIC,
        ("scenario", "two-corridor") => assets::TWO_CORRIDOR_SCENARIO,
        ("scenario", "head-on") => assets::HEAD_ON_SCENARIO,
        ("scenario", "head-on-packages") => assets::HEAD_ON_PACKAGES,
        ("highway", "kiva") => assets::KIVA_HIGHWAY,
        ("highway", "two-corridor") => assets::TWO_CORRIDOR_HIGHWAY,
        _ => return None,
    })
}

/// Reads a file reference: `@name` for bundled assets, otherwise a path
/// relative to `base`.
pub fn read_ref(reference: &str, kind: &str, base: &Path) -> Result<String> {
    if let Some(name) = reference.strip_prefix('@') {
        return bundled(name, kind)
            .map(str::to_string)
            .ok_or_else(|| anyhow!("no bundled {kind} named `{name}`"));
    }
    let path: PathBuf = base.join(reference);
    std::fs::read_to_string(&path).with_context(|| format!("reading {kind} {}", path.display()))
}

pub fn load_suite(path: &Path, override_nodes: Option<usize>, override_seconds: Option<f64>) -> Result<Suite> {
    let text = std::fs::read_to_string(path).with_context(|| format!("reading suite {}", path.display()))?;
    let file: SuiteFile = toml::from_str(&text).with_context(|| format!("parsing suite {}", path.display()))?;
    if file.version != 1 {
        bail!("suite version {} is not supported (expected 1)", file.version);
    }
    let base = path.parent().unwrap_or(Path::new("."));
    let mut limits = Limits::default();
    if let Some(n) = override_nodes.or(file.budget_nodes) {
        if n == 0 {
            bail!("node budget must be positive");
        }
        limits.max_nodes = n;
    }
    if let Some(s) = override_seconds.or(file.budget_seconds) {
        if !(s > 0.0) {
            bail!("time budget must be positive");
        }
        limits.max_seconds = Some(s);
    }

    let mut instances = Vec::new();
    for entry in &file.instances {
        let map_text = read_ref(&entry.map, "map", base)?;
        let ws = Arc::new(parse_map(&map_text).with_context(|| format!("map of instance {}", entry.id))?);
        let scen = read_ref(&entry.scenario, "scenario", base)?;
        let instance =
            parse_scenario(&scen, ws.clone()).with_context(|| format!("scenario of instance {}", entry.id))?;
        let highway = match &entry.highway {
            Some(r) => {
                let text = read_ref(r, "highway", base)?;
                Some(parse_highway(&text, &ws).with_context(|| format!("highway of instance {}", entry.id))?)
            }
            None => None,
        };
        instances.push(BenchInstance {
            id: entry.id.clone(),
            instance,
            highway,
        });
    }
    for batch in &file.generate {
        let params = InstanceParams {
            width: batch.width,
            height: batch.height,
            blocked_percent: batch.blocked_percent,
            flavor: batch.flavor,
            movers: batch.movers,
            groups: batch.groups,
        };
        for &seed in &batch.seeds {
            let instance = generate_instance(&params, seed)
                .with_context(|| format!("generating {} seed {seed}", batch.prefix))?;
            instances.push(BenchInstance {
                id: format!("{}-{seed}", batch.prefix),
                instance,
                highway: None,
            });
        }
    }

    let mut configs = Vec::new();
    for entry in &file.configs {
        let mut spec = RunSpec::new(entry.algorithm);
        spec.w = check_factor("w", entry.w)?;
        spec.limits = limits.clone();
        let highway_w1 = entry.w1.map(|w1| check_factor("w1", w1)).transpose()?;
        if highway_w1.is_some() && entry.algorithm != Algorithm::Ecbs {
            bail!("configuration {}: highway guidance needs ecbs", entry.label);
        }
        configs.push(BenchConfig {
            label: entry.label.clone(),
            spec,
            highway_w1,
        });
    }
    Ok(Suite {
        instances,
        configs,
        comparisons: file
            .compare
            .into_iter()
            .map(|c| (c.baseline, c.candidate))
            .collect(),
        workers: file.workers,
    })
}
