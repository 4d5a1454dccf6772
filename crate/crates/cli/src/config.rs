//! Versioned TOML run configuration. Command-line flags override it.

use std::path::{Path, PathBuf};

use anyhow::{bail, Context, Result};
use mapfgen::algorithm::Algorithm;
use mapfgen::stn::Kinematics;
use serde::{Deserialize, Serialize};

pub const CONFIG_VERSION: u32 = 1;

#[derive(Debug, Clone, Default, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct RunConfig {
    pub version: u32,
    pub algorithm: Option<Algorithm>,
    pub w: Option<f64>,
    pub w1: Option<f64>,
    pub highway: Option<PathBuf>,
    pub seed: Option<u64>,
    pub budget_nodes: Option<usize>,
    pub budget_seconds: Option<f64>,
    pub out: Option<PathBuf>,
    pub kinematics: Option<Kinematics>,
    pub deadline: Option<f64>,
}

impl RunConfig {
    pub fn load(path: &Path) -> Result<RunConfig> {
        let text = std::fs::read_to_string(path)
            .with_context(|| format!("reading config {}", path.display()))?;
        let mut cfg: RunConfig =
            toml::from_str(&text).with_context(|| format!("parsing config {}", path.display()))?;
        if cfg.version != CONFIG_VERSION {
            bail!(
                "config {} has version {}, expected {CONFIG_VERSION}",
                path.display(),
                cfg.version
            );
        }
        // relative file references resolve against the config's directory
        let base = path.parent().unwrap_or(Path::new("."));
        for p in [&mut cfg.highway, &mut cfg.out].into_iter().flatten() {
            if p.is_relative() {
                *p = base.join(&*p);
            }
        }
        Ok(cfg)
    }
}

pub fn check_factor(name: &str, w: f64) -> Result<f64> {
    if !(w >= 1.0) || !w.is_finite() {
        bail!("{name} must be a finite number >= 1, got {w}");
    }
    Ok(w)
}
