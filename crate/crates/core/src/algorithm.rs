//! One entry point over every solver, adapting instance flavors where the
//! conversion is lossless.

use std::fmt;
use std::str::FromStr;

use serde::{Deserialize, Serialize};

use crate::flow::{anonymous_solve, cbm_solve};
use crate::highways::{ecbs_highway_solve, Highway};
use crate::model::{Flavor, Instance, MotionSemantics};
use crate::perr::{kperr_solve, perr_solve_fast, perr_solve_optimal};
use crate::search::{cbs_solve, ecbs_solve, Limits, SolveError, SolveReport};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum Algorithm {
    Cbs,
    Ecbs,
    FlowAnon,
    Cbm,
    PerrOpt,
    PerrFast,
    Kperr,
}

impl Algorithm {
    pub const ALL: [Algorithm; 7] = [
        Algorithm::Cbs,
        Algorithm::Ecbs,
        Algorithm::FlowAnon,
        Algorithm::Cbm,
        Algorithm::PerrOpt,
        Algorithm::PerrFast,
        Algorithm::Kperr,
    ];

    pub fn name(self) -> &'static str {
        match self {
            Algorithm::Cbs => "cbs",
            Algorithm::Ecbs => "ecbs",
            Algorithm::FlowAnon => "flow-anon",
            Algorithm::Cbm => "cbm",
            Algorithm::PerrOpt => "perr-opt",
            Algorithm::PerrFast => "perr-fast",
            Algorithm::Kperr => "kperr",
        }
    }

    /// The instance this algorithm actually solves for `instance`. MAPF is
    /// read as singleton teams by CBM and as one package per mover by the
    /// PERR solvers; PERR is a K-PERR with singleton types.
    pub fn adapt(self, instance: &Instance) -> Result<Instance, SolveError> {
        let wrong = || SolveError::WrongFlavor {
            algorithm: self.name(),
            flavor: instance.flavor(),
        };
        let adapted = match (self, instance.flavor()) {
            (Algorithm::Cbs | Algorithm::Ecbs, Flavor::Mapf) => instance.clone(),
            (Algorithm::FlowAnon, Flavor::Tapf) if instance.groups().len() == 1 => instance.clone(),
            (Algorithm::Cbm, Flavor::Tapf) => instance.clone(),
            (Algorithm::Cbm, Flavor::Mapf) => instance.with_flavor(Flavor::Tapf).map_err(|_| wrong())?,
            (Algorithm::PerrOpt | Algorithm::PerrFast, Flavor::Perr) => instance.clone(),
            (Algorithm::PerrOpt | Algorithm::PerrFast, Flavor::Mapf) => instance.as_packages(),
            (Algorithm::Kperr, Flavor::Kperr) => instance.clone(),
            (Algorithm::Kperr, Flavor::Perr | Flavor::Mapf | Flavor::Tapf) => instance
                .as_packages()
                .with_flavor(Flavor::Kperr)
                .map_err(|_| wrong())?,
            _ => return Err(wrong()),
        };
        Ok(adapted)
    }
}

impl fmt::Display for Algorithm {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct UnknownAlgorithm(pub String);

impl fmt::Display for UnknownAlgorithm {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "unknown algorithm `{}`", self.0)
    }
}

impl std::error::Error for UnknownAlgorithm {}

impl FromStr for Algorithm {
    type Err = UnknownAlgorithm;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        Algorithm::ALL
            .into_iter()
            .find(|a| a.name() == s)
            .ok_or_else(|| UnknownAlgorithm(s.to_string()))
    }
}

/// Highway guidance for ECBS: inflation `w1` on off-highway edges.
#[derive(Debug, Clone)]
pub struct HighwayGuidance {
    pub highway: Highway,
    pub w1: f64,
}

#[derive(Debug, Clone)]
pub struct RunSpec {
    pub algorithm: Algorithm,
    /// Focal factor for ECBS (`w2` when a highway is given).
    pub w: f64,
    pub highway: Option<HighwayGuidance>,
    pub limits: Limits,
}

impl RunSpec {
    pub fn new(algorithm: Algorithm) -> Self {
        RunSpec {
            algorithm,
            w: 1.0,
            highway: None,
            limits: Limits::default(),
        }
    }
}

#[derive(Debug, Clone)]
pub struct RunResult {
    /// The instance the solution refers to, after flavor adaptation.
    pub instance: Instance,
    pub report: SolveReport,
    pub adherence: Option<f64>,
}

pub fn run_algorithm(instance: &Instance, spec: &RunSpec) -> Result<RunResult, SolveError> {
    if spec.highway.is_some() && spec.algorithm != Algorithm::Ecbs {
        return Err(SolveError::HighwayNeedsEcbs(spec.algorithm.name()));
    }
    let adapted = spec.algorithm.adapt(instance)?;
    let limits = &spec.limits;
    let mut adherence = None;
    let report = match spec.algorithm {
        Algorithm::Cbs => cbs_solve(&adapted, MotionSemantics::STANDARD, limits)?,
        Algorithm::Ecbs => match &spec.highway {
            Some(hw) => {
                let r = ecbs_highway_solve(&adapted, &hw.highway, hw.w1, spec.w, limits)?;
                adherence = r.adherence;
                r.report
            }
            None => ecbs_solve(&adapted, spec.w, MotionSemantics::STANDARD, limits)?,
        },
        Algorithm::FlowAnon => anonymous_solve(&adapted, limits)?,
        Algorithm::Cbm => cbm_solve(&adapted, limits)?,
        Algorithm::PerrOpt => perr_solve_optimal(&adapted, limits)?,
        Algorithm::PerrFast => perr_solve_fast(&adapted, limits)?,
        Algorithm::Kperr => kperr_solve(&adapted, limits)?,
    };
    Ok(RunResult {
        instance: adapted,
        report,
        adherence,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::model::{validate, Workspace};
    use std::sync::Arc;

    #[test]
    fn names_round_trip() {
        for a in Algorithm::ALL {
            assert_eq!(a.name().parse::<Algorithm>().unwrap(), a);
        }
        assert!("astar".parse::<Algorithm>().is_err());
    }

    #[test]
    fn every_algorithm_solves_a_compatible_corridor() {
        let ws = Arc::new(Workspace::from_grid(4, 2, vec![false; 8]));
        let mapf = Instance::mapf(ws.clone(), &[(0, 3), (4, 7)]).unwrap();
        let team = Instance::tapf(ws, &[(vec![0, 4], vec![3, 7])]).unwrap();
        for a in Algorithm::ALL {
            let inst = if a == Algorithm::FlowAnon { &team } else { &mapf };
            let mut spec = RunSpec::new(a);
            spec.w = 1.5;
            let r = run_algorithm(inst, &spec).unwrap();
            let sol = r.report.solution().unwrap_or_else(|| panic!("{a} failed"));
            assert!(validate(&r.instance, sol).is_valid(), "{a}");
        }
    }

    #[test]
    fn incompatible_flavor_is_an_error() {
        let ws = Arc::new(Workspace::from_grid(3, 1, vec![false; 3]));
        let team = Instance::tapf(ws, &[(vec![0, 1], vec![1, 2])]).unwrap();
        assert!(run_algorithm(&team, &RunSpec::new(Algorithm::Cbs)).is_err());
        assert!(run_algorithm(&team, &RunSpec::new(Algorithm::PerrOpt)).is_err());
    }
}
