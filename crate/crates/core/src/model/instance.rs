use std::collections::{BTreeSet, HashSet};
use std::fmt;
use std::sync::Arc;

use serde::{Deserialize, Serialize};
use thiserror::Error;

use super::workspace::{VertexId, Workspace};

/// Problem flavor. PERR and K-PERR route packages that may be exchanged
/// between movers in adjacent vertices.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Flavor {
    Mapf,
    Tapf,
    Perr,
    Kperr,
}

impl Flavor {
    pub fn semantics(self) -> MotionSemantics {
        MotionSemantics {
            allow_swap: matches!(self, Flavor::Perr | Flavor::Kperr),
        }
    }

    pub fn is_package_flavor(self) -> bool {
        matches!(self, Flavor::Perr | Flavor::Kperr)
    }
}

impl fmt::Display for Flavor {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Flavor::Mapf => "mapf",
            Flavor::Tapf => "tapf",
            Flavor::Perr => "perr",
            Flavor::Kperr => "kperr",
        })
    }
}

/// Whether two movers may traverse one edge in opposite directions during
/// the same step. `true` models a package exchange.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub struct MotionSemantics {
    pub allow_swap: bool,
}

impl MotionSemantics {
    pub const STANDARD: MotionSemantics = MotionSemantics { allow_swap: false };
    pub const EXCHANGE: MotionSemantics = MotionSemantics { allow_swap: true };
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct Mover {
    pub id: u32,
    pub start: VertexId,
}

/// A set of interchangeable movers (or packages) and the targets they must
/// cover. Standard MAPF and PERR use singleton groups; TAPF groups are
/// teams; K-PERR groups are package types.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Group {
    /// Agent id (MAPF), team id (TAPF) or package type (PERR/K-PERR).
    pub label: u32,
    /// Indices into [`Instance::movers`].
    pub members: Vec<usize>,
    pub targets: Vec<VertexId>,
}

#[derive(Debug, Error, PartialEq)]
pub enum InstanceError {
    #[error("instance has no movers")]
    Empty,
    #[error("vertex {0} is not in the workspace")]
    UnknownVertex(VertexId),
    #[error("movers {0} and {1} share start vertex {2}")]
    DuplicateStart(u32, u32, VertexId),
    #[error("duplicate mover id {0}")]
    DuplicateId(u32),
    #[error("team cardinality mismatch: group {label} has {members} members and {targets} targets")]
    TeamCardinalityMismatch {
        label: u32,
        members: usize,
        targets: usize,
    },
    #[error("group {0} lists target vertex {1} twice")]
    DuplicateTarget(u32, VertexId),
    #[error("mover index {0} is not covered by exactly one group")]
    BadPartition(usize),
    #[error("{0} instances need singleton groups")]
    NotSingleton(Flavor),
    #[error("duplicate group label {0}")]
    DuplicateLabel(u32),
}

/// Immutable problem instance over a shared workspace.
#[derive(Debug, Clone)]
pub struct Instance {
    workspace: Arc<Workspace>,
    flavor: Flavor,
    movers: Vec<Mover>,
    groups: Vec<Group>,
    group_of: Vec<usize>,
}

impl PartialEq for Instance {
    fn eq(&self, other: &Self) -> bool {
        self.flavor == other.flavor
            && self.movers == other.movers
            && self.groups == other.groups
            && *self.workspace == *other.workspace
    }
}

impl Instance {
    pub fn new(
        workspace: Arc<Workspace>,
        flavor: Flavor,
        movers: Vec<Mover>,
        groups: Vec<Group>,
    ) -> Result<Self, InstanceError> {
        if movers.is_empty() {
            return Err(InstanceError::Empty);
        }
        let mut starts = std::collections::HashMap::new();
        let mut ids = HashSet::new();
        for m in &movers {
            if !workspace.contains(m.start) {
                return Err(InstanceError::UnknownVertex(m.start));
            }
            if let Some(prev) = starts.insert(m.start, m.id) {
                return Err(InstanceError::DuplicateStart(prev, m.id, m.start));
            }
            if !ids.insert(m.id) {
                return Err(InstanceError::DuplicateId(m.id));
            }
        }
        let mut group_of = vec![usize::MAX; movers.len()];
        let mut labels = HashSet::new();
        for (g, group) in groups.iter().enumerate() {
            if group.members.len() != group.targets.len() {
                return Err(InstanceError::TeamCardinalityMismatch {
                    label: group.label,
                    members: group.members.len(),
                    targets: group.targets.len(),
                });
            }
            if group.members.is_empty() {
                return Err(InstanceError::TeamCardinalityMismatch {
                    label: group.label,
                    members: 0,
                    targets: 0,
                });
            }
            if !labels.insert(group.label) {
                return Err(InstanceError::DuplicateLabel(group.label));
            }
            let mut seen = BTreeSet::new();
            for &t in &group.targets {
                if !workspace.contains(t) {
                    return Err(InstanceError::UnknownVertex(t));
                }
                if !seen.insert(t) {
                    return Err(InstanceError::DuplicateTarget(group.label, t));
                }
            }
            for &m in &group.members {
                if m >= movers.len() || group_of[m] != usize::MAX {
                    return Err(InstanceError::BadPartition(m));
                }
                group_of[m] = g;
            }
            if matches!(flavor, Flavor::Mapf | Flavor::Perr) && group.members.len() != 1 {
                return Err(InstanceError::NotSingleton(flavor));
            }
        }
        if let Some(m) = group_of.iter().position(|&g| g == usize::MAX) {
            return Err(InstanceError::BadPartition(m));
        }
        Ok(Instance {
            workspace,
            flavor,
            movers,
            groups,
            group_of,
        })
    }

    /// Standard MAPF from `(start, target)` pairs; mover ids are indices.
    pub fn mapf(
        workspace: Arc<Workspace>,
        pairs: &[(VertexId, VertexId)],
    ) -> Result<Self, InstanceError> {
        let movers = pairs
            .iter()
            .enumerate()
            .map(|(i, &(s, _))| Mover { id: i as u32, start: s })
            .collect();
        let groups = pairs
            .iter()
            .enumerate()
            .map(|(i, &(_, t))| Group {
                label: i as u32,
                members: vec![i],
                targets: vec![t],
            })
            .collect();
        Instance::new(workspace, Flavor::Mapf, movers, groups)
    }

    /// TAPF from `(member starts, targets)` teams; movers are numbered in
    /// declaration order and teams by position.
    pub fn tapf(
        workspace: Arc<Workspace>,
        teams: &[(Vec<VertexId>, Vec<VertexId>)],
    ) -> Result<Self, InstanceError> {
        let mut movers = Vec::new();
        let mut groups = Vec::new();
        for (label, (starts, targets)) in teams.iter().enumerate() {
            let base = movers.len();
            let members = (base..base + starts.len()).collect();
            movers.extend(starts.iter().enumerate().map(|(k, &s)| Mover {
                id: (base + k) as u32,
                start: s,
            }));
            groups.push(Group {
                label: label as u32,
                members,
                targets: targets.clone(),
            });
        }
        Instance::new(workspace, Flavor::Tapf, movers, groups)
    }

    /// Package instance from `(start, target, type)` triples. All-distinct
    /// types give PERR, otherwise K-PERR.
    pub fn packages(
        workspace: Arc<Workspace>,
        packages: &[(VertexId, VertexId, u32)],
    ) -> Result<Self, InstanceError> {
        let movers = packages
            .iter()
            .enumerate()
            .map(|(i, &(s, _, _))| Mover { id: i as u32, start: s })
            .collect();
        let mut groups: Vec<Group> = Vec::new();
        for (i, &(_, t, k)) in packages.iter().enumerate() {
            match groups.iter_mut().find(|g| g.label == k) {
                Some(g) => {
                    g.members.push(i);
                    g.targets.push(t);
                }
                None => groups.push(Group {
                    label: k,
                    members: vec![i],
                    targets: vec![t],
                }),
            }
        }
        let flavor = if groups.len() == packages.len() {
            Flavor::Perr
        } else {
            Flavor::Kperr
        };
        Instance::new(workspace, flavor, movers, groups)
    }

    pub fn workspace(&self) -> &Workspace {
        &self.workspace
    }

    pub fn workspace_arc(&self) -> &Arc<Workspace> {
        &self.workspace
    }

    pub fn flavor(&self) -> Flavor {
        self.flavor
    }

    pub fn semantics(&self) -> MotionSemantics {
        self.flavor.semantics()
    }

    pub fn movers(&self) -> &[Mover] {
        &self.movers
    }

    pub fn num_movers(&self) -> usize {
        self.movers.len()
    }

    pub fn starts(&self) -> Vec<VertexId> {
        self.movers.iter().map(|m| m.start).collect()
    }

    pub fn groups(&self) -> &[Group] {
        &self.groups
    }

    /// Group index of mover (or package) `m`.
    pub fn group_of(&self, m: usize) -> usize {
        self.group_of[m]
    }

    pub fn mover_index(&self, id: u32) -> Option<usize> {
        self.movers.iter().position(|m| m.id == id)
    }

    /// Fixed target of `m` when its group is a singleton.
    pub fn fixed_target(&self, m: usize) -> Option<VertexId> {
        let g = &self.groups[self.group_of[m]];
        (g.members.len() == 1).then(|| g.targets[0])
    }

    /// The package-as-agent view: same movers and groups, relabelled as
    /// MAPF (PERR) or TAPF (K-PERR). Packages start at their carriers.
    pub fn package_view(&self) -> Instance {
        let flavor = match self.flavor {
            Flavor::Perr | Flavor::Mapf => Flavor::Mapf,
            Flavor::Kperr | Flavor::Tapf => Flavor::Tapf,
        };
        Instance {
            flavor,
            ..self.clone()
        }
    }

    /// Reinterprets the movers as package carriers with one package type
    /// per group (MAPF becomes PERR, TAPF becomes K-PERR).
    pub fn as_packages(&self) -> Instance {
        let flavor = match self.flavor {
            Flavor::Mapf | Flavor::Perr => Flavor::Perr,
            Flavor::Tapf | Flavor::Kperr => {
                if self.groups.len() == self.movers.len() {
                    Flavor::Perr
                } else {
                    Flavor::Kperr
                }
            }
        };
        Instance {
            flavor,
            ..self.clone()
        }
    }

    /// Same starts and groups with the given flavor; fails if the group
    /// shape does not fit it.
    pub fn with_flavor(&self, flavor: Flavor) -> Result<Instance, InstanceError> {
        Instance::new(
            self.workspace.clone(),
            flavor,
            self.movers.clone(),
            self.groups.clone(),
        )
    }
}
