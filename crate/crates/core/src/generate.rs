//! Seeded random grid instances.

use std::sync::Arc;

use rand::seq::SliceRandom;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::model::{Flavor, Instance, InstanceError, VertexId, Workspace};

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct InstanceParams {
    pub width: usize,
    pub height: usize,
    /// Percentage of cells blocked, `0..100`.
    pub blocked_percent: f64,
    pub flavor: Flavor,
    /// Total number of movers.
    pub movers: usize,
    /// Teams (TAPF) or package types (K-PERR); ignored for MAPF and PERR.
    /// Movers are split as evenly as possible, earlier groups larger.
    pub groups: usize,
}

#[derive(Debug, Error, PartialEq)]
pub enum GenerateError {
    #[error("grid must have positive width and height")]
    EmptyGrid,
    #[error("blocked percentage {0} is outside [0, 100)")]
    BadBlocked(f64),
    #[error("{movers} movers do not fit the {free} reachable free cells")]
    TooManyMovers { movers: usize, free: usize },
    #[error("need at least one mover")]
    NoMovers,
    #[error("{groups} groups cannot partition {movers} movers")]
    BadGroups { groups: usize, movers: usize },
    #[error(transparent)]
    Instance(#[from] InstanceError),
}

/// Random grid with exactly `round(w * h * percent / 100)` blocked cells.
pub fn random_grid(
    width: usize,
    height: usize,
    blocked_percent: f64,
    rng: &mut ChaCha8Rng,
) -> Result<Workspace, GenerateError> {
    if width == 0 || height == 0 {
        return Err(GenerateError::EmptyGrid);
    }
    if !(0.0..100.0).contains(&blocked_percent) {
        return Err(GenerateError::BadBlocked(blocked_percent));
    }
    let cells = width * height;
    let count = ((cells as f64) * blocked_percent / 100.0).round() as usize;
    let mut order: Vec<usize> = (0..cells).collect();
    order.shuffle(rng);
    let mut blocked = vec![false; cells];
    for &c in &order[..count.min(cells - 1)] {
        blocked[c] = true;
    }
    Ok(Workspace::from_grid(width, height, blocked))
}

/// Vertices of the largest connected component (ties go to the component
/// holding the smallest vertex id), ascending.
pub fn largest_component(ws: &Workspace) -> Vec<VertexId> {
    let comp = ws.components();
    let count = comp.iter().copied().max().map_or(0, |c| c + 1);
    let mut sizes = vec![0usize; count];
    for &c in &comp {
        sizes[c] += 1;
    }
    let best = (0..count).max_by_key(|&c| (sizes[c], std::cmp::Reverse(c))).unwrap_or(0);
    (0..ws.num_vertices()).filter(|&v| comp[v] == best).collect()
}

fn group_sizes(movers: usize, groups: usize) -> Vec<usize> {
    (0..groups)
        .map(|g| movers / groups + usize::from(g < movers % groups))
        .collect()
}

/// Draws a map and an instance from `seed`. Starts and targets are drawn
/// from the largest connected component, so every mover can reach every
/// target of its group.
pub fn generate_instance(params: &InstanceParams, seed: u64) -> Result<Instance, GenerateError> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let ws = Arc::new(random_grid(params.width, params.height, params.blocked_percent, &mut rng)?);
    populate(ws, params, &mut rng)
}

/// Draws starts and targets on an existing workspace.
pub fn populate(
    ws: Arc<Workspace>,
    params: &InstanceParams,
    rng: &mut ChaCha8Rng,
) -> Result<Instance, GenerateError> {
    let n = params.movers;
    if n == 0 {
        return Err(GenerateError::NoMovers);
    }
    let free = largest_component(&ws);
    if n > free.len() {
        return Err(GenerateError::TooManyMovers {
            movers: n,
            free: free.len(),
        });
    }
    let mut starts = free.clone();
    starts.shuffle(rng);
    starts.truncate(n);
    let mut targets = free;
    targets.shuffle(rng);
    targets.truncate(n);

    let groups = match params.flavor {
        Flavor::Mapf | Flavor::Perr => n,
        Flavor::Tapf | Flavor::Kperr => params.groups,
    };
    if groups == 0 || groups > n {
        return Err(GenerateError::BadGroups { groups, movers: n });
    }
    let instance = match params.flavor {
        Flavor::Mapf => {
            let pairs: Vec<_> = starts.into_iter().zip(targets).collect();
            Instance::mapf(ws, &pairs)?
        }
        Flavor::Tapf => {
            let mut teams = Vec::new();
            let mut next = 0;
            for size in group_sizes(n, groups) {
                teams.push((starts[next..next + size].to_vec(), targets[next..next + size].to_vec()));
                next += size;
            }
            Instance::tapf(ws, &teams)?
        }
        Flavor::Perr | Flavor::Kperr => {
            let mut packages = Vec::new();
            let mut next = 0;
            for (k, size) in group_sizes(n, groups).into_iter().enumerate() {
                for i in next..next + size {
                    packages.push((starts[i], targets[i], k as u32));
                }
                next += size;
            }
            Instance::packages(ws, &packages)?
        }
    };
    Ok(instance)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::model::{write_map, write_scenario};

    fn params(flavor: Flavor, movers: usize, groups: usize) -> InstanceParams {
        InstanceParams {
            width: 8,
            height: 6,
            blocked_percent: 20.0,
            flavor,
            movers,
            groups,
        }
    }

    #[test]
    fn same_seed_same_bytes() {
        let p = params(Flavor::Mapf, 5, 0);
        let a = generate_instance(&p, 42).unwrap();
        let b = generate_instance(&p, 42).unwrap();
        assert_eq!(write_map(a.workspace()), write_map(b.workspace()));
        assert_eq!(write_scenario(&a), write_scenario(&b));
        let c = generate_instance(&p, 43).unwrap();
        assert_ne!(write_scenario(&a), write_scenario(&c));
    }

    #[test]
    fn exact_blocked_count_and_reachability() {
        let inst = generate_instance(&params(Flavor::Mapf, 6, 0), 7).unwrap();
        let grid = inst.workspace().grid().unwrap();
        assert_eq!(grid.blocked.iter().filter(|&&b| b).count(), 10);
        let comp = inst.workspace().components();
        for (m, g) in inst.groups().iter().enumerate() {
            assert_eq!(comp[inst.movers()[m].start], comp[g.targets[0]]);
        }
    }

    #[test]
    fn team_and_type_shapes() {
        let tapf = generate_instance(&params(Flavor::Tapf, 6, 2), 1).unwrap();
        assert_eq!(tapf.groups().len(), 2);
        assert!(tapf.groups().iter().all(|g| g.targets.len() == 3));
        let kperr = generate_instance(&params(Flavor::Kperr, 5, 2), 1).unwrap();
        assert_eq!(kperr.flavor(), Flavor::Kperr);
        assert_eq!(kperr.groups()[0].members.len(), 3);
        let perr = generate_instance(&params(Flavor::Perr, 4, 0), 1).unwrap();
        assert_eq!(perr.flavor(), Flavor::Perr);
    }

    #[test]
    fn rejects_impossible_parameters() {
        assert!(matches!(
            generate_instance(&params(Flavor::Mapf, 100, 0), 1),
            Err(GenerateError::TooManyMovers { .. })
        ));
        assert!(matches!(
            generate_instance(&params(Flavor::Tapf, 2, 3), 1),
            Err(GenerateError::BadGroups { .. })
        ));
    }
}
