//! JSON solution documents:
//! `{horizon, paths: {mover: [[x,y],...]}, assignment, exchanges, metrics}`.

use std::collections::BTreeMap;

use serde::{Deserialize, Serialize};
use thiserror::Error;

use super::instance::Instance;
use super::solution::{pad_paths, Exchange, Metrics, Solution};
use super::workspace::VertexId;

#[derive(Debug, Error)]
pub enum SolutionFormatError {
    #[error("malformed solution JSON: {0}")]
    Json(#[from] serde_json::Error),
    #[error("solution names unknown mover id {0}")]
    UnknownMover(u32),
    #[error("cell ({0}, {1}) is not a free map cell")]
    BadCell(i32, i32),
    #[error("solution has {found} paths, instance has {expected} movers")]
    MoverCount { expected: usize, found: usize },
    #[error("solution serialization needs a grid workspace")]
    NoGrid,
}

#[derive(Debug, Serialize, Deserialize)]
struct ExchangeDoc {
    time: usize,
    a: u32,
    b: u32,
}

#[derive(Debug, Serialize, Deserialize)]
struct SolutionDoc {
    horizon: usize,
    paths: BTreeMap<u32, Vec<[i32; 2]>>,
    assignment: BTreeMap<u32, [i32; 2]>,
    exchanges: Vec<ExchangeDoc>,
    metrics: Metrics,
}

pub fn write_solution(instance: &Instance, sol: &Solution) -> Result<String, SolutionFormatError> {
    let ws = instance.workspace();
    if ws.grid().is_none() {
        return Err(SolutionFormatError::NoGrid);
    }
    let cell = |v: VertexId| {
        let (x, y) = ws.cell(v);
        [x, y]
    };
    let id = |m: usize| instance.movers()[m].id;
    let doc = SolutionDoc {
        horizon: sol.horizon(),
        paths: sol
            .paths
            .iter()
            .enumerate()
            .map(|(m, p)| (id(m), p.iter().map(|&v| cell(v)).collect()))
            .collect(),
        assignment: sol
            .assignment
            .iter()
            .enumerate()
            .map(|(m, &v)| (id(m), cell(v)))
            .collect(),
        exchanges: sol
            .exchanges
            .iter()
            .map(|e| ExchangeDoc {
                time: e.time,
                a: id(e.a),
                b: id(e.b),
            })
            .collect(),
        metrics: sol.metrics(),
    };
    let mut text = serde_json::to_string_pretty(&doc)?;
    text.push('\n');
    Ok(text)
}

/// Parses a solution document against `instance`. Stored metrics are
/// ignored; they are recomputed on demand.
pub fn parse_solution(text: &str, instance: &Instance) -> Result<Solution, SolutionFormatError> {
    let doc: SolutionDoc = serde_json::from_str(text)?;
    let ws = instance.workspace();
    let vertex = |[x, y]: [i32; 2]| ws.vertex_at((x, y)).ok_or(SolutionFormatError::BadCell(x, y));
    let index = |id: u32| instance.mover_index(id).ok_or(SolutionFormatError::UnknownMover(id));
    let n = instance.num_movers();
    if doc.paths.len() != n {
        return Err(SolutionFormatError::MoverCount {
            expected: n,
            found: doc.paths.len(),
        });
    }
    let mut paths = vec![Vec::new(); n];
    for (id, cells) in doc.paths {
        let m = index(id)?;
        paths[m] = cells.into_iter().map(vertex).collect::<Result<_, _>>()?;
        if paths[m].is_empty() {
            return Err(SolutionFormatError::BadCell(-1, -1));
        }
    }
    pad_paths(&mut paths, doc.horizon);
    let mut assignment = vec![usize::MAX; n];
    for (id, cell) in doc.assignment {
        assignment[index(id)?] = vertex(cell)?;
    }
    let mut exchanges = doc
        .exchanges
        .into_iter()
        .map(|e| {
            Ok(Exchange {
                time: e.time,
                a: index(e.a)?,
                b: index(e.b)?,
            })
        })
        .collect::<Result<Vec<_>, SolutionFormatError>>()?;
    exchanges.sort();
    Ok(Solution {
        paths,
        assignment,
        exchanges,
    })
}
