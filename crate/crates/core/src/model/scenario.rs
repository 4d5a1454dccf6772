//! Scenario documents (`mapfgen-scen v1`).
//!
//! One record per line:
//!
//! ```text
//! mapfgen-scen v1
//! agent <id> <sx> <sy> <tx> <ty>
//! team <id> members <sx,sy;...> targets <tx,ty;...>
//! package <id> type <k> start <sx,sy> target <tx,ty>
//! ```
//!
//! Record kinds cannot be mixed. Package files with all-distinct types load
//! as PERR, anything else as K-PERR. Blank lines and `#` comments are
//! ignored.

use std::fmt::Write as _;
use std::sync::Arc;

use thiserror::Error;

use super::instance::{Flavor, Group, Instance, InstanceError, Mover};
use super::workspace::{Cell, VertexId, Workspace};
use super::ParseError;

pub const SCENARIO_HEADER: &str = "mapfgen-scen v1";

#[derive(Debug, Error, PartialEq)]
pub enum ScenarioError {
    #[error(transparent)]
    Parse(#[from] ParseError),
    #[error("line {line}: cell ({}, {}) is outside the map or blocked", .cell.0, .cell.1)]
    InvalidCell { line: usize, cell: Cell },
    #[error(transparent)]
    Invalid(#[from] InstanceError),
}

enum Record {
    Agent { id: u32, start: Cell, target: Cell },
    Team { id: u32, members: Vec<Cell>, targets: Vec<Cell> },
    Package { id: u32, kind: u32, start: Cell, target: Cell },
}

fn parse_u32(word: Option<&str>, line: usize, col: usize, what: &str) -> Result<u32, ParseError> {
    word.and_then(|w| w.parse().ok())
        .ok_or_else(|| ParseError::new(line, col, format!("expected {what}")))
}

fn parse_i32(word: Option<&str>, line: usize, col: usize, what: &str) -> Result<i32, ParseError> {
    word.and_then(|w| w.parse().ok())
        .ok_or_else(|| ParseError::new(line, col, format!("expected {what}")))
}

fn parse_cell(word: &str, line: usize, col: usize) -> Result<Cell, ParseError> {
    let (x, y) = word
        .split_once(',')
        .ok_or_else(|| ParseError::new(line, col, format!("expected `x,y`, found `{word}`")))?;
    match (x.parse(), y.parse()) {
        (Ok(x), Ok(y)) => Ok((x, y)),
        _ => Err(ParseError::new(line, col, format!("bad coordinate `{word}`"))),
    }
}

fn parse_cell_list(word: Option<&str>, line: usize, col: usize) -> Result<Vec<Cell>, ParseError> {
    let word = word.ok_or_else(|| ParseError::new(line, col, "expected a `x,y;...` list"))?;
    word.split(';').map(|c| parse_cell(c, line, col)).collect()
}

fn expect_keyword(word: Option<&str>, keyword: &str, line: usize, col: usize) -> Result<(), ParseError> {
    if word == Some(keyword) {
        Ok(())
    } else {
        Err(ParseError::new(line, col, format!("expected `{keyword}`")))
    }
}

/// Column (1-based) of the `n`th whitespace-separated word.
fn word_column(line: &str, n: usize) -> usize {
    let mut count = 0;
    let mut in_word = false;
    for (i, ch) in line.char_indices() {
        if ch.is_whitespace() {
            in_word = false;
        } else if !in_word {
            if count == n {
                return i + 1;
            }
            count += 1;
            in_word = true;
        }
    }
    line.len() + 1
}

fn parse_record(line: &str, no: usize) -> Result<Record, ParseError> {
    let col = |n| word_column(line, n);
    let mut w = line.split_whitespace();
    match w.next() {
        Some("agent") => {
            let id = parse_u32(w.next(), no, col(1), "agent id")?;
            let sx = parse_i32(w.next(), no, col(2), "start x")?;
            let sy = parse_i32(w.next(), no, col(3), "start y")?;
            let tx = parse_i32(w.next(), no, col(4), "target x")?;
            let ty = parse_i32(w.next(), no, col(5), "target y")?;
            if w.next().is_some() {
                return Err(ParseError::new(no, col(6), "trailing fields"));
            }
            Ok(Record::Agent {
                id,
                start: (sx, sy),
                target: (tx, ty),
            })
        }
        Some("team") => {
            let id = parse_u32(w.next(), no, col(1), "team id")?;
            expect_keyword(w.next(), "members", no, col(2))?;
            let members = parse_cell_list(w.next(), no, col(3))?;
            expect_keyword(w.next(), "targets", no, col(4))?;
            let targets = parse_cell_list(w.next(), no, col(5))?;
            if w.next().is_some() {
                return Err(ParseError::new(no, col(6), "trailing fields"));
            }
            Ok(Record::Team { id, members, targets })
        }
        Some("package") => {
            let id = parse_u32(w.next(), no, col(1), "package id")?;
            expect_keyword(w.next(), "type", no, col(2))?;
            let kind = parse_u32(w.next(), no, col(3), "package type")?;
            expect_keyword(w.next(), "start", no, col(4))?;
            let start = parse_cell(w.next().unwrap_or(""), no, col(5))?;
            expect_keyword(w.next(), "target", no, col(6))?;
            let target = parse_cell(w.next().unwrap_or(""), no, col(7))?;
            if w.next().is_some() {
                return Err(ParseError::new(no, col(8), "trailing fields"));
            }
            Ok(Record::Package { id, kind, start, target })
        }
        Some(other) => Err(ParseError::new(no, 1, format!("unknown record `{other}`"))),
        None => unreachable!("blank lines are skipped"),
    }
}

pub fn parse_scenario(text: &str, ws: Arc<Workspace>) -> Result<Instance, ScenarioError> {
    let mut lines = text
        .lines()
        .enumerate()
        .map(|(i, l)| (i + 1, l.trim_end_matches('\r')))
        .filter(|(_, l)| !l.trim().is_empty() && !l.trim_start().starts_with('#'));
    match lines.next() {
        Some((_, l)) if l.trim() == SCENARIO_HEADER => {}
        Some((no, _)) => {
            return Err(ParseError::new(no, 1, format!("expected header `{SCENARIO_HEADER}`")).into())
        }
        None => return Err(ParseError::new(0, 0, "empty scenario").into()),
    }

    let vertex = |cell: Cell, line: usize| {
        ws.vertex_at(cell)
            .ok_or(ScenarioError::InvalidCell { line, cell })
    };

    let mut flavor: Option<Flavor> = None;
    let mut movers = Vec::new();
    let mut groups: Vec<Group> = Vec::new();
    for (no, line) in lines {
        let record = parse_record(line, no)?;
        let kind = match record {
            Record::Agent { .. } => Flavor::Mapf,
            Record::Team { .. } => Flavor::Tapf,
            Record::Package { .. } => Flavor::Perr,
        };
        match flavor {
            None => flavor = Some(kind),
            Some(f) if f == kind => {}
            Some(_) => {
                return Err(ParseError::new(no, 1, "record kinds cannot be mixed").into());
            }
        }
        match record {
            Record::Agent { id, start, target } => {
                let index = movers.len();
                movers.push(Mover {
                    id,
                    start: vertex(start, no)?,
                });
                groups.push(Group {
                    label: id,
                    members: vec![index],
                    targets: vec![vertex(target, no)?],
                });
            }
            Record::Team { id, members, targets } => {
                let base = movers.len();
                for (k, cell) in members.iter().enumerate() {
                    movers.push(Mover {
                        id: (base + k) as u32,
                        start: vertex(*cell, no)?,
                    });
                }
                let targets = targets
                    .iter()
                    .map(|&c| vertex(c, no))
                    .collect::<Result<Vec<VertexId>, _>>()?;
                groups.push(Group {
                    label: id,
                    members: (base..base + members.len()).collect(),
                    targets,
                });
            }
            Record::Package { id, kind, start, target } => {
                let index = movers.len();
                movers.push(Mover {
                    id,
                    start: vertex(start, no)?,
                });
                let target = vertex(target, no)?;
                match groups.iter_mut().find(|g| g.label == kind) {
                    Some(g) => {
                        g.members.push(index);
                        g.targets.push(target);
                    }
                    None => groups.push(Group {
                        label: kind,
                        members: vec![index],
                        targets: vec![target],
                    }),
                }
            }
        }
    }
    let mut flavor = flavor.ok_or_else(|| ParseError::new(0, 0, "scenario has no records"))?;
    if flavor == Flavor::Perr && groups.len() != movers.len() {
        flavor = Flavor::Kperr;
    }
    Ok(Instance::new(ws, flavor, movers, groups)?)
}

fn cell_list(ws: &Workspace, vs: &[VertexId]) -> String {
    vs.iter()
        .map(|&v| {
            let (x, y) = ws.cell(v);
            format!("{x},{y}")
        })
        .collect::<Vec<_>>()
        .join(";")
}

pub fn write_scenario(instance: &Instance) -> String {
    let ws = instance.workspace();
    let mut out = String::from(SCENARIO_HEADER);
    out.push('\n');
    match instance.flavor() {
        Flavor::Mapf => {
            for g in instance.groups() {
                let m = instance.movers()[g.members[0]];
                let (sx, sy) = ws.cell(m.start);
                let (tx, ty) = ws.cell(g.targets[0]);
                let _ = writeln!(out, "agent {} {sx} {sy} {tx} {ty}", g.label);
            }
        }
        Flavor::Tapf => {
            for g in instance.groups() {
                let starts: Vec<VertexId> =
                    g.members.iter().map(|&m| instance.movers()[m].start).collect();
                let _ = writeln!(
                    out,
                    "team {} members {} targets {}",
                    g.label,
                    cell_list(ws, &starts),
                    cell_list(ws, &g.targets)
                );
            }
        }
        Flavor::Perr | Flavor::Kperr => {
            for (i, m) in instance.movers().iter().enumerate() {
                let g = &instance.groups()[instance.group_of(i)];
                let slot = g.members.iter().position(|&x| x == i).unwrap();
                let (sx, sy) = ws.cell(m.start);
                let (tx, ty) = ws.cell(g.targets[slot]);
                let _ = writeln!(
                    out,
                    "package {} type {} start {sx},{sy} target {tx},{ty}",
                    m.id, g.label
                );
            }
        }
    }
    out
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::model::map_format::parse_map;

    fn corridor() -> Arc<Workspace> {
        Arc::new(parse_map("type octile\nheight 1\nwidth 3\nmap\n...\n").unwrap())
    }

    #[test]
    fn single_agent_corridor() {
        let inst = parse_scenario("mapfgen-scen v1\nagent 0 0 0 2 0\n", corridor()).unwrap();
        assert_eq!(inst.flavor(), Flavor::Mapf);
        assert_eq!(inst.num_movers(), 1);
        assert_eq!(inst.fixed_target(0), Some(2));
    }

    #[test]
    fn team_record_builds_tapf() {
        let text = "mapfgen-scen v1\nteam 4 members 0,0;2,0 targets 0,0;2,0\n";
        let inst = parse_scenario(text, corridor()).unwrap();
        assert_eq!(inst.flavor(), Flavor::Tapf);
        assert_eq!(inst.groups().len(), 1);
        assert_eq!(inst.groups()[0].label, 4);
        assert_eq!(write_scenario(&inst), text);
    }

    #[test]
    fn team_cardinality_mismatch_is_reported() {
        let text = "mapfgen-scen v1\nteam 0 members 0,0;1,0 targets 0,0;1,0;2,0\n";
        let err = parse_scenario(text, corridor()).unwrap_err();
        assert!(err.to_string().contains("team cardinality mismatch"), "{err}");
    }

    #[test]
    fn validation_errors() {
        let ws = corridor();
        let dup = parse_scenario("mapfgen-scen v1\nagent 0 0 0 2 0\nagent 1 0 0 1 0\n", ws.clone());
        assert!(matches!(dup, Err(ScenarioError::Invalid(InstanceError::DuplicateStart(..)))));
        let outside = parse_scenario("mapfgen-scen v1\nagent 0 0 0 5 0\n", ws.clone());
        assert_eq!(
            outside.unwrap_err(),
            ScenarioError::InvalidCell { line: 2, cell: (5, 0) }
        );
        let mixed = parse_scenario(
            "mapfgen-scen v1\nagent 0 0 0 2 0\nteam 1 members 1,0 targets 1,0\n",
            ws.clone(),
        );
        assert!(matches!(mixed, Err(ScenarioError::Parse(_))));
        let bad = parse_scenario("mapfgen-scen v1\nagent 0 0 x 2 0\n", ws.clone()).unwrap_err();
        match bad {
            ScenarioError::Parse(p) => assert_eq!((p.line, p.column), (2, 11)),
            other => panic!("{other:?}"),
        }
        assert!(parse_scenario("agent 0 0 0 2 0\n", ws).is_err());
    }

    #[test]
    fn package_records_round_trip() {
        let text = "mapfgen-scen v1\npackage 7 type 0 start 0,0 target 2,0\npackage 9 type 0 start 2,0 target 0,0\n";
        let inst = parse_scenario(text, corridor()).unwrap();
        assert_eq!(inst.flavor(), Flavor::Kperr);
        assert_eq!(write_scenario(&inst), text);
        let perr = "mapfgen-scen v1\npackage 0 type 3 start 0,0 target 2,0\npackage 1 type 4 start 2,0 target 0,0\n";
        let inst = parse_scenario(perr, corridor()).unwrap();
        assert_eq!(inst.flavor(), Flavor::Perr);
        assert_eq!(write_scenario(&inst), perr);
    }
}
