//! Benchmark-style grid map documents.
//!
//! ```text
//! type octile
//! height 2
//! width 3
//! map
//! ..@
//! ...
//! ```

use std::fmt::Write as _;

use super::workspace::Workspace;
use super::ParseError;

pub fn parse_map(text: &str) -> Result<Workspace, ParseError> {
    let mut lines = text.lines().enumerate().map(|(i, l)| (i + 1, l.trim_end_matches('\r')));
    let mut height = None;
    let mut width = None;
    let mut saw_type = false;

    loop {
        let Some((no, line)) = lines.next() else {
            return Err(ParseError::new(0, 0, "missing `map` header line"));
        };
        let mut words = line.split_whitespace();
        match words.next() {
            None => continue,
            Some("type") if !saw_type => {
                if words.next().is_none() {
                    return Err(ParseError::new(no, 6, "`type` needs a value"));
                }
                saw_type = true;
            }
            Some(key @ ("height" | "width")) => {
                let value = words
                    .next()
                    .and_then(|w| w.parse::<usize>().ok())
                    .filter(|&v| v > 0)
                    .ok_or_else(|| {
                        ParseError::new(no, key.len() + 2, format!("`{key}` needs a positive integer"))
                    })?;
                let slot = if key == "height" { &mut height } else { &mut width };
                if slot.replace(value).is_some() {
                    return Err(ParseError::new(no, 1, format!("duplicate `{key}` header")));
                }
            }
            Some("map") => {
                if !saw_type {
                    return Err(ParseError::new(no, 1, "missing `type` header"));
                }
                break;
            }
            Some(other) => {
                return Err(ParseError::new(no, 1, format!("unexpected header `{other}`")));
            }
        }
    }
    let height = height.ok_or_else(|| ParseError::new(0, 0, "missing `height` header"))?;
    let width = width.ok_or_else(|| ParseError::new(0, 0, "missing `width` header"))?;

    let mut blocked = Vec::with_capacity(width * height);
    let mut rows = 0;
    for (no, line) in lines {
        if rows == height {
            if line.trim().is_empty() {
                continue;
            }
            return Err(ParseError::new(no, 1, format!("more than {height} map rows")));
        }
        let chars: Vec<char> = line.chars().collect();
        if chars.len() != width {
            return Err(ParseError::new(
                no,
                chars.len().min(width) + 1,
                format!("row has {} cells, expected {width}", chars.len()),
            ));
        }
        for (col, ch) in chars.into_iter().enumerate() {
            blocked.push(match ch {
                '.' => false,
                '@' | 'T' => true,
                other => {
                    return Err(ParseError::new(no, col + 1, format!("unknown cell character `{other}`")))
                }
            });
        }
        rows += 1;
    }
    if rows != height {
        return Err(ParseError::new(0, 0, format!("expected {height} map rows, found {rows}")));
    }
    Ok(Workspace::from_grid(width, height, blocked))
}

/// Serializes a grid workspace; blocked cells are written as `@`.
///
/// Panics if the workspace has no grid metadata.
pub fn write_map(ws: &Workspace) -> String {
    let grid = ws.grid().expect("map serialization needs a grid workspace");
    let mut out = String::new();
    let _ = writeln!(out, "type octile\nheight {}\nwidth {}\nmap", grid.height, grid.width);
    for row in grid.blocked.chunks(grid.width) {
        out.extend(row.iter().map(|&b| if b { '@' } else { '.' }));
        out.push('\n');
    }
    out
}
