//! Line-oriented shape files.
//!
//! ```text
//! huddle-shape v1
//! # comment
//! cell 0 0
//! cell 0 1
//! root 0 0
//! ```
//!
//! The shape is translated so the root lands on the origin. Without a `root`
//! line the root is `(0, 0)`.

use std::collections::HashSet;
use std::fmt::Write as _;

use super::{ShapeError, ShapeSpec};
use crate::hexgrid::HexCoord;

pub const SHAPE_HEADER: &str = "huddle-shape v1";

pub fn parse_shape(text: &str) -> Result<ShapeSpec, ShapeError> {
    let err = |line: usize, msg: &str| ShapeError::Parse {
        line,
        msg: msg.to_string(),
    };
    let mut lines = text
        .lines()
        .enumerate()
        .map(|(i, l)| (i + 1, l.trim()))
        .filter(|(_, l)| !l.is_empty() && !l.starts_with('#'));
    match lines.next() {
        Some((_, SHAPE_HEADER)) => {}
        Some((n, _)) => return Err(err(n, "expected header `huddle-shape v1`")),
        None => return Err(err(1, "empty shape file")),
    }
    let mut cells = Vec::new();
    let mut seen = HashSet::new();
    let mut root = None;
    for (n, line) in lines {
        let mut parts = line.split_whitespace();
        let kind = parts.next().unwrap_or_default();
        let coord = |parts: &mut std::str::SplitWhitespace<'_>| -> Result<HexCoord, ShapeError> {
            let mut int = || -> Result<i32, ShapeError> {
                parts
                    .next()
                    .ok_or_else(|| err(n, "missing coordinate"))?
                    .parse()
                    .map_err(|_| err(n, "coordinate is not an integer"))
            };
            let c = HexCoord::new(int()?, int()?);
            if parts.next().is_some() {
                return Err(err(n, "trailing tokens"));
            }
            Ok(c)
        };
        match kind {
            "cell" => {
                let c = coord(&mut parts)?;
                if !seen.insert(c) {
                    return Err(ShapeError::DuplicateCell(c));
                }
                cells.push(c);
            }
            "root" => {
                if root.is_some() {
                    return Err(err(n, "more than one root line"));
                }
                root = Some(coord(&mut parts)?);
            }
            other => return Err(err(n, &format!("unknown record `{other}`"))),
        }
    }
    let root = root.unwrap_or(HexCoord::ORIGIN);
    if !seen.contains(&root) {
        return Err(ShapeError::RootNotInShape(root));
    }
    let d = HexCoord::ORIGIN - root;
    ShapeSpec::from_cells(cells.into_iter().map(|c| c + d))
}

/// Serialize a shape with its root at the origin.
pub fn write_shape(shape: &ShapeSpec) -> String {
    let mut out = format!("{SHAPE_HEADER}\n");
    for c in shape.cells() {
        let _ = writeln!(out, "cell {} {}", c.p, c.q);
    }
    out.push_str("root 0 0\n");
    out
}
