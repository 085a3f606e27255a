//! SVG snapshots of an assembly.

use std::fmt::Write as _;

use huddle_core::assembly::AssemblyState;
use huddle_core::geometry::{hex_center, hex_corners};
use huddle_core::protocol::{RobotId, WallSet};
use huddle_core::{CartesianPoint, HexCoord};

#[derive(Debug, Clone)]
pub struct RenderStyle {
    pub side: f64,
    pub target: &'static str,
    pub occupied: &'static str,
    pub perimeter_marker: &'static str,
    pub interior_marker: &'static str,
    pub signal: &'static str,
}

impl Default for RenderStyle {
    fn default() -> Self {
        Self {
            side: 10.0,
            target: "#808080",
            occupied: "#d9d9d9",
            perimeter_marker: "#d62728",
            interior_marker: "#1f77b4",
            signal: "#2ca02c",
        }
    }
}

impl RenderStyle {
    pub fn validate(&self) -> Result<(), String> {
        if self.side > 0.0 && self.side.is_finite() {
            Ok(())
        } else {
            Err(format!("hex side must be positive, got {}", self.side))
        }
    }
}

/// SVG y grows downward.
fn flip(p: CartesianPoint) -> (f64, f64) {
    (p.x, -p.y)
}

fn polygon(out: &mut String, c: HexCoord, side: f64, attrs: &str) {
    let pts: Vec<String> = hex_corners(c, side)
        .iter()
        .map(|&p| {
            let (x, y) = flip(p);
            format!("{x:.3},{y:.3}")
        })
        .collect();
    writeln!(out, r#"<polygon points="{}" {attrs}/>"#, pts.join(" ")).unwrap();
}

/// Draw targets dashed, robots filled with a perimeter or interior marker,
/// and the given signals as thick strokes on the signaling walls.
pub fn render_svg(state: &AssemblyState, signals: &[(RobotId, WallSet)], style: &RenderStyle) -> String {
    let shape = state.shape();
    let side = style.side;
    let (mut x0, mut y0, mut x1, mut y1) = (f64::MAX, f64::MAX, f64::MIN, f64::MIN);
    for &c in shape.cells() {
        let (x, y) = flip(hex_center(c, side));
        x0 = x0.min(x);
        y0 = y0.min(y);
        x1 = x1.max(x);
        y1 = y1.max(y);
    }
    let pad = 2.0 * side;
    let mut out = String::new();
    writeln!(
        out,
        r#"<svg xmlns="http://www.w3.org/2000/svg" viewBox="{:.3} {:.3} {:.3} {:.3}">"#,
        x0 - pad,
        y0 - pad,
        x1 - x0 + 2.0 * pad,
        y1 - y0 + 2.0 * pad
    )
    .unwrap();
    writeln!(out, "<!-- step {} robots {} -->", state.step(), state.len()).unwrap();
    let stroke = side / 10.0;
    for &c in shape.cells() {
        if state.is_occupied(c) {
            let attrs = format!(r#"fill="{}" stroke="black" stroke-width="{stroke:.3}""#, style.occupied);
            polygon(&mut out, c, side, &attrs);
        } else {
            let attrs = format!(
                r#"fill="none" stroke="{}" stroke-width="{stroke:.3}" stroke-dasharray="{:.3}""#,
                style.target,
                side / 4.0
            );
            polygon(&mut out, c, side, &attrs);
        }
    }
    let mut robots: Vec<_> = state.robots().iter().collect();
    robots.sort_by_key(|r| r.position);
    for r in robots {
        let (x, y) = flip(hex_center(r.position, side));
        let color = if shape.perimeter().contains(&r.position) {
            style.perimeter_marker
        } else {
            style.interior_marker
        };
        writeln!(
            out,
            r#"<circle cx="{x:.3}" cy="{y:.3}" r="{:.3}" fill="{color}"/>"#,
            side / 4.0
        )
        .unwrap();
    }
    let mut sorted = signals.to_vec();
    sorted.sort_by_key(|(id, _)| *id);
    for (id, walls) in sorted {
        let Some(r) = state.robot(id) else { continue };
        let c = hex_center(r.position, side);
        for w in walls.iter() {
            let n = hex_center(r.position.neighbor(w), side);
            // wall edge: through the midpoint, perpendicular to the center line
            let (mx, my) = ((c.x + n.x) / 2.0, (c.y + n.y) / 2.0);
            let (dx, dy) = (n.x - c.x, n.y - c.y);
            let len = (dx * dx + dy * dy).sqrt();
            let (ux, uy) = (-dy / len * side / 2.0, dx / len * side / 2.0);
            let (ax, ay) = flip(CartesianPoint::new(mx + ux, my + uy));
            let (bx, by) = flip(CartesianPoint::new(mx - ux, my - uy));
            writeln!(
                out,
                r#"<line x1="{ax:.3}" y1="{ay:.3}" x2="{bx:.3}" y2="{by:.3}" stroke="{}" stroke-width="{:.3}"/>"#,
                style.signal,
                side / 4.0
            )
            .unwrap();
        }
    }
    out.push_str("</svg>\n");
    out
}
