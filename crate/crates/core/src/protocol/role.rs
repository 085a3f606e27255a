use super::{Growth, ProtocolError, WallStatus, WallStatusVector};
use crate::hexgrid::{Flank, HexCoord, Wall};
use crate::shape::ShapeSpec;

/// Connection walls face target cells; all other walls are null.
/// Connection walls start out free.
pub fn identify_wall_types(x: HexCoord, shape: &ShapeSpec) -> Result<WallStatusVector, ProtocolError> {
    if !shape.contains(x) {
        return Err(ProtocolError::OutsideShape(x));
    }
    Ok(WallStatusVector(Wall::ALL.map(|w| {
        if shape.contains(x.neighbor(w)) {
            WallStatus::Free
        } else {
            WallStatus::Null
        }
    })))
}

/// Nucleation requirement per flank from the robot's own walls.
///
/// `Some(false)`: no free wall on the flank. `Some(true)`: a free flank wall
/// sits between two null walls. `None` (undecided) otherwise.
pub fn role_from_self(walls: &WallStatusVector) -> (Option<bool>, Option<bool>) {
    let eval = |flank: Flank| {
        let free: Vec<Wall> = flank
            .walls()
            .into_iter()
            .filter(|&w| walls.is(w, WallStatus::Free))
            .collect();
        if free.is_empty() {
            return Some(false);
        }
        let bracketed = free
            .iter()
            .any(|w| w.adjacent().iter().all(|&a| walls.is(a, WallStatus::Null)));
        if bracketed {
            Some(true)
        } else {
            None
        }
    };
    (eval(Flank::Left), eval(Flank::Right))
}

/// Whether the robot at `x` seeds a segment of the adjacent column `p + a`.
///
/// Only segments sharing a row with the robot's own segment are considered.
/// For each such segment with midpoint row `q_m`, the designated seeder is the
/// robot on row `q_m` when that row lies in the own segment. Otherwise it is
/// the robot on the row of the shared-row cell nearest to the midpoint, ties
/// going to the larger row.
pub fn role_from_adjacent_column(x: HexCoord, shape: &ShapeSpec, a: i32) -> Result<bool, ProtocolError> {
    debug_assert!(a == -1 || a == 1);
    let own = *shape.segment_of(x).ok_or(ProtocolError::OutsideShape(x))?;
    for seg in shape.column(x.p + a) {
        let lo = seg.row_lo.max(own.row_lo);
        let hi = seg.row_hi.min(own.row_hi);
        if lo > hi {
            continue;
        }
        let q_m = seg.midpoint_row;
        if x.q == q_m {
            return Ok(true);
        }
        if own.contains_row(q_m) {
            continue;
        }
        // nearest shared row to the midpoint, preferring larger rows on ties
        let q_star = (lo..=hi)
            .min_by_key(|&q| ((q - q_m).abs(), -q))
            .expect("shared row range is nonempty");
        if x.q == q_star {
            return Ok(true);
        }
    }
    Ok(false)
}

/// Nucleation flags `(alpha_left, alpha_right)`.
///
/// Each flank takes the self-wall verdict; only an undecided flank falls back
/// to the adjacent-column rule.
pub fn determine_role(walls: &WallStatusVector, x: HexCoord, shape: &ShapeSpec) -> Result<(bool, bool), ProtocolError> {
    let (left, right) = role_from_self(walls);
    let left = match left {
        Some(v) => v,
        None => role_from_adjacent_column(x, shape, Flank::Left.column_step())?,
    };
    let right = match right {
        Some(v) => v,
        None => role_from_adjacent_column(x, shape, Flank::Right.column_step())?,
    };
    Ok((left, right))
}

pub fn determine_growth_direction(alpha_left: bool, alpha_right: bool, walls: &WallStatusVector) -> Growth {
    let occupied = |w: Wall| walls.is(w, WallStatus::Occupied);
    if alpha_left && alpha_right {
        Growth::Neutral
    } else if occupied(Wall::FL) || occupied(Wall::RL) || alpha_right {
        Growth::Right
    } else if occupied(Wall::RR) || occupied(Wall::FR) || alpha_left {
        Growth::Left
    } else {
        Growth::Neutral
    }
}
