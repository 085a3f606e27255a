//! Axial hexagonal coordinates and robot wall indexing.
//!
//! Cells are addressed by `(p, q)`: `p` selects a column and `q` the row
//! within it. Walls are numbered counter-clockwise starting at the front
//! wall `F`, which points toward increasing `q`.
//!
//! ```text
//!            F (0,+1)
//!   FL (-1,+1)     FR (+1,0)
//!   RL (-1, 0)     RR (+1,-1)
//!            R (0,-1)
//! ```
//!
//! With this table the cells `(p - 1, q)` and `(p + 1, q)` are both flank
//! neighbors of `(p, q)`, so two adjacent columns always touch along shared
//! rows.

use std::fmt;
use std::ops::{Add, Neg, Sub};
use std::str::FromStr;

use serde::{Deserialize, Serialize};
use thiserror::Error;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum HexError {
    #[error("cells {from} and {to} are not adjacent")]
    NotAdjacent { from: HexCoord, to: HexCoord },
    #[error("offset {0} is not one of the six wall directions")]
    InvalidDirection(HexOffset),
    #[error("unknown wall label {0:?}")]
    UnknownWall(String),
}

/// A cell of the infinite hexagonal grid in axial `(column, row)` form.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Default, Serialize, Deserialize)]
pub struct HexCoord {
    pub p: i32,
    pub q: i32,
}

impl HexCoord {
    pub const ORIGIN: Self = Self { p: 0, q: 0 };

    pub const fn new(p: i32, q: i32) -> Self {
        Self { p, q }
    }

    /// The cell across wall `w`.
    pub fn neighbor(self, w: Wall) -> Self {
        self + w.offset()
    }

    /// The six adjacent cells in wall order `F, FL, RL, R, RR, FR`.
    pub fn neighbors(self) -> [HexCoord; 6] {
        Wall::ALL.map(|w| self.neighbor(w))
    }

    /// Grid distance in steps between two cells.
    pub fn distance(self, other: Self) -> u32 {
        let d = other - self;
        let (dp, dq) = (d.dp as i64, d.dq as i64);
        ((dp.abs() + dq.abs() + (dp + dq).abs()) / 2) as u32
    }
}

impl fmt::Display for HexCoord {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "({}, {})", self.p, self.q)
    }
}

/// A displacement between two cells.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Default, Serialize, Deserialize)]
pub struct HexOffset {
    pub dp: i32,
    pub dq: i32,
}

impl HexOffset {
    pub const ZERO: Self = Self { dp: 0, dq: 0 };

    pub const fn new(dp: i32, dq: i32) -> Self {
        Self { dp, dq }
    }

    /// The wall pointing along this offset, if it is a unit offset.
    pub fn wall(self) -> Result<Wall, HexError> {
        Wall::ALL
            .into_iter()
            .find(|w| w.offset() == self)
            .ok_or(HexError::InvalidDirection(self))
    }
}

impl fmt::Display for HexOffset {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "({}, {})", self.dp, self.dq)
    }
}

impl Add<HexOffset> for HexCoord {
    type Output = HexCoord;
    fn add(self, o: HexOffset) -> HexCoord {
        HexCoord::new(self.p + o.dp, self.q + o.dq)
    }
}

impl Sub for HexCoord {
    type Output = HexOffset;
    fn sub(self, o: HexCoord) -> HexOffset {
        HexOffset::new(self.p - o.p, self.q - o.q)
    }
}

impl Add for HexOffset {
    type Output = HexOffset;
    fn add(self, o: HexOffset) -> HexOffset {
        HexOffset::new(self.dp + o.dp, self.dq + o.dq)
    }
}

impl Neg for HexOffset {
    type Output = HexOffset;
    fn neg(self) -> HexOffset {
        HexOffset::new(-self.dp, -self.dq)
    }
}

/// Which side of the robot a wall belongs to.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Flank {
    Left,
    Right,
}

impl Flank {
    pub const BOTH: [Flank; 2] = [Flank::Left, Flank::Right];

    pub fn walls(self) -> [Wall; 2] {
        match self {
            Flank::Left => [Wall::FL, Wall::RL],
            Flank::Right => [Wall::RR, Wall::FR],
        }
    }

    /// Column step toward this flank: `-1` for left, `+1` for right.
    pub fn column_step(self) -> i32 {
        match self {
            Flank::Left => -1,
            Flank::Right => 1,
        }
    }
}

/// One of the six walls of a hexagonal robot.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub enum Wall {
    F = 0,
    FL = 1,
    RL = 2,
    R = 3,
    RR = 4,
    FR = 5,
}

impl Wall {
    /// Counter-clockwise order starting at the front wall.
    pub const ALL: [Wall; 6] = [Wall::F, Wall::FL, Wall::RL, Wall::R, Wall::RR, Wall::FR];
    pub const FORE_AFT: [Wall; 2] = [Wall::F, Wall::R];

    pub const fn index(self) -> usize {
        self as usize
    }

    pub fn from_index(i: usize) -> Option<Wall> {
        Wall::ALL.get(i).copied()
    }

    /// Wall index `i` taken modulo six.
    pub fn wrapping(i: i64) -> Wall {
        Wall::ALL[i.rem_euclid(6) as usize]
    }

    pub fn opposite(self) -> Wall {
        self.rotate(3)
    }

    /// Rotate counter-clockwise by `r` sixths of a turn.
    pub fn rotate(self, r: i64) -> Wall {
        Wall::wrapping(self.index() as i64 + r)
    }

    /// The two walls sharing a corner with this one.
    pub fn adjacent(self) -> [Wall; 2] {
        [self.rotate(-1), self.rotate(1)]
    }

    pub fn is_fore_aft(self) -> bool {
        matches!(self, Wall::F | Wall::R)
    }

    pub fn flank(self) -> Option<Flank> {
        match self {
            Wall::FL | Wall::RL => Some(Flank::Left),
            Wall::RR | Wall::FR => Some(Flank::Right),
            Wall::F | Wall::R => None,
        }
    }

    /// Unit offset from a cell to the neighbor across this wall.
    pub const fn offset(self) -> HexOffset {
        match self {
            Wall::F => HexOffset::new(0, 1),
            Wall::FL => HexOffset::new(-1, 1),
            Wall::RL => HexOffset::new(-1, 0),
            Wall::R => HexOffset::new(0, -1),
            Wall::RR => HexOffset::new(1, -1),
            Wall::FR => HexOffset::new(1, 0),
        }
    }

    pub fn label(self) -> &'static str {
        match self {
            Wall::F => "F",
            Wall::FL => "FL",
            Wall::RL => "RL",
            Wall::R => "R",
            Wall::RR => "RR",
            Wall::FR => "FR",
        }
    }
}

impl fmt::Display for Wall {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.label())
    }
}

impl FromStr for Wall {
    type Err = HexError;
    fn from_str(s: &str) -> Result<Self, Self::Err> {
        Wall::ALL
            .into_iter()
            .find(|w| w.label().eq_ignore_ascii_case(s))
            .ok_or_else(|| HexError::UnknownWall(s.to_string()))
    }
}

pub fn unit_vector(w: Wall) -> HexOffset {
    w.offset()
}

pub fn neighbors(x: HexCoord) -> [HexCoord; 6] {
    x.neighbors()
}

/// The wall of `from` that faces `to`.
pub fn wall_toward(from: HexCoord, to: HexCoord) -> Result<Wall, HexError> {
    (to - from).wall().map_err(|_| HexError::NotAdjacent { from, to })
}

/// Rotation that maps a joining robot's local wall indices onto grid walls.
///
/// The joiner docks with `local_admitting_wall` against an admitting robot
/// that transmitted the unit vector of its own admitting wall. The joiner's
/// docking wall faces back along that vector, so after rotation by the
/// returned `r` the local wall `(w + r) mod 6` is the grid wall physically at
/// local index `w`.
pub fn reorient_to_north_front(
    local_admitting_wall: Wall,
    grid_admitting_direction: HexOffset,
) -> Result<u8, HexError> {
    let docking = grid_admitting_direction.wall()?.opposite();
    let r = (docking.index() as i64 - local_admitting_wall.index() as i64).rem_euclid(6);
    Ok(r as u8)
}
