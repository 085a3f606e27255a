//! Per-robot assembly logic.
//!
//! A robot runs [`initialize_robot`] once when it docks and then
//! [`signal_step`] every time step until none of its walls is free. Roles and
//! growth direction are fixed at initialization; only the wall statuses
//! change afterwards, and only from free to occupied.

mod role;
mod signal;
pub mod wire;

pub use role::{
    determine_growth_direction, determine_role, identify_wall_types, role_from_adjacent_column, role_from_self,
};
pub use signal::{identify_delayed_walls, identify_signal_walls, signal_step, NeighborWalls, SignalOptions};

use std::fmt;

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::hexgrid::{Flank, HexCoord, HexError, HexOffset, Wall};
use crate::shape::ShapeSpec;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum ProtocolError {
    #[error("position {0} is outside the target shape")]
    OutsideShape(HexCoord),
    #[error("admitted position {0} is not a target cell")]
    OffTarget(HexCoord),
    #[error("occupied wall {0} has no neighbor wall status")]
    MissingNeighborState(Wall),
    #[error(transparent)]
    Hex(#[from] HexError),
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Default, Serialize, Deserialize)]
pub enum WallStatus {
    /// Not meant for attachment. Permanent.
    #[default]
    Null,
    /// Connection wall with no neighbor yet.
    Free,
    /// Connection wall with a docked neighbor. Permanent.
    Occupied,
}

/// Status of all six walls, indexed by [`Wall`].
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Default, Serialize, Deserialize)]
pub struct WallStatusVector(pub [WallStatus; 6]);

impl WallStatusVector {
    pub const ALL_NULL: Self = Self([WallStatus::Null; 6]);

    pub fn get(&self, w: Wall) -> WallStatus {
        self.0[w.index()]
    }

    pub fn set(&mut self, w: Wall, s: WallStatus) {
        self.0[w.index()] = s;
    }

    pub fn is(&self, w: Wall, s: WallStatus) -> bool {
        self.get(w) == s
    }

    pub fn walls_with(&self, s: WallStatus) -> WallSet {
        Wall::ALL.into_iter().filter(|&w| self.is(w, s)).collect()
    }

    pub fn any_free(&self) -> bool {
        self.0.contains(&WallStatus::Free)
    }

    /// Mark a connection wall occupied. Null walls never change.
    pub fn occupy(&mut self, w: Wall) {
        if self.is(w, WallStatus::Free) {
            self.set(w, WallStatus::Occupied);
        }
    }
}

impl fmt::Display for WallStatusVector {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        for s in self.0 {
            f.write_str(match s {
                WallStatus::Null => "-",
                WallStatus::Free => "f",
                WallStatus::Occupied => "o",
            })?;
        }
        Ok(())
    }
}

/// A set of walls as a six-bit mask.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Default)]
pub struct WallSet(u8);

impl WallSet {
    pub const EMPTY: Self = Self(0);

    pub fn insert(&mut self, w: Wall) {
        self.0 |= 1 << w.index();
    }

    pub fn contains(self, w: Wall) -> bool {
        self.0 & (1 << w.index()) != 0
    }

    pub fn difference(self, other: WallSet) -> WallSet {
        WallSet(self.0 & !other.0)
    }

    pub fn is_empty(self) -> bool {
        self.0 == 0
    }

    pub fn len(self) -> usize {
        self.0.count_ones() as usize
    }

    pub fn iter(self) -> impl Iterator<Item = Wall> {
        Wall::ALL.into_iter().filter(move |&w| self.contains(w))
    }
}

impl FromIterator<Wall> for WallSet {
    fn from_iter<I: IntoIterator<Item = Wall>>(iter: I) -> Self {
        let mut s = WallSet::EMPTY;
        for w in iter {
            s.insert(w);
        }
        s
    }
}

impl<const N: usize> From<[Wall; N]> for WallSet {
    fn from(ws: [Wall; N]) -> Self {
        ws.into_iter().collect()
    }
}

impl fmt::Display for WallSet {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let labels: Vec<&str> = self.iter().map(Wall::label).collect();
        write!(f, "{{{}}}", labels.join(", "))
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(transparent)]
pub struct RobotId(pub u32);

impl fmt::Display for RobotId {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "#{}", self.0)
    }
}

/// Lateral expansion direction a robot initiates or supports.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum Growth {
    Left,
    Neutral,
    Right,
}

impl Growth {
    pub fn as_i8(self) -> i8 {
        match self {
            Growth::Left => -1,
            Growth::Neutral => 0,
            Growth::Right => 1,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum Phase {
    SignalActivation,
    Done,
}

/// What an admitting robot hands to a robot docking against it.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct NeighborInfo {
    pub position: HexCoord,
    pub walls: WallStatusVector,
    /// Unit vector of the admitting wall, in grid frame.
    pub admitting_direction: HexOffset,
}

impl NeighborInfo {
    /// Wire form: (16-bit wall status, 32-bit pose).
    pub fn to_wire(&self) -> Result<(u16, u32), wire::WireError> {
        let w = self
            .admitting_direction
            .wall()
            .map_err(|_| wire::WireError::MalformedPose(0))?;
        Ok((
            wire::encode_wall_status(&self.walls),
            wire::encode_pose(self.position, w)?,
        ))
    }

    pub fn from_wire(status: u16, pose: u32) -> Result<Self, wire::WireError> {
        let walls = wire::decode_wall_status(status)?;
        let (position, w) = wire::decode_pose(pose)?;
        Ok(Self {
            position,
            walls,
            admitting_direction: w.offset(),
        })
    }
}

/// How a robot enters the assembly.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Admission {
    /// The stationary first robot; it assumes the origin.
    Root,
    Neighbor(NeighborInfo),
}

/// One in-assembly robot.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct RobotState {
    pub id: RobotId,
    pub position: HexCoord,
    pub walls: WallStatusVector,
    pub alpha_left: bool,
    pub alpha_right: bool,
    pub growth: Growth,
    pub is_root: bool,
}

impl RobotState {
    pub fn phase(&self) -> Phase {
        if self.walls.any_free() {
            Phase::SignalActivation
        } else {
            Phase::Done
        }
    }

    pub fn alpha(&self, flank: Flank) -> bool {
        match flank {
            Flank::Left => self.alpha_left,
            Flank::Right => self.alpha_right,
        }
    }

    pub fn is_nucleus(&self) -> bool {
        self.alpha_left || self.alpha_right
    }

    /// Longitudinal frontier robot: at least one free fore-aft wall.
    pub fn is_lfr(&self) -> bool {
        Wall::FORE_AFT.iter().any(|&w| self.walls.is(w, WallStatus::Free))
    }
}

/// Initialization phase for a robot that has just docked.
///
/// The position comes from the admitting neighbor (or the origin for the
/// root). Wall types are identified against the shape, walls facing
/// currently occupied cells are marked occupied, and the role and growth
/// direction are fixed from that sensed state.
pub fn initialize_robot(
    id: RobotId,
    admission: Admission,
    shape: &ShapeSpec,
    is_occupied: impl Fn(HexCoord) -> bool,
) -> Result<RobotState, ProtocolError> {
    let (position, is_root) = match admission {
        Admission::Root => (HexCoord::ORIGIN, true),
        Admission::Neighbor(info) => {
            info.admitting_direction.wall()?;
            (info.position + info.admitting_direction, false)
        }
    };
    let mut walls = identify_wall_types(position, shape).map_err(|e| match e {
        ProtocolError::OutsideShape(c) => ProtocolError::OffTarget(c),
        other => other,
    })?;
    for w in Wall::ALL {
        if is_occupied(position.neighbor(w)) {
            walls.occupy(w);
        }
    }
    let (alpha_left, alpha_right) = determine_role(&walls, position, shape)?;
    let growth = determine_growth_direction(alpha_left, alpha_right, &walls);
    Ok(RobotState {
        id,
        position,
        walls,
        alpha_left,
        alpha_right,
        growth,
        is_root,
    })
}
