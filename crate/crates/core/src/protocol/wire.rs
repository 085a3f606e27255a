//! Fixed-width encodings for inter-robot messages.
//!
//! Wall status: two bits per wall, wall `w` in bits `2w..2w+1`, with
//! 0 = null, 1 = free, 2 = occupied. Pose: wall index in bits 0..3, `q` and
//! `p` as 14-bit two's complement in bits 3..17 and 17..31.

use thiserror::Error;

use super::{WallStatus, WallStatusVector};
use crate::hexgrid::{HexCoord, Wall};

pub const COORD_LIMIT: i32 = 8191;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Error)]
pub enum WireError {
    #[error("malformed wall status word {0:#06x}")]
    MalformedStatus(u16),
    #[error("malformed pose word {0:#010x}")]
    MalformedPose(u32),
    #[error("coordinate {0} does not fit the pose encoding")]
    OutOfRange(HexCoord),
}

pub fn encode_wall_status(walls: &WallStatusVector) -> u16 {
    walls.0.iter().enumerate().fold(0u16, |acc, (i, s)| {
        let v = match s {
            WallStatus::Null => 0,
            WallStatus::Free => 1,
            WallStatus::Occupied => 2,
        };
        acc | (v << (2 * i))
    })
}

pub fn decode_wall_status(word: u16) -> Result<WallStatusVector, WireError> {
    if word >> 12 != 0 {
        return Err(WireError::MalformedStatus(word));
    }
    let mut out = WallStatusVector::ALL_NULL;
    for (i, s) in out.0.iter_mut().enumerate() {
        *s = match (word >> (2 * i)) & 0b11 {
            0 => WallStatus::Null,
            1 => WallStatus::Free,
            2 => WallStatus::Occupied,
            _ => return Err(WireError::MalformedStatus(word)),
        };
    }
    Ok(out)
}

const FIELD: u32 = 0x3fff;

fn to_field(v: i32) -> u32 {
    (v as u32) & FIELD
}

fn from_field(bits: u32) -> i32 {
    // sign-extend from 14 bits
    ((bits << 18) as i32) >> 18
}

pub fn encode_pose(x: HexCoord, w: Wall) -> Result<u32, WireError> {
    if x.p.abs() > COORD_LIMIT || x.q.abs() > COORD_LIMIT {
        return Err(WireError::OutOfRange(x));
    }
    Ok(w.index() as u32 | (to_field(x.q) << 3) | (to_field(x.p) << 17))
}

pub fn decode_pose(word: u32) -> Result<(HexCoord, Wall), WireError> {
    if word >> 31 != 0 {
        return Err(WireError::MalformedPose(word));
    }
    let w = Wall::from_index((word & 0b111) as usize).ok_or(WireError::MalformedPose(word))?;
    let q = from_field((word >> 3) & FIELD);
    let p = from_field((word >> 17) & FIELD);
    Ok((HexCoord::new(p, q), w))
}
