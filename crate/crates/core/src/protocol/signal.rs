use super::{Growth, Phase, ProtocolError, RobotState, WallSet, WallStatus, WallStatusVector};
use crate::hexgrid::{Flank, Wall};

/// Neighbor wall-status vectors as last exchanged, indexed by the robot's own
/// wall facing that neighbor.
pub type NeighborWalls = [Option<WallStatusVector>; 6];

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct SignalOptions {
    /// Let regular robots signal flank walls wedged between occupied walls.
    /// Only improves signal visibility; assembly correctness does not depend
    /// on it.
    pub special_condition: bool,
}

impl Default for SignalOptions {
    fn default() -> Self {
        Self {
            special_condition: true,
        }
    }
}

/// Nominal signaling walls.
///
/// Free fore-aft walls take priority: while either is free, no flank wall
/// signals. Otherwise a free flank wall signals when wedged between two
/// occupied walls or between a null fore-aft wall and an occupied wall, and a
/// nucleus signals every free wall of each flank it nucleates.
pub fn identify_signal_walls(
    walls: &WallStatusVector,
    alpha_left: bool,
    alpha_right: bool,
    opts: SignalOptions,
) -> WallSet {
    let free = walls.walls_with(WallStatus::Free);
    if free.is_empty() {
        return WallSet::EMPTY;
    }
    let fore_aft: WallSet = Wall::FORE_AFT.into_iter().filter(|&w| free.contains(w)).collect();
    if !fore_aft.is_empty() {
        return fore_aft;
    }
    let mut out = WallSet::EMPTY;
    if opts.special_condition {
        for w in free.iter().filter(|w| w.flank().is_some()) {
            let [a, b] = w.adjacent();
            let occ = |x: Wall| walls.is(x, WallStatus::Occupied);
            let null_fa = |x: Wall| x.is_fore_aft() && walls.is(x, WallStatus::Null);
            if (occ(a) && occ(b)) || (null_fa(a) && occ(b)) || (occ(a) && null_fa(b)) {
                out.insert(w);
            }
        }
    }
    for (flank, alpha) in [(Flank::Left, alpha_left), (Flank::Right, alpha_right)] {
        if alpha {
            for w in flank.walls() {
                if free.contains(w) {
                    out.insert(w);
                }
            }
        }
    }
    out
}

/// Fore-aft walls whose signal must wait for a lagging neighbor.
///
/// A robot growing left holds back its F (R) signal while its FR (RR)
/// neighbor still has a free F (R) wall; a robot growing right checks its FL
/// and RL neighbors the same way.
pub fn identify_delayed_walls(
    walls: &WallStatusVector,
    neighbors: &NeighborWalls,
    growth: Growth,
) -> Result<WallSet, ProtocolError> {
    for w in Wall::ALL {
        if walls.is(w, WallStatus::Occupied) && neighbors[w.index()].is_none() {
            return Err(ProtocolError::MissingNeighborState(w));
        }
    }
    let lagging = |via: Wall, wall: Wall| {
        walls.is(via, WallStatus::Occupied) && neighbors[via.index()].is_some_and(|n| n.is(wall, WallStatus::Free))
    };
    let (front_via, rear_via) = match growth {
        Growth::Left => (Wall::FR, Wall::RR),
        Growth::Right => (Wall::FL, Wall::RL),
        Growth::Neutral => return Ok(WallSet::EMPTY),
    };
    let mut out = WallSet::EMPTY;
    if lagging(front_via, Wall::F) {
        out.insert(Wall::F);
    }
    if lagging(rear_via, Wall::R) {
        out.insert(Wall::R);
    }
    Ok(out)
}

/// Walls the robot signals on this time step.
pub fn signal_step(
    robot: &RobotState,
    neighbors: &NeighborWalls,
    opts: SignalOptions,
) -> Result<WallSet, ProtocolError> {
    if robot.phase() == Phase::Done {
        return Ok(WallSet::EMPTY);
    }
    let nominal = identify_signal_walls(&robot.walls, robot.alpha_left, robot.alpha_right, opts);
    let delayed = identify_delayed_walls(&robot.walls, neighbors, robot.growth)?;
    Ok(nominal.difference(delayed))
}
