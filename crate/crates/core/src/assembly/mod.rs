//! Global assembly state and the runtime checkers run against it.

mod log;

pub use log::{
    read_event_log, replay, write_event_log, AttachRecord, Event, LogError, ReplayOptions, ReplaySummary, SignalEntry,
    SignalRecord,
};

use std::collections::{BTreeMap, BTreeSet, HashMap};
use std::fmt;

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::hexgrid::{reorient_to_north_front, wall_toward, HexCoord, Wall};
use crate::protocol::wire::WireError;
use crate::protocol::{
    initialize_robot, signal_step, Admission, NeighborInfo, NeighborWalls, ProtocolError, RobotId, RobotState,
    SignalOptions, WallSet, WallStatus,
};
use crate::shape::{enclosed_cells, SegmentId, ShapeSpec};

/// Maximum occupied neighbors a joining robot may dock against.
pub const MAX_DOCKING_DEGREE: usize = 3;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Checker {
    Reachability,
    HoleFree,
    UniqueNucleation,
    DelayOrder,
    Signals,
    Deadlock,
}

impl Checker {
    pub fn name(self) -> &'static str {
        match self {
            Checker::Reachability => "reachability",
            Checker::HoleFree => "hole_free",
            Checker::UniqueNucleation => "unique_nucleation",
            Checker::DelayOrder => "delay_order",
            Checker::Signals => "signals",
            Checker::Deadlock => "deadlock",
        }
    }
}

impl fmt::Display for Checker {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct Violation {
    pub step: u64,
    pub checker: Checker,
    pub detail: String,
    pub positions: Vec<HexCoord>,
}

impl fmt::Display for Violation {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "step {}: {}: {}", self.step, self.checker, self.detail)
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum AttachError {
    #[error("position {0} is already occupied")]
    PositionOccupied(HexCoord),
    #[error("position {0} is not a target cell")]
    OffTarget(HexCoord),
    #[error("position {position} would dock against {count} robots")]
    InfeasibleDegree { position: HexCoord, count: usize },
    #[error("robot {admitting} does not signal position {position}")]
    NotSignaled { position: HexCoord, admitting: RobotId },
    #[error("unknown robot {0}")]
    UnknownRobot(RobotId),
    #[error(transparent)]
    Protocol(#[from] ProtocolError),
    #[error(transparent)]
    Wire(#[from] WireError),
}

impl AttachError {
    /// Checker whose guarantee the failed attachment would have broken.
    pub fn checker(&self) -> Checker {
        match self {
            AttachError::InfeasibleDegree { .. } => Checker::Reachability,
            _ => Checker::Signals,
        }
    }
}

/// Per-segment bookkeeping: column segments grown from one seed.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct SegmentRecord {
    pub column: i32,
    pub seed: RobotId,
    /// Nucleus that admitted the seed; `None` for the root's segment.
    pub parent: Option<RobotId>,
    pub target: SegmentId,
}

/// Assembly graph `G(t)` over a fixed target shape.
#[derive(Debug, Clone)]
pub struct AssemblyState<'s> {
    shape: &'s ShapeSpec,
    robots: Vec<RobotState>,
    occupied: HashMap<HexCoord, RobotId>,
    edges: BTreeSet<(RobotId, RobotId)>,
    step: u64,
    signals: HashMap<RobotId, WallSet>,
    // union-find over robots in realized column segments
    uf: Vec<usize>,
    segment_of_root: HashMap<usize, usize>,
    segments: Vec<SegmentRecord>,
    history: Vec<Violation>,
    diagonal_overtakes: usize,
}

impl<'s> AssemblyState<'s> {
    /// Assembly holding only the root at the origin.
    pub fn new(shape: &'s ShapeSpec) -> Result<Self, ProtocolError> {
        let root = initialize_robot(RobotId(0), Admission::Root, shape, |_| false)?;
        let mut s = Self {
            shape,
            robots: Vec::new(),
            occupied: HashMap::new(),
            edges: BTreeSet::new(),
            step: 0,
            signals: HashMap::new(),
            uf: vec![0],
            segment_of_root: HashMap::new(),
            segments: Vec::new(),
            history: Vec::new(),
            diagonal_overtakes: 0,
        };
        s.segment_of_root.insert(0, 0);
        s.segments.push(SegmentRecord {
            column: 0,
            seed: RobotId(0),
            parent: None,
            target: shape.segment_id_of(HexCoord::ORIGIN).expect("root is a target cell"),
        });
        s.occupied.insert(HexCoord::ORIGIN, RobotId(0));
        s.robots.push(root);
        Ok(s)
    }

    pub fn shape(&self) -> &'s ShapeSpec {
        self.shape
    }

    pub fn step(&self) -> u64 {
        self.step
    }

    pub fn robots(&self) -> &[RobotState] {
        &self.robots
    }

    pub fn robot(&self, id: RobotId) -> Option<&RobotState> {
        self.robots.get(id.0 as usize)
    }

    pub fn robot_at(&self, c: HexCoord) -> Option<&RobotState> {
        self.occupied.get(&c).map(|id| &self.robots[id.0 as usize])
    }

    pub fn is_occupied(&self, c: HexCoord) -> bool {
        self.occupied.contains_key(&c)
    }

    pub fn len(&self) -> usize {
        self.robots.len()
    }

    pub fn is_empty(&self) -> bool {
        self.robots.is_empty()
    }

    pub fn edges(&self) -> &BTreeSet<(RobotId, RobotId)> {
        &self.edges
    }

    pub fn segments(&self) -> &[SegmentRecord] {
        &self.segments
    }

    pub fn occupied_neighbor_count(&self, c: HexCoord) -> usize {
        c.neighbors().iter().filter(|n| self.is_occupied(**n)).count()
    }

    /// Wall vectors each robot receives from its neighbors.
    pub fn neighbor_walls(&self, id: RobotId) -> NeighborWalls {
        let x = self.robots[id.0 as usize].position;
        Wall::ALL.map(|w| self.robot_at(x.neighbor(w)).map(|r| r.walls))
    }

    /// Run one signal round over the current state.
    pub fn compute_signals(&self, opts: SignalOptions) -> Result<Vec<(RobotId, WallSet)>, ProtocolError> {
        let mut out = Vec::new();
        for r in &self.robots {
            let s = signal_step(r, &self.neighbor_walls(r.id), opts)?;
            if !s.is_empty() {
                out.push((r.id, s));
            }
        }
        Ok(out)
    }

    /// Install the signal set attachments of this step are checked against.
    pub fn set_signals(&mut self, signals: impl IntoIterator<Item = (RobotId, WallSet)>) {
        self.signals = signals.into_iter().collect();
    }

    pub fn signals(&self) -> &HashMap<RobotId, WallSet> {
        &self.signals
    }

    /// Distinct signaled openings, each with its smallest-id signaler.
    pub fn openings(&self) -> BTreeMap<HexCoord, RobotId> {
        let mut out: BTreeMap<HexCoord, RobotId> = BTreeMap::new();
        for (&id, ws) in &self.signals {
            let x = self.robots[id.0 as usize].position;
            for w in ws.iter() {
                let e = out.entry(x.neighbor(w)).or_insert(id);
                if id < *e {
                    *e = id;
                }
            }
        }
        out
    }

    /// Close the current step.
    pub fn advance_step(&mut self) {
        self.step += 1;
    }

    /// Dock a new robot at `position` through a signaled wall of `admitting`.
    pub fn attach(&mut self, position: HexCoord, admitting: RobotId) -> Result<RobotId, AttachError> {
        let admitter = self.robot(admitting).ok_or(AttachError::UnknownRobot(admitting))?;
        let local = wall_toward(admitter.position, position).map_or(Wall::F, Wall::opposite);
        self.attach_oriented(position, admitting, local)
    }

    /// As [`attach`](Self::attach), with the joiner docking on local wall
    /// `local_wall` of its own arbitrary frame.
    pub fn attach_oriented(
        &mut self,
        position: HexCoord,
        admitting: RobotId,
        local_wall: Wall,
    ) -> Result<RobotId, AttachError> {
        if self.is_occupied(position) {
            return Err(AttachError::PositionOccupied(position));
        }
        if !self.shape.contains(position) {
            return Err(AttachError::OffTarget(position));
        }
        let admitter = self
            .robot(admitting)
            .ok_or(AttachError::UnknownRobot(admitting))?
            .clone();
        let count = self.occupied_neighbor_count(position);
        if count > MAX_DOCKING_DEGREE {
            return Err(AttachError::InfeasibleDegree { position, count });
        }
        let not_signaled = AttachError::NotSignaled { position, admitting };
        let w = wall_toward(admitter.position, position).map_err(|_| not_signaled.clone())?;
        if !self.signals.get(&admitting).is_some_and(|s| s.contains(w)) {
            return Err(not_signaled);
        }

        // the joiner only ever sees the admitter's message in wire form
        let info = NeighborInfo {
            position: admitter.position,
            walls: admitter.walls,
            admitting_direction: w.offset(),
        };
        let (status, pose) = info.to_wire()?;
        let info = NeighborInfo::from_wire(status, pose)?;
        let r = reorient_to_north_front(local_wall, info.admitting_direction).map_err(ProtocolError::from)?;
        debug_assert_eq!(local_wall.rotate(r as i64), w.opposite());

        let id = RobotId(self.robots.len() as u32);
        let robot = initialize_robot(id, Admission::Neighbor(info), self.shape, |c| {
            self.occupied.contains_key(&c)
        })?;
        debug_assert_eq!(robot.position, position);

        self.check_delay_at_attach(position);
        self.track_segments(&robot, &admitter);

        for nw in Wall::ALL {
            let n = position.neighbor(nw);
            if let Some(&nid) = self.occupied.get(&n) {
                self.robots[nid.0 as usize].walls.occupy(nw.opposite());
                self.edges.insert((nid.min(id), nid.max(id)));
            }
        }
        self.occupied.insert(position, id);
        self.robots.push(robot);
        Ok(id)
    }

    fn find(&mut self, mut i: usize) -> usize {
        while self.uf[i] != i {
            self.uf[i] = self.uf[self.uf[i]];
            i = self.uf[i];
        }
        i
    }

    fn track_segments(&mut self, robot: &RobotState, admitter: &RobotState) {
        let x = robot.position;
        let id = robot.id.0 as usize;
        self.uf.push(id);
        let mut roots: Vec<usize> = Vec::new();
        for w in Wall::FORE_AFT {
            if let Some(&n) = self.occupied.get(&x.neighbor(w)) {
                let r = self.find(n.0 as usize);
                if !roots.contains(&r) {
                    roots.push(r);
                }
            }
        }
        match roots.as_slice() {
            [] => {
                let target = self.shape.segment_id_of(x).expect("attached cell is a target cell");
                let step = self.step + 1;
                let flank_ok = wall_toward(admitter.position, x)
                    .ok()
                    .and_then(Wall::flank)
                    .is_some_and(|f| admitter.alpha(f));
                if !flank_ok {
                    self.history.push(Violation {
                        step,
                        checker: Checker::UniqueNucleation,
                        detail: format!("robot {} at {x} seeded by non-nucleus {}", robot.id, admitter.id),
                        positions: vec![x],
                    });
                }
                if let Some(other) = self.segments.iter().find(|s| s.target == target) {
                    self.history.push(Violation {
                        step,
                        checker: Checker::UniqueNucleation,
                        detail: format!(
                            "column {} segment seeded twice: by {} and by {} (seed {})",
                            x.p,
                            other.parent.map_or("root".into(), |p| p.to_string()),
                            admitter.id,
                            robot.id
                        ),
                        positions: vec![x],
                    });
                }
                self.segment_of_root.insert(id, self.segments.len());
                self.segments.push(SegmentRecord {
                    column: x.p,
                    seed: robot.id,
                    parent: Some(admitter.id),
                    target,
                });
            }
            [r] => self.uf[id] = *r,
            [a, b] => {
                let (a, b) = (*a, *b);
                let sa = &self.segments[self.segment_of_root[&a]];
                let sb = &self.segments[self.segment_of_root[&b]];
                self.history.push(Violation {
                    step: self.step + 1,
                    checker: Checker::UniqueNucleation,
                    detail: format!(
                        "robot {} at {x} joins segments seeded by {} and {}",
                        robot.id, sa.seed, sb.seed
                    ),
                    positions: vec![x],
                });
                self.uf[id] = a;
                self.uf[b] = a;
            }
            _ => unreachable!("at most two in-column neighbors"),
        }
    }

    /// Fore-aft fills must not overtake a lagging neighbor column.
    ///
    /// When `position` fills fore-aft wall `w` of a robot `i` with nonzero
    /// growth, the neighbor `j` of `i` in column `p_i - g_i` that shares the
    /// row direction of `w` (FR/RR for `g = -1`, FL/RL for `g = 1`) must not
    /// be an LFR with `w` still free. The diagonal neighbor in that column is
    /// not ordered by the delay rule; such overtakes are only counted.
    fn check_delay_at_attach(&mut self, position: HexCoord) {
        let mut found = Vec::new();
        let mut diagonal = 0;
        for w in Wall::FORE_AFT {
            let Some(i) = self.robot_at(position.neighbor(w.opposite())) else {
                continue;
            };
            let g = i.growth.as_i8() as i32;
            if g == 0 || !i.walls.is(w, WallStatus::Free) {
                continue;
            }
            let guard = match (g, w) {
                (-1, Wall::F) => Wall::FR,
                (-1, _) => Wall::RR,
                (_, Wall::F) => Wall::FL,
                _ => Wall::RL,
            };
            for v in Wall::ALL {
                let n = i.position.neighbor(v);
                if n.p != i.position.p - g {
                    continue;
                }
                let Some(j) = self.robot_at(n) else { continue };
                if !(j.walls.is(w, WallStatus::Free) && j.is_lfr()) {
                    continue;
                }
                if v != guard {
                    diagonal += 1;
                    continue;
                }
                found.push(Violation {
                    step: self.step + 1,
                    checker: Checker::DelayOrder,
                    detail: format!(
                        "wall {w} of {} at {} filled before wall {w} of {} at {}",
                        i.id, i.position, j.id, j.position
                    ),
                    positions: vec![position, j.position.neighbor(w)],
                });
            }
        }
        self.history.extend(found);
        self.diagonal_overtakes += diagonal;
    }

    /// Fills that overtook a free fore-aft wall of the diagonal neighbor in
    /// the lagging column. Not a violation; see [`check_delay_order`](Self::check_delay_order).
    pub fn diagonal_overtakes(&self) -> usize {
        self.diagonal_overtakes
    }

    /// Every unoccupied target cell next to the assembly must be dockable
    /// against one to three robots.
    pub fn check_reachability(&self) -> Result<(), Violation> {
        let mut bad = BTreeSet::new();
        for &x in self.occupied.keys() {
            for y in x.neighbors() {
                if self.shape.contains(y) && !self.is_occupied(y) {
                    let n = self.occupied_neighbor_count(y);
                    if !(1..=MAX_DOCKING_DEGREE).contains(&n) {
                        bad.insert(y);
                    }
                }
            }
        }
        if bad.is_empty() {
            Ok(())
        } else {
            Err(self.violation(Checker::Reachability, "unreachable open positions", bad))
        }
    }

    /// No unoccupied cell may be enclosed by the assembly.
    pub fn check_hole_free(&self) -> Result<(), Violation> {
        let enclosed = enclosed_cells(|c| self.is_occupied(c), self.occupied.keys().copied());
        if enclosed.is_empty() {
            Ok(())
        } else {
            Err(self.violation(Checker::HoleFree, "enclosed unoccupied positions", enclosed))
        }
    }

    /// Each column segment grows from a single nucleus-seeded origin and
    /// segments never merge.
    pub fn check_unique_nucleation(&self) -> Result<(), Violation> {
        match self.history.iter().find(|v| v.checker == Checker::UniqueNucleation) {
            Some(v) => Err(v.clone()),
            None => Ok(()),
        }
    }

    /// Fore-aft expansion never outpaces the parent column.
    pub fn check_delay_order(&self) -> Result<(), Violation> {
        match self.history.iter().find(|v| v.checker == Checker::DelayOrder) {
            Some(v) => Err(v.clone()),
            None => Ok(()),
        }
    }

    /// All four checkers, reporting the first failure.
    pub fn check_all(&self) -> Result<(), Violation> {
        self.check_reachability()?;
        self.check_hole_free()?;
        self.check_unique_nucleation()?;
        self.check_delay_order()
    }

    pub fn check_complete(&self) -> bool {
        self.occupied.len() == self.shape.len() && self.shape.cells().iter().all(|c| self.is_occupied(*c))
    }

    fn violation(&self, checker: Checker, what: &str, cells: impl IntoIterator<Item = HexCoord>) -> Violation {
        let positions: Vec<HexCoord> = cells.into_iter().collect();
        let list: Vec<String> = positions.iter().map(|c| c.to_string()).collect();
        Violation {
            step: self.step,
            checker,
            detail: format!("{what}: {}", list.join(" ")),
            positions,
        }
    }
}
