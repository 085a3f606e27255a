//! Target shapes: validation, perimeter, boundary loops and column segments.
//!
//! Robots only know the perimeter of the target. Full membership is
//! recovered by ray casting against the outer boundary loops of the
//! perimeter graph, see [`point_in_shape`].

mod generate;
mod io;

pub use generate::generate_random_shape;
pub use io::{parse_shape, write_shape, SHAPE_HEADER};

use std::collections::{BTreeMap, BTreeSet, HashMap, HashSet, VecDeque};

use thiserror::Error;

use crate::cycles;
use crate::geometry::{lattice_point, point_in_polygon, point_on_segment, signed_area2, Point2};
use crate::hexgrid::{HexCoord, Wall};

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum ShapeError {
    #[error("shape has no cells")]
    EmptyShape,
    #[error("shape is not connected")]
    Disconnected,
    #[error("shape contains holes")]
    HasHoles,
    #[error("boundary has no cycles")]
    DegenerateBoundary,
    #[error("duplicate cell {0}")]
    DuplicateCell(HexCoord),
    #[error("root {0} is not a cell of the shape")]
    RootNotInShape(HexCoord),
    #[error("perimeter does not reconstruct the shape")]
    ReconstructionMismatch,
    #[error("line {line}: {msg}")]
    Parse { line: usize, msg: String },
}

/// A closed loop of perimeter cells, in traversal order.
pub type BoundaryLoop = Vec<HexCoord>;

/// Maximal contiguous run of target cells within one column.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub struct Segment {
    pub column: i32,
    pub row_lo: i32,
    pub row_hi: i32,
    pub midpoint_row: i32,
}

impl Segment {
    pub fn new(column: i32, row_lo: i32, row_hi: i32) -> Self {
        assert!(row_lo <= row_hi);
        Self {
            column,
            row_lo,
            row_hi,
            midpoint_row: (row_lo + row_hi).div_euclid(2),
        }
    }

    pub fn contains_row(&self, q: i32) -> bool {
        self.row_lo <= q && q <= self.row_hi
    }

    pub fn len(&self) -> usize {
        (self.row_hi - self.row_lo + 1) as usize
    }

    pub fn is_empty(&self) -> bool {
        false
    }

    pub fn midpoint(&self) -> HexCoord {
        HexCoord::new(self.column, self.midpoint_row)
    }

    pub fn cells(&self) -> impl Iterator<Item = HexCoord> + '_ {
        (self.row_lo..=self.row_hi).map(|q| HexCoord::new(self.column, q))
    }
}

/// Identifies a segment by column and its position (ascending rows) in that column.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct SegmentId {
    pub column: i32,
    pub index: usize,
}

/// A validated, hole-free, connected target shape.
#[derive(Debug, Clone)]
pub struct ShapeSpec {
    cells: HashSet<HexCoord>,
    sorted: Vec<HexCoord>,
    perimeter: BTreeSet<HexCoord>,
    cycles: Vec<BoundaryLoop>,
    columns: BTreeMap<i32, Vec<Segment>>,
}

impl ShapeSpec {
    /// Build a shape from its full cell set.
    ///
    /// The cell set is validated, the perimeter and boundary loops are
    /// derived, and the set is reconstructed from the perimeter alone. The
    /// reconstruction must reproduce the input.
    pub fn from_cells<I: IntoIterator<Item = HexCoord>>(cells: I) -> Result<Self, ShapeError> {
        let cells: HashSet<HexCoord> = cells.into_iter().collect();
        validate_cells(&cells)?;
        let perimeter = compute_perimeter(&cells)?;
        let shape = Self::from_perimeter(perimeter)?;
        if shape.cells != cells {
            return Err(ShapeError::ReconstructionMismatch);
        }
        Ok(shape)
    }

    /// Build a shape knowing only its perimeter.
    pub fn from_perimeter(perimeter: BTreeSet<HexCoord>) -> Result<Self, ShapeError> {
        if perimeter.is_empty() {
            return Err(ShapeError::EmptyShape);
        }
        let cycles = match find_boundary_cycles(&perimeter) {
            Ok(c) => c,
            Err(ShapeError::DegenerateBoundary) => Vec::new(),
            Err(e) => return Err(e),
        };
        let cells = reconstruct_cells(&perimeter, &cycles);
        let mut sorted: Vec<HexCoord> = cells.iter().copied().collect();
        sorted.sort_unstable();
        let columns = compute_columns(&sorted);
        Ok(Self {
            cells,
            sorted,
            perimeter,
            cycles,
            columns,
        })
    }

    pub fn contains(&self, c: HexCoord) -> bool {
        self.cells.contains(&c)
    }

    pub fn len(&self) -> usize {
        self.cells.len()
    }

    pub fn is_empty(&self) -> bool {
        self.cells.is_empty()
    }

    /// Cells in ascending `(p, q)` order.
    pub fn cells(&self) -> &[HexCoord] {
        &self.sorted
    }

    pub fn cell_set(&self) -> &HashSet<HexCoord> {
        &self.cells
    }

    pub fn perimeter(&self) -> &BTreeSet<HexCoord> {
        &self.perimeter
    }

    pub fn cycles(&self) -> &[BoundaryLoop] {
        &self.cycles
    }

    pub fn columns(&self) -> &BTreeMap<i32, Vec<Segment>> {
        &self.columns
    }

    /// Segments of column `p`, ascending. Empty when the column has no cells.
    pub fn column(&self, p: i32) -> &[Segment] {
        self.columns.get(&p).map(Vec::as_slice).unwrap_or(&[])
    }

    pub fn segment_id_of(&self, c: HexCoord) -> Option<SegmentId> {
        let index = self.column(c.p).iter().position(|s| s.contains_row(c.q))?;
        Some(SegmentId { column: c.p, index })
    }

    pub fn segment_of(&self, c: HexCoord) -> Option<&Segment> {
        self.column(c.p).iter().find(|s| s.contains_row(c.q))
    }

    pub fn segment(&self, id: SegmentId) -> Option<&Segment> {
        self.column(id.column).get(id.index)
    }

    /// Inclusive `(min, max)` corners of the axial bounding box.
    pub fn bounding_box(&self) -> (HexCoord, HexCoord) {
        bounding_box(self.sorted.iter().copied()).expect("shape is nonempty")
    }

    /// Same shape shifted so that `root` lands on the origin.
    pub fn translated_to_origin(&self, root: HexCoord) -> Result<Self, ShapeError> {
        if !self.contains(root) {
            return Err(ShapeError::RootNotInShape(root));
        }
        let d = HexCoord::ORIGIN - root;
        Self::from_cells(self.sorted.iter().map(|&c| c + d))
    }
}

pub(crate) fn bounding_box(cells: impl Iterator<Item = HexCoord>) -> Option<(HexCoord, HexCoord)> {
    cells.fold(None, |acc, c| match acc {
        None => Some((c, c)),
        Some((lo, hi)) => Some((
            HexCoord::new(lo.p.min(c.p), lo.q.min(c.q)),
            HexCoord::new(hi.p.max(c.p), hi.q.max(c.q)),
        )),
    })
}

/// Check that a cell set is nonempty, edge-connected and hole-free.
pub fn validate_cells(cells: &HashSet<HexCoord>) -> Result<(), ShapeError> {
    let Some(&start) = cells.iter().min() else {
        return Err(ShapeError::EmptyShape);
    };
    let mut seen = HashSet::from([start]);
    let mut queue = VecDeque::from([start]);
    while let Some(c) = queue.pop_front() {
        for n in c.neighbors() {
            if cells.contains(&n) && seen.insert(n) {
                queue.push_back(n);
            }
        }
    }
    if seen.len() != cells.len() {
        return Err(ShapeError::Disconnected);
    }
    if !enclosed_cells(|c| cells.contains(&c), cells.iter().copied()).is_empty() {
        return Err(ShapeError::HasHoles);
    }
    Ok(())
}

/// Non-blocked cells inside the bounding box of `blocked_cells` that cannot
/// reach the outside of the box through non-blocked cells.
///
/// Flood fill runs over the box grown by one cell on every side, seeded from
/// its border.
pub fn enclosed_cells(
    is_blocked: impl Fn(HexCoord) -> bool,
    blocked_cells: impl Iterator<Item = HexCoord>,
) -> Vec<HexCoord> {
    let Some((lo, hi)) = bounding_box(blocked_cells) else {
        return Vec::new();
    };
    let (p0, q0) = (lo.p - 1, lo.q - 1);
    let w = (hi.p - lo.p + 3) as usize;
    let h = (hi.q - lo.q + 3) as usize;
    let idx = |c: HexCoord| (c.p - p0) as usize * h + (c.q - q0) as usize;
    let inside_box = |c: HexCoord| c.p >= p0 && c.q >= q0 && ((c.p - p0) as usize) < w && ((c.q - q0) as usize) < h;
    let mut reached = vec![false; w * h];
    let mut queue = VecDeque::new();
    for i in 0..w {
        for j in 0..h {
            if i == 0 || j == 0 || i == w - 1 || j == h - 1 {
                let c = HexCoord::new(p0 + i as i32, q0 + j as i32);
                reached[idx(c)] = true;
                queue.push_back(c);
            }
        }
    }
    while let Some(c) = queue.pop_front() {
        for n in c.neighbors() {
            if inside_box(n) && !reached[idx(n)] && !is_blocked(n) {
                reached[idx(n)] = true;
                queue.push_back(n);
            }
        }
    }
    let mut out = Vec::new();
    for i in 1..w - 1 {
        for j in 1..h - 1 {
            let c = HexCoord::new(p0 + i as i32, q0 + j as i32);
            if !reached[idx(c)] && !is_blocked(c) {
                out.push(c);
            }
        }
    }
    out
}

/// Cells with at least one neighbor outside the shape.
pub fn compute_perimeter(cells: &HashSet<HexCoord>) -> Result<BTreeSet<HexCoord>, ShapeError> {
    if cells.is_empty() {
        return Err(ShapeError::EmptyShape);
    }
    Ok(cells
        .iter()
        .copied()
        .filter(|c| c.neighbors().iter().any(|n| !cells.contains(n)))
        .collect())
}

/// Outer boundary loops of the perimeter adjacency graph.
///
/// The graph is planar under the hex-center embedding. For each connected
/// component, its outer face is traced by always taking the sharpest left
/// turn starting from the lowest cell of its leftmost column. The resulting
/// closed walk is split at repeated cells into simple loops; back-and-forth
/// spurs (length two) are dropped. The loops are exactly the elementary
/// cycles of the graph not enclosed by any other cycle.
pub fn find_boundary_cycles(perimeter: &BTreeSet<HexCoord>) -> Result<Vec<BoundaryLoop>, ShapeError> {
    let mut loops = Vec::new();
    let mut visited: HashSet<HexCoord> = HashSet::new();
    // BTreeSet iteration is ascending (p, q): the first unvisited cell of each
    // component is the lowest cell of its leftmost column.
    for &start in perimeter {
        if visited.contains(&start) {
            continue;
        }
        let mut queue = VecDeque::from([start]);
        visited.insert(start);
        while let Some(c) = queue.pop_front() {
            for n in c.neighbors() {
                if perimeter.contains(&n) && visited.insert(n) {
                    queue.push_back(n);
                }
            }
        }
        let walk = trace_outer_walk(perimeter, start);
        loops.extend(split_walk(&walk));
    }
    if loops.is_empty() {
        return Err(ShapeError::DegenerateBoundary);
    }
    Ok(loops)
}

fn trace_outer_walk(perimeter: &BTreeSet<HexCoord>, start: HexCoord) -> Vec<HexCoord> {
    // Pretend we arrived from the west: nothing lies in column p - 1.
    let next_edge = |c: HexCoord, back: Wall| {
        (1..=6)
            .map(|k| back.rotate(-k))
            .find(|&w| perimeter.contains(&c.neighbor(w)))
    };
    let Some(first) = next_edge(start, Wall::RL) else {
        return vec![start];
    };
    let mut walk = vec![start];
    let (mut cur, mut out) = (start, first);
    loop {
        let next = cur.neighbor(out);
        let Some(w) = next_edge(next, out.opposite()) else {
            unreachable!("a traced edge always leads back");
        };
        if next == start && w == first {
            break;
        }
        walk.push(next);
        cur = next;
        out = w;
    }
    walk
}

fn split_walk(walk: &[HexCoord]) -> Vec<BoundaryLoop> {
    let mut loops = Vec::new();
    let mut stack: Vec<HexCoord> = Vec::new();
    let mut pos: HashMap<HexCoord, usize> = HashMap::new();
    for &c in walk.iter().chain(walk.first()) {
        if let Some(&i) = pos.get(&c) {
            let lp: Vec<HexCoord> = stack.drain(i + 1..).collect();
            for r in &lp {
                pos.remove(r);
            }
            if lp.len() >= 2 {
                let mut full = Vec::with_capacity(lp.len() + 1);
                full.push(c);
                full.extend(lp);
                loops.push(full);
            }
        } else {
            pos.insert(c, stack.len());
            stack.push(c);
        }
    }
    loops
}

/// Boundary loops by exhaustive enumeration.
///
/// Enumerates every simple cycle of the perimeter graph with Johnson's
/// algorithm and keeps the cycles not enclosed by another cycle. Exponential
/// in the worst case; returns `None` once more than `limit` cycles exist.
/// Serves as an independent cross-check of [`find_boundary_cycles`].
pub fn boundary_cycles_exhaustive(perimeter: &BTreeSet<HexCoord>, limit: usize) -> Option<Vec<BoundaryLoop>> {
    let nodes: Vec<HexCoord> = perimeter.iter().copied().collect();
    let index: HashMap<HexCoord, usize> = nodes.iter().enumerate().map(|(i, &c)| (c, i)).collect();
    let adj: Vec<Vec<usize>> = nodes
        .iter()
        .map(|c| c.neighbors().iter().filter_map(|n| index.get(n).copied()).collect())
        .collect();
    let all = cycles::undirected_simple_cycles(&adj, limit)?;
    let polys: Vec<Vec<Point2<i64>>> = all
        .iter()
        .map(|cyc| cyc.iter().map(|&i| lattice_point(nodes[i])).collect())
        .collect();
    let kept = (0..all.len())
        .filter(|&i| {
            signed_area2(&polys[i]) != 0 && !(0..all.len()).any(|j| j != i && polygon_within(&polys[i], &polys[j]))
        })
        .map(|i| all[i].iter().map(|&k| nodes[k]).collect())
        .collect();
    Some(kept)
}

/// Whether polygon `a` lies inside or on polygon `b` (lattice-edge polygons).
fn polygon_within(a: &[Point2<i64>], b: &[Point2<i64>]) -> bool {
    let on_or_in = |pt: Point2<i64>| {
        let n = b.len();
        (0..n).any(|k| point_on_segment(pt, b[k], b[(k + 1) % n])) || point_in_polygon(pt, b)
    };
    let n = a.len();
    // edge midpoints, doubled to stay on integers
    let b2: Vec<Point2<i64>> = b.iter().map(|p| Point2::new(2 * p.x, 2 * p.y)).collect();
    let on_or_in2 = |pt: Point2<i64>| {
        let m = b2.len();
        (0..m).any(|k| point_on_segment(pt, b2[k], b2[(k + 1) % m])) || point_in_polygon(pt, &b2)
    };
    a.iter().all(|&p| on_or_in(p))
        && (0..n).all(|k| {
            let (u, v) = (a[k], a[(k + 1) % n]);
            on_or_in2(Point2::new(u.x + v.x, u.y + v.y))
        })
}

/// Membership test from perimeter knowledge alone.
///
/// `y` is in the shape when it is a perimeter cell or its center lies
/// strictly inside one of the boundary loops.
pub fn point_in_shape(y: HexCoord, perimeter: &BTreeSet<HexCoord>, cycles: &[BoundaryLoop]) -> bool {
    if perimeter.contains(&y) {
        return true;
    }
    let pt = lattice_point(y);
    cycles.iter().any(|lp| {
        let poly: Vec<Point2<i64>> = lp.iter().map(|&c| lattice_point(c)).collect();
        point_in_polygon(pt, &poly)
    })
}

fn reconstruct_cells(perimeter: &BTreeSet<HexCoord>, cycles: &[BoundaryLoop]) -> HashSet<HexCoord> {
    let mut cells: HashSet<HexCoord> = perimeter.iter().copied().collect();
    for lp in cycles {
        let poly: Vec<Point2<i64>> = lp.iter().map(|&c| lattice_point(c)).collect();
        let (lo, hi) = bounding_box(lp.iter().copied()).expect("loop is nonempty");
        // Each column inside the loop is bounded by its topmost and bottommost
        // loop cells in that column.
        for p in lo.p..=hi.p {
            let rows = lp.iter().filter(|c| c.p == p).map(|c| c.q);
            let (Some(qlo), Some(qhi)) = (rows.clone().min(), rows.max()) else {
                continue;
            };
            for q in qlo + 1..qhi {
                let y = HexCoord::new(p, q);
                if !cells.contains(&y) && point_in_polygon(lattice_point(y), &poly) {
                    cells.insert(y);
                }
            }
        }
    }
    cells
}

/// Maximal contiguous row runs of column `p`, ascending.
pub fn segments_of_column(cells: &HashSet<HexCoord>, p: i32) -> Vec<Segment> {
    let mut rows: Vec<i32> = cells.iter().filter(|c| c.p == p).map(|c| c.q).collect();
    rows.sort_unstable();
    runs(p, &rows)
}

fn runs(p: i32, rows: &[i32]) -> Vec<Segment> {
    let mut out = Vec::new();
    let mut iter = rows.iter().copied();
    let Some(first) = iter.next() else {
        return out;
    };
    let (mut lo, mut hi) = (first, first);
    for q in iter {
        if q == hi + 1 {
            hi = q;
        } else {
            out.push(Segment::new(p, lo, hi));
            lo = q;
            hi = q;
        }
    }
    out.push(Segment::new(p, lo, hi));
    out
}

fn compute_columns(sorted: &[HexCoord]) -> BTreeMap<i32, Vec<Segment>> {
    let mut by_col: BTreeMap<i32, Vec<i32>> = BTreeMap::new();
    for c in sorted {
        by_col.entry(c.p).or_default().push(c.q);
    }
    by_col.into_iter().map(|(p, rows)| (p, runs(p, &rows))).collect()
}
