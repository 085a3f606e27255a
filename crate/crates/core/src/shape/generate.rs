use std::collections::HashSet;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use super::{enclosed_cells, ShapeSpec};
use crate::hexgrid::HexCoord;

/// Seeded random hole-free polyhex grown from the origin.
///
/// Each step picks a uniformly random frontier cell and adds it unless that
/// would enclose a hole; rejected cells stay in the frontier for later draws.
///
/// # Panics
///
/// If `n_cells` is zero.
pub fn generate_random_shape(seed: u64, n_cells: usize) -> ShapeSpec {
    assert!(n_cells >= 1, "a shape needs at least one cell");
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut cells: HashSet<HexCoord> = HashSet::from([HexCoord::ORIGIN]);
    let mut frontier: Vec<HexCoord> = HexCoord::ORIGIN.neighbors().to_vec();
    let mut in_frontier: HashSet<HexCoord> = frontier.iter().copied().collect();
    while cells.len() < n_cells {
        let i = rng.gen_range(0..frontier.len());
        let c = frontier[i];
        if would_enclose(&cells, c) {
            continue;
        }
        frontier.swap_remove(i);
        in_frontier.remove(&c);
        cells.insert(c);
        for n in c.neighbors() {
            if !cells.contains(&n) && in_frontier.insert(n) {
                frontier.push(n);
            }
        }
    }
    ShapeSpec::from_cells(cells).expect("growth keeps shapes connected and hole-free")
}

/// Whether adding `c` to a hole-free set would enclose a hole.
fn would_enclose(cells: &HashSet<HexCoord>, c: HexCoord) -> bool {
    let ring = c.neighbors().map(|n| cells.contains(&n));
    // number of separate arcs of empty neighbors around c
    let arcs = (0..6).filter(|&i| ring[i] && !ring[(i + 1) % 6]).count();
    if arcs <= 1 {
        return false;
    }
    let is_cell = |x: HexCoord| x == c || cells.contains(&x);
    !enclosed_cells(is_cell, cells.iter().copied().chain([c])).is_empty()
}
