//! Decentralized assembly of hexagonal robots into a target shape.
//!
//! [`shape`] describes targets, [`protocol`] is what each robot runs,
//! [`assembly`] holds the global state and its checkers, and [`sim`] drives
//! lockstep trials and Monte Carlo sweeps.

pub mod assembly;
pub mod cycles;
pub mod geometry;
pub mod hexgrid;
pub mod protocol;
pub mod shape;
pub mod sim;

pub use hexgrid::{HexCoord, HexOffset, Wall};
pub use shape::ShapeSpec;

/// Exact lattice embedding used for interior tests.
pub type LatticePoint = geometry::Point2<i64>;
/// Display-space embedding.
pub type CartesianPoint = geometry::Point2<f64>;
