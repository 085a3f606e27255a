//! Planar embedding of the hex grid and polygon predicates.
//!
//! The predicates here are generic over the scalar so the same code runs on
//! exact integer lattice points (used for shape reconstruction) and on
//! floating-point display coordinates (used for rendering).

use std::fmt::Debug;

use num_traits::{Float, Num, Signed};

use crate::hexgrid::HexCoord;

/// Ordered ring scalar accepted by the polygon predicates.
pub trait Scalar: Copy + PartialOrd + Num + Signed + Debug {}

impl<T: Copy + PartialOrd + Num + Signed + Debug> Scalar for T {}

#[derive(Debug, Clone, Copy, PartialEq, Default)]
pub struct Point2<T> {
    pub x: T,
    pub y: T,
}

impl<T> Point2<T> {
    pub const fn new(x: T, y: T) -> Self {
        Self { x, y }
    }
}

impl<T: Scalar> Point2<T> {
    pub fn map<U>(self, f: impl Fn(T) -> U) -> Point2<U> {
        Point2::new(f(self.x), f(self.y))
    }
}

/// Exact lattice image of a cell center.
///
/// This is the flat-top embedding `(1.5 p, (q + p/2) sqrt 3)` with the x axis
/// scaled by 2 and the y axis by `2 / sqrt 3`. Independent axis scaling
/// preserves every inside/outside relation, so ray casting on these points is
/// exact.
pub fn lattice_point(c: HexCoord) -> Point2<i64> {
    let (p, q) = (c.p as i64, c.q as i64);
    Point2::new(3 * p, 2 * q + p)
}

/// Cartesian center of a flat-top hexagon with the given side length.
pub fn hex_center<T: Float>(c: HexCoord, side: T) -> Point2<T> {
    let p = T::from(c.p).unwrap();
    let q = T::from(c.q).unwrap();
    let half = T::from(0.5).unwrap();
    let three = T::from(3.0).unwrap();
    Point2::new(T::from(1.5).unwrap() * p * side, (q + p * half) * three.sqrt() * side)
}

/// Corners of a flat-top hexagon, counter-clockwise from the +x vertex.
pub fn hex_corners<T: Float>(c: HexCoord, side: T) -> [Point2<T>; 6] {
    let center = hex_center(c, side);
    let step = T::from(std::f64::consts::FRAC_PI_3).unwrap();
    std::array::from_fn(|i| {
        let a = step * T::from(i).unwrap();
        Point2::new(center.x + side * a.cos(), center.y + side * a.sin())
    })
}

/// Twice the signed area of a closed polygon (positive when counter-clockwise).
pub fn signed_area2<T: Scalar>(poly: &[Point2<T>]) -> T {
    let n = poly.len();
    (0..n).fold(T::zero(), |acc, i| {
        let a = poly[i];
        let b = poly[(i + 1) % n];
        acc + (a.x * b.y - b.x * a.y)
    })
}

/// Even-odd ray cast along +x.
///
/// An edge counts when exactly one endpoint lies strictly below the ray
/// (half-open rule), so rays through vertices are counted once. The crossing
/// test is division-free, which keeps it exact for integer and rational
/// scalars. Points exactly on the boundary are unspecified.
pub fn point_in_polygon<T: Scalar>(pt: Point2<T>, poly: &[Point2<T>]) -> bool {
    let n = poly.len();
    if n < 3 {
        return false;
    }
    let mut inside = false;
    let mut a = poly[n - 1];
    for &b in poly {
        if (a.y < pt.y) != (b.y < pt.y) {
            // x of the crossing minus pt.x, scaled by (b.y - a.y)
            let dy = b.y - a.y;
            let scaled = (a.x - pt.x) * dy + (pt.y - a.y) * (b.x - a.x);
            let right_of_point = if dy > T::zero() {
                scaled > T::zero()
            } else {
                scaled < T::zero()
            };
            if right_of_point {
                inside = !inside;
            }
        }
        a = b;
    }
    inside
}

/// True when `pt` lies on the closed segment `a`-`b`.
pub fn point_on_segment<T: Scalar>(pt: Point2<T>, a: Point2<T>, b: Point2<T>) -> bool {
    let cross = (b.x - a.x) * (pt.y - a.y) - (b.y - a.y) * (pt.x - a.x);
    if cross != T::zero() {
        return false;
    }
    let within = |v: T, lo: T, hi: T| {
        let (lo, hi) = if lo <= hi { (lo, hi) } else { (hi, lo) };
        lo <= v && v <= hi
    };
    within(pt.x, a.x, b.x) && within(pt.y, a.y, b.y)
}

#[cfg(test)]
mod tests {
    use super::*;
    use num_rational::Ratio;

    fn square<T: Scalar>(s: T) -> Vec<Point2<T>> {
        let z = T::zero();
        vec![
            Point2::new(z, z),
            Point2::new(s, z),
            Point2::new(s, s),
            Point2::new(z, s),
        ]
    }

    #[test]
    fn square_membership_over_scalars() {
        assert!(point_in_polygon(Point2::new(1i64, 1), &square(4i64)));
        assert!(!point_in_polygon(Point2::new(5i64, 1), &square(4i64)));
        assert!(point_in_polygon(Point2::new(0.5f64, 3.9), &square(4.0f64)));
        assert!(point_in_polygon(Point2::new(0.5f32, 3.9), &square(4.0f32)));
        let r = |n, d| Ratio::new(n, d);
        assert!(point_in_polygon(Point2::new(r(1, 3), r(7, 2)), &square(r(4, 1))));
        assert!(!point_in_polygon(Point2::new(r(-1, 3), r(7, 2)), &square(r(4, 1))));
    }

    #[test]
    fn ray_through_vertex_counts_once() {
        // diamond whose left and right corners sit on the ray
        let diamond = [(0i64, -2), (2, 0), (0, 2), (-2, 0)].map(|(x, y)| Point2::new(x, y));
        assert!(point_in_polygon(Point2::new(0, 0), &diamond));
        assert!(point_in_polygon(Point2::new(-1, 0), &diamond));
        assert!(!point_in_polygon(Point2::new(-3, 0), &diamond));
        assert!(!point_in_polygon(Point2::new(3, 0), &diamond));
    }

    #[test]
    fn area_sign_follows_orientation() {
        let sq = square(2i64);
        assert_eq!(signed_area2(&sq), 8);
        let rev: Vec<_> = sq.iter().rev().copied().collect();
        assert_eq!(signed_area2(&rev), -8);
    }

    #[test]
    fn lattice_and_cartesian_embeddings_agree() {
        let s3 = 3f64.sqrt();
        for p in -3..=3 {
            for q in -3..=3 {
                let c = HexCoord::new(p, q);
                let l = lattice_point(c);
                let f = hex_center(c, 1.0f64);
                assert!((l.x as f64 / 2.0 - f.x).abs() < 1e-12);
                assert!((l.y as f64 * s3 / 2.0 - f.y).abs() < 1e-12);
            }
        }
        // neighbors sit at distance sqrt(3) for unit side length
        let o = hex_center(HexCoord::ORIGIN, 1.0f64);
        for n in HexCoord::ORIGIN.neighbors() {
            let c = hex_center(n, 1.0f64);
            assert!(((c.x - o.x).hypot(c.y - o.y) - s3).abs() < 1e-12);
        }
    }

    #[test]
    fn on_segment() {
        let a = Point2::new(0i64, 0);
        let b = Point2::new(4, 2);
        assert!(point_on_segment(Point2::new(2, 1), a, b));
        assert!(!point_on_segment(Point2::new(6, 3), a, b));
        assert!(!point_on_segment(Point2::new(2, 2), a, b));
    }

    mod props {
        use super::*;
        use proptest::prelude::*;

        proptest! {
            /// Integer, rational and float ray casting agree away from the boundary.
            #[test]
            fn scalar_types_agree(
                pts in proptest::collection::vec((-20i64..20, -20i64..20), 3..9),
                qx in -25i64..25,
                qy in -25i64..25,
            ) {
                let poly: Vec<Point2<i64>> = pts.iter().map(|&(x, y)| Point2::new(x, y)).collect();
                let q = Point2::new(qx, qy);
                let n = poly.len();
                prop_assume!((0..n).all(|i| !point_on_segment(q, poly[i], poly[(i + 1) % n])));
                let exact = point_in_polygon(q, &poly);
                let rat: Vec<_> = poly.iter().map(|p| p.map(Ratio::from_integer)).collect();
                prop_assert_eq!(exact, point_in_polygon(q.map(Ratio::from_integer), &rat));
                let fl: Vec<_> = poly.iter().map(|p| Point2::new(p.x as f64, p.y as f64)).collect();
                prop_assert_eq!(exact, point_in_polygon(Point2::new(qx as f64, qy as f64), &fl));
            }
        }
    }
}
