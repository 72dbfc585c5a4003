//! Newton polygons of integer polynomials at a prime `p`.
//!
//! For `f = sum c_i x^i` with `c_0 != 0`, plot the points
//! `(i, v_p(c_i))` for nonzero coefficients and take the lower convex
//! hull from `i = 0` to `i = deg f`.  A hull segment of horizontal
//! length `L` and slope `-s` accounts for exactly `L` roots of `p`-adic
//! valuation `s` (counted with multiplicity).

use num_rational::Rational64;

use crate::error::{Error, Result};

use super::intpoly::IntPoly;
use super::util::valuation;

/// One segment of the lower hull, in plot coordinates: `x` is the
/// coefficient index, `y` its `p`-adic valuation.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct Segment {
    pub x0: usize,
    pub y0: i64,
    pub x1: usize,
    pub y1: i64,
}

impl Segment {
    /// Common valuation of the roots this segment accounts for.
    pub fn root_valuation(&self) -> Rational64 {
        Rational64::new(self.y0 - self.y1, (self.x1 - self.x0) as i64)
    }

    /// Number of roots (with multiplicity) on this segment.
    pub fn length(&self) -> usize {
        self.x1 - self.x0
    }
}

/// Lower-hull segments of the Newton polygon of `f` at `p`, ordered by
/// increasing coefficient index (i.e. decreasing root valuation).
///
/// Errors if `f` is zero, constant, or divisible by `x` (a zero root has
/// infinite valuation and no polygon slope).
pub fn polygon_segments(f: &IntPoly, p: u64) -> Result<Vec<Segment>> {
    let d = match f.degree() {
        Some(d) if d >= 1 => d,
        _ => {
            return Err(Error::invalid(
                "Newton polygon requires a nonconstant polynomial",
            ))
        }
    };
    if f.coeff(0) == num_bigint::BigInt::from(0) {
        return Err(Error::invalid(
            "Newton polygon requires a nonzero constant term",
        ));
    }
    let mut points: Vec<(usize, i64)> = Vec::new();
    for i in 0..=d {
        let c = f.coeff(i);
        if c != num_bigint::BigInt::from(0) {
            points.push((i, valuation(&c, p) as i64));
        }
    }
    // Monotone-chain lower hull (points already sorted by x, all x distinct).
    let mut hull: Vec<(usize, i64)> = Vec::new();
    for &pt in &points {
        while hull.len() >= 2 {
            let a = hull[hull.len() - 2];
            let b = hull[hull.len() - 1];
            // Drop b if it is on or above the line a -> pt.
            let lhs = (b.1 - a.1) as i128 * (pt.0 - a.0) as i128;
            let rhs = (pt.1 - a.1) as i128 * (b.0 - a.0) as i128;
            if lhs >= rhs {
                hull.pop();
            } else {
                break;
            }
        }
        hull.push(pt);
    }
    Ok(hull
        .windows(2)
        .map(|w| Segment {
            x0: w[0].0,
            y0: w[0].1,
            x1: w[1].0,
            y1: w[1].1,
        })
        .collect())
}

/// Root valuations of `f` at `p` as `(valuation, multiplicity)` pairs in
/// increasing valuation order.
pub fn newton_polygon(f: &IntPoly, p: u64) -> Result<Vec<(Rational64, usize)>> {
    let segs = polygon_segments(f, p)?;
    let mut out: Vec<(Rational64, usize)> = segs
        .iter()
        .map(|s| (s.root_valuation(), s.length()))
        .collect();
    out.reverse(); // segments come in decreasing valuation order
    Ok(out)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn p(coeffs: &[i64]) -> IntPoly {
        IntPoly::from_i64(coeffs)
    }

    fn rat(n: i64, d: i64) -> Rational64 {
        Rational64::new(n, d)
    }

    #[test]
    fn simple_polygons() {
        // x^2 + 6x + 16 at 2: valuations 1 and 3.
        let v = newton_polygon(&p(&[16, 6, 1]), 2).unwrap();
        assert_eq!(v, vec![(rat(1, 1), 1), (rat(3, 1), 1)]);
        // x^4 + 4x^3 + 10x^2 + 16x + 16 at 2: 1/2 (x2), 3/2 (x2).
        let v = newton_polygon(&p(&[16, 16, 10, 4, 1]), 2).unwrap();
        assert_eq!(v, vec![(rat(1, 2), 2), (rat(3, 2), 2)]);
    }

    #[test]
    fn unit_roots_have_valuation_zero() {
        // x^2 + 3x + 1 at 2: all roots are units.
        let v = newton_polygon(&p(&[1, 3, 1]), 2).unwrap();
        assert_eq!(v, vec![(rat(0, 1), 2)]);
    }

    #[test]
    fn interior_points_above_hull_are_ignored() {
        // x^2 + 8x + 2 at 2: hull from (0,1) to (2,0); the point (1,3)
        // lies above it.  Single segment, slope 1/2.
        let v = newton_polygon(&p(&[2, 8, 1]), 2).unwrap();
        assert_eq!(v, vec![(rat(1, 2), 2)]);
    }

    #[test]
    fn collinear_points_merge() {
        // (x+2)^2 = x^2 + 4x + 4 at 2: points (0,2),(1,2),(2,0)? No:
        // v(4)=2, v(4)=2, v(1)=0. Hull (0,2)-(2,0) passes below (1,2).
        let v = newton_polygon(&p(&[4, 4, 1]), 2).unwrap();
        assert_eq!(v, vec![(rat(1, 1), 2)]);
        // x^2 + 2x + 4 at 2: points (0,2),(1,1),(2,0) collinear: one
        // segment of length 2, valuation 1.
        let segs = polygon_segments(&p(&[4, 2, 1]), 2).unwrap();
        assert_eq!(segs.len(), 1);
        assert_eq!(segs[0], Segment { x0: 0, y0: 2, x1: 2, y1: 0 });
    }

    #[test]
    fn frobenius_polynomial_example() {
        // x^4 + 41x^3 + 672x^2 + 5248x + 16384 at 2 (q = 128):
        // valuations 0, 7/2 (x2), 7.
        let v = newton_polygon(&p(&[16384, 5248, 672, 41, 1]), 2).unwrap();
        assert_eq!(v, vec![(rat(0, 1), 1), (rat(7, 2), 2), (rat(7, 1), 1)]);
    }

    #[test]
    fn rejects_zero_root_and_constants() {
        assert!(polygon_segments(&p(&[0, 1, 1]), 2).is_err());
        assert!(polygon_segments(&p(&[3]), 2).is_err());
        assert!(polygon_segments(&IntPoly::zero(), 2).is_err());
    }

    #[test]
    fn total_length_is_degree() {
        let f = p(&[48, 20, 7, 3, 1]);
        for q in [2u64, 3, 5] {
            let v = newton_polygon(&f, q).unwrap();
            let total: usize = v.iter().map(|&(_, l)| l).sum();
            assert_eq!(total, 4);
        }
    }
}
