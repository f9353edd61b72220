//! Robust orientation predicates on floating-point input.
//!
//! Signs are exact: the adaptive evaluation from the `robust` crate never
//! misreports a sign, so `0` means the points really are coplanar/collinear.

use robust::{Coord, Coord3D};

use crate::error::Result;
use crate::geom::Point3;

/// Sign of an orientation determinant.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum Sign {
    Negative = -1,
    Zero = 0,
    Positive = 1,
}

impl Sign {
    #[inline]
    pub fn of(v: f64) -> Sign {
        if v > 0.0 {
            Sign::Positive
        } else if v < 0.0 {
            Sign::Negative
        } else {
            Sign::Zero
        }
    }

    #[inline]
    pub fn as_i8(self) -> i8 {
        self as i8
    }

    #[inline]
    pub fn flip(self) -> Sign {
        match self {
            Sign::Negative => Sign::Positive,
            Sign::Zero => Sign::Zero,
            Sign::Positive => Sign::Negative,
        }
    }
}

#[inline]
fn c3(p: Point3) -> Coord3D<f64> {
    Coord3D { x: p.x, y: p.y, z: p.z }
}

/// Sign of `det(q − p, r − p, s − p)`, evaluated exactly.
///
/// Rejects non-finite input.
pub fn orient3d(p: Point3, q: Point3, r: Point3, s: Point3) -> Result<Sign> {
    for v in [p, q, r, s] {
        v.check_finite()?;
    }
    Ok(orient3d_unchecked(p, q, r, s))
}

/// [`orient3d`] without the finiteness check, for internal hot loops.
#[inline]
pub fn orient3d_unchecked(p: Point3, q: Point3, r: Point3, s: Point3) -> Sign {
    // robust's convention is det(p − s, q − s, r − s), the negation of ours.
    Sign::of(-robust::orient3d(c3(p), c3(q), c3(r), c3(s)))
}

/// Approximate (but sign-exact) value of the orientation determinant.
#[inline]
pub fn orient3d_value(p: Point3, q: Point3, r: Point3, s: Point3) -> f64 {
    -robust::orient3d(c3(p), c3(q), c3(r), c3(s))
}

/// Sign of `cross(b − a, c − a)` in the plane.
#[inline]
pub fn orient2d(a: [f64; 2], b: [f64; 2], c: [f64; 2]) -> Sign {
    let k = |p: [f64; 2]| Coord { x: p[0], y: p[1] };
    Sign::of(robust::orient2d(k(a), k(b), k(c)))
}

/// Positive when `d` is strictly inside the circle through counter-clockwise `a, b, c`.
#[inline]
pub fn incircle(a: [f64; 2], b: [f64; 2], c: [f64; 2], d: [f64; 2]) -> Sign {
    let k = |p: [f64; 2]| Coord { x: p[0], y: p[1] };
    Sign::of(robust::incircle(k(a), k(b), k(c), k(d)))
}

/// True when three points are collinear (all coordinate-plane projections degenerate).
pub fn collinear3(a: Point3, b: Point3, c: Point3) -> bool {
    let proj = |p: Point3, i: usize, j: usize| [p[i], p[j]];
    [(0, 1), (1, 2), (0, 2)]
        .iter()
        .all(|&(i, j)| orient2d(proj(a, i, j), proj(b, i, j), proj(c, i, j)) == Sign::Zero)
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    const O: Point3 = Point3::new(0.0, 0.0, 0.0);
    const X: Point3 = Point3::new(1.0, 0.0, 0.0);
    const Y: Point3 = Point3::new(0.0, 1.0, 0.0);
    const Z: Point3 = Point3::new(0.0, 0.0, 1.0);

    #[test]
    fn canonical_tetrahedron_is_positive() {
        assert_eq!(orient3d(O, X, Y, Z).unwrap(), Sign::Positive);
        assert_eq!(orient3d(O, X, Y, -Z).unwrap(), Sign::Negative);
        assert_eq!(orient3d(O, X, Y, Point3::new(3.0, -7.0, 0.0)).unwrap(), Sign::Zero);
    }

    #[test]
    fn non_finite_rejected() {
        assert!(orient3d(O, X, Y, Point3::new(f64::NAN, 0.0, 0.0)).is_err());
        assert!(orient3d(O, X, Point3::new(0.0, f64::INFINITY, 0.0), Z).is_err());
    }

    #[test]
    fn near_degenerate_is_exact() {
        // Points that plain floating evaluation misclassifies.
        let e = f64::EPSILON;
        let p = Point3::new(0.5, 0.5, 0.0);
        let q = Point3::new(12.0, 12.0, 0.0);
        let r = Point3::new(24.0, 24.0 + 2.0 * e * 24.0, 0.0);
        let s = Point3::new(0.0, 0.0, 1.0);
        assert_eq!(orient3d_unchecked(p, q, r, s), Sign::Positive);
        assert!(collinear3(O, X, X * 3.0));
        assert!(collinear3(X, Y, Point3::new(-1.0, 2.0, 0.0)));
        assert!(!collinear3(O, X, Y));
    }

    fn pt() -> impl Strategy<Value = Point3> {
        (-10.0..10.0f64, -10.0..10.0f64, -10.0..10.0f64).prop_map(|(x, y, z)| Point3::new(x, y, z))
    }

    proptest! {
        #[test]
        fn swapping_arguments_flips_sign(p in pt(), q in pt(), r in pt(), s in pt()) {
            let base = orient3d_unchecked(p, q, r, s);
            prop_assert_eq!(orient3d_unchecked(q, p, r, s), base.flip());
            prop_assert_eq!(orient3d_unchecked(p, r, q, s), base.flip());
            prop_assert_eq!(orient3d_unchecked(p, q, s, r), base.flip());
            prop_assert_eq!(orient3d_unchecked(s, q, r, p), base.flip());
        }
    }
}
