//! Floating-point primitives shared by every module.

use std::ops::{Add, AddAssign, Div, Index, Mul, Neg, Sub};

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// A point (or displacement) in scene length units.
#[derive(Debug, Clone, Copy, PartialEq, Default, Serialize, Deserialize)]
pub struct Point3 {
    pub x: f64,
    pub y: f64,
    pub z: f64,
}

impl Point3 {
    pub const ORIGIN: Point3 = Point3 { x: 0.0, y: 0.0, z: 0.0 };

    #[inline]
    pub const fn new(x: f64, y: f64, z: f64) -> Self {
        Point3 { x, y, z }
    }

    #[inline]
    pub fn from_array(a: [f64; 3]) -> Self {
        Point3::new(a[0], a[1], a[2])
    }

    #[inline]
    pub fn to_array(self) -> [f64; 3] {
        [self.x, self.y, self.z]
    }

    #[inline]
    pub fn is_finite(self) -> bool {
        self.x.is_finite() && self.y.is_finite() && self.z.is_finite()
    }

    /// Returns an error if any coordinate is NaN or infinite.
    pub fn check_finite(self) -> Result<Self> {
        if self.is_finite() {
            Ok(self)
        } else {
            Err(Error::InvalidInput(format!("non-finite coordinate in {self:?}")))
        }
    }

    #[inline]
    pub fn dot(self, o: Point3) -> f64 {
        self.x * o.x + self.y * o.y + self.z * o.z
    }

    #[inline]
    pub fn cross(self, o: Point3) -> Point3 {
        Point3::new(
            self.y * o.z - self.z * o.y,
            self.z * o.x - self.x * o.z,
            self.x * o.y - self.y * o.x,
        )
    }

    #[inline]
    pub fn norm_squared(self) -> f64 {
        self.dot(self)
    }

    #[inline]
    pub fn norm(self) -> f64 {
        self.norm_squared().sqrt()
    }

    #[inline]
    pub fn distance(self, o: Point3) -> f64 {
        (self - o).norm()
    }

    /// Unit vector in the same direction; zero vectors are returned unchanged.
    pub fn normalized(self) -> Point3 {
        let n = self.norm();
        if n > 0.0 {
            self / n
        } else {
            self
        }
    }

    #[inline]
    pub fn min(self, o: Point3) -> Point3 {
        Point3::new(self.x.min(o.x), self.y.min(o.y), self.z.min(o.z))
    }

    #[inline]
    pub fn max(self, o: Point3) -> Point3 {
        Point3::new(self.x.max(o.x), self.y.max(o.y), self.z.max(o.z))
    }

    #[inline]
    pub fn lerp(self, o: Point3, t: f64) -> Point3 {
        self + (o - self) * t
    }

    /// Total order on coordinates (x, then y, then z).
    pub fn lex_cmp(&self, o: &Point3) -> std::cmp::Ordering {
        self.x
            .total_cmp(&o.x)
            .then(self.y.total_cmp(&o.y))
            .then(self.z.total_cmp(&o.z))
    }

    /// Bit pattern usable as a hash key for exact coordinate welding.
    pub fn bits(self) -> [u64; 3] {
        // -0.0 and 0.0 weld together.
        let b = |v: f64| if v == 0.0 { 0 } else { v.to_bits() };
        [b(self.x), b(self.y), b(self.z)]
    }
}

impl Index<usize> for Point3 {
    type Output = f64;
    fn index(&self, i: usize) -> &f64 {
        match i {
            0 => &self.x,
            1 => &self.y,
            2 => &self.z,
            _ => panic!("axis {i} out of range"),
        }
    }
}

impl Add for Point3 {
    type Output = Point3;
    #[inline]
    fn add(self, o: Point3) -> Point3 {
        Point3::new(self.x + o.x, self.y + o.y, self.z + o.z)
    }
}

impl AddAssign for Point3 {
    #[inline]
    fn add_assign(&mut self, o: Point3) {
        *self = *self + o;
    }
}

impl Sub for Point3 {
    type Output = Point3;
    #[inline]
    fn sub(self, o: Point3) -> Point3 {
        Point3::new(self.x - o.x, self.y - o.y, self.z - o.z)
    }
}

impl Mul<f64> for Point3 {
    type Output = Point3;
    #[inline]
    fn mul(self, s: f64) -> Point3 {
        Point3::new(self.x * s, self.y * s, self.z * s)
    }
}

impl Div<f64> for Point3 {
    type Output = Point3;
    #[inline]
    fn div(self, s: f64) -> Point3 {
        Point3::new(self.x / s, self.y / s, self.z / s)
    }
}

impl Neg for Point3 {
    type Output = Point3;
    #[inline]
    fn neg(self) -> Point3 {
        Point3::new(-self.x, -self.y, -self.z)
    }
}

impl From<[f64; 3]> for Point3 {
    fn from(a: [f64; 3]) -> Self {
        Point3::from_array(a)
    }
}

/// A line entity between two distinct points.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Segment3 {
    pub a: Point3,
    pub b: Point3,
}

impl Segment3 {
    pub fn new(a: Point3, b: Point3) -> Self {
        Segment3 { a, b }
    }

    /// Checks finiteness and that the endpoints are farther apart than `tol.eps`.
    pub fn validated(a: Point3, b: Point3, tol: &Tolerance) -> Result<Self> {
        a.check_finite()?;
        b.check_finite()?;
        if a.distance(b) <= tol.eps {
            return Err(Error::InvalidInput(format!("degenerate segment {a:?}-{b:?}")));
        }
        Ok(Segment3 { a, b })
    }

    pub fn length(&self) -> f64 {
        self.a.distance(self.b)
    }

    /// Closest point on the segment to `p`.
    pub fn closest_point(&self, p: Point3) -> Point3 {
        let d = self.b - self.a;
        let len2 = d.norm_squared();
        if len2 == 0.0 {
            return self.a;
        }
        let t = ((p - self.a).dot(d) / len2).clamp(0.0, 1.0);
        self.a + d * t
    }

    pub fn distance_to(&self, p: Point3) -> f64 {
        self.closest_point(p).distance(p)
    }
}

/// A face entity: a non-degenerate triangle.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Triangle3 {
    pub p: Point3,
    pub q: Point3,
    pub r: Point3,
}

impl Triangle3 {
    pub fn new(p: Point3, q: Point3, r: Point3) -> Self {
        Triangle3 { p, q, r }
    }

    /// Checks finiteness and `area > eps²`.
    pub fn validated(p: Point3, q: Point3, r: Point3, tol: &Tolerance) -> Result<Self> {
        for v in [p, q, r] {
            v.check_finite()?;
        }
        let t = Triangle3 { p, q, r };
        if t.area() <= tol.eps * tol.eps {
            return Err(Error::InvalidInput(format!("degenerate triangle {t:?}")));
        }
        Ok(t)
    }

    pub fn vertices(&self) -> [Point3; 3] {
        [self.p, self.q, self.r]
    }

    /// Unnormalized normal (twice the vector area).
    pub fn normal(&self) -> Point3 {
        (self.q - self.p).cross(self.r - self.p)
    }

    pub fn unit_normal(&self) -> Point3 {
        self.normal().normalized()
    }

    pub fn area(&self) -> f64 {
        0.5 * self.normal().norm()
    }

    pub fn centroid(&self) -> Point3 {
        (self.p + self.q + self.r) / 3.0
    }

    pub fn aabb(&self) -> Aabb {
        Aabb::from_points(&[self.p, self.q, self.r])
    }

    /// Closest point on the closed triangle to `x` (Ericson's region method).
    pub fn closest_point(&self, x: Point3) -> Point3 {
        let (a, b, c) = (self.p, self.q, self.r);
        let ab = b - a;
        let ac = c - a;
        let ap = x - a;
        let d1 = ab.dot(ap);
        let d2 = ac.dot(ap);
        if d1 <= 0.0 && d2 <= 0.0 {
            return a;
        }
        let bp = x - b;
        let d3 = ab.dot(bp);
        let d4 = ac.dot(bp);
        if d3 >= 0.0 && d4 <= d3 {
            return b;
        }
        let vc = d1 * d4 - d3 * d2;
        if vc <= 0.0 && d1 >= 0.0 && d3 <= 0.0 {
            return a + ab * (d1 / (d1 - d3));
        }
        let cp = x - c;
        let d5 = ab.dot(cp);
        let d6 = ac.dot(cp);
        if d6 >= 0.0 && d5 <= d6 {
            return c;
        }
        let vb = d5 * d2 - d1 * d6;
        if vb <= 0.0 && d2 >= 0.0 && d6 <= 0.0 {
            return a + ac * (d2 / (d2 - d6));
        }
        let va = d3 * d6 - d5 * d4;
        if va <= 0.0 && (d4 - d3) >= 0.0 && (d5 - d6) >= 0.0 {
            return b + (c - b) * ((d4 - d3) / ((d4 - d3) + (d5 - d6)));
        }
        let denom = 1.0 / (va + vb + vc);
        a + ab * (vb * denom) + ac * (vc * denom)
    }

    pub fn distance_to(&self, x: Point3) -> f64 {
        self.closest_point(x).distance(x)
    }
}

/// Axis-aligned bounding box. An empty box has `min > max`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Aabb {
    pub min: Point3,
    pub max: Point3,
}

impl Aabb {
    pub const EMPTY: Aabb = Aabb {
        min: Point3::new(f64::INFINITY, f64::INFINITY, f64::INFINITY),
        max: Point3::new(f64::NEG_INFINITY, f64::NEG_INFINITY, f64::NEG_INFINITY),
    };

    pub fn from_points(pts: &[Point3]) -> Aabb {
        pts.iter().fold(Aabb::EMPTY, |b, &p| b.including(p))
    }

    pub fn is_empty(&self) -> bool {
        self.min.x > self.max.x
    }

    #[inline]
    pub fn including(self, p: Point3) -> Aabb {
        Aabb {
            min: self.min.min(p),
            max: self.max.max(p),
        }
    }

    #[inline]
    pub fn union(self, o: Aabb) -> Aabb {
        Aabb {
            min: self.min.min(o.min),
            max: self.max.max(o.max),
        }
    }

    /// Closed-box overlap test (touching boxes overlap).
    #[inline]
    pub fn overlaps(&self, o: &Aabb) -> bool {
        self.min.x <= o.max.x
            && o.min.x <= self.max.x
            && self.min.y <= o.max.y
            && o.min.y <= self.max.y
            && self.min.z <= o.max.z
            && o.min.z <= self.max.z
    }

    pub fn contains_box(&self, o: &Aabb) -> bool {
        self.min.x <= o.min.x
            && self.min.y <= o.min.y
            && self.min.z <= o.min.z
            && o.max.x <= self.max.x
            && o.max.y <= self.max.y
            && o.max.z <= self.max.z
    }

    pub fn contains_point(&self, p: Point3) -> bool {
        self.min.x <= p.x
            && p.x <= self.max.x
            && self.min.y <= p.y
            && p.y <= self.max.y
            && self.min.z <= p.z
            && p.z <= self.max.z
    }

    pub fn inflated(&self, d: f64) -> Aabb {
        let v = Point3::new(d, d, d);
        Aabb {
            min: self.min - v,
            max: self.max + v,
        }
    }

    pub fn extent(&self) -> Point3 {
        self.max - self.min
    }

    pub fn center(&self) -> Point3 {
        (self.min + self.max) * 0.5
    }

    pub fn diagonal(&self) -> f64 {
        if self.is_empty() {
            0.0
        } else {
            self.extent().norm()
        }
    }

    pub fn longest_axis(&self) -> usize {
        let e = self.extent();
        if e.x >= e.y && e.x >= e.z {
            0
        } else if e.y >= e.z {
            1
        } else {
            2
        }
    }

    /// Slab test for the closed segment `a`-`b`.
    pub fn intersects_segment(&self, a: Point3, b: Point3) -> bool {
        let d = b - a;
        let (mut t0, mut t1) = (0.0f64, 1.0f64);
        for axis in 0..3 {
            let (lo, hi, o, dd) = (self.min[axis], self.max[axis], a[axis], d[axis]);
            if dd == 0.0 {
                if o < lo || o > hi {
                    return false;
                }
            } else {
                let mut ta = (lo - o) / dd;
                let mut tb = (hi - o) / dd;
                if ta > tb {
                    std::mem::swap(&mut ta, &mut tb);
                }
                t0 = t0.max(ta);
                t1 = t1.min(tb);
                if t0 > t1 {
                    return false;
                }
            }
        }
        true
    }
}

/// Global geometric tolerance policy.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Tolerance {
    /// Absolute length tolerance.
    pub eps: f64,
    /// Angular tolerance in radians.
    pub angular_eps: f64,
}

impl Default for Tolerance {
    fn default() -> Self {
        Tolerance {
            eps: 1e-9,
            angular_eps: 1e-9,
        }
    }
}

impl Tolerance {
    pub const RELATIVE_EPS: f64 = 1e-9;

    pub fn new(eps: f64, angular_eps: f64) -> Result<Self> {
        if !(eps > 0.0 && eps.is_finite()) || !(angular_eps > 0.0 && angular_eps.is_finite()) {
            return Err(Error::Parameter(format!(
                "tolerances must be positive and finite (eps={eps}, angular_eps={angular_eps})"
            )));
        }
        Ok(Tolerance { eps, angular_eps })
    }

    /// `eps = 1e-9 × diameter` for a scene of the given diameter.
    pub fn for_diameter(diameter: f64) -> Self {
        let d = if diameter > 0.0 && diameter.is_finite() {
            diameter
        } else {
            1.0
        };
        Tolerance {
            eps: Self::RELATIVE_EPS * d,
            ..Tolerance::default()
        }
    }

    /// Tolerance scaled to the extent of a point set.
    pub fn for_points(pts: &[Point3]) -> Self {
        Self::for_diameter(Aabb::from_points(pts).diagonal())
    }
}
