//! Exact rational geometry.
//!
//! Constructed points (edge/plane crossings and the like) are kept as exact
//! rationals so later predicates on them stay exact. Points that happen to be
//! representable as `f64` take the adaptive floating-point fast path.

use std::hash::{Hash, Hasher};

use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::{Signed, ToPrimitive, Zero};

use crate::geom::Point3;
use crate::predicates::{self, Sign};

pub type Rational = BigRational;

/// A point with exact rational coordinates.
#[derive(Clone, Debug)]
pub struct ExactPoint {
    q: [Rational; 3],
    /// The same point as `f64`, present when the conversion is lossless.
    f: Option<Point3>,
}

impl PartialEq for ExactPoint {
    fn eq(&self, o: &Self) -> bool {
        match (self.f, o.f) {
            (Some(a), Some(b)) => a.bits() == b.bits(),
            (Some(_), None) | (None, Some(_)) => false,
            (None, None) => self.q == o.q,
        }
    }
}

impl Eq for ExactPoint {}

impl Hash for ExactPoint {
    fn hash<H: Hasher>(&self, state: &mut H) {
        match self.f {
            Some(p) => p.bits().hash(state),
            // Rationals that are not f64-exact never compare equal to floats,
            // so hashing them by value is consistent with `eq`.
            None => self.q.hash(state),
        }
    }
}

fn rat(v: f64) -> Rational {
    Rational::from_float(v).expect("finite coordinate")
}

fn exact_f64(r: &Rational) -> Option<f64> {
    let v = r.to_f64()?;
    if v.is_finite() && Rational::from_float(v).as_ref() == Some(r) {
        Some(if v == 0.0 { 0.0 } else { v })
    } else {
        None
    }
}

impl ExactPoint {
    pub fn from_point(p: Point3) -> Self {
        let p = Point3::new(p.x + 0.0, p.y + 0.0, p.z + 0.0);
        ExactPoint {
            q: [rat(p.x), rat(p.y), rat(p.z)],
            f: Some(p),
        }
    }

    pub fn from_rationals(q: [Rational; 3]) -> Self {
        let f = match (exact_f64(&q[0]), exact_f64(&q[1]), exact_f64(&q[2])) {
            (Some(x), Some(y), Some(z)) => Some(Point3::new(x, y, z)),
            _ => None,
        };
        ExactPoint { q, f }
    }

    #[inline]
    pub fn coords(&self) -> &[Rational; 3] {
        &self.q
    }

    #[inline]
    pub fn as_float(&self) -> Option<Point3> {
        self.f
    }

    /// Nearest `f64` point.
    pub fn approx(&self) -> Point3 {
        self.f.unwrap_or_else(|| {
            Point3::new(
                self.q[0].to_f64().unwrap_or(f64::NAN),
                self.q[1].to_f64().unwrap_or(f64::NAN),
                self.q[2].to_f64().unwrap_or(f64::NAN),
            )
        })
    }

    pub fn sub(&self, o: &ExactPoint) -> [Rational; 3] {
        [&self.q[0] - &o.q[0], &self.q[1] - &o.q[1], &self.q[2] - &o.q[2]]
    }

    /// `self + (o − self)·t`.
    pub fn lerp(&self, o: &ExactPoint, t: &Rational) -> ExactPoint {
        let d = o.sub(self);
        ExactPoint::from_rationals([&self.q[0] + &d[0] * t, &self.q[1] + &d[1] * t, &self.q[2] + &d[2] * t])
    }

    pub fn centroid(pts: &[&ExactPoint]) -> ExactPoint {
        let n = Rational::from_integer(BigInt::from(pts.len()));
        let mut acc = [Rational::zero(), Rational::zero(), Rational::zero()];
        for p in pts {
            for (a, c) in acc.iter_mut().zip(p.q.iter()) {
                *a += c;
            }
        }
        ExactPoint::from_rationals(acc.map(|a| a / &n))
    }

    /// Lexicographic comparison of coordinates.
    pub fn lex_cmp(&self, o: &ExactPoint) -> std::cmp::Ordering {
        if let (Some(a), Some(b)) = (self.f, o.f) {
            return a.lex_cmp(&b);
        }
        self.q[0]
            .cmp(&o.q[0])
            .then_with(|| self.q[1].cmp(&o.q[1]))
            .then_with(|| self.q[2].cmp(&o.q[2]))
    }
}

impl From<Point3> for ExactPoint {
    fn from(p: Point3) -> Self {
        ExactPoint::from_point(p)
    }
}

fn det3(a: &[Rational; 3], b: &[Rational; 3], c: &[Rational; 3]) -> Rational {
    &a[0] * (&b[1] * &c[2] - &b[2] * &c[1]) - &a[1] * (&b[0] * &c[2] - &b[2] * &c[0])
        + &a[2] * (&b[0] * &c[1] - &b[1] * &c[0])
}

fn rsign(v: &Rational) -> Sign {
    if v.is_positive() {
        Sign::Positive
    } else if v.is_negative() {
        Sign::Negative
    } else {
        Sign::Zero
    }
}

/// Exact value of `det(q − p, r − p, s − p)`.
pub fn orient3d_value(p: &ExactPoint, q: &ExactPoint, r: &ExactPoint, s: &ExactPoint) -> Rational {
    det3(&q.sub(p), &r.sub(p), &s.sub(p))
}

/// Exact sign of `det(q − p, r − p, s − p)`.
pub fn orient3d(p: &ExactPoint, q: &ExactPoint, r: &ExactPoint, s: &ExactPoint) -> Sign {
    if let (Some(a), Some(b), Some(c), Some(d)) = (p.f, q.f, r.f, s.f) {
        return predicates::orient3d_unchecked(a, b, c, d);
    }
    rsign(&orient3d_value(p, q, r, s))
}

/// Coordinate plane used to project a planar configuration to 2D: the axis
/// dropped is `drop`, and the projection keeps orientation iff `!flipped`.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct Projection {
    pub drop: usize,
    pub flipped: bool,
}

impl Projection {
    #[inline]
    fn axes(self) -> (usize, usize) {
        match self.drop {
            0 => (1, 2),
            1 => (2, 0),
            _ => (0, 1),
        }
    }

    /// Projection onto the coordinate plane where the triangle has the largest
    /// shadow; orientation-preserving unless `flipped`.
    pub fn for_triangle(a: &ExactPoint, b: &ExactPoint, c: &ExactPoint) -> Projection {
        let n = exact_normal(a, b, c);
        let abs: Vec<Rational> = n.iter().map(|v| v.abs()).collect();
        let drop = if abs[0] >= abs[1] && abs[0] >= abs[2] {
            0
        } else if abs[1] >= abs[2] {
            1
        } else {
            2
        };
        Projection {
            drop,
            flipped: n[drop].is_negative(),
        }
    }

    pub fn coords<'a>(&self, p: &'a ExactPoint) -> (&'a Rational, &'a Rational) {
        let (i, j) = self.axes();
        (&p.q[i], &p.q[j])
    }

    fn fcoords(&self, p: Point3) -> [f64; 2] {
        let (i, j) = self.axes();
        [p[i], p[j]]
    }

    /// Exact orientation of the projected points, in the projection frame
    /// (not corrected for `flipped`).
    pub fn orient2d(&self, a: &ExactPoint, b: &ExactPoint, c: &ExactPoint) -> Sign {
        if let (Some(x), Some(y), Some(z)) = (a.f, b.f, c.f) {
            return predicates::orient2d(self.fcoords(x), self.fcoords(y), self.fcoords(z));
        }
        rsign(&self.orient2d_value(a, b, c))
    }

    pub fn orient2d_value(&self, a: &ExactPoint, b: &ExactPoint, c: &ExactPoint) -> Rational {
        let (ax, ay) = self.coords(a);
        let (bx, by) = self.coords(b);
        let (cx, cy) = self.coords(c);
        (bx - ax) * (cy - ay) - (by - ay) * (cx - ax)
    }

    /// Positive when `d` lies inside the circle through counter-clockwise `a, b, c`.
    pub fn incircle(&self, a: &ExactPoint, b: &ExactPoint, c: &ExactPoint, d: &ExactPoint) -> Sign {
        if let (Some(w), Some(x), Some(y), Some(z)) = (a.f, b.f, c.f, d.f) {
            return predicates::incircle(self.fcoords(w), self.fcoords(x), self.fcoords(y), self.fcoords(z));
        }
        let (dx, dy) = self.coords(d);
        let row = |p: &ExactPoint| {
            let (px, py) = self.coords(p);
            let x = px - dx;
            let y = py - dy;
            let w = &x * &x + &y * &y;
            [x, y, w]
        };
        rsign(&det3(&row(a), &row(b), &row(c)))
    }
}

/// Exact (unnormalized) normal of the triangle `a, b, c`.
pub fn exact_normal(a: &ExactPoint, b: &ExactPoint, c: &ExactPoint) -> [Rational; 3] {
    let u = b.sub(a);
    let v = c.sub(a);
    [
        &u[1] * &v[2] - &u[2] * &v[1],
        &u[2] * &v[0] - &u[0] * &v[2],
        &u[0] * &v[1] - &u[1] * &v[0],
    ]
}

/// Intersection of two closed convex sets, as computed exactly.
#[derive(Debug, Clone, PartialEq)]
pub enum Contact {
    Empty,
    Point(ExactPoint),
    Segment(ExactPoint, ExactPoint),
    /// Convex polygon, vertices in order, no repeated or collinear vertices.
    Polygon(Vec<ExactPoint>),
}

impl Contact {
    pub fn is_empty(&self) -> bool {
        matches!(self, Contact::Empty)
    }

    /// Every vertex of the contact set.
    pub fn points(&self) -> Vec<&ExactPoint> {
        match self {
            Contact::Empty => Vec::new(),
            Contact::Point(p) => vec![p],
            Contact::Segment(a, b) => vec![a, b],
            Contact::Polygon(v) => v.iter().collect(),
        }
    }
}

/// Reduces a (possibly degenerate) convex point sequence in a plane to its
/// canonical contact form.
fn normalize_polygon(mut pts: Vec<ExactPoint>, proj: Projection) -> Contact {
    pts.dedup();
    while pts.len() > 1 && pts.first() == pts.last() {
        pts.pop();
    }
    if pts.is_empty() {
        return Contact::Empty;
    }
    // Drop collinear (and doubled-back) vertices.
    let mut changed = true;
    while changed && pts.len() >= 3 {
        changed = false;
        let n = pts.len();
        for i in 0..n {
            let a = &pts[(i + n - 1) % n];
            let b = &pts[i];
            let c = &pts[(i + 1) % n];
            if proj.orient2d(a, b, c) == Sign::Zero {
                pts.remove(i);
                changed = true;
                break;
            }
        }
    }
    match pts.len() {
        0 => Contact::Empty,
        1 => Contact::Point(pts.pop().unwrap()),
        2 => {
            let b = pts.pop().unwrap();
            let a = pts.pop().unwrap();
            if a == b {
                Contact::Point(a)
            } else {
                Contact::Segment(a, b)
            }
        }
        _ => Contact::Polygon(pts),
    }
}

/// Clips the convex polygon `poly` by the closed half-plane to the left of
/// `e0 → e1` (in the projection frame, after applying `side`).
fn clip_halfplane(
    poly: &[ExactPoint],
    e0: &ExactPoint,
    e1: &ExactPoint,
    proj: Projection,
    side: Sign,
) -> Vec<ExactPoint> {
    let n = poly.len();
    if n == 0 {
        return Vec::new();
    }
    let signs: Vec<Sign> = poly
        .iter()
        .map(|p| {
            let s = proj.orient2d(e0, e1, p);
            if side == Sign::Negative {
                s.flip()
            } else {
                s
            }
        })
        .collect();
    let mut out = Vec::with_capacity(n + 1);
    for i in 0..n {
        let j = (i + 1) % n;
        let (p, q) = (&poly[i], &poly[j]);
        if signs[i] != Sign::Negative {
            out.push(p.clone());
        }
        if n > 1 && signs[i] != Sign::Zero && signs[j] != Sign::Zero && signs[i] != signs[j] {
            let dp = proj.orient2d_value(e0, e1, p);
            let dq = proj.orient2d_value(e0, e1, q);
            let t = &dp / (&dp - &dq);
            out.push(p.lerp(q, &t));
        }
    }
    out
}

/// Intersection of two coplanar closed triangles.
fn coplanar_triangles(t: [&ExactPoint; 3], s: [&ExactPoint; 3], proj: Projection) -> Contact {
    let mut poly: Vec<ExactPoint> = t.iter().map(|p| (*p).clone()).collect();
    let side = proj.orient2d(s[0], s[1], s[2]);
    for k in 0..3 {
        poly = clip_halfplane(&poly, s[k], s[(k + 1) % 3], proj, side);
        if poly.is_empty() {
            return Contact::Empty;
        }
    }
    normalize_polygon(poly, proj)
}

/// Points where the closed triangle `s` meets the plane with signed
/// distances `d` at its vertices (`d` as orientation signs against the plane).
fn triangle_plane_cut(s: [&ExactPoint; 3], plane: [&ExactPoint; 3], signs: [Sign; 3]) -> Vec<ExactPoint> {
    let mut out: Vec<ExactPoint> = Vec::with_capacity(2);
    let mut values: [Option<Rational>; 3] = [None, None, None];
    for i in 0..3 {
        if signs[i] == Sign::Zero {
            out.push(s[i].clone());
        }
    }
    for i in 0..3 {
        let j = (i + 1) % 3;
        if signs[i] != Sign::Zero && signs[j] != Sign::Zero && signs[i] != signs[j] {
            for k in [i, j] {
                if values[k].is_none() {
                    values[k] = Some(orient3d_value(plane[0], plane[1], plane[2], s[k]));
                }
            }
            let (vi, vj) = (values[i].as_ref().unwrap(), values[j].as_ref().unwrap());
            let t = vi / (vi - vj);
            out.push(s[i].lerp(s[j], &t));
        }
    }
    out.dedup();
    out
}

/// Index of the axis with the largest absolute component.
fn major_axis(d: &[Rational; 3]) -> usize {
    let a: Vec<Rational> = d.iter().map(|v| v.abs()).collect();
    if a[0] >= a[1] && a[0] >= a[2] {
        0
    } else if a[1] >= a[2] {
        1
    } else {
        2
    }
}

/// Intersection of two collinear point sets (each a point or a segment).
fn collinear_overlap(a: Vec<ExactPoint>, b: Vec<ExactPoint>) -> Contact {
    let dir = if a.len() >= 2 {
        Some(a[1].sub(&a[0]))
    } else if b.len() >= 2 {
        Some(b[1].sub(&b[0]))
    } else {
        None
    };
    let Some(dir) = dir else {
        return if a[0] == b[0] {
            Contact::Point(a[0].clone())
        } else {
            Contact::Empty
        };
    };
    let k = major_axis(&dir);
    let key = |p: &ExactPoint| p.q[k].clone();
    let span = |v: &[ExactPoint]| {
        let lo = v.iter().min_by(|x, y| key(x).cmp(&key(y))).unwrap().clone();
        let hi = v.iter().max_by(|x, y| key(x).cmp(&key(y))).unwrap().clone();
        (lo, hi)
    };
    let (alo, ahi) = span(&a);
    let (blo, bhi) = span(&b);
    let lo = if key(&alo) >= key(&blo) { alo } else { blo };
    let hi = if key(&ahi) <= key(&bhi) { ahi } else { bhi };
    match key(&lo).cmp(&key(&hi)) {
        std::cmp::Ordering::Greater => Contact::Empty,
        std::cmp::Ordering::Equal => Contact::Point(lo),
        std::cmp::Ordering::Less => Contact::Segment(lo, hi),
    }
}

/// Exact intersection of two closed, non-degenerate triangles.
pub fn triangle_triangle(t: [&ExactPoint; 3], s: [&ExactPoint; 3]) -> Contact {
    let ds = [
        orient3d(t[0], t[1], t[2], s[0]),
        orient3d(t[0], t[1], t[2], s[1]),
        orient3d(t[0], t[1], t[2], s[2]),
    ];
    if ds.iter().all(|&d| d == Sign::Positive) || ds.iter().all(|&d| d == Sign::Negative) {
        return Contact::Empty;
    }
    if ds.iter().all(|&d| d == Sign::Zero) {
        let proj = Projection::for_triangle(t[0], t[1], t[2]);
        return coplanar_triangles(t, s, proj);
    }
    let dt = [
        orient3d(s[0], s[1], s[2], t[0]),
        orient3d(s[0], s[1], s[2], t[1]),
        orient3d(s[0], s[1], s[2], t[2]),
    ];
    if dt.iter().all(|&d| d == Sign::Positive) || dt.iter().all(|&d| d == Sign::Negative) {
        return Contact::Empty;
    }
    let on_t = triangle_plane_cut(s, t, ds);
    let on_s = triangle_plane_cut(t, s, dt);
    if on_t.is_empty() || on_s.is_empty() {
        return Contact::Empty;
    }
    collinear_overlap(on_t, on_s)
}

/// Exact intersection of the closed segment `a`–`b` with the closed triangle `t`.
pub fn segment_triangle(a: &ExactPoint, b: &ExactPoint, t: [&ExactPoint; 3]) -> Contact {
    let da = orient3d(t[0], t[1], t[2], a);
    let db = orient3d(t[0], t[1], t[2], b);
    if da == db && da != Sign::Zero {
        return Contact::Empty;
    }
    if da == Sign::Zero && db == Sign::Zero {
        let proj = Projection::for_triangle(t[0], t[1], t[2]);
        let mut seg = vec![a.clone(), b.clone()];
        let side = proj.orient2d(t[0], t[1], t[2]);
        for k in 0..3 {
            seg = clip_segment(&seg, t[k], t[(k + 1) % 3], proj, side);
            if seg.is_empty() {
                return Contact::Empty;
            }
        }
        return match seg.len() {
            1 => Contact::Point(seg.pop().unwrap()),
            _ if seg[0] == seg[1] => Contact::Point(seg.pop().unwrap()),
            _ => {
                let y = seg.pop().unwrap();
                let x = seg.pop().unwrap();
                Contact::Segment(x, y)
            }
        };
    }
    let p = if da == Sign::Zero {
        a.clone()
    } else if db == Sign::Zero {
        b.clone()
    } else {
        let va = orient3d_value(t[0], t[1], t[2], a);
        let vb = orient3d_value(t[0], t[1], t[2], b);
        let s = &va / (&va - &vb);
        a.lerp(b, &s)
    };
    if point_in_triangle(&p, t) {
        Contact::Point(p)
    } else {
        Contact::Empty
    }
}

fn clip_segment(seg: &[ExactPoint], e0: &ExactPoint, e1: &ExactPoint, proj: Projection, side: Sign) -> Vec<ExactPoint> {
    let sg = |p: &ExactPoint| {
        let s = proj.orient2d(e0, e1, p);
        if side == Sign::Negative {
            s.flip()
        } else {
            s
        }
    };
    if seg.len() == 1 {
        return if sg(&seg[0]) != Sign::Negative {
            seg.to_vec()
        } else {
            Vec::new()
        };
    }
    let (p, q) = (&seg[0], &seg[1]);
    let (sp, sq) = (sg(p), sg(q));
    match (sp, sq) {
        (Sign::Negative, Sign::Negative) | (Sign::Negative, Sign::Zero) | (Sign::Zero, Sign::Negative) => {
            let mut v: Vec<ExactPoint> = Vec::new();
            if sp == Sign::Zero {
                v.push(p.clone());
            }
            if sq == Sign::Zero {
                v.push(q.clone());
            }
            v
        }
        (Sign::Negative, Sign::Positive) | (Sign::Positive, Sign::Negative) => {
            let dp = proj.orient2d_value(e0, e1, p);
            let dq = proj.orient2d_value(e0, e1, q);
            let x = p.lerp(q, &(&dp / (&dp - &dq)));
            if sp == Sign::Negative {
                vec![x, q.clone()]
            } else {
                vec![p.clone(), x]
            }
        }
        _ => seg.to_vec(),
    }
}

/// Whether `p` (assumed coplanar with `t`) lies in the closed triangle.
pub fn point_in_triangle(p: &ExactPoint, t: [&ExactPoint; 3]) -> bool {
    let proj = Projection::for_triangle(t[0], t[1], t[2]);
    let s = [
        proj.orient2d(t[0], t[1], p),
        proj.orient2d(t[1], t[2], p),
        proj.orient2d(t[2], t[0], p),
    ];
    !(s.contains(&Sign::Positive) && s.contains(&Sign::Negative))
}

/// Whether `p` lies on the closed triangle (coplanar and inside).
pub fn point_on_triangle(p: &ExactPoint, t: [&ExactPoint; 3]) -> bool {
    orient3d(t[0], t[1], t[2], p) == Sign::Zero && point_in_triangle(p, t)
}

/// Whether `p` lies strictly inside the open segment `a`–`b`.
pub fn point_in_open_segment(p: &ExactPoint, a: &ExactPoint, b: &ExactPoint) -> bool {
    if p == a || p == b {
        return false;
    }
    let d = b.sub(a);
    let e = p.sub(a);
    // Collinear iff the cross product vanishes.
    let zero = Rational::zero();
    let cross = [
        &d[1] * &e[2] - &d[2] * &e[1],
        &d[2] * &e[0] - &d[0] * &e[2],
        &d[0] * &e[1] - &d[1] * &e[0],
    ];
    if cross.iter().any(|c| *c != zero) {
        return false;
    }
    let k = major_axis(&d);
    let t = &e[k] / &d[k];
    t > zero && t < Rational::from_integer(1.into())
}

#[cfg(test)]
mod tests {
    use super::*;

    fn ep(x: f64, y: f64, z: f64) -> ExactPoint {
        ExactPoint::from_point(Point3::new(x, y, z))
    }

    #[test]
    fn transversal_triangles_meet_in_segment() {
        let t = [ep(0.0, 0.0, 0.0), ep(2.0, 0.0, 0.0), ep(0.0, 2.0, 0.0)];
        let s = [ep(0.5, 0.5, -1.0), ep(0.5, 0.5, 1.0), ep(1.5, -1.0, 0.0)];
        let c = triangle_triangle([&t[0], &t[1], &t[2]], [&s[0], &s[1], &s[2]]);
        let Contact::Segment(a, b) = c else {
            panic!("expected segment, got {c:?}")
        };
        for p in [a, b] {
            assert_eq!(p.approx().z, 0.0);
        }
    }

    #[test]
    fn coplanar_overlap_is_polygon() {
        let t = [ep(0.0, 0.0, 0.0), ep(2.0, 0.0, 0.0), ep(0.0, 2.0, 0.0)];
        let s = [ep(1.0, 1.0, 0.0), ep(-1.0, 1.0, 0.0), ep(1.0, -1.0, 0.0)];
        match triangle_triangle([&t[0], &t[1], &t[2]], [&s[0], &s[1], &s[2]]) {
            Contact::Polygon(v) => assert_eq!(v.len(), 4),
            other => panic!("{other:?}"),
        }
    }

    #[test]
    fn shared_vertex_is_point_and_shared_edge_is_segment() {
        let a = ep(0.0, 0.0, 0.0);
        let b = ep(1.0, 0.0, 0.0);
        let c = ep(0.0, 1.0, 0.0);
        let d = ep(0.0, 0.0, 1.0);
        let e = ep(-1.0, -1.0, 1.0);
        assert_eq!(triangle_triangle([&a, &b, &c], [&a, &d, &e]), Contact::Point(a.clone()));
        match triangle_triangle([&a, &b, &c], [&b, &a, &d]) {
            Contact::Segment(..) => {}
            other => panic!("{other:?}"),
        }
    }

    #[test]
    fn rational_points_hash_consistently() {
        use std::collections::HashSet;
        let a = ep(0.0, 0.0, 0.0);
        let b = ep(1.0, 0.0, 0.0);
        let mid = a.lerp(&b, &Rational::new(1.into(), 2.into()));
        assert_eq!(mid.as_float(), Some(Point3::new(0.5, 0.0, 0.0)));
        let third = a.lerp(&b, &Rational::new(1.into(), 3.into()));
        assert!(third.as_float().is_none());
        let set: HashSet<ExactPoint> = [mid.clone(), ep(0.5, 0.0, 0.0), third.clone(), third]
            .into_iter()
            .collect();
        assert_eq!(set.len(), 2);
    }

    #[test]
    fn segment_through_triangle() {
        let t = [ep(0.0, 0.0, 0.0), ep(1.0, 0.0, 0.0), ep(0.0, 1.0, 0.0)];
        let c = segment_triangle(&ep(0.2, 0.2, -1.0), &ep(0.2, 0.2, 1.0), [&t[0], &t[1], &t[2]]);
        assert_eq!(c, Contact::Point(ep(0.2, 0.2, 0.0)));
        let c = segment_triangle(&ep(-1.0, 0.5, 0.0), &ep(2.0, 0.5, 0.0), [&t[0], &t[1], &t[2]]);
        assert_eq!(c, Contact::Segment(ep(0.0, 0.5, 0.0), ep(0.5, 0.5, 0.0)));
        let c = segment_triangle(&ep(2.0, 2.0, -1.0), &ep(2.0, 2.0, 1.0), [&t[0], &t[1], &t[2]]);
        assert!(c.is_empty());
    }

    #[test]
    fn open_segment_membership() {
        let a = ep(0.0, 0.0, 0.0);
        let b = ep(2.0, 2.0, 2.0);
        assert!(point_in_open_segment(&ep(1.0, 1.0, 1.0), &a, &b));
        assert!(!point_in_open_segment(&a, &a, &b));
        assert!(!point_in_open_segment(&ep(3.0, 3.0, 3.0), &a, &b));
        assert!(!point_in_open_segment(&ep(1.0, 1.0, 1.5), &a, &b));
    }
}
