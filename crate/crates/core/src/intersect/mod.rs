//! Intersection detection and construction for points, segments, triangles
//! and bodies, plus scene-scale pair detection.
//!
//! Touching contacts (a shared point or edge) count as intersections here,
//! unlike the regularized booleans in [`crate::setops`].

mod curve;
mod tree;

use rayon::prelude::*;

use crate::error::{Error, Result};
use crate::exact::{self, Contact, ExactPoint};
use crate::geom::{Point3, Segment3, Tolerance, Triangle3};
use crate::mesh::Mesh;
use crate::predicates::{orient3d_unchecked as o3, Sign};

pub use curve::{chain_segments, mesh_mesh_curve};
pub use tree::{scene_digest, AabbTree, LEAF_SIZE};

/// An open or closed polyline. Closed polylines do not repeat the first point.
#[derive(Debug, Clone, PartialEq)]
pub struct Polyline {
    pub points: Vec<Point3>,
    pub closed: bool,
}

impl Polyline {
    pub fn length(&self) -> f64 {
        let n = self.points.len();
        let mut l: f64 = self.points.windows(2).map(|w| w[0].distance(w[1])).sum();
        if self.closed && n > 2 {
            l += self.points[n - 1].distance(self.points[0]);
        }
        l
    }

    /// Segments of the polyline, including the closing one.
    pub fn segments(&self) -> Vec<[Point3; 2]> {
        let n = self.points.len();
        let mut s: Vec<[Point3; 2]> = self.points.windows(2).map(|w| [w[0], w[1]]).collect();
        if self.closed && n > 2 {
            s.push([self.points[n - 1], self.points[0]]);
        }
        s
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum IntersectionKind {
    Empty,
    Points,
    Segments,
    Polygons,
    Volume,
}

impl IntersectionKind {
    pub fn name(self) -> &'static str {
        match self {
            IntersectionKind::Empty => "empty",
            IntersectionKind::Points => "points",
            IntersectionKind::Segments => "segments",
            IntersectionKind::Polygons => "polygons",
            IntersectionKind::Volume => "volume",
        }
    }
}

/// Result of an intersection construction. Payloads are never empty.
#[derive(Debug, Clone, PartialEq)]
pub enum IntersectionOutcome {
    Empty,
    Points(Vec<Point3>),
    Segments(Vec<Polyline>),
    Polygons(Vec<Vec<Point3>>),
    Volume(Mesh),
}

impl IntersectionOutcome {
    pub fn kind(&self) -> IntersectionKind {
        match self {
            IntersectionOutcome::Empty => IntersectionKind::Empty,
            IntersectionOutcome::Points(_) => IntersectionKind::Points,
            IntersectionOutcome::Segments(_) => IntersectionKind::Segments,
            IntersectionOutcome::Polygons(_) => IntersectionKind::Polygons,
            IntersectionOutcome::Volume(_) => IntersectionKind::Volume,
        }
    }

    pub fn is_empty(&self) -> bool {
        matches!(self, IntersectionOutcome::Empty)
    }

    /// Every constructed point in the payload.
    pub fn points(&self) -> Vec<Point3> {
        match self {
            IntersectionOutcome::Empty => Vec::new(),
            IntersectionOutcome::Points(p) => p.clone(),
            IntersectionOutcome::Segments(ls) => ls.iter().flat_map(|l| l.points.clone()).collect(),
            IntersectionOutcome::Polygons(ps) => ps.iter().flatten().copied().collect(),
            IntersectionOutcome::Volume(m) => m.vertices().to_vec(),
        }
    }

    pub(crate) fn from_contact(c: &Contact) -> IntersectionOutcome {
        match c {
            Contact::Empty => IntersectionOutcome::Empty,
            Contact::Point(p) => IntersectionOutcome::Points(vec![p.approx()]),
            Contact::Segment(a, b) => IntersectionOutcome::Segments(vec![Polyline {
                points: vec![a.approx(), b.approx()],
                closed: false,
            }]),
            Contact::Polygon(v) => IntersectionOutcome::Polygons(vec![v.iter().map(|p| p.approx()).collect()]),
        }
    }
}

/// Location of a point relative to a solid.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Location {
    Inside,
    Boundary,
    Outside,
}

/// Ray directions tried in turn until a ray misses every edge and vertex.
fn ray_direction(k: usize) -> Point3 {
    // Golden-angle spiral with irrational offsets; never axis-aligned.
    let g = 2.399_963_229_728_653_f64;
    let t = k as f64 + 0.618_033_988_749_895;
    let z = 1.0 - 2.0 * ((t * 0.381_966_011_250_105) % 1.0);
    let r = (1.0 - z * z).max(0.0).sqrt();
    let a = g * t + 0.123_456_789;
    Point3::new(r * a.cos(), r * a.sin(), z).normalized()
}

enum Crossing {
    Miss,
    Hit,
    Degenerate,
}

fn ray_crossing(p: Point3, q: Point3, t: &Triangle3) -> Crossing {
    let (a, b, c) = (t.p, t.q, t.r);
    let sp = o3(a, b, c, p);
    let sq = o3(a, b, c, q);
    if sp == sq && sp != Sign::Zero {
        return Crossing::Miss;
    }
    if sp == Sign::Zero || sq == Sign::Zero {
        let (ep, eq) = (ExactPoint::from_point(p), ExactPoint::from_point(q));
        let tri = [a, b, c].map(ExactPoint::from_point);
        return if exact::segment_triangle(&ep, &eq, [&tri[0], &tri[1], &tri[2]]).is_empty() {
            Crossing::Miss
        } else {
            Crossing::Degenerate
        };
    }
    let e = [o3(p, q, a, b), o3(p, q, b, c), o3(p, q, c, a)];
    let pos = e.contains(&Sign::Positive);
    let neg = e.contains(&Sign::Negative);
    if pos && neg {
        Crossing::Miss
    } else if e.contains(&Sign::Zero) {
        Crossing::Degenerate
    } else {
        Crossing::Hit
    }
}

/// Point-location structure for repeated queries against one solid.
#[derive(Debug, Clone)]
pub struct BodyLocator<'a> {
    mesh: &'a Mesh,
    tree: AabbTree,
    eps: f64,
}

impl<'a> BodyLocator<'a> {
    /// Validates that the mesh is closed and builds the triangle tree.
    pub fn new(mesh: &'a Mesh, tol: &Tolerance) -> Result<BodyLocator<'a>> {
        mesh.check_closed_manifold()?;
        Ok(BodyLocator {
            mesh,
            tree: AabbTree::for_mesh(mesh),
            eps: tol.eps,
        })
    }

    pub fn distance_to_surface(&self, p: Point3) -> f64 {
        let bb = self.tree.root_box();
        if bb.is_empty() {
            return f64::INFINITY;
        }
        // Grow the query box until it holds a triangle, then refine.
        let mut r = self.eps.max(bb.diagonal() * 1e-3);
        loop {
            let hits = self.tree.query_box(&crate::geom::Aabb::from_points(&[p]).inflated(r));
            if !hits.is_empty() {
                let d = hits
                    .iter()
                    .map(|&i| self.mesh.triangle(i).distance_to(p))
                    .fold(f64::INFINITY, f64::min);
                if d <= r {
                    return d;
                }
                let all = self.tree.query_box(&crate::geom::Aabb::from_points(&[p]).inflated(d));
                return all
                    .iter()
                    .map(|&i| self.mesh.triangle(i).distance_to(p))
                    .fold(d, f64::min);
            }
            r *= 4.0;
        }
    }

    pub fn locate(&self, p: Point3) -> Result<Location> {
        p.check_finite()?;
        if self.mesh.is_empty() {
            return Ok(Location::Outside);
        }
        let near = self
            .tree
            .query_box(&crate::geom::Aabb::from_points(&[p]).inflated(self.eps));
        if near.iter().any(|&i| self.mesh.triangle(i).distance_to(p) <= self.eps) {
            return Ok(Location::Boundary);
        }
        let bb = self.tree.root_box();
        if !bb.contains_point(p) {
            return Ok(Location::Outside);
        }
        let reach = 2.0 * bb.diagonal() + 1.0;
        'dirs: for k in 0..64 {
            let q = p + ray_direction(k) * reach;
            let mut parity = false;
            for i in self.tree.query_segment(p, q) {
                match ray_crossing(p, q, &self.mesh.triangle(i)) {
                    Crossing::Miss => {}
                    Crossing::Hit => parity = !parity,
                    Crossing::Degenerate => continue 'dirs,
                }
            }
            return Ok(if parity { Location::Inside } else { Location::Outside });
        }
        Err(Error::InvalidInput(format!(
            "could not find a non-degenerate ray from {p:?}"
        )))
    }
}

/// Classifies `p` against the solid `m`; within `tol.eps` of the surface is boundary.
pub fn point_in_body(p: Point3, m: &Mesh, tol: &Tolerance) -> Result<Location> {
    BodyLocator::new(m, tol)?.locate(p)
}

fn exact_tri(t: &Triangle3) -> [ExactPoint; 3] {
    [t.p, t.q, t.r].map(ExactPoint::from_point)
}

/// Intersection of a closed segment with a closed triangle.
pub fn segment_triangle(s: &Segment3, t: &Triangle3, tol: &Tolerance) -> Result<IntersectionOutcome> {
    let s = Segment3::validated(s.a, s.b, tol)?;
    let t = Triangle3::validated(t.p, t.q, t.r, tol)?;
    let (a, b) = (ExactPoint::from_point(s.a), ExactPoint::from_point(s.b));
    let e = exact_tri(&t);
    Ok(IntersectionOutcome::from_contact(&exact::segment_triangle(
        &a,
        &b,
        [&e[0], &e[1], &e[2]],
    )))
}

/// Intersection of two closed triangles.
pub fn triangle_triangle(a: &Triangle3, b: &Triangle3, tol: &Tolerance) -> Result<IntersectionOutcome> {
    let a = Triangle3::validated(a.p, a.q, a.r, tol)?;
    let b = Triangle3::validated(b.p, b.q, b.r, tol)?;
    let (x, y) = (exact_tri(&a), exact_tri(&b));
    Ok(IntersectionOutcome::from_contact(&exact::triangle_triangle(
        [&x[0], &x[1], &x[2]],
        [&y[0], &y[1], &y[2]],
    )))
}

/// Triangle pairs of a mesh that intersect in more than the shared vertex or
/// shared edge their connectivity allows, as sorted index pairs.
pub fn self_intersections(m: &Mesh) -> Vec<[usize; 2]> {
    let tree = AabbTree::for_mesh(m);
    let v = m.vertices();
    let mut out: Vec<[usize; 2]> = tree
        .self_pairs()
        .into_par_iter()
        .filter(|&[i, j]| {
            let (ti, tj) = (m.triangles()[i], m.triangles()[j]);
            let pi = ti.map(|k| v[k]);
            let pj = tj.map(|k| v[k]);
            improper_contact(pi, pj)
        })
        .collect();
    out.sort_unstable();
    out
}

fn improper_contact(a: [Point3; 3], b: [Point3; 3]) -> bool {
    let same = |p: Point3, q: Point3| p.bits() == q.bits();
    let shared: Vec<(usize, usize)> = (0..3)
        .flat_map(|i| (0..3).map(move |j| (i, j)))
        .filter(|&(i, j)| same(a[i], b[j]))
        .collect();
    match shared.len() {
        2 => {
            // Sharing an edge: only a coplanar fold onto the same side overlaps.
            let (i0, j0) = shared[0];
            let (i1, j1) = shared[1];
            let c = a[3 - i0 - i1];
            let d = b[3 - j0 - j1];
            let (p, q) = (a[i0], a[i1]);
            if o3(p, q, c, d) != Sign::Zero {
                return false;
            }
            let n = Triangle3::new(p, q, c).normal();
            let sc = o3(p, q, c, p + n);
            let sd = o3(p, q, d, p + n);
            sc == sd
        }
        0 | 1 => {
            let (x, y) = (a.map(ExactPoint::from_point), b.map(ExactPoint::from_point));
            let c = exact::triangle_triangle([&x[0], &x[1], &x[2]], [&y[0], &y[1], &y[2]]);
            match (&c, shared.first()) {
                (Contact::Empty, _) => false,
                (Contact::Point(p), Some(&(i, _))) => p.as_float().map(|f| !same(f, a[i])).unwrap_or(true),
                _ => true,
            }
        }
        _ => true,
    }
}

/// Whether two closed solids intersect (boundary contact counts).
pub fn bodies_intersect(a: &Mesh, b: &Mesh) -> bool {
    if a.is_empty() || b.is_empty() || !a.aabb().overlaps(&b.aabb()) {
        return false;
    }
    if surfaces_touch(a, b) {
        return true;
    }
    // Disjoint surfaces: the solids meet only if one contains the other.
    let tol = Tolerance::default();
    let inside = |p: Point3, m: &Mesh| {
        m.aabb().contains_point(p)
            && BodyLocator::new(m, &tol)
                .and_then(|l| l.locate(p))
                .map(|loc| loc != Location::Outside)
                .unwrap_or(false)
    };
    inside(a.vertices()[a.triangles()[0][0]], b) || inside(b.vertices()[b.triangles()[0][0]], a)
}

fn surfaces_touch(a: &Mesh, b: &Mesh) -> bool {
    let (ta, tb) = (AabbTree::for_mesh(a), AabbTree::for_mesh(b));
    ta.cross_pairs(&tb).into_iter().any(|(i, j)| {
        if let Some(hit) = triangles_touch_generic(&a.triangle(i), &b.triangle(j)) {
            return hit;
        }
        let x = exact_tri(&a.triangle(i));
        let y = exact_tri(&b.triangle(j));
        !exact::triangle_triangle([&x[0], &x[1], &x[2]], [&y[0], &y[1], &y[2]]).is_empty()
    })
}

/// Touch test from orientation signs alone. Returns `None` when some sign
/// is zero (shared planes, vertices on the other plane, touching edges); the
/// caller then falls back to exact construction.
fn triangles_touch_generic(s: &Triangle3, t: &Triangle3) -> Option<bool> {
    let side = |plane: &Triangle3, v: Point3| o3(plane.p, plane.q, plane.r, v);
    let ds = s.vertices().map(|v| side(t, v));
    let dt = t.vertices().map(|v| side(s, v));
    if ds.contains(&Sign::Zero) || dt.contains(&Sign::Zero) {
        return None;
    }
    if ds.iter().all(|&x| x == ds[0]) || dt.iter().all(|&x| x == dt[0]) {
        return Some(false);
    }
    // Rotate each triangle so its first vertex is alone on its side.
    let lone = |d: [Sign; 3]| (0..3).find(|&k| d[(k + 1) % 3] == d[(k + 2) % 3]).unwrap();
    let rot = |v: [Point3; 3], k: usize| [v[k], v[(k + 1) % 3], v[(k + 2) % 3]];
    let (ks, kt) = (lone(ds), lone(dt));
    let [p1, mut q1, mut r1] = rot(s.vertices(), ks);
    let [p2, mut q2, mut r2] = rot(t.vertices(), kt);
    // Orient each triangle so the other one's lone vertex lies below its plane.
    if ds[ks] == Sign::Positive {
        std::mem::swap(&mut q2, &mut r2);
    }
    if dt[kt] == Sign::Positive {
        std::mem::swap(&mut q1, &mut r1);
    }
    let a = o3(p1, q1, p2, q2);
    let b = o3(p1, r1, r2, p2);
    if a == Sign::Zero || b == Sign::Zero {
        return None;
    }
    Some(a == Sign::Positive && b == Sign::Positive)
}

/// Pairs `(i, j)`, `i < j`, of scene entities that intersect, sorted.
///
/// `tree` must have been built with [`AabbTree::for_scene`] over this scene.
pub fn detect_pairs(scene: &[Mesh], tree: &AabbTree) -> Result<Vec<(usize, usize)>> {
    let current = scene_digest(scene);
    if tree.len() != scene.len() || tree.digest() != current {
        return Err(Error::StaleTree {
            built: tree.len(),
            built_digest: tree.digest(),
            current: scene.len(),
        });
    }
    let mut out: Vec<(usize, usize)> = tree
        .self_pairs()
        .into_par_iter()
        .filter(|&[i, j]| bodies_intersect(&scene[i], &scene[j]))
        .map(|[i, j]| (i, j))
        .collect();
    out.sort_unstable();
    Ok(out)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::shapes;

    fn p(x: f64, y: f64, z: f64) -> Point3 {
        Point3::new(x, y, z)
    }

    #[test]
    fn point_location_in_cube() {
        let c = shapes::unit_cube();
        let tol = Tolerance::default();
        assert_eq!(point_in_body(p(0.5, 0.5, 0.5), &c, &tol).unwrap(), Location::Inside);
        assert_eq!(point_in_body(p(2.0, 0.0, 0.0), &c, &tol).unwrap(), Location::Outside);
        assert_eq!(point_in_body(p(0.5, 0.5, 1.0), &c, &tol).unwrap(), Location::Boundary);
        assert_eq!(point_in_body(p(1.0, 1.0, 1.0), &c, &tol).unwrap(), Location::Boundary);
        // Points level with edges and vertices exercise the ray retries.
        assert_eq!(
            point_in_body(p(0.5, 0.5, 0.5 + 1e-3), &c, &tol).unwrap(),
            Location::Inside
        );
        assert_eq!(point_in_body(p(-0.5, 0.0, 0.0), &c, &tol).unwrap(), Location::Outside);
    }

    #[test]
    fn generic_touch_test_agrees_with_exact() {
        use rand::{Rng, SeedableRng};
        let mut r = rand_chacha::ChaCha8Rng::seed_from_u64(11);
        let (mut decided, mut hits) = (0, 0);
        for k in 0..4000 {
            // Half on a coarse lattice, where shared planes and contacts are common.
            let mut q = || {
                if k % 2 == 0 {
                    p(r.gen_range(-1.0..1.0), r.gen_range(-1.0..1.0), r.gen_range(-1.0..1.0))
                } else {
                    p(
                        r.gen_range(0..3) as f64,
                        r.gen_range(0..3) as f64,
                        r.gen_range(0..3) as f64,
                    )
                }
            };
            let (s, t) = (Triangle3::new(q(), q(), q()), Triangle3::new(q(), q(), q()));
            let Some(fast) = triangles_touch_generic(&s, &t) else {
                continue;
            };
            let (x, y) = (exact_tri(&s), exact_tri(&t));
            let slow = !exact::triangle_triangle([&x[0], &x[1], &x[2]], [&y[0], &y[1], &y[2]]).is_empty();
            assert_eq!(fast, slow, "{s:?} {t:?}");
            decided += 1;
            hits += fast as usize;
        }
        assert!(decided > 2000 && hits > 100, "{decided} decided, {hits} hits");
    }

    #[test]
    fn point_location_rejects_open_mesh() {
        let c = shapes::unit_cube();
        let open = Mesh::new(c.vertices().to_vec(), c.triangles()[1..].to_vec()).unwrap();
        assert!(point_in_body(p(0.5, 0.5, 0.5), &open, &Tolerance::default()).is_err());
    }

    #[test]
    fn point_location_in_torus_hole() {
        let t = shapes::torus(2.0, 0.5, 32, 16);
        let tol = Tolerance::default();
        assert_eq!(point_in_body(p(0.0, 0.0, 0.0), &t, &tol).unwrap(), Location::Outside);
        assert_eq!(point_in_body(p(2.0, 0.0, 0.0), &t, &tol).unwrap(), Location::Inside);
    }

    #[test]
    fn segment_triangle_cases() {
        let tol = Tolerance::default();
        let t = Triangle3::new(p(0.0, 0.0, 0.0), p(1.0, 0.0, 0.0), p(0.0, 1.0, 0.0));
        let pierce = segment_triangle(&Segment3::new(p(0.2, 0.2, -1.0), p(0.2, 0.2, 1.0)), &t, &tol).unwrap();
        assert_eq!(pierce, IntersectionOutcome::Points(vec![p(0.2, 0.2, 0.0)]));
        let above = segment_triangle(&Segment3::new(p(0.0, 0.0, 1.0), p(1.0, 1.0, 1.0)), &t, &tol).unwrap();
        assert_eq!(above, IntersectionOutcome::Empty);
        let inplane = segment_triangle(&Segment3::new(p(-1.0, 0.25, 0.0), p(2.0, 0.25, 0.0)), &t, &tol).unwrap();
        assert_eq!(inplane.kind(), IntersectionKind::Segments);
        assert!(segment_triangle(&Segment3::new(p(0.0, 0.0, 0.0), p(0.0, 0.0, 0.0)), &t, &tol).is_err());
    }

    #[test]
    fn triangle_triangle_cases() {
        let tol = Tolerance::default();
        let a = Triangle3::new(p(0.0, 0.0, 0.0), p(2.0, 0.0, 0.0), p(0.0, 2.0, 0.0));
        let b = Triangle3::new(p(0.5, 0.5, -1.0), p(0.5, 0.5, 1.0), p(3.0, -2.0, 0.0));
        let out = triangle_triangle(&a, &b, &tol).unwrap();
        assert_eq!(out.kind(), IntersectionKind::Segments);
        for q in out.points() {
            assert!(q.z.abs() < 1e-9);
        }
        let far = Triangle3::new(p(5.0, 5.0, 0.0), p(6.0, 5.0, 0.0), p(5.0, 6.0, 0.0));
        assert!(triangle_triangle(&a, &far, &tol).unwrap().is_empty());
        // Overlap of the two right triangles is the quadrilateral
        // (1,0) (2,0) (1.5,0.5) (1,1)... checked by area.
        let c = Triangle3::new(p(1.0, 0.0, 0.0), p(3.0, 0.0, 0.0), p(1.0, 2.0, 0.0));
        match triangle_triangle(&a, &c, &tol).unwrap() {
            IntersectionOutcome::Polygons(ps) => {
                let poly: Vec<[f64; 2]> = ps[0].iter().map(|q| [q.x, q.y]).collect();
                assert!((crate::shapes::signed_area_2d(&poly).abs() - 0.5).abs() < 1e-12);
            }
            other => panic!("expected polygon, got {other:?}"),
        }
    }

    #[test]
    fn self_intersection_detection() {
        assert!(self_intersections(&shapes::unit_cube()).is_empty());
        assert!(self_intersections(&shapes::icosphere(Point3::ORIGIN, 1.0, 2)).is_empty());
        assert!(self_intersections(&shapes::torus(2.0, 0.5, 16, 8)).is_empty());
        let a = shapes::unit_cube();
        let b = a.translated(p(0.5, 0.5, 0.5));
        assert!(!self_intersections(&Mesh::concat([&a, &b])).is_empty());
        let far = a.translated(p(3.0, 0.0, 0.0));
        assert!(self_intersections(&Mesh::concat([&a, &far])).is_empty());
    }

    #[test]
    fn detect_pairs_and_staleness() {
        let mut scene: Vec<Mesh> = (0..10)
            .map(|i| shapes::unit_cube().translated(p(2.0 * i as f64, 0.0, 0.0)))
            .collect();
        scene.push(shapes::cuboid(p(0.5, 0.5, 0.5), p(0.6, 0.6, 0.6)));
        scene.push(shapes::unit_cube().translated(p(3.0, 0.0, 0.0)));
        let tree = AabbTree::for_scene(&scene);
        assert_eq!(detect_pairs(&scene, &tree).unwrap(), vec![(0, 10), (1, 11), (2, 11)]);
        scene.pop();
        assert!(matches!(detect_pairs(&scene, &tree), Err(Error::StaleTree { .. })));
    }
}
