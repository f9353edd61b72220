//! Convex hulls, convexity testing and Minkowski sums.

mod hull;

use rayon::prelude::*;
use serde::Serialize;

use crate::error::{Error, Result};
use crate::geom::{Aabb, Point3, Tolerance, Triangle3};
use crate::mesh::{mesh_volume, Mesh};
use crate::predicates::{orient2d, Sign};

pub(crate) use hull::affine_frame;

/// A supporting plane `normal · x = offset` with a unit outward normal, and
/// the facet's vertex ring (counter-clockwise seen from outside).
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct Facet {
    pub normal: Point3,
    pub offset: f64,
    pub ring: Vec<usize>,
}

impl Facet {
    /// Signed distance of `p` from the facet plane, positive outside.
    pub fn distance(&self, p: Point3) -> f64 {
        self.normal.dot(p) - self.offset
    }
}

/// A convex body stored as extreme vertices and facet planes.
///
/// Full-dimensional polytopes have facets. The relaxed lower-dimensional
/// forms (a point, a segment, a planar polygon) have none; their vertices are
/// the extreme points, in ring order for polygons.
#[derive(Debug, Clone, PartialEq)]
pub struct ConvexPolytope {
    vertices: Vec<Point3>,
    facets: Vec<Facet>,
    dimension: usize,
}

impl ConvexPolytope {
    pub fn vertices(&self) -> &[Point3] {
        &self.vertices
    }

    pub fn facets(&self) -> &[Facet] {
        &self.facets
    }

    /// Affine dimension (0 point, 1 segment, 2 polygon, 3 solid).
    pub fn dimension(&self) -> usize {
        self.dimension
    }

    pub fn is_solid(&self) -> bool {
        self.dimension == 3
    }

    /// The single-point polytope `{p}`.
    pub fn point(p: Point3) -> Result<ConvexPolytope> {
        p.check_finite()?;
        Ok(ConvexPolytope {
            vertices: vec![p],
            facets: Vec::new(),
            dimension: 0,
        })
    }

    /// Convex hull of `points` in whatever dimension they span.
    pub fn from_points(points: &[Point3]) -> Result<ConvexPolytope> {
        if points.is_empty() {
            return Err(Error::InvalidInput("no points".into()));
        }
        for p in points {
            p.check_finite()?;
        }
        let (dim, frame) = affine_frame(points);
        match dim {
            3 => convex_hull(points),
            0 => ConvexPolytope::point(points[frame[0]]),
            1 => {
                let (a, b) = (points[frame[0]], points[frame[1]]);
                let d = b - a;
                let lo = points
                    .iter()
                    .copied()
                    .min_by(|p, q| d.dot(*p - a).total_cmp(&d.dot(*q - a)).then(p.lex_cmp(q)))
                    .unwrap();
                let hi = points
                    .iter()
                    .copied()
                    .max_by(|p, q| d.dot(*p - a).total_cmp(&d.dot(*q - a)).then(q.lex_cmp(p)))
                    .unwrap();
                Ok(ConvexPolytope {
                    vertices: vec![lo, hi],
                    facets: Vec::new(),
                    dimension: 1,
                })
            }
            _ => {
                let (a, b, c) = (points[frame[0]], points[frame[1]], points[frame[2]]);
                let n = (b - a).cross(c - a);
                let proj = projector(n);
                let ids: Vec<usize> = (0..points.len()).collect();
                let mut ring = hull::convex_ring_2d(&ids, |i| proj(points[i]));
                if orient2d(proj(a), proj(b), proj(c)) == Sign::Negative {
                    ring.reverse();
                }
                Ok(ConvexPolytope {
                    vertices: ring.into_iter().map(|i| points[i]).collect(),
                    facets: Vec::new(),
                    dimension: 2,
                })
            }
        }
    }

    /// The convex hull of a mesh's vertices.
    pub fn from_mesh(m: &Mesh) -> Result<ConvexPolytope> {
        ConvexPolytope::from_points(m.vertices())
    }

    /// Boundary mesh of a solid polytope (facets fan-triangulated).
    pub fn to_mesh(&self) -> Result<Mesh> {
        if self.dimension < 3 {
            return Err(Error::Degenerate {
                dimension: self.dimension,
            });
        }
        let mut tris = Vec::new();
        for f in &self.facets {
            tris.extend(triangulate_facet(&f.ring, &self.vertices, f.normal));
        }
        Mesh::new(self.vertices.clone(), tris)
    }

    /// Boundary mesh without sliver triangles (area ≤ eps²). Rounded inputs
    /// can put hull vertices a hair off the segment joining two others; the
    /// vertex opposite a sliver's longest edge is within eps of that edge,
    /// so dropping it and re-hulling moves the boundary by at most eps.
    pub fn to_solid_mesh(&self, tol: &Tolerance) -> Result<Mesh> {
        let mut m = self.to_mesh()?;
        loop {
            let v = m.vertices();
            let mut drop = vec![false; v.len()];
            let mut keep = vec![false; v.len()];
            for t in m.triangles() {
                let tri = Triangle3::new(v[t[0]], v[t[1]], v[t[2]]);
                if tri.area() > tol.eps * tol.eps {
                    continue;
                }
                let edge = |k: usize| v[t[(k + 1) % 3]].distance(v[t[(k + 2) % 3]]);
                let o = (0..3)
                    .max_by(|&a, &b| edge(a).total_cmp(&edge(b)))
                    .expect("three corners");
                let (a, b) = (t[(o + 1) % 3], t[(o + 2) % 3]);
                if !keep[t[o]] && !drop[a] && !drop[b] {
                    drop[t[o]] = true;
                    keep[a] = true;
                    keep[b] = true;
                }
            }
            if !drop.contains(&true) {
                return Ok(m);
            }
            let rest: Vec<Point3> = v.iter().zip(&drop).filter(|(_, &d)| !d).map(|(p, _)| *p).collect();
            m = convex_hull(&rest)?.to_mesh()?;
        }
    }

    pub fn volume(&self) -> f64 {
        match self.to_mesh() {
            Ok(m) => mesh_volume(&m).unwrap_or(0.0),
            Err(_) => 0.0,
        }
    }

    pub fn aabb(&self) -> Aabb {
        Aabb::from_points(&self.vertices)
    }

    /// Whether `p` is inside or on the polytope within `eps` (solids only).
    pub fn contains(&self, p: Point3, eps: f64) -> bool {
        self.dimension == 3 && self.facets.iter().all(|f| f.distance(p) <= eps)
    }

    pub fn translated(&self, d: Point3) -> ConvexPolytope {
        ConvexPolytope {
            vertices: self.vertices.iter().map(|&v| v + d).collect(),
            facets: self
                .facets
                .iter()
                .map(|f| Facet {
                    normal: f.normal,
                    offset: f.offset + f.normal.dot(d),
                    ring: f.ring.clone(),
                })
                .collect(),
            dimension: self.dimension,
        }
    }

    /// Facet planes as JSON (the sidecar to the polytope's OFF file).
    pub fn facets_json(&self) -> String {
        #[derive(Serialize)]
        struct Sidecar<'a> {
            dimension: usize,
            vertex_count: usize,
            facets: &'a [Facet],
        }
        serde_json::to_string_pretty(&Sidecar {
            dimension: self.dimension,
            vertex_count: self.vertices.len(),
            facets: &self.facets,
        })
        .expect("facets serialize")
    }
}

/// Triangulates a convex facet ring that may carry collinear or nearly
/// collinear boundary vertices. Among all triangulations of the ring, picks
/// one maximizing the smallest triangle area (exactly collinear triples
/// score zero), so slivers appear only when the facet itself is a sliver.
fn triangulate_facet(ring: &[usize], pts: &[Point3], normal: Point3) -> Vec<[usize; 3]> {
    let n = ring.len();
    if n == 3 {
        return vec![[ring[0], ring[1], ring[2]]];
    }
    let proj = projector(normal);
    let area = |a: usize, b: usize, c: usize| {
        let (pa, pb, pc) = (pts[ring[a]], pts[ring[b]], pts[ring[c]]);
        if orient2d(proj(pa), proj(pb), proj(pc)) == Sign::Zero {
            0.0
        } else {
            (pb - pa).cross(pc - pa).norm()
        }
    };
    // best[i][j]: max-min area over triangulations of the sub-polygon i..=j.
    let mut best = vec![vec![f64::INFINITY; n]; n];
    let mut split = vec![vec![0usize; n]; n];
    for len in 2..n {
        for i in 0..n - len {
            let j = i + len;
            best[i][j] = f64::NEG_INFINITY;
            for k in i + 1..j {
                let q = best[i][k].min(best[k][j]).min(area(i, k, j));
                if q > best[i][j] {
                    best[i][j] = q;
                    split[i][j] = k;
                }
            }
        }
    }
    let mut out = Vec::with_capacity(n - 2);
    let mut stack = vec![(0, n - 1)];
    while let Some((i, j)) = stack.pop() {
        if j - i < 2 {
            continue;
        }
        let k = split[i][j];
        out.push([ring[i], ring[k], ring[j]]);
        stack.push((i, k));
        stack.push((k, j));
    }
    out
}

fn projector(n: Point3) -> impl Fn(Point3) -> [f64; 2] {
    let drop = if n.x.abs() >= n.y.abs() && n.x.abs() >= n.z.abs() {
        0
    } else if n.y.abs() >= n.z.abs() {
        1
    } else {
        2
    };
    move |p: Point3| match drop {
        0 => [p.y, p.z],
        1 => [p.z, p.x],
        _ => [p.x, p.y],
    }
}

/// Minimal convex polytope containing `points`.
///
/// Fewer than four affinely independent points are rejected with
/// [`Error::Degenerate`] naming the affine dimension.
pub fn convex_hull(points: &[Point3]) -> Result<ConvexPolytope> {
    let raw = hull::quickhull(points)?;
    let mut used: Vec<usize> = raw.rings.iter().flatten().copied().collect();
    used.sort_unstable();
    used.dedup();
    let mut remap = vec![usize::MAX; points.len()];
    for (k, &i) in used.iter().enumerate() {
        remap[i] = k;
    }
    let vertices: Vec<Point3> = used.iter().map(|&i| points[i]).collect();
    let mut facets: Vec<Facet> = raw
        .rings
        .iter()
        .map(|ring| {
            let pts: Vec<Point3> = ring.iter().map(|&i| points[i]).collect();
            let normal = crate::shapes::newell_normal(&pts).normalized();
            let offset = pts.iter().map(|p| normal.dot(*p)).fold(f64::NEG_INFINITY, f64::max);
            Facet {
                normal,
                offset,
                ring: ring.iter().map(|&i| remap[i]).collect(),
            }
        })
        .collect();
    facets.sort_by(|a, b| a.ring.cmp(&b.ring));
    Ok(ConvexPolytope {
        vertices,
        facets,
        dimension: 3,
    })
}

/// True iff every vertex is behind (or within `tol.eps` of) every triangle plane.
pub fn is_convex(m: &Mesh, tol: &Tolerance) -> Result<bool> {
    m.check_solid()?;
    let v = m.vertices();
    Ok(m.triangle_iter().all(|t| {
        let n = t.unit_normal();
        v.iter().all(|&p| n.dot(p - t.p) <= tol.eps)
    }))
}

/// Minkowski sum of two convex polytopes: the hull of all pairwise vertex
/// sums. Lower-dimensional operands and results are allowed.
pub fn minkowski_sum_convex(a: &ConvexPolytope, b: &ConvexPolytope) -> Result<ConvexPolytope> {
    let sums: Vec<Point3> = a
        .vertices
        .iter()
        .flat_map(|&p| b.vertices.iter().map(move |&q| p + q))
        .collect();
    ConvexPolytope::from_points(&sums)
}

/// Minkowski sum of a solid with a convex polytope, via convex decomposition
/// of the solid and a union of the convex pieces' sums.
pub fn minkowski_sum_with_polytope(m: &Mesh, b: &ConvexPolytope, tol: &Tolerance) -> Result<Mesh> {
    m.check_solid()?;
    if m.is_empty() {
        return Ok(Mesh::empty());
    }
    if b.dimension == 0 {
        return Ok(m.translated(b.vertices[0]));
    }
    let pieces = crate::decompose::convex_decompose(m, None, tol)?.pieces;
    let sums: Vec<Mesh> = pieces
        .par_iter()
        .map(|p| minkowski_sum_convex(&ConvexPolytope::from_mesh(p)?, b)?.to_solid_mesh(tol))
        .collect::<Result<_>>()?;
    crate::setops::union(&sums)
}

/// Minkowski sum of two solids: decompose both, sum the convex pieces
/// pairwise, and union the results.
pub fn minkowski_sum_general(a: &Mesh, b: &Mesh, tol: &Tolerance) -> Result<Mesh> {
    a.check_solid().map_err(|e| Error::InvalidEntity {
        index: 0,
        source: Box::new(e),
    })?;
    b.check_solid().map_err(|e| Error::InvalidEntity {
        index: 1,
        source: Box::new(e),
    })?;
    if a.is_empty() || b.is_empty() {
        return Ok(Mesh::empty());
    }
    let pa = crate::decompose::convex_decompose(a, None, tol)?.pieces;
    let pb = crate::decompose::convex_decompose(b, None, tol)?.pieces;
    let hulls_b: Vec<ConvexPolytope> = pb.iter().map(ConvexPolytope::from_mesh).collect::<Result<_>>()?;
    let pairs: Vec<(usize, usize)> = (0..pa.len()).flat_map(|i| (0..pb.len()).map(move |j| (i, j))).collect();
    let sums: Vec<Mesh> = pairs
        .par_iter()
        .map(|&(i, j)| minkowski_sum_convex(&ConvexPolytope::from_mesh(&pa[i])?, &hulls_b[j])?.to_solid_mesh(tol))
        .collect::<Result<_>>()?;
    crate::setops::union(&sums)
}
