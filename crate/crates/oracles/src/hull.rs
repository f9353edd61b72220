//! Convex hull facets by enumerating every point triple.

use robust::{orient2d, orient3d, Coord, Coord3D};

use crate::{cross, dot, norm, sub, V3};

/// A hull facet: its extreme vertices (sorted lexicographically) and the
/// outward unit normal.
#[derive(Debug, Clone, PartialEq)]
pub struct BruteFacet {
    pub vertices: Vec<V3>,
    pub normal: V3,
}

fn c3(p: V3) -> Coord3D<f64> {
    Coord3D {
        x: p[0],
        y: p[1],
        z: p[2],
    }
}

fn sign(x: f64) -> i8 {
    if x > 0.0 {
        1
    } else if x < 0.0 {
        -1
    } else {
        0
    }
}

/// `robust::orient3d` is positive when `d` lies below the plane `abc` as
/// seen with `abc` counter-clockwise; this returns +1 for "above".
fn side(a: V3, b: V3, c: V3, d: V3) -> i8 {
    -sign(orient3d(c3(a), c3(b), c3(c), c3(d)))
}

pub fn lex_sorted(mut pts: Vec<V3>) -> Vec<V3> {
    pts.sort_by(|a, b| a.partial_cmp(b).expect("finite coordinates"));
    pts.dedup();
    pts
}

/// Extreme points of a planar point set with the given normal.
fn polygon_vertices(pts: &[V3], normal: V3) -> Vec<V3> {
    let a = normal.map(f64::abs);
    let (u, v) = if a[0] >= a[1] && a[0] >= a[2] {
        (1, 2)
    } else if a[1] >= a[2] {
        (2, 0)
    } else {
        (0, 1)
    };
    let mut p: Vec<V3> = lex_sorted(pts.to_vec());
    p.sort_by(|x, y| (x[u], x[v]).partial_cmp(&(y[u], y[v])).unwrap());
    let o = |a: V3, b: V3, c: V3| {
        sign(orient2d(
            Coord { x: a[u], y: a[v] },
            Coord { x: b[u], y: b[v] },
            Coord { x: c[u], y: c[v] },
        ))
    };
    let mut hull: Vec<V3> = Vec::new();
    for pass in 0..2 {
        let start = hull.len();
        let iter: Box<dyn Iterator<Item = &V3>> = if pass == 0 {
            Box::new(p.iter())
        } else {
            Box::new(p.iter().rev())
        };
        for &q in iter {
            while hull.len() >= start + 2 && o(hull[hull.len() - 2], hull[hull.len() - 1], q) <= 0 {
                hull.pop();
            }
            hull.push(q);
        }
        hull.pop();
    }
    lex_sorted(hull)
}

/// Every facet of the hull of `pts`, found by testing all `O(n³)` planes
/// against all `n` points with exact orientation tests. Returns an empty
/// list when the points are coplanar.
pub fn brute_force_facets(pts: &[V3]) -> Vec<BruteFacet> {
    let n = pts.len();
    let mut seen: Vec<Vec<usize>> = Vec::new();
    let mut out = Vec::new();
    for i in 0..n {
        for j in i + 1..n {
            for k in j + 1..n {
                let (a, b, c) = (pts[i], pts[j], pts[k]);
                let sides: Vec<i8> = pts.iter().map(|&d| side(a, b, c, d)).collect();
                let above = sides.iter().any(|&s| s > 0);
                let below = sides.iter().any(|&s| s < 0);
                if above == below {
                    // Mixed sides, or every point on the plane.
                    continue;
                }
                let on: Vec<usize> = (0..n).filter(|&m| sides[m] == 0).collect();
                if seen.contains(&on) {
                    continue;
                }
                let mut normal = cross(sub(b, a), sub(c, a));
                if norm(normal) == 0.0 {
                    continue;
                }
                if above {
                    normal = normal.map(|x| -x);
                }
                let l = norm(normal);
                let normal = normal.map(|x| x / l);
                let on_pts: Vec<V3> = on.iter().map(|&m| pts[m]).collect();
                out.push(BruteFacet {
                    vertices: polygon_vertices(&on_pts, normal),
                    normal,
                });
                seen.push(on);
            }
        }
    }
    out.sort_by(|x, y| x.vertices.partial_cmp(&y.vertices).unwrap());
    out
}

/// Half-space description of a convex hull, for membership tests.
#[derive(Debug, Clone)]
pub struct HRep {
    pub planes: Vec<(V3, f64)>,
}

impl HRep {
    pub fn from_points(pts: &[V3]) -> HRep {
        HRep {
            planes: brute_force_facets(pts)
                .into_iter()
                .map(|f| (f.normal, dot(f.normal, f.vertices[0])))
                .collect(),
        }
    }

    /// Signed distance-like margin: positive outside, negative inside.
    pub fn excess(&self, p: V3) -> f64 {
        self.planes
            .iter()
            .map(|&(n, d)| dot(n, p) - d)
            .fold(f64::NEG_INFINITY, f64::max)
    }

    pub fn contains(&self, p: V3) -> bool {
        self.excess(p) <= 0.0
    }
}

/// Whether every vertex lies on or behind every triangle's plane.
pub fn mesh_is_convex(vertices: &[V3], triangles: &[[usize; 3]], eps: f64) -> bool {
    triangles.iter().all(|t| {
        let (a, b, c) = (vertices[t[0]], vertices[t[1]], vertices[t[2]]);
        let n = cross(sub(b, a), sub(c, a));
        let l = norm(n);
        l > 0.0 && vertices.iter().all(|&v| dot(n, sub(v, a)) / l <= eps)
    })
}
