//! Primitive solids and polygon triangulation.

use std::collections::HashMap;

use crate::geom::Point3;
use crate::mesh::Mesh;
use crate::predicates::{orient2d, Sign};

/// Axis-aligned box `[min, max]`.
pub fn cuboid(min: Point3, max: Point3) -> Mesh {
    let v = |i: usize| {
        Point3::new(
            if i & 1 == 0 { min.x } else { max.x },
            if i & 2 == 0 { min.y } else { max.y },
            if i & 4 == 0 { min.z } else { max.z },
        )
    };
    let vertices = (0..8).map(v).collect();
    let quads = [
        [0, 2, 3, 1], // z = min
        [4, 5, 7, 6], // z = max
        [0, 1, 5, 4], // y = min
        [2, 6, 7, 3], // y = max
        [0, 4, 6, 2], // x = min
        [1, 3, 7, 5], // x = max
    ];
    let triangles = quads
        .iter()
        .flat_map(|q| [[q[0], q[1], q[2]], [q[0], q[2], q[3]]])
        .collect();
    Mesh::new(vertices, triangles).expect("box is well formed")
}

pub fn unit_cube() -> Mesh {
    cuboid(Point3::ORIGIN, Point3::new(1.0, 1.0, 1.0))
}

/// Tetrahedron on the origin and the three unit axis points.
pub fn unit_tetrahedron() -> Mesh {
    Mesh::new(
        vec![
            Point3::new(0.0, 0.0, 0.0),
            Point3::new(1.0, 0.0, 0.0),
            Point3::new(0.0, 1.0, 0.0),
            Point3::new(0.0, 0.0, 1.0),
        ],
        vec![[0, 2, 1], [0, 1, 3], [0, 3, 2], [1, 2, 3]],
    )
    .expect("tetrahedron is well formed")
}

/// Unit-radius icosphere directions at the given subdivision level.
pub fn icosphere_directions(level: u32) -> (Vec<Point3>, Vec<[usize; 3]>) {
    let t = (1.0 + 5f64.sqrt()) / 2.0;
    let mut verts: Vec<Point3> = [
        (-1.0, t, 0.0),
        (1.0, t, 0.0),
        (-1.0, -t, 0.0),
        (1.0, -t, 0.0),
        (0.0, -1.0, t),
        (0.0, 1.0, t),
        (0.0, -1.0, -t),
        (0.0, 1.0, -t),
        (t, 0.0, -1.0),
        (t, 0.0, 1.0),
        (-t, 0.0, -1.0),
        (-t, 0.0, 1.0),
    ]
    .iter()
    .map(|&(x, y, z)| Point3::new(x, y, z).normalized())
    .collect();
    let mut faces: Vec<[usize; 3]> = vec![
        [0, 11, 5],
        [0, 5, 1],
        [0, 1, 7],
        [0, 7, 10],
        [0, 10, 11],
        [1, 5, 9],
        [5, 11, 4],
        [11, 10, 2],
        [10, 7, 6],
        [7, 1, 8],
        [3, 9, 4],
        [3, 4, 2],
        [3, 2, 6],
        [3, 6, 8],
        [3, 8, 9],
        [4, 9, 5],
        [2, 4, 11],
        [6, 2, 10],
        [8, 6, 7],
        [9, 8, 1],
    ];
    for _ in 0..level {
        let mut cache: HashMap<(usize, usize), usize> = HashMap::new();
        let mut mid = |a: usize, b: usize, verts: &mut Vec<Point3>| {
            let key = (a.min(b), a.max(b));
            *cache.entry(key).or_insert_with(|| {
                verts.push(((verts[a] + verts[b]) * 0.5).normalized());
                verts.len() - 1
            })
        };
        let mut next = Vec::with_capacity(faces.len() * 4);
        for &[a, b, c] in &faces {
            let ab = mid(a, b, &mut verts);
            let bc = mid(b, c, &mut verts);
            let ca = mid(c, a, &mut verts);
            next.extend_from_slice(&[[a, ab, ca], [b, bc, ab], [c, ca, bc], [ab, bc, ca]]);
        }
        faces = next;
    }
    (verts, faces)
}

/// Icosphere inscribed in the ball of `radius` around `center`: every vertex
/// lies on the sphere. Level 3 has 642 vertices.
pub fn icosphere(center: Point3, radius: f64, level: u32) -> Mesh {
    let (dirs, faces) = icosphere_directions(level);
    Mesh::new(dirs.iter().map(|&d| center + d * radius).collect(), faces).expect("icosphere is well formed")
}

/// Relative sag of the level-`level` icosphere: `1 − inradius / radius`,
/// i.e. how far its facet planes sit inside the true sphere.
pub fn icosphere_sag(level: u32) -> f64 {
    let (dirs, faces) = icosphere_directions(level);
    let inradius = faces
        .iter()
        .map(|&[a, b, c]| {
            let n = (dirs[b] - dirs[a]).cross(dirs[c] - dirs[a]).normalized();
            n.dot(dirs[a]).abs()
        })
        .fold(f64::INFINITY, f64::min);
    1.0 - inradius
}

/// Extrudes a simple counter-clockwise polygon in the xy-plane from `z0` to `z1`.
pub fn prism(outline: &[[f64; 2]], z0: f64, z1: f64) -> Mesh {
    let n = outline.len();
    let mut vertices: Vec<Point3> = outline.iter().map(|p| Point3::new(p[0], p[1], z0)).collect();
    vertices.extend(outline.iter().map(|p| Point3::new(p[0], p[1], z1)));
    let caps = triangulate_polygon_2d(outline);
    let mut triangles = Vec::new();
    for t in &caps {
        triangles.push([t[0], t[2], t[1]]);
        triangles.push([t[0] + n, t[1] + n, t[2] + n]);
    }
    for i in 0..n {
        let j = (i + 1) % n;
        triangles.push([i, j, j + n]);
        triangles.push([i, j + n, i + n]);
    }
    Mesh::new(vertices, triangles).expect("prism is well formed")
}

/// L-shaped prism: `[0,2]×[0,1] ∪ [0,1]×[0,2]` extruded over `z ∈ [0,1]`, volume 3.
pub fn l_prism() -> Mesh {
    prism(
        &[[0.0, 0.0], [2.0, 0.0], [2.0, 1.0], [1.0, 1.0], [1.0, 2.0], [0.0, 2.0]],
        0.0,
        1.0,
    )
}

/// Staircase of `k` unit steps: column `i` spans `x ∈ [i, i+1]`, `z ∈ [0, i+1]`,
/// `y ∈ [0, 1]`. Volume `k(k+1)/2`.
pub fn staircase(k: usize) -> Mesh {
    assert!(k >= 1);
    let kf = k as f64;
    // Profile in the xz-plane, counter-clockwise seen from −y.
    let mut profile = vec![[0.0, 0.0], [kf, 0.0], [kf, kf]];
    for i in (0..k).rev() {
        let x = i as f64;
        profile.push([x, x + 1.0]);
        if i > 0 {
            profile.push([x, x]);
        }
    }
    profile.dedup();
    // Extrude the profile as (u, v, w) and map it to (u, 1 − w, v), which
    // preserves orientation.
    let m = prism(&profile, 0.0, 1.0);
    m.mapped(|p| Point3::new(p.x, 1.0 - p.z, p.y))
}

/// Torus around the z-axis with major radius `major` and tube radius `minor`.
pub fn torus(major: f64, minor: f64, nu: usize, nv: usize) -> Mesh {
    let mut vertices = Vec::with_capacity(nu * nv);
    for i in 0..nu {
        let u = i as f64 / nu as f64 * std::f64::consts::TAU;
        for j in 0..nv {
            let v = j as f64 / nv as f64 * std::f64::consts::TAU;
            let r = major + minor * v.cos();
            vertices.push(Point3::new(r * u.cos(), r * u.sin(), minor * v.sin()));
        }
    }
    let id = |i: usize, j: usize| (i % nu) * nv + (j % nv);
    let mut triangles = Vec::with_capacity(2 * nu * nv);
    for i in 0..nu {
        for j in 0..nv {
            let (a, b, c, d) = (id(i, j), id(i + 1, j), id(i + 1, j + 1), id(i, j + 1));
            triangles.push([a, b, c]);
            triangles.push([a, c, d]);
        }
    }
    Mesh::new(vertices, triangles).expect("torus is well formed")
}

pub fn signed_area_2d(poly: &[[f64; 2]]) -> f64 {
    let n = poly.len();
    (0..n)
        .map(|i| {
            let (a, b) = (poly[i], poly[(i + 1) % n]);
            a[0] * b[1] - a[1] * b[0]
        })
        .sum::<f64>()
        * 0.5
}

/// Ear-clipping triangulation of a simple polygon. Output triangles are
/// counter-clockwise if the polygon is, clockwise otherwise.
pub fn triangulate_polygon_2d(poly: &[[f64; 2]]) -> Vec<[usize; 3]> {
    let n = poly.len();
    if n < 3 {
        return Vec::new();
    }
    let ccw = signed_area_2d(poly) >= 0.0;
    let p = |i: usize| {
        let q = poly[i];
        if ccw {
            q
        } else {
            [q[0], -q[1]]
        }
    };
    let mut idx: Vec<usize> = (0..n).collect();
    let mut out = Vec::with_capacity(n - 2);
    while idx.len() > 3 {
        let m = idx.len();
        let mut clipped = false;
        for strict in [true, false] {
            for k in 0..m {
                let (a, b, c) = (idx[(k + m - 1) % m], idx[k], idx[(k + 1) % m]);
                let o = orient2d(p(a), p(b), p(c));
                if o == Sign::Negative || (strict && o == Sign::Zero) {
                    continue;
                }
                let blocked = strict
                    && idx.iter().any(|&j| {
                        j != a
                            && j != b
                            && j != c
                            && orient2d(p(a), p(b), p(j)) != Sign::Negative
                            && orient2d(p(b), p(c), p(j)) != Sign::Negative
                            && orient2d(p(c), p(a), p(j)) != Sign::Negative
                    });
                if !blocked {
                    out.push([a, b, c]);
                    idx.remove(k);
                    clipped = true;
                    break;
                }
            }
            if clipped {
                break;
            }
        }
        if !clipped {
            // Not simple; fan what is left.
            for k in 1..idx.len() - 1 {
                out.push([idx[0], idx[k], idx[k + 1]]);
            }
            return out;
        }
    }
    out.push([idx[0], idx[1], idx[2]]);
    out
}

/// Newell normal of a (roughly planar) polygon.
pub fn newell_normal(pts: &[Point3]) -> Point3 {
    let n = pts.len();
    let mut nrm = Point3::ORIGIN;
    for i in 0..n {
        let (a, b) = (pts[i], pts[(i + 1) % n]);
        nrm.x += (a.y - b.y) * (a.z + b.z);
        nrm.y += (a.z - b.z) * (a.x + b.x);
        nrm.z += (a.x - b.x) * (a.y + b.y);
    }
    nrm
}

/// Triangulates a planar polygon in 3D, preserving its winding.
pub fn triangulate_polygon_3d(pts: &[Point3]) -> Vec<[usize; 3]> {
    if pts.len() == 3 {
        return vec![[0, 1, 2]];
    }
    let n = newell_normal(pts);
    let a = [n.x.abs(), n.y.abs(), n.z.abs()];
    let (i, j) = if a[0] >= a[1] && a[0] >= a[2] {
        (1, 2)
    } else if a[1] >= a[2] {
        (2, 0)
    } else {
        (0, 1)
    };
    let flat: Vec<[f64; 2]> = pts.iter().map(|p| [p[i], p[j]]).collect();
    triangulate_polygon_2d(&flat)
}
