//! Quickhull with exact orientation predicates.

use std::collections::HashMap;

use crate::error::{Error, Result};
use crate::geom::Point3;
use crate::predicates::{collinear3, orient2d, orient3d_unchecked as o3, orient3d_value, Sign};

/// Hull facets as vertex-index rings into the input, wound counter-clockwise
/// seen from outside. Ring vertices are strictly convex (no collinear points).
pub(crate) struct RawHull {
    pub rings: Vec<Vec<usize>>,
}

/// Affine dimension of a point set together with a witness simplex.
pub(crate) fn affine_frame(points: &[Point3]) -> (usize, Vec<usize>) {
    if points.is_empty() {
        return (0, Vec::new());
    }
    let p0 = (0..points.len())
        .min_by(|&i, &j| points[i].lex_cmp(&points[j]).then(i.cmp(&j)))
        .unwrap();
    let far = |cands: &mut dyn Iterator<Item = usize>, score: &dyn Fn(usize) -> f64| {
        cands.fold(None, |best: Option<(usize, f64)>, i| {
            let s = score(i);
            match best {
                Some((_, b)) if b >= s => best,
                _ => Some((i, s)),
            }
        })
    };
    let a = points[p0];
    let Some((p1, _)) = far(&mut (0..points.len()).filter(|&i| points[i].bits() != a.bits()), &|i| {
        points[i].distance(a)
    }) else {
        return (0, vec![p0]);
    };
    let b = points[p1];
    let Some((p2, _)) = far(&mut (0..points.len()).filter(|&i| !collinear3(a, b, points[i])), &|i| {
        (b - a).cross(points[i] - a).norm()
    }) else {
        return (1, vec![p0, p1]);
    };
    let c = points[p2];
    let Some((p3, _)) = far(
        &mut (0..points.len()).filter(|&i| o3(a, b, c, points[i]) != Sign::Zero),
        &|i| orient3d_value(a, b, c, points[i]).abs(),
    ) else {
        return (2, vec![p0, p1, p2]);
    };
    (3, vec![p0, p1, p2, p3])
}

struct Face {
    v: [usize; 3],
    alive: bool,
    outside: Vec<usize>,
}

/// Computes the hull of points spanning three dimensions.
pub(crate) fn quickhull(points: &[Point3]) -> Result<RawHull> {
    for p in points {
        p.check_finite()?;
    }
    let (dim, s) = affine_frame(points);
    if dim < 3 {
        return Err(Error::Degenerate { dimension: dim });
    }
    let pt = |i: usize| points[i];
    let orient = |f: &[usize; 3], p: usize| o3(pt(f[0]), pt(f[1]), pt(f[2]), pt(p));

    let (a, b, c, d) = (s[0], s[1], s[2], s[3]);
    // Outward faces have the opposite vertex on their negative side.
    let base = if orient(&[a, b, c], d) == Sign::Negative {
        [[a, b, c], [a, d, b], [b, d, c], [c, d, a]]
    } else {
        [[a, c, b], [a, b, d], [b, c, d], [c, a, d]]
    };
    let mut faces: Vec<Face> = base
        .iter()
        .map(|&v| Face {
            v,
            alive: true,
            outside: Vec::new(),
        })
        .collect();
    let mut edge_face: HashMap<(usize, usize), usize> = HashMap::new();
    for (fi, f) in faces.iter().enumerate() {
        for k in 0..3 {
            edge_face.insert((f.v[k], f.v[(k + 1) % 3]), fi);
        }
    }
    for p in 0..points.len() {
        if s.contains(&p) {
            continue;
        }
        if let Some(fi) = (0..4).find(|&fi| orient(&faces[fi].v, p) == Sign::Positive) {
            faces[fi].outside.push(p);
        }
    }

    let mut fi = 0;
    while fi < faces.len() {
        if !faces[fi].alive || faces[fi].outside.is_empty() {
            fi += 1;
            continue;
        }
        let fv = faces[fi].v;
        let eye = *faces[fi]
            .outside
            .iter()
            .max_by(|&&i, &&j| {
                orient3d_value(pt(fv[0]), pt(fv[1]), pt(fv[2]), pt(i))
                    .total_cmp(&orient3d_value(pt(fv[0]), pt(fv[1]), pt(fv[2]), pt(j)))
                    .then(j.cmp(&i))
            })
            .unwrap();

        // Faces seeing the eye, grown through faces whose plane contains it.
        let mut region = vec![fi];
        let mut in_region: HashMap<usize, bool> = HashMap::from([(fi, true)]);
        let mut horizon: Vec<(usize, usize)> = Vec::new();
        let mut k = 0;
        while k < region.len() {
            let f = faces[region[k]].v;
            for e in 0..3 {
                let (u, v) = (f[e], f[(e + 1) % 3]);
                let g = edge_face[&(v, u)];
                match in_region.get(&g) {
                    Some(true) => {}
                    Some(false) => horizon.push((u, v)),
                    None => {
                        if orient(&faces[g].v, eye) != Sign::Negative {
                            in_region.insert(g, true);
                            region.push(g);
                        } else {
                            in_region.insert(g, false);
                            horizon.push((u, v));
                        }
                    }
                }
            }
            k += 1;
        }
        // An edge seen twice from the region (via two faces) is interior.
        horizon.retain(|&(u, v)| in_region.get(&edge_face[&(v, u)]) != Some(&true));

        let mut orphans = Vec::new();
        for &r in &region {
            faces[r].alive = false;
            orphans.append(&mut faces[r].outside);
            let f = faces[r].v;
            for e in 0..3 {
                let key = (f[e], f[(e + 1) % 3]);
                if edge_face.get(&key) == Some(&r) {
                    edge_face.remove(&key);
                }
            }
        }
        let first_new = faces.len();
        for &(u, v) in &horizon {
            let id = faces.len();
            faces.push(Face {
                v: [u, v, eye],
                alive: true,
                outside: Vec::new(),
            });
            edge_face.insert((u, v), id);
            edge_face.insert((v, eye), id);
            edge_face.insert((eye, u), id);
        }
        orphans.sort_unstable();
        for p in orphans {
            if p == eye {
                continue;
            }
            if let Some(g) = (first_new..faces.len()).find(|&g| orient(&faces[g].v, p) == Sign::Positive) {
                faces[g].outside.push(p);
            }
        }
        fi += 1;
    }

    let alive: Vec<usize> = (0..faces.len()).filter(|&i| faces[i].alive).collect();
    Ok(RawHull {
        rings: merge_coplanar(points, &faces, &alive, &edge_face),
    })
}

fn find(parent: &mut [usize], mut x: usize) -> usize {
    while parent[x] != x {
        parent[x] = parent[parent[x]];
        x = parent[x];
    }
    x
}

/// Groups coplanar neighbouring triangles and returns one convex ring per group.
fn merge_coplanar(
    points: &[Point3],
    faces: &[Face],
    alive: &[usize],
    edge_face: &HashMap<(usize, usize), usize>,
) -> Vec<Vec<usize>> {
    let slot: HashMap<usize, usize> = alive.iter().enumerate().map(|(k, &f)| (f, k)).collect();
    let mut parent: Vec<usize> = (0..alive.len()).collect();
    for (k, &f) in alive.iter().enumerate() {
        let v = faces[f].v;
        for e in 0..3 {
            let g = edge_face[&(v[(e + 1) % 3], v[e])];
            let w = faces[g].v;
            let opposite = w.iter().copied().find(|x| !v.contains(x)).unwrap();
            if o3(points[v[0]], points[v[1]], points[v[2]], points[opposite]) == Sign::Zero {
                let (a, b) = (find(&mut parent, k), find(&mut parent, slot[&g]));
                if a != b {
                    parent[a.max(b)] = a.min(b);
                }
            }
        }
    }
    let mut groups: Vec<Vec<usize>> = Vec::new();
    let mut group_of: HashMap<usize, usize> = HashMap::new();
    for k in 0..alive.len() {
        let r = find(&mut parent, k);
        let g = *group_of.entry(r).or_insert_with(|| {
            groups.push(Vec::new());
            groups.len() - 1
        });
        groups[g].push(alive[k]);
    }
    groups
        .iter()
        .map(|tris| {
            let v0 = faces[tris[0]].v;
            let (a, b, c) = (points[v0[0]], points[v0[1]], points[v0[2]]);
            let n = (b - a).cross(c - a);
            let drop = if n.x.abs() >= n.y.abs() && n.x.abs() >= n.z.abs() {
                0
            } else if n.y.abs() >= n.z.abs() {
                1
            } else {
                2
            };
            let proj = |p: Point3| match drop {
                0 => [p.y, p.z],
                1 => [p.z, p.x],
                _ => [p.x, p.y],
            };
            let mut ids: Vec<usize> = tris.iter().flat_map(|&t| faces[t].v).collect();
            ids.sort_unstable();
            ids.dedup();
            let mut ring = convex_ring_2d(&ids, |i| proj(points[i]));
            if orient2d(proj(a), proj(b), proj(c)) == Sign::Negative {
                ring.reverse();
            }
            // Canonical start: smallest index.
            let m = (0..ring.len()).min_by_key(|&i| ring[i]).unwrap();
            ring.rotate_left(m);
            ring
        })
        .collect()
}

/// Strict convex hull (counter-clockwise, collinear points dropped) of
/// projected points, by monotone chain.
pub(crate) fn convex_ring_2d(ids: &[usize], xy: impl Fn(usize) -> [f64; 2]) -> Vec<usize> {
    let mut v: Vec<usize> = ids.to_vec();
    v.sort_by(|&i, &j| {
        let (p, q) = (xy(i), xy(j));
        p[0].total_cmp(&q[0]).then(p[1].total_cmp(&q[1])).then(i.cmp(&j))
    });
    v.dedup_by(|a, b| xy(*a) == xy(*b));
    if v.len() < 3 {
        return v;
    }
    let mut lower: Vec<usize> = Vec::new();
    for &i in &v {
        while lower.len() >= 2
            && orient2d(xy(lower[lower.len() - 2]), xy(lower[lower.len() - 1]), xy(i)) != Sign::Positive
        {
            lower.pop();
        }
        lower.push(i);
    }
    let mut upper: Vec<usize> = Vec::new();
    for &i in v.iter().rev() {
        while upper.len() >= 2
            && orient2d(xy(upper[upper.len() - 2]), xy(upper[upper.len() - 1]), xy(i)) != Sign::Positive
        {
            upper.pop();
        }
        upper.push(i);
    }
    lower.pop();
    upper.pop();
    lower.extend(upper);
    lower
}
