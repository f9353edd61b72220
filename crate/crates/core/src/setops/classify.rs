//! Inside/outside/on classification of refined surface regions.

use std::collections::HashMap;

use num_traits::{Signed, Zero};

use super::arrangement::Arrangement;
use crate::error::{Error, Result};
use crate::exact::{self, ExactPoint, Rational};
use crate::geom::{Aabb, Point3};
use crate::intersect::AabbTree;
use crate::mesh::Mesh;
use crate::predicates::Sign;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub(crate) enum Class {
    In,
    Out,
    /// On the other surface with the same outward direction.
    OnSame,
    /// On the other surface with the opposite outward direction.
    OnOpposite,
}

fn find(parent: &mut [usize], mut x: usize) -> usize {
    while parent[x] != x {
        parent[x] = parent[parent[x]];
        x = parent[x];
    }
    x
}

/// Connected regions of one side, split along the intersection curve.
fn regions(arr: &Arrangement, side: usize) -> Vec<Vec<usize>> {
    let tris = &arr.sides[side].tris;
    let mut parent: Vec<usize> = (0..tris.len()).collect();
    let mut by_edge: HashMap<[usize; 2], usize> = HashMap::new();
    for (i, t) in tris.iter().enumerate() {
        for k in 0..3 {
            let (u, v) = (t[k], t[(k + 1) % 3]);
            let e = [u.min(v), u.max(v)];
            if arr.curve.contains(&e) {
                continue;
            }
            match by_edge.get(&e) {
                Some(&j) => {
                    let (a, b) = (find(&mut parent, i), find(&mut parent, j));
                    if a != b {
                        parent[a.max(b)] = a.min(b);
                    }
                }
                None => {
                    by_edge.insert(e, i);
                }
            }
        }
    }
    let mut groups: Vec<Vec<usize>> = Vec::new();
    let mut slot: HashMap<usize, usize> = HashMap::new();
    for i in 0..tris.len() {
        let r = find(&mut parent, i);
        let g = *slot.entry(r).or_insert_with(|| {
            groups.push(Vec::new());
            groups.len() - 1
        });
        groups[g].push(i);
    }
    groups
}

fn ray_direction(k: usize) -> Point3 {
    let g = 2.399_963_229_728_653_f64;
    let t = k as f64 + 0.381_966_011_250_105;
    let z = 1.0 - 2.0 * ((t * 0.618_033_988_749_895) % 1.0);
    let r = (1.0 - z * z).max(0.0).sqrt();
    let a = g * t + 0.271_828_182_845_904;
    Point3::new(r * a.cos(), r * a.sin(), z).normalized()
}

enum Verdict {
    Class(Class),
    /// The sample point touches the other surface without lying in a
    /// coplanar region; another sample is needed.
    Ambiguous,
}

struct Target<'a> {
    mesh: &'a Mesh,
    tree: AabbTree,
    pts: Vec<ExactPoint>,
}

impl<'a> Target<'a> {
    fn tri(&self, t: usize) -> [&ExactPoint; 3] {
        let v = self.mesh.triangles()[t];
        [&self.pts[v[0]], &self.pts[v[1]], &self.pts[v[2]]]
    }

    fn classify(&self, c: &ExactPoint, plane: [&ExactPoint; 3]) -> Verdict {
        let ca = c.approx();
        let m = ca.x.abs().max(ca.y.abs()).max(ca.z.abs());
        let bx = Aabb::from_points(&[ca]).inflated(1e-12 * (1.0 + m));
        for t in self.tree.query_box(&bx) {
            let tri = self.tri(t);
            if exact::point_on_triangle(c, tri) {
                let coplanar = plane
                    .iter()
                    .all(|p| exact::orient3d(tri[0], tri[1], tri[2], p) == Sign::Zero);
                if !coplanar {
                    return Verdict::Ambiguous;
                }
                let n1 = exact::exact_normal(plane[0], plane[1], plane[2]);
                let n2 = exact::exact_normal(tri[0], tri[1], tri[2]);
                let dot: Rational = (0..3).map(|k| &n1[k] * &n2[k]).fold(Rational::zero(), |a, b| a + b);
                return Verdict::Class(if dot.is_positive() {
                    Class::OnSame
                } else {
                    Class::OnOpposite
                });
            }
        }
        let root = self.tree.root_box();
        if !root.contains_point(ca) && !root.inflated(1e-9 * (1.0 + m)).contains_point(ca) {
            return Verdict::Class(Class::Out);
        }
        let reach = 2.0 * root.diagonal() + ca.distance(root.center()) + 1.0;
        'dirs: for k in 0..64 {
            let qf = ca + ray_direction(k) * reach;
            let q = ExactPoint::from_point(qf);
            let mut parity = false;
            let slack = 1e-9 * (1.0 + m + reach);
            for t in self.tree.query_box(&Aabb::from_points(&[ca, qf]).inflated(slack)) {
                if !self.tree.primitive_box(t).inflated(slack).intersects_segment(ca, qf) {
                    continue;
                }
                match crossing(c, &q, self.tri(t)) {
                    Some(true) => parity = !parity,
                    Some(false) => {}
                    None => continue 'dirs,
                }
            }
            return Verdict::Class(if parity { Class::In } else { Class::Out });
        }
        Verdict::Ambiguous
    }
}

/// Whether segment `p → q` crosses triangle `t` properly; `None` when it
/// touches an edge or vertex or lies in its plane.
fn crossing(p: &ExactPoint, q: &ExactPoint, t: [&ExactPoint; 3]) -> Option<bool> {
    let sp = exact::orient3d(t[0], t[1], t[2], p);
    let sq = exact::orient3d(t[0], t[1], t[2], q);
    if sp == sq && sp != Sign::Zero {
        return Some(false);
    }
    if sp == Sign::Zero || sq == Sign::Zero {
        return if exact::segment_triangle(p, q, t).is_empty() {
            Some(false)
        } else {
            None
        };
    }
    let e = [
        exact::orient3d(p, q, t[0], t[1]),
        exact::orient3d(p, q, t[1], t[2]),
        exact::orient3d(p, q, t[2], t[0]),
    ];
    if e.contains(&Sign::Positive) && e.contains(&Sign::Negative) {
        Some(false)
    } else if e.contains(&Sign::Zero) {
        None
    } else {
        Some(true)
    }
}

fn approx_area(pts: &[ExactPoint], t: [usize; 3]) -> f64 {
    let (a, b, c) = (pts[t[0]].approx(), pts[t[1]].approx(), pts[t[2]].approx());
    (b - a).cross(c - a).norm()
}

/// Class of every refined triangle of `side` with respect to `other`.
pub(crate) fn classify_side(arr: &Arrangement, side: usize, other: &Mesh) -> Result<Vec<Class>> {
    let target = Target {
        mesh: other,
        tree: AabbTree::for_mesh(other),
        pts: other.vertices().iter().map(|&p| p.into()).collect(),
    };
    let s = &arr.sides[side];
    let pts = &arr.table.points;
    let mut out = vec![Class::Out; s.tris.len()];
    if other.is_empty() {
        return Ok(out);
    }
    for region in regions(arr, side) {
        let mut order = region.clone();
        order.sort_by(|&i, &j| {
            approx_area(pts, s.tris[j])
                .total_cmp(&approx_area(pts, s.tris[i]))
                .then(i.cmp(&j))
        });
        let mut verdict = None;
        for &i in order.iter().take(16) {
            let t = s.tris[i];
            let c = ExactPoint::centroid(&[&pts[t[0]], &pts[t[1]], &pts[t[2]]]);
            let p = s.input[s.parent[i]];
            if let Verdict::Class(k) = target.classify(&c, [&pts[p[0]], &pts[p[1]], &pts[p[2]]]) {
                verdict = Some(k);
                break;
            }
        }
        let Some(k) = verdict else {
            return Err(Error::InvalidInput(
                "could not classify a surface region (degenerate input?)".into(),
            ));
        };
        for i in region {
            out[i] = k;
        }
    }
    Ok(out)
}
