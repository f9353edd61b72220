//! Mutual refinement of two triangle meshes along their intersection.
//!
//! Every triangle of either mesh is retriangulated so that the intersection
//! curve (and the boundary of any coplanar overlap) is made of edges, with
//! vertex ids shared through one exact point table. Afterwards no triangle
//! crosses the other surface: each refined triangle lies entirely inside,
//! outside, or on it.

use std::collections::{BTreeSet, HashMap};

use rayon::prelude::*;

use super::cdt;
use crate::error::Result;
use crate::exact::{self, Contact, ExactPoint, Projection, Rational};
use crate::geom::Aabb;
use crate::intersect::AabbTree;
use crate::mesh::Mesh;
use crate::predicates::Sign;

#[derive(Debug, Default)]
pub(crate) struct PointTable {
    pub points: Vec<ExactPoint>,
    ids: HashMap<ExactPoint, usize>,
}

impl PointTable {
    pub fn intern(&mut self, p: &ExactPoint) -> usize {
        if let Some(&i) = self.ids.get(p) {
            return i;
        }
        self.points.push(p.clone());
        self.ids.insert(p.clone(), self.points.len() - 1);
        self.points.len() - 1
    }
}

/// One refined mesh: triangles over the shared point table, each remembering
/// the input triangle it came from.
#[derive(Debug, Default)]
pub(crate) struct Side {
    pub tris: Vec<[usize; 3]>,
    pub parent: Vec<usize>,
    /// Input triangles as point-table ids.
    pub input: Vec<[usize; 3]>,
}

#[derive(Debug)]
pub(crate) struct Arrangement {
    pub table: PointTable,
    pub sides: [Side; 2],
    /// Undirected edges (`[lo, hi]`) lying on the intersection of the surfaces.
    pub curve: BTreeSet<[usize; 2]>,
}

#[derive(Default, Clone)]
struct Work {
    points: Vec<usize>,
    constraints: Vec<[usize; 2]>,
}

fn pad_box(p: &ExactPoint) -> Aabb {
    let a = p.approx();
    let m = a.x.abs().max(a.y.abs()).max(a.z.abs());
    Aabb::from_points(&[a]).inflated(1e-12 * (1.0 + m))
}

pub(crate) fn arrange(a: &Mesh, b: &Mesh) -> Result<Arrangement> {
    let mut table = PointTable::default();
    let inputs = [a, b];
    let ids: Vec<Vec<usize>> = inputs
        .iter()
        .map(|m| m.vertices().iter().map(|&p| table.intern(&p.into())).collect())
        .collect();
    let input: Vec<Vec<[usize; 3]>> = inputs
        .iter()
        .zip(&ids)
        .map(|(m, ix)| m.triangles().iter().map(|t| t.map(|k| ix[k])).collect())
        .collect();
    let trees = [AabbTree::for_mesh(a), AabbTree::for_mesh(b)];

    let pairs = trees[0].cross_pairs(&trees[1]);
    let contacts: Vec<(usize, usize, Contact)> = {
        let pts = &table.points;
        pairs
            .into_par_iter()
            .filter_map(|(i, j)| {
                let (x, y) = (input[0][i], input[1][j]);
                let c = exact::triangle_triangle(
                    [&pts[x[0]], &pts[x[1]], &pts[x[2]]],
                    [&pts[y[0]], &pts[y[1]], &pts[y[2]]],
                );
                (!c.is_empty()).then_some((i, j, c))
            })
            .collect()
    };

    let mut work: [Vec<Work>; 2] = [
        vec![Work::default(); input[0].len()],
        vec![Work::default(); input[1].len()],
    ];
    let mut curve_points: BTreeSet<usize> = BTreeSet::new();
    for (i, j, c) in &contacts {
        let ix: Vec<usize> = c.points().into_iter().map(|p| table.intern(p)).collect();
        curve_points.extend(ix.iter().copied());
        let mut cons = Vec::new();
        match c {
            Contact::Segment(..) => cons.push([ix[0], ix[1]]),
            Contact::Polygon(_) => {
                for k in 0..ix.len() {
                    cons.push([ix[k], ix[(k + 1) % ix.len()]]);
                }
            }
            _ => {}
        }
        for (s, t) in [(0, *i), (1, *j)] {
            work[s][t].points.extend(ix.iter().copied());
            work[s][t].constraints.extend(cons.iter().copied());
        }
    }

    // Every contact point is inserted into every triangle whose closure holds
    // it, so neighbouring triangles are refined consistently.
    let pts = &table.points;
    let hits: Vec<[Vec<usize>; 2]> = curve_points
        .par_iter()
        .map(|&g| {
            let bx = pad_box(&pts[g]);
            let mut out: [Vec<usize>; 2] = [Vec::new(), Vec::new()];
            for s in 0..2 {
                for t in trees[s].query_box(&bx) {
                    let v = input[s][t];
                    if v.contains(&g) {
                        continue;
                    }
                    if exact::point_on_triangle(&pts[g], [&pts[v[0]], &pts[v[1]], &pts[v[2]]]) {
                        out[s].push(t);
                    }
                }
            }
            out
        })
        .collect();
    for (&g, h) in curve_points.iter().zip(&hits) {
        for s in 0..2 {
            for &t in &h[s] {
                work[s][t].points.push(g);
            }
        }
    }

    let mut curve: BTreeSet<[usize; 2]> = BTreeSet::new();
    let mut sides: [Side; 2] = [Side::default(), Side::default()];
    for s in 0..2 {
        let results: Vec<Result<(Vec<[usize; 3]>, Vec<[usize; 2]>)>> = work[s]
            .par_iter()
            .enumerate()
            .map(|(t, w)| refine(input[s][t], w, pts))
            .collect();
        for (t, r) in results.into_iter().enumerate() {
            let (tris, cons) = r?;
            for tri in tris {
                sides[s].tris.push(tri);
                sides[s].parent.push(t);
            }
            for [u, v] in cons {
                curve.insert([u.min(v), u.max(v)]);
            }
        }
        sides[s].input = input[s].clone();
    }
    Ok(Arrangement { table, sides, curve })
}

/// Retriangulates one input triangle; returns the pieces (oriented like the
/// input) and the constraint sub-edges.
fn refine(corners: [usize; 3], w: &Work, pts: &[ExactPoint]) -> Result<(Vec<[usize; 3]>, Vec<[usize; 2]>)> {
    let mut extra: Vec<usize> = w.points.iter().copied().filter(|g| !corners.contains(g)).collect();
    extra.sort_unstable();
    extra.dedup();
    if extra.is_empty() && w.constraints.is_empty() {
        return Ok((vec![corners], Vec::new()));
    }
    let proj = Projection::for_triangle(&pts[corners[0]], &pts[corners[1]], &pts[corners[2]]);
    let ccw = proj.orient2d(&pts[corners[0]], &pts[corners[1]], &pts[corners[2]]) == Sign::Positive;
    let mut local: Vec<usize> = if ccw {
        corners.to_vec()
    } else {
        vec![corners[0], corners[2], corners[1]]
    };
    local.extend(extra);
    let index: HashMap<usize, usize> = local.iter().enumerate().map(|(k, &g)| (g, k)).collect();

    // Split constraints at the points lying inside them.
    let mut pieces: BTreeSet<[usize; 2]> = BTreeSet::new();
    for &[u, v] in &w.constraints {
        if u == v {
            continue;
        }
        let d = pts[v].sub(&pts[u]);
        let k = major_axis(&d);
        let mut inner: Vec<(Rational, usize)> = local
            .iter()
            .copied()
            .filter(|&g| g != u && g != v && exact::point_in_open_segment(&pts[g], &pts[u], &pts[v]))
            .map(|g| ((&pts[g].coords()[k] - &pts[u].coords()[k]) / &d[k], g))
            .collect();
        inner.sort();
        let mut chain = vec![u];
        chain.extend(inner.into_iter().map(|(_, g)| g));
        chain.push(v);
        for e in chain.windows(2) {
            pieces.insert([e[0].min(e[1]), e[0].max(e[1])]);
        }
    }
    let refs: Vec<&ExactPoint> = local.iter().map(|&g| &pts[g]).collect();
    let cons: Vec<[usize; 2]> = pieces.iter().map(|e| [index[&e[0]], index[&e[1]]]).collect();
    let tris = cdt::triangulate(&refs, &cons, proj)?;
    let out = tris
        .into_iter()
        .map(|t| {
            let g = t.map(|k| local[k]);
            if ccw {
                g
            } else {
                [g[0], g[2], g[1]]
            }
        })
        .collect();
    Ok((out, pieces.into_iter().collect()))
}

fn major_axis(d: &[Rational; 3]) -> usize {
    use num_traits::Signed;
    let a: Vec<Rational> = d.iter().map(|v| v.abs()).collect();
    if a[0] >= a[1] && a[0] >= a[2] {
        0
    } else if a[1] >= a[2] {
        1
    } else {
        2
    }
}
