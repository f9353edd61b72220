//! Surface–surface intersection curves.

use std::collections::{BTreeSet, HashMap};

use rayon::prelude::*;

use super::{AabbTree, IntersectionOutcome, Polyline};
use crate::error::Result;
use crate::exact::{self, Contact, ExactPoint, Rational};
use crate::mesh::Mesh;

/// Chains exact segments into maximal polylines.
///
/// Segments are split at every endpoint lying inside another segment and
/// deduplicated first, so overlapping input is handled. Chains break at
/// points where more or fewer than two sub-segments meet.
pub fn chain_segments(segments: &[(ExactPoint, ExactPoint)]) -> Vec<Polyline> {
    let mut ids: HashMap<ExactPoint, usize> = HashMap::new();
    let mut pts: Vec<ExactPoint> = Vec::new();
    let mut intern = |p: &ExactPoint, pts: &mut Vec<ExactPoint>| {
        *ids.entry(p.clone()).or_insert_with(|| {
            pts.push(p.clone());
            pts.len() - 1
        })
    };
    let raw: Vec<[usize; 2]> = segments
        .iter()
        .map(|(a, b)| [intern(a, &mut pts), intern(b, &mut pts)])
        .filter(|[a, b]| a != b)
        .collect();
    let approx: Vec<crate::geom::Point3> = pts.iter().map(|p| p.approx()).collect();

    let mut edges: BTreeSet<[usize; 2]> = BTreeSet::new();
    for &[a, b] in &raw {
        let bb = crate::geom::Aabb::from_points(&[approx[a], approx[b]]);
        let slack = bb.diagonal() * 1e-9 + 1e-300;
        let bb = bb.inflated(slack);
        let d = pts[b].sub(&pts[a]);
        let k = major(&d);
        let mut inner: Vec<(Rational, usize)> = (0..pts.len())
            .filter(|&i| i != a && i != b && bb.contains_point(approx[i]))
            .filter(|&i| exact::point_in_open_segment(&pts[i], &pts[a], &pts[b]))
            .map(|i| ((&pts[i].coords()[k] - &pts[a].coords()[k]) / &d[k], i))
            .collect();
        inner.sort();
        let mut chain = vec![a];
        chain.extend(inner.into_iter().map(|(_, i)| i));
        chain.push(b);
        for w in chain.windows(2) {
            edges.insert([w[0].min(w[1]), w[0].max(w[1])]);
        }
    }

    let mut adj: Vec<Vec<usize>> = vec![Vec::new(); pts.len()];
    for &[a, b] in &edges {
        adj[a].push(b);
        adj[b].push(a);
    }
    let mut used: BTreeSet<[usize; 2]> = BTreeSet::new();
    let mut out = Vec::new();
    let key = |a: usize, b: usize| [a.min(b), a.max(b)];
    // Open chains start at nodes of degree != 2; what is left are cycles.
    let starts: Vec<usize> = (0..pts.len())
        .filter(|&v| !adj[v].is_empty() && adj[v].len() != 2)
        .chain((0..pts.len()).filter(|&v| adj[v].len() == 2))
        .collect();
    for s in starts {
        for &first in &adj[s].clone() {
            if used.contains(&key(s, first)) {
                continue;
            }
            let mut chain = vec![s];
            let (mut prev, mut cur) = (s, first);
            used.insert(key(s, first));
            loop {
                if cur == s {
                    break;
                }
                chain.push(cur);
                if adj[cur].len() != 2 {
                    break;
                }
                let next = if adj[cur][0] == prev { adj[cur][1] } else { adj[cur][0] };
                if used.contains(&key(cur, next)) {
                    break;
                }
                used.insert(key(cur, next));
                prev = cur;
                cur = next;
            }
            let closed = cur == s;
            out.push(Polyline {
                points: chain.iter().map(|&i| approx[i]).collect(),
                closed,
            });
        }
    }
    out
}

fn major(d: &[Rational; 3]) -> usize {
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

/// Exact contacts between every pair of triangles of `a` and `b` whose
/// boxes overlap, in pair order.
pub(crate) fn surface_contacts(a: &Mesh, b: &Mesh) -> Vec<Contact> {
    let (ta, tb) = (AabbTree::for_mesh(a), AabbTree::for_mesh(b));
    let ea: Vec<ExactPoint> = a.vertices().iter().map(|&p| p.into()).collect();
    let eb: Vec<ExactPoint> = b.vertices().iter().map(|&p| p.into()).collect();
    ta.cross_pairs(&tb)
        .into_par_iter()
        .map(|(i, j)| {
            let x = a.triangles()[i];
            let y = b.triangles()[j];
            exact::triangle_triangle([&ea[x[0]], &ea[x[1]], &ea[x[2]]], [&eb[y[0]], &eb[y[1]], &eb[y[2]]])
        })
        .filter(|c| !c.is_empty())
        .collect()
}

/// Intersection curves of the boundaries of two closed solids.
///
/// Transversal contacts are chained into polylines (closed for closed,
/// transversally intersecting solids). Coplanar face overlaps are reported
/// per triangle pair as polygons instead; isolated touching points as points.
pub fn mesh_mesh_curve(a: &Mesh, b: &Mesh) -> Result<IntersectionOutcome> {
    a.check_closed_manifold()?;
    b.check_closed_manifold()?;
    let contacts = surface_contacts(a, b);
    let polygons: Vec<Vec<crate::geom::Point3>> = contacts
        .iter()
        .filter_map(|c| match c {
            Contact::Polygon(v) => Some(v.iter().map(|p| p.approx()).collect()),
            _ => None,
        })
        .collect();
    if !polygons.is_empty() {
        return Ok(IntersectionOutcome::Polygons(polygons));
    }
    let segments: Vec<(ExactPoint, ExactPoint)> = contacts
        .iter()
        .filter_map(|c| match c {
            Contact::Segment(p, q) => Some((p.clone(), q.clone())),
            _ => None,
        })
        .collect();
    if !segments.is_empty() {
        return Ok(IntersectionOutcome::Segments(chain_segments(&segments)));
    }
    let mut points: Vec<ExactPoint> = contacts
        .into_iter()
        .filter_map(|c| match c {
            Contact::Point(p) => Some(p),
            _ => None,
        })
        .collect();
    points.sort_by(|x, y| x.lex_cmp(y));
    points.dedup();
    if points.is_empty() {
        Ok(IntersectionOutcome::Empty)
    } else {
        Ok(IntersectionOutcome::Points(points.iter().map(|p| p.approx()).collect()))
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::geom::Point3;
    use crate::shapes;

    fn ep(x: f64, y: f64, z: f64) -> ExactPoint {
        Point3::new(x, y, z).into()
    }

    #[test]
    fn chains_split_and_close() {
        // A square drawn with one side split and one side duplicated.
        let segs = vec![
            (ep(0.0, 0.0, 0.0), ep(1.0, 0.0, 0.0)),
            (ep(1.0, 0.0, 0.0), ep(1.0, 1.0, 0.0)),
            (ep(1.0, 0.5, 0.0), ep(1.0, 1.0, 0.0)),
            (ep(1.0, 1.0, 0.0), ep(0.0, 1.0, 0.0)),
            (ep(0.0, 1.0, 0.0), ep(0.0, 0.0, 0.0)),
        ];
        let ls = chain_segments(&segs);
        assert_eq!(ls.len(), 1);
        assert!(ls[0].closed);
        assert!((ls[0].length() - 4.0).abs() < 1e-15);
        assert_eq!(ls[0].points.len(), 5);
    }

    #[test]
    fn open_chain() {
        let segs = vec![
            (ep(0.0, 0.0, 0.0), ep(1.0, 0.0, 0.0)),
            (ep(2.0, 0.0, 0.0), ep(1.0, 0.0, 0.0)),
        ];
        let ls = chain_segments(&segs);
        assert_eq!(ls.len(), 1);
        assert!(!ls[0].closed);
        assert_eq!(ls[0].points.len(), 3);
    }

    #[test]
    fn transversal_cubes_give_closed_square() {
        let a = shapes::unit_cube();
        let b = shapes::cuboid(Point3::new(0.5, -0.5, -0.5), Point3::new(1.5, 1.5, 1.5));
        match mesh_mesh_curve(&a, &b).unwrap() {
            IntersectionOutcome::Segments(ls) => {
                assert_eq!(ls.len(), 1);
                assert!(ls[0].closed);
                assert!((ls[0].length() - 4.0).abs() < 1e-12);
                assert!(ls[0].points.iter().all(|p| p.x == 0.5));
            }
            other => panic!("unexpected {other:?}"),
        }
    }

    #[test]
    fn offset_cubes_share_faces() {
        let a = shapes::unit_cube();
        let b = a.translated(Point3::new(0.5, 0.0, 0.0));
        assert!(matches!(
            mesh_mesh_curve(&a, &b).unwrap(),
            IntersectionOutcome::Polygons(_)
        ));
        let far = a.translated(Point3::new(5.0, 0.0, 0.0));
        assert!(mesh_mesh_curve(&a, &far).unwrap().is_empty());
    }
}
