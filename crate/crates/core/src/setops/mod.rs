//! Regularized boolean operations on solids.
//!
//! Both surfaces are cut along their exact intersection, each resulting
//! region is classified against the other solid (inside, outside, or on a
//! coplanar face with the same or opposite orientation), and the regions
//! that bound the result are kept. Coordinates created by the cut are
//! rounded to `f64` only at output.

mod arrangement;
mod cdt;
mod classify;

use std::collections::HashMap;

use rayon::prelude::*;

use crate::error::{Error, Result};
use crate::geom::Point3;
use crate::mesh::Mesh;
use classify::Class;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum BooleanKind {
    Union,
    Meet,
    Difference,
    SymmetricDifference,
}

impl BooleanKind {
    pub const ALL: [BooleanKind; 4] = [
        BooleanKind::Union,
        BooleanKind::Meet,
        BooleanKind::Difference,
        BooleanKind::SymmetricDifference,
    ];

    pub fn name(self) -> &'static str {
        match self {
            BooleanKind::Union => "union",
            BooleanKind::Meet => "meet",
            BooleanKind::Difference => "difference",
            BooleanKind::SymmetricDifference => "symmetric-difference",
        }
    }

    pub fn parse(s: &str) -> Option<BooleanKind> {
        BooleanKind::ALL.into_iter().find(|k| k.name() == s).or(match s {
            "intersection" => Some(BooleanKind::Meet),
            "xor" | "symdiff" => Some(BooleanKind::SymmetricDifference),
            _ => None,
        })
    }
}

fn check_inputs(entities: &[&Mesh]) -> Result<()> {
    for (index, m) in entities.iter().enumerate() {
        m.check_solid().map_err(|e| Error::InvalidEntity {
            index,
            source: Box::new(e),
        })?;
    }
    Ok(())
}

/// Which refined regions of each side bound the result.
fn keep(kind: BooleanKind, side: usize, class: Class) -> Option<bool> {
    // Some(flip) when kept.
    match (kind, side, class) {
        (BooleanKind::Union, _, Class::Out) => Some(false),
        (BooleanKind::Union, 0, Class::OnSame) => Some(false),
        (BooleanKind::Meet, _, Class::In) => Some(false),
        (BooleanKind::Meet, 0, Class::OnSame) => Some(false),
        (BooleanKind::Difference, 0, Class::Out) => Some(false),
        (BooleanKind::Difference, 0, Class::OnOpposite) => Some(false),
        (BooleanKind::Difference, 1, Class::In) => Some(true),
        _ => None,
    }
}

fn binary(a: &Mesh, b: &Mesh, kind: BooleanKind) -> Result<Mesh> {
    debug_assert!(kind != BooleanKind::SymmetricDifference);
    if a.is_empty() || b.is_empty() || !a.aabb().overlaps(&b.aabb()) {
        return Ok(match kind {
            BooleanKind::Union => {
                if a.is_empty() {
                    b.clone()
                } else if b.is_empty() {
                    a.clone()
                } else {
                    Mesh::concat([a, b])
                }
            }
            BooleanKind::Meet => Mesh::empty(),
            _ => a.clone(),
        });
    }
    let arr = arrangement::arrange(a, b)?;
    let classes = [
        classify::classify_side(&arr, 0, b)?,
        classify::classify_side(&arr, 1, a)?,
    ];
    let mut selected: Vec<[usize; 3]> = Vec::new();
    for side in 0..2 {
        for (t, &c) in arr.sides[side].tris.iter().zip(&classes[side]) {
            if let Some(flip) = keep(kind, side, c) {
                selected.push(if flip { [t[0], t[2], t[1]] } else { *t });
            }
        }
    }
    Ok(finish(&arr.table.points, &selected))
}

/// Rounds the selected triangles to `f64`, welds coincident vertices and
/// drops triangles that collapsed.
fn finish(points: &[crate::exact::ExactPoint], tris: &[[usize; 3]]) -> Mesh {
    let mut index: HashMap<[u64; 3], usize> = HashMap::new();
    let mut vertices = Vec::new();
    let mut remap: HashMap<usize, usize> = HashMap::new();
    let mut out = Vec::with_capacity(tris.len());
    for t in tris {
        let v = t.map(|g| {
            *remap.entry(g).or_insert_with(|| {
                let p = points[g].approx();
                *index.entry(p.bits()).or_insert_with(|| {
                    vertices.push(p);
                    vertices.len() - 1
                })
            })
        });
        if v[0] != v[1] && v[1] != v[2] && v[0] != v[2] {
            out.push(v);
        }
    }
    // Slivers flattened by rounding leave coincident opposite triangles.
    let key = |t: &[usize; 3]| {
        let mut k = *t;
        k.sort_unstable();
        k
    };
    let parity = |t: &[usize; 3]| {
        let k = (0..3).min_by_key(|&i| t[i]).unwrap_or(0);
        t[(k + 1) % 3] < t[(k + 2) % 3]
    };
    let mut groups: HashMap<[usize; 3], (Vec<usize>, Vec<usize>)> = HashMap::new();
    for (i, t) in out.iter().enumerate() {
        let g = groups.entry(key(t)).or_default();
        if parity(t) {
            g.0.push(i);
        } else {
            g.1.push(i);
        }
    }
    let mut drop = vec![false; out.len()];
    for (pos, neg) in groups.values() {
        for (&i, &j) in pos.iter().zip(neg) {
            drop[i] = true;
            drop[j] = true;
        }
    }
    let out: Vec<[usize; 3]> = out.into_iter().zip(drop).filter(|(_, d)| !d).map(|(t, _)| t).collect();
    let (vertices, out) = split_pinches(vertices, out);
    Mesh::new(vertices, out)
        .expect("rounded coordinates are finite")
        .compacted()
}

/// Separates parts that touch only along edges or at vertices.
///
/// Around an edge shared by more than two triangles, each triangle is paired
/// with its angular neighbour on its inner side; then every vertex gets one
/// copy per fan of triangle corners connected through paired edges.
fn split_pinches(mut vertices: Vec<Point3>, tris: Vec<[usize; 3]>) -> (Vec<Point3>, Vec<[usize; 3]>) {
    let mut incidence: HashMap<[usize; 2], Vec<(usize, bool)>> = HashMap::new();
    for (ti, t) in tris.iter().enumerate() {
        for k in 0..3 {
            let (a, b) = (t[k], t[(k + 1) % 3]);
            incidence.entry([a.min(b), a.max(b)]).or_default().push((ti, a < b));
        }
    }
    // Linked triangle pairs per edge.
    let mut links: Vec<([usize; 2], usize, usize)> = Vec::new();
    for (&e, inc) in &incidence {
        if inc.len() == 2 {
            links.push((e, inc[0].0, inc[1].0));
            continue;
        }
        let (a, b) = (vertices[e[0]], vertices[e[1]]);
        let d = (b - a).normalized();
        let e1 = if d.x.abs() < 0.9 {
            Point3::new(1.0, 0.0, 0.0)
        } else {
            Point3::new(0.0, 1.0, 0.0)
        };
        let e1 = (e1 - d * d.dot(e1)).normalized();
        let e2 = d.cross(e1);
        let mut around: Vec<(f64, usize, bool)> = inc
            .iter()
            .map(|&(t, fwd)| {
                let c = tris[t]
                    .iter()
                    .copied()
                    .find(|&v| v != e[0] && v != e[1])
                    .expect("triangle has a third vertex");
                let u = vertices[c] - a;
                (u.dot(e2).atan2(u.dot(e1)), t, fwd)
            })
            .collect();
        around.sort_by(|x, y| x.0.total_cmp(&y.0).then(x.1.cmp(&y.1)));
        let n = around.len();
        for i in 0..n {
            let (_, t, fwd) = around[i];
            let (_, u, ufwd) = around[(i + n - 1) % n];
            if fwd && !ufwd {
                links.push((e, t, u));
            }
        }
    }
    // Union-find over triangle corners.
    let corner = |t: usize, v: usize| 3 * t + tris[t].iter().position(|&x| x == v).expect("corner on triangle");
    let mut parent: Vec<usize> = (0..3 * tris.len()).collect();
    fn find(p: &mut [usize], mut x: usize) -> usize {
        while p[x] != x {
            p[x] = p[p[x]];
            x = p[x];
        }
        x
    }
    links.sort_unstable();
    for (e, t, u) in links {
        for v in e {
            let (x, y) = (find(&mut parent, corner(t, v)), find(&mut parent, corner(u, v)));
            if x != y {
                parent[x.max(y)] = x.min(y);
            }
        }
    }
    let mut copy: HashMap<usize, usize> = HashMap::new();
    let mut first_use: Vec<Option<usize>> = vec![None; vertices.len()];
    let mut out = tris.clone();
    for (ti, t) in tris.iter().enumerate() {
        for k in 0..3 {
            let root = find(&mut parent, 3 * ti + k);
            let v = t[k];
            out[ti][k] = *copy.entry(root).or_insert_with(|| match first_use[v] {
                None => {
                    first_use[v] = Some(root);
                    v
                }
                Some(_) => {
                    vertices.push(vertices[v]);
                    vertices.len() - 1
                }
            });
        }
    }
    (vertices, out)
}

/// Pairwise reduction with a fixed left-to-right pairing; levels run in parallel.
fn reduce(mut items: Vec<Mesh>, kind: BooleanKind) -> Result<Mesh> {
    while items.len() > 1 {
        let pairs: Vec<&[Mesh]> = items.chunks(2).collect();
        items = pairs
            .par_iter()
            .map(|c| {
                if c.len() == 2 {
                    binary(&c[0], &c[1], kind)
                } else {
                    Ok(c[0].clone())
                }
            })
            .collect::<Result<_>>()?;
    }
    Ok(items.pop().unwrap_or_default())
}

/// Regularized union of one or more solids.
pub fn union(entities: &[Mesh]) -> Result<Mesh> {
    if entities.is_empty() {
        return Err(Error::InvalidInput("union needs at least one entity".into()));
    }
    check_inputs(&entities.iter().collect::<Vec<_>>())?;
    reduce(entities.to_vec(), BooleanKind::Union)
}

/// Regularized intersection of one or more solids; may be the empty solid.
pub fn meet(entities: &[Mesh]) -> Result<Mesh> {
    if entities.is_empty() {
        return Err(Error::InvalidInput("meet needs at least one entity".into()));
    }
    check_inputs(&entities.iter().collect::<Vec<_>>())?;
    reduce(entities.to_vec(), BooleanKind::Meet)
}

/// Regularized `a \ b`.
pub fn difference(a: &Mesh, b: &Mesh) -> Result<Mesh> {
    check_inputs(&[a, b])?;
    binary(a, b, BooleanKind::Difference)
}

/// Regularized `(a \ b) ∪ (b \ a)`.
///
/// The two parts meet only along curves, so they are returned as separate
/// shells (no shared vertices) to keep the result a 2-manifold.
pub fn symmetric_difference(a: &Mesh, b: &Mesh) -> Result<Mesh> {
    check_inputs(&[a, b])?;
    let (x, y) = rayon::join(
        || binary(a, b, BooleanKind::Difference),
        || binary(b, a, BooleanKind::Difference),
    );
    Ok(Mesh::concat([&x?, &y?]))
}

/// Dispatches a binary boolean by kind.
pub fn boolean(a: &Mesh, b: &Mesh, kind: BooleanKind) -> Result<Mesh> {
    match kind {
        BooleanKind::Union => union(&[a.clone(), b.clone()]),
        BooleanKind::Meet => meet(&[a.clone(), b.clone()]),
        BooleanKind::Difference => difference(a, b),
        BooleanKind::SymmetricDifference => symmetric_difference(a, b),
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::geom::{Point3, Tolerance};
    use crate::mesh::{mesh_volume, validate_mesh};
    use crate::shapes;

    fn vol(m: &Mesh) -> f64 {
        mesh_volume(m).unwrap()
    }

    fn assert_valid(m: &Mesh) {
        let r = validate_mesh(m, &Tolerance::default());
        assert!(r.is_valid(), "invalid output: {:?}", r.failures());
    }

    #[test]
    fn offset_cubes() {
        let a = shapes::unit_cube();
        let b = a.translated(Point3::new(0.5, 0.0, 0.0));
        let cases = [
            (BooleanKind::Union, 1.5),
            (BooleanKind::Meet, 0.5),
            (BooleanKind::Difference, 0.5),
            (BooleanKind::SymmetricDifference, 1.0),
        ];
        for (k, v) in cases {
            let m = boolean(&a, &b, k).unwrap();
            assert!((vol(&m) - v).abs() < 1e-12, "{k:?}: {}", vol(&m));
            assert_valid(&m);
        }
    }

    #[test]
    fn self_operations() {
        let a = shapes::unit_cube();
        assert!((vol(&union(&[a.clone(), a.clone()]).unwrap()) - 1.0).abs() < 1e-12);
        assert!((vol(&meet(&[a.clone(), a.clone()]).unwrap()) - 1.0).abs() < 1e-12);
        assert!(difference(&a, &a).unwrap().is_empty());
        assert!(symmetric_difference(&a, &a).unwrap().is_empty());
    }

    #[test]
    fn disjoint_cubes() {
        let a = shapes::unit_cube();
        let b = a.translated(Point3::new(3.0, 0.0, 0.0));
        let u = union(&[a.clone(), b.clone()]).unwrap();
        assert!((vol(&u) - 2.0).abs() < 1e-12);
        assert_eq!(u.component_count(), 2);
        assert!(meet(&[a.clone(), b.clone()]).unwrap().is_empty());
        assert!((vol(&difference(&a, &b).unwrap()) - 1.0).abs() < 1e-12);
        assert!((vol(&symmetric_difference(&a, &b).unwrap()) - 2.0).abs() < 1e-12);
    }

    #[test]
    fn edge_and_vertex_contact() {
        let a = shapes::unit_cube();
        for d in [Point3::new(1.0, 1.0, 0.0), Point3::new(1.0, 1.0, 1.0)] {
            let b = a.translated(d);
            let u = union(&[a.clone(), b.clone()]).unwrap();
            assert_valid(&u);
            assert!((vol(&u) - 2.0).abs() < 1e-12);
            assert_eq!(u.component_count(), 2);
            assert!(meet(&[a.clone(), b.clone()]).unwrap().is_empty());
            let back = difference(&u, &b).unwrap();
            assert_valid(&back);
            assert!((vol(&back) - 1.0).abs() < 1e-12);
        }
    }

    #[test]
    fn nested_and_general_position() {
        let a = shapes::unit_cube();
        let inner = shapes::cuboid(Point3::new(0.25, 0.25, 0.25), Point3::new(0.75, 0.75, 0.75));
        let d = difference(&a, &inner).unwrap();
        assert!((vol(&d) - (1.0 - 0.125)).abs() < 1e-12);
        assert_valid(&d);
        let b = a.translated(Point3::new(0.3, 0.2, 0.1));
        let m = meet(&[a.clone(), b.clone()]).unwrap();
        assert!((vol(&m) - 0.7 * 0.8 * 0.9).abs() < 1e-12);
        assert_valid(&m);
        let u = union(&[a, b]).unwrap();
        assert!((vol(&u) - (2.0 - 0.504)).abs() < 1e-12);
        assert_valid(&u);
    }

    #[test]
    fn sphere_and_cube() {
        let s = shapes::icosphere(Point3::new(0.5, 0.5, 1.0), 0.6, 2);
        let c = shapes::unit_cube();
        let u = union(&[s.clone(), c.clone()]).unwrap();
        let m = meet(&[s.clone(), c.clone()]).unwrap();
        assert_valid(&u);
        assert_valid(&m);
        let lhs = vol(&s) + vol(&c);
        let rhs = vol(&u) + vol(&m);
        assert!((lhs - rhs).abs() < 1e-9 * lhs);
    }

    #[test]
    fn rejects_invalid_entity() {
        let c = shapes::unit_cube();
        let open = Mesh::new(c.vertices().to_vec(), c.triangles()[1..].to_vec()).unwrap();
        match union(&[c, open]) {
            Err(Error::InvalidEntity { index, .. }) => assert_eq!(index, 1),
            other => panic!("unexpected {other:?}"),
        }
    }

    #[test]
    fn multi_union_is_deterministic() {
        let parts: Vec<Mesh> = (0..5)
            .map(|i| shapes::unit_cube().translated(Point3::new(0.6 * i as f64, 0.1 * i as f64, 0.0)))
            .collect();
        let u1 = union(&parts).unwrap();
        let u2 = union(&parts).unwrap();
        assert_eq!(u1, u2);
        assert_valid(&u1);
    }
}
