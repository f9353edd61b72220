//! Convex decomposition and tetrahedralization of solids.
//!
//! The solid is partitioned exactly by a binary space partition over its
//! face planes: leaves behind every face are convex cells of the interior.
//! Cells are fanned into tetrahedra, or greedily merged into larger convex
//! pieces (largest shared face first, ties by lowest piece index) as long as
//! the union stays convex.

use std::collections::HashMap;

use num_traits::Signed;
use serde::Serialize;

use crate::convex::{is_convex, ConvexPolytope};
use crate::error::{Error, Result};
use crate::exact::{self, Contact, ExactPoint, Projection, Rational};
use crate::geom::{Point3, Tolerance};
use crate::mesh::{mesh_volume, Mesh};
use crate::predicates::Sign;

/// Which input triangles lie on the boundary of one piece.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct PieceSource {
    pub facets: Vec<usize>,
}

/// Interior-disjoint convex pieces whose union is the input solid.
#[derive(Debug, Clone, PartialEq)]
pub struct Decomposition {
    pub pieces: Vec<Mesh>,
    pub provenance: Vec<PieceSource>,
    /// Genus of the input surface (sum over its shells).
    pub genus: i64,
}

impl Decomposition {
    pub fn total_volume(&self) -> f64 {
        self.pieces.iter().map(|p| mesh_volume(p).unwrap_or(0.0)).sum()
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Hash)]
struct Plane {
    n: [Rational; 3],
    d: Rational,
}

impl Plane {
    fn through(a: &ExactPoint, b: &ExactPoint, c: &ExactPoint) -> Plane {
        let n = exact::exact_normal(a, b, c);
        let d = dot(&n, a.coords());
        // Scale so the largest |component| is 1; keeps orientation.
        let k = n.iter().map(|v| v.abs()).max().expect("three components");
        Plane {
            n: [&n[0] / &k, &n[1] / &k, &n[2] / &k],
            d: d / k,
        }
    }

    fn value(&self, p: &ExactPoint) -> Rational {
        dot(&self.n, p.coords()) - &self.d
    }

    fn side(&self, p: &ExactPoint) -> Sign {
        if let Some(f) = p.as_float() {
            // Cheap filter for points far from the plane.
            let approx: f64 = (0..3)
                .map(|k| num_traits::ToPrimitive::to_f64(&self.n[k]).unwrap_or(0.0) * f[k])
                .sum::<f64>()
                - num_traits::ToPrimitive::to_f64(&self.d).unwrap_or(0.0);
            let scale = 1.0 + f.x.abs() + f.y.abs() + f.z.abs();
            if approx.abs() > 1e-6 * scale {
                return Sign::of(approx);
            }
        }
        rsign(&self.value(p))
    }

    fn flipped(&self) -> Plane {
        Plane {
            n: [-&self.n[0], -&self.n[1], -&self.n[2]],
            d: -&self.d,
        }
    }

    fn projection(&self) -> Projection {
        let a: Vec<Rational> = self.n.iter().map(|v| v.abs()).collect();
        let drop = if a[0] >= a[1] && a[0] >= a[2] {
            0
        } else if a[1] >= a[2] {
            1
        } else {
            2
        };
        Projection {
            drop,
            flipped: self.n[drop].is_negative(),
        }
    }
}

fn dot(n: &[Rational; 3], p: &[Rational; 3]) -> Rational {
    &n[0] * &p[0] + &n[1] * &p[1] + &n[2] * &p[2]
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

#[derive(Clone)]
struct Poly {
    pts: Vec<ExactPoint>,
    plane: usize,
}

enum Bsp {
    In,
    Out,
    Node {
        plane: usize,
        front: Box<Bsp>,
        back: Box<Bsp>,
    },
}

/// Splits a convex polygon by a plane into its front and back parts.
fn split(pts: &[ExactPoint], plane: &Plane) -> (Vec<ExactPoint>, Vec<ExactPoint>, bool) {
    let s: Vec<Sign> = pts.iter().map(|p| plane.side(p)).collect();
    if s.iter().all(|&x| x == Sign::Zero) {
        return (Vec::new(), Vec::new(), true);
    }
    if !s.contains(&Sign::Negative) {
        return (pts.to_vec(), Vec::new(), false);
    }
    if !s.contains(&Sign::Positive) {
        return (Vec::new(), pts.to_vec(), false);
    }
    let (mut f, mut b) = (Vec::new(), Vec::new());
    let n = pts.len();
    for i in 0..n {
        let j = (i + 1) % n;
        if s[i] != Sign::Negative {
            f.push(pts[i].clone());
        }
        if s[i] != Sign::Positive {
            b.push(pts[i].clone());
        }
        if s[i] != Sign::Zero && s[j] != Sign::Zero && s[i] != s[j] {
            let (vi, vj) = (plane.value(&pts[i]), plane.value(&pts[j]));
            let x = pts[i].lerp(&pts[j], &(&vi / (&vi - &vj)));
            f.push(x.clone());
            b.push(x);
        }
    }
    (f, b, false)
}

fn build(polys: Vec<Poly>, planes: &[Plane]) -> Bsp {
    // Candidate splitters in order of first appearance.
    let mut cands: Vec<usize> = Vec::new();
    for p in &polys {
        if !cands.contains(&p.plane) {
            cands.push(p.plane);
        }
        if cands.len() == 12 {
            break;
        }
    }
    let splits = |pl: usize| {
        polys
            .iter()
            .filter(|p| {
                let s: Vec<Sign> = p.pts.iter().map(|x| planes[pl].side(x)).collect();
                s.contains(&Sign::Positive) && s.contains(&Sign::Negative)
            })
            .count()
    };
    let plane = *cands
        .iter()
        .min_by_key(|&&c| (splits(c), c))
        .expect("non-empty polygon list");
    let (mut front, mut back) = (Vec::new(), Vec::new());
    for p in polys {
        let (f, b, coplanar) = split(&p.pts, &planes[plane]);
        if coplanar {
            continue;
        }
        if f.len() >= 3 {
            front.push(Poly { pts: f, plane: p.plane });
        }
        if b.len() >= 3 {
            back.push(Poly { pts: b, plane: p.plane });
        }
    }
    Bsp::Node {
        plane,
        front: Box::new(if front.is_empty() {
            Bsp::Out
        } else {
            build(front, planes)
        }),
        back: Box::new(if back.is_empty() { Bsp::In } else { build(back, planes) }),
    }
}

/// A convex cell as outward-oriented convex faces.
#[derive(Clone)]
struct Cell {
    faces: Vec<Vec<ExactPoint>>,
}

impl Cell {
    fn cuboid(lo: Point3, hi: Point3) -> Cell {
        let c = |x: bool, y: bool, z: bool| {
            ExactPoint::from_point(Point3::new(
                if x { hi.x } else { lo.x },
                if y { hi.y } else { lo.y },
                if z { hi.z } else { lo.z },
            ))
        };
        let (f, t) = (false, true);
        Cell {
            faces: vec![
                vec![c(f, f, f), c(f, t, f), c(t, t, f), c(t, f, f)],
                vec![c(f, f, t), c(t, f, t), c(t, t, t), c(f, t, t)],
                vec![c(f, f, f), c(t, f, f), c(t, f, t), c(f, f, t)],
                vec![c(f, t, f), c(f, t, t), c(t, t, t), c(t, t, f)],
                vec![c(f, f, f), c(f, f, t), c(f, t, t), c(f, t, f)],
                vec![c(t, f, f), c(t, t, f), c(t, t, t), c(t, f, t)],
            ],
        }
    }

    /// Keeps the part behind `plane` (value ≤ 0); `None` if nothing with
    /// volume remains.
    fn clip(&self, plane: &Plane) -> Option<Cell> {
        let mut faces = Vec::new();
        let mut cap: Vec<ExactPoint> = Vec::new();
        for f in &self.faces {
            let (front, back, coplanar) = split(f, plane);
            if coplanar {
                faces.push(f.clone());
                cap.extend(f.iter().cloned());
                continue;
            }
            if !front.is_empty() && back.is_empty() {
                // Entirely in front; its on-plane points still bound the cap.
                cap.extend(f.iter().filter(|p| plane.side(p) == Sign::Zero).cloned());
                continue;
            }
            cap.extend(back.iter().filter(|p| plane.side(p) == Sign::Zero).cloned());
            let b = clean(back, &face_projection(f));
            if b.len() >= 3 {
                faces.push(b);
            }
        }
        if faces.len() < 3 {
            return None;
        }
        // Every face already behind the plane: no cap needed.
        let any_front = self.faces.iter().flatten().any(|p| plane.side(p) == Sign::Positive);
        if any_front {
            let proj = plane.projection();
            let mut ring = hull_2d(cap, proj);
            if proj.flipped {
                ring.reverse();
            }
            if ring.len() >= 3 {
                // Drop any face coplanar with the cap (it is the cap).
                faces.retain(|f| !f.iter().all(|p| plane.side(p) == Sign::Zero));
                faces.push(ring);
            }
        }
        if faces.len() < 4 {
            return None;
        }
        Some(Cell { faces })
    }

    fn to_mesh(&self) -> Mesh {
        let mut ids: HashMap<ExactPoint, usize> = HashMap::new();
        let mut verts = Vec::new();
        let mut tris = Vec::new();
        for f in &self.faces {
            let ix: Vec<usize> = f
                .iter()
                .map(|p| {
                    *ids.entry(p.clone()).or_insert_with(|| {
                        verts.push(p.approx());
                        verts.len() - 1
                    })
                })
                .collect();
            for k in 1..ix.len() - 1 {
                tris.push([ix[0], ix[k], ix[k + 1]]);
            }
        }
        Mesh::new(verts, tris).expect("cell coordinates are finite")
    }

    /// Fan of tetrahedra from the first vertex.
    fn tetrahedra(&self) -> Vec<Mesh> {
        let apex = self.faces[0][0].clone();
        let mut out = Vec::new();
        for f in &self.faces {
            if f.contains(&apex) {
                continue;
            }
            for k in 1..f.len() - 1 {
                let t = [apex.approx(), f[0].approx(), f[k].approx(), f[k + 1].approx()];
                out.push(tetrahedron(t));
            }
        }
        out
    }
}

fn face_projection(f: &[ExactPoint]) -> Projection {
    Projection::for_triangle(&f[0], &f[1], &f[2])
}

/// Removes duplicate and collinear vertices of a convex polygon.
fn clean(mut pts: Vec<ExactPoint>, proj: &Projection) -> Vec<ExactPoint> {
    pts.dedup();
    while pts.len() > 1 && pts.first() == pts.last() {
        pts.pop();
    }
    let mut changed = true;
    while changed && pts.len() >= 3 {
        changed = false;
        let n = pts.len();
        for i in 0..n {
            let (a, b, c) = (&pts[(i + n - 1) % n], &pts[i], &pts[(i + 1) % n]);
            if proj.orient2d(a, b, c) == Sign::Zero {
                pts.remove(i);
                changed = true;
                break;
            }
        }
    }
    pts
}

/// Strict convex hull of coplanar points, counter-clockwise in `proj`.
fn hull_2d(mut pts: Vec<ExactPoint>, proj: Projection) -> Vec<ExactPoint> {
    pts.sort_by(|a, b| {
        let (ax, ay) = proj.coords(a);
        let (bx, by) = proj.coords(b);
        ax.cmp(bx).then(ay.cmp(by))
    });
    pts.dedup();
    if pts.len() < 3 {
        return pts;
    }
    let chain = |it: &mut dyn Iterator<Item = &ExactPoint>| {
        let mut h: Vec<ExactPoint> = Vec::new();
        for p in it {
            while h.len() >= 2 && proj.orient2d(&h[h.len() - 2], &h[h.len() - 1], p) != Sign::Positive {
                h.pop();
            }
            h.push(p.clone());
        }
        h.pop();
        h
    };
    let mut lower = chain(&mut pts.iter());
    let upper = chain(&mut pts.iter().rev());
    lower.extend(upper);
    lower
}

fn tetrahedron(p: [Point3; 4]) -> Mesh {
    let [a, b, c, d] = p;
    let pos = (b - a).dot((c - a).cross(d - a)) > 0.0;
    let tris = if pos {
        vec![[0, 2, 1], [0, 1, 3], [1, 2, 3], [2, 0, 3]]
    } else {
        vec![[0, 1, 2], [0, 3, 1], [1, 3, 2], [2, 3, 0]]
    };
    Mesh::new(p.to_vec(), tris).expect("finite")
}

fn collect_cells(node: &Bsp, planes: &[Plane], cell: Cell, out: &mut Vec<Cell>) {
    match node {
        Bsp::Out => {}
        Bsp::In => out.push(cell),
        Bsp::Node { plane, front, back } => {
            if let Some(b) = cell.clip(&planes[*plane]) {
                collect_cells(back, planes, b, out);
            }
            if let Some(f) = cell.clip(&planes[*plane].flipped()) {
                collect_cells(front, planes, f, out);
            }
        }
    }
}

/// Genus of a closed surface from its Euler characteristic, summed over shells.
pub fn surface_genus(m: &Mesh) -> i64 {
    let w = m.welded();
    let v = w
        .triangles()
        .iter()
        .flatten()
        .collect::<std::collections::BTreeSet<_>>()
        .len() as i64;
    let e = w.edge_incidence().len() as i64;
    let f = w.triangles().len() as i64;
    let shells = w.component_count() as i64;
    (2 * shells - (v - e + f)) / 2
}

fn interior_cells(m: &Mesh) -> Result<Vec<Cell>> {
    let pts: Vec<ExactPoint> = m.vertices().iter().map(|&p| p.into()).collect();
    let mut planes: Vec<Plane> = Vec::new();
    let mut plane_id: HashMap<Plane, usize> = HashMap::new();
    let mut polys = Vec::new();
    for t in m.triangles() {
        let pl = Plane::through(&pts[t[0]], &pts[t[1]], &pts[t[2]]);
        let id = *plane_id.entry(pl.clone()).or_insert_with(|| {
            planes.push(pl);
            planes.len() - 1
        });
        polys.push(Poly {
            pts: t.iter().map(|&k| pts[k].clone()).collect(),
            plane: id,
        });
    }
    let tree = build(polys, &planes);
    let bb = m.aabb();
    let mut cells = Vec::new();
    collect_cells(&tree, &planes, Cell::cuboid(bb.min, bb.max), &mut cells);
    if cells.is_empty() {
        return Err(Error::mesh("solid has no interior cells"));
    }
    Ok(cells)
}

fn provenance(m: &Mesh, piece: &Mesh, tol: &Tolerance) -> PieceSource {
    let hull = ConvexPolytope::from_mesh(piece).ok();
    let facets = match hull {
        Some(h) if h.is_solid() => m
            .triangle_iter()
            .enumerate()
            .filter(|(_, t)| {
                let n = t.unit_normal();
                let c = t.centroid();
                h.contains(c, tol.eps)
                    && h.facets()
                        .iter()
                        .any(|f| f.normal.dot(n) > 1.0 - 1e-9 && f.distance(c).abs() <= tol.eps)
            })
            .map(|(i, _)| i)
            .collect(),
        _ => Vec::new(),
    };
    PieceSource { facets }
}

fn finish(m: &Mesh, pieces: Vec<Mesh>, tol: &Tolerance) -> Decomposition {
    let provenance = pieces.iter().map(|p| provenance(m, p, tol)).collect();
    Decomposition {
        pieces,
        provenance,
        genus: surface_genus(m),
    }
}

/// Splits a solid into interior-disjoint tetrahedra.
pub fn tetrahedralize(m: &Mesh, tol: &Tolerance) -> Result<Decomposition> {
    m.check_solid()?;
    if m.is_empty() {
        return Ok(finish(m, Vec::new(), tol));
    }
    let tets = interior_cells(m)?.iter().flat_map(|c| c.tetrahedra()).collect();
    Ok(finish(m, tets, tol))
}

/// Area of the overlap of two pieces' faces that touch back to back.
fn shared_area(a: &Mesh, b: &Mesh) -> f64 {
    if !a.aabb().overlaps(&b.aabb()) {
        return 0.0;
    }
    let ea: Vec<ExactPoint> = a.vertices().iter().map(|&p| p.into()).collect();
    let eb: Vec<ExactPoint> = b.vertices().iter().map(|&p| p.into()).collect();
    let mut area = 0.0;
    for (i, x) in a.triangles().iter().enumerate() {
        for (j, y) in b.triangles().iter().enumerate() {
            if !a.triangle(i).aabb().overlaps(&b.triangle(j).aabb()) {
                continue;
            }
            if a.triangle(i).normal().dot(b.triangle(j).normal()) >= 0.0 {
                continue;
            }
            let c = exact::triangle_triangle([&ea[x[0]], &ea[x[1]], &ea[x[2]]], [&eb[y[0]], &eb[y[1]], &eb[y[2]]]);
            if let Contact::Polygon(v) = c {
                let p: Vec<Point3> = v.iter().map(|q| q.approx()).collect();
                let mut s = Point3::ORIGIN;
                for k in 1..p.len() - 1 {
                    s += (p[k] - p[0]).cross(p[k + 1] - p[0]);
                }
                area += s.norm() / 2.0;
            }
        }
    }
    area
}

/// Decomposes a solid into convex pieces.
///
/// Convex input is returned as a single piece. With `max_pieces` set, a
/// result needing more pieces fails with [`Error::BudgetExceeded`].
pub fn convex_decompose(m: &Mesh, max_pieces: Option<usize>, tol: &Tolerance) -> Result<Decomposition> {
    m.check_solid()?;
    if m.is_empty() {
        return Ok(finish(m, Vec::new(), tol));
    }
    if is_convex(m, tol)? {
        return Ok(finish(m, vec![m.clone()], tol));
    }
    let mut pieces: Vec<Option<(Mesh, f64)>> = interior_cells(m)?
        .iter()
        .map(|c| {
            let mesh = c.to_mesh();
            let v = mesh_volume(&mesh).unwrap_or(0.0);
            Some((mesh, v))
        })
        .collect();
    let n0 = pieces.len();
    let mut area: HashMap<(usize, usize), f64> = HashMap::new();
    for i in 0..n0 {
        for j in i + 1..n0 {
            let s = shared_area(&pieces[i].as_ref().unwrap().0, &pieces[j].as_ref().unwrap().0);
            if s > 0.0 {
                area.insert((i, j), s);
            }
        }
    }
    let mut rejected: std::collections::HashSet<(usize, usize)> = Default::default();
    loop {
        let mut cands: Vec<((usize, usize), f64)> = area
            .iter()
            .filter(|(k, _)| !rejected.contains(k))
            .map(|(&k, &v)| (k, v))
            .collect();
        cands.sort_by(|a, b| b.1.total_cmp(&a.1).then(a.0.cmp(&b.0)));
        let mut merged = None;
        for ((i, j), _) in cands {
            let (mi, vi) = pieces[i].as_ref().unwrap();
            let (mj, vj) = pieces[j].as_ref().unwrap();
            let mut pts = mi.vertices().to_vec();
            pts.extend_from_slice(mj.vertices());
            let hull = ConvexPolytope::from_points(&pts)?;
            let hv = hull.volume();
            if (hv - (vi + vj)).abs() <= 1e-9 * (vi + vj) {
                merged = Some((i, j, hull.to_mesh()?, hv));
                break;
            }
            rejected.insert((i, j));
        }
        let Some((i, j, mesh, v)) = merged else { break };
        pieces[j] = None;
        pieces[i] = Some((mesh, v));
        area.retain(|&(a, b), _| a != i && b != i && a != j && b != j);
        rejected.retain(|&(a, b)| a != i && b != i && a != j && b != j);
        for k in 0..n0 {
            if k == i || pieces[k].is_none() {
                continue;
            }
            let s = shared_area(&pieces[i].as_ref().unwrap().0, &pieces[k].as_ref().unwrap().0);
            if s > 0.0 {
                area.insert((i.min(k), i.max(k)), s);
            }
        }
    }
    let pieces: Vec<Mesh> = pieces.into_iter().flatten().map(|(m, _)| m).collect();
    if let Some(budget) = max_pieces {
        if pieces.len() > budget {
            return Err(Error::BudgetExceeded {
                achieved: pieces.len(),
                budget,
            });
        }
    }
    Ok(finish(m, pieces, tol))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::mesh::validate_mesh;
    use crate::shapes;

    fn total(d: &Decomposition) -> f64 {
        d.total_volume()
    }

    #[test]
    fn cube_tetrahedra() {
        let tol = Tolerance::default();
        let d = tetrahedralize(&shapes::unit_cube(), &tol).unwrap();
        assert_eq!(d.pieces.len(), 6);
        assert!((total(&d) - 1.0).abs() < 1e-12);
        let t = tetrahedralize(&shapes::unit_tetrahedron(), &tol).unwrap();
        assert_eq!(t.pieces.len(), 1);
        assert!((total(&t) - 1.0 / 6.0).abs() < 1e-15);
    }

    #[test]
    fn l_prism_pieces() {
        let tol = Tolerance::default();
        let m = shapes::l_prism();
        let t = tetrahedralize(&m, &tol).unwrap();
        assert!((total(&t) - 3.0).abs() < 3e-9);
        let d = convex_decompose(&m, None, &tol).unwrap();
        assert!(d.pieces.len() <= 3, "{} pieces", d.pieces.len());
        assert!(d.pieces.len() <= t.pieces.len());
        assert!((total(&d) - 3.0).abs() < 3e-9);
        for p in &d.pieces {
            assert!(is_convex(p, &tol).unwrap());
            assert!(validate_mesh(p, &tol).is_valid());
        }
        assert_eq!(d.genus, 0);
        assert!(matches!(
            convex_decompose(&m, Some(1), &tol),
            Err(Error::BudgetExceeded { budget: 1, .. })
        ));
    }

    #[test]
    fn staircase_pieces() {
        let tol = Tolerance::default();
        for k in 1..=5 {
            let m = shapes::staircase(k);
            let d = convex_decompose(&m, None, &tol).unwrap();
            let v = (k * (k + 1)) as f64 / 2.0;
            assert!(d.pieces.len() <= k + 1);
            assert!((total(&d) - v).abs() < 1e-9 * v);
        }
    }

    #[test]
    fn convex_is_fixed_point() {
        let tol = Tolerance::default();
        let c = shapes::unit_cube();
        let d = convex_decompose(&c, None, &tol).unwrap();
        assert_eq!(d.pieces, vec![c]);
    }

    #[test]
    fn torus_genus() {
        let t = shapes::torus(2.0, 0.5, 8, 4);
        assert_eq!(surface_genus(&t), 1);
        let d = tetrahedralize(&t, &Tolerance::default()).unwrap();
        let v = mesh_volume(&t).unwrap();
        assert!((total(&d) - v).abs() < 1e-9 * v);
        assert_eq!(d.genus, 1);
    }
}
