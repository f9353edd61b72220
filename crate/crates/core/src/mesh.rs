//! Closed, oriented triangle meshes: the solid-body representation.

use std::collections::{BTreeMap, HashMap};

use serde::Serialize;

use crate::error::{Error, Result};
use crate::geom::{Aabb, Point3, Tolerance, Triangle3};

/// A triangle boundary representation of a solid body.
///
/// Triangles are wound counter-clockwise when seen from outside, so the
/// signed volume of a valid body is positive. A mesh with no triangles is
/// the empty solid.
#[derive(Debug, Clone, PartialEq, Default)]
pub struct Mesh {
    vertices: Vec<Point3>,
    triangles: Vec<[usize; 3]>,
}

impl Mesh {
    /// Builds a mesh, checking indices and coordinate finiteness.
    pub fn new(vertices: Vec<Point3>, triangles: Vec<[usize; 3]>) -> Result<Mesh> {
        for v in &vertices {
            v.check_finite()?;
        }
        for (i, t) in triangles.iter().enumerate() {
            if t.iter().any(|&k| k >= vertices.len()) {
                return Err(Error::InvalidInput(format!(
                    "triangle {i} references a vertex out of range ({} vertices)",
                    vertices.len()
                )));
            }
        }
        Ok(Mesh { vertices, triangles })
    }

    /// Builds a mesh from polygonal faces: faces are triangulated, and
    /// degenerate triangles (area ≤ eps²) are dropped with a warning.
    pub fn ingest(vertices: Vec<Point3>, faces: Vec<Vec<usize>>, tol: &Tolerance) -> Result<(Mesh, Vec<String>)> {
        let mut warnings = Vec::new();
        let mut triangles = Vec::new();
        for (fi, face) in faces.iter().enumerate() {
            if face.len() < 3 {
                warnings.push(format!("face {fi} has fewer than 3 vertices; dropped"));
                continue;
            }
            if face.iter().any(|&k| k >= vertices.len()) {
                return Err(Error::Parse(format!("face {fi} references a missing vertex")));
            }
            let pts: Vec<Point3> = face.iter().map(|&k| vertices[k]).collect();
            for tri in crate::shapes::triangulate_polygon_3d(&pts) {
                let t = [face[tri[0]], face[tri[1]], face[tri[2]]];
                let area = Triangle3::new(vertices[t[0]], vertices[t[1]], vertices[t[2]]).area();
                if area <= tol.eps * tol.eps || t[0] == t[1] || t[1] == t[2] || t[0] == t[2] {
                    warnings.push(format!("face {fi}: degenerate triangle {t:?} dropped"));
                } else {
                    triangles.push(t);
                }
            }
        }
        Ok((Mesh::new(vertices, triangles)?, warnings))
    }

    pub fn empty() -> Mesh {
        Mesh::default()
    }

    pub fn is_empty(&self) -> bool {
        self.triangles.is_empty()
    }

    #[inline]
    pub fn vertices(&self) -> &[Point3] {
        &self.vertices
    }

    #[inline]
    pub fn triangles(&self) -> &[[usize; 3]] {
        &self.triangles
    }

    #[inline]
    pub fn triangle(&self, i: usize) -> Triangle3 {
        let [a, b, c] = self.triangles[i];
        Triangle3::new(self.vertices[a], self.vertices[b], self.vertices[c])
    }

    pub fn triangle_iter(&self) -> impl Iterator<Item = Triangle3> + '_ {
        (0..self.triangles.len()).map(move |i| self.triangle(i))
    }

    pub fn aabb(&self) -> Aabb {
        self.triangles
            .iter()
            .flatten()
            .fold(Aabb::EMPTY, |b, &k| b.including(self.vertices[k]))
    }

    pub fn translated(&self, d: Point3) -> Mesh {
        Mesh {
            vertices: self.vertices.iter().map(|&v| v + d).collect(),
            triangles: self.triangles.clone(),
        }
    }

    /// Uniform scaling about the origin; a negative factor also flips orientation.
    pub fn scaled(&self, s: f64) -> Mesh {
        let m = Mesh {
            vertices: self.vertices.iter().map(|&v| v * s).collect(),
            triangles: self.triangles.clone(),
        };
        if s < 0.0 {
            m.flipped()
        } else {
            m
        }
    }

    /// Applies a map to every vertex (the map is assumed orientation-preserving).
    pub fn mapped(&self, f: impl Fn(Point3) -> Point3) -> Mesh {
        Mesh {
            vertices: self.vertices.iter().map(|&v| f(v)).collect(),
            triangles: self.triangles.clone(),
        }
    }

    /// Reverses every triangle.
    pub fn flipped(&self) -> Mesh {
        Mesh {
            vertices: self.vertices.clone(),
            triangles: self.triangles.iter().map(|&[a, b, c]| [a, c, b]).collect(),
        }
    }

    /// Disjoint concatenation of several meshes.
    pub fn concat<'a>(parts: impl IntoIterator<Item = &'a Mesh>) -> Mesh {
        let mut out = Mesh::default();
        for m in parts {
            let off = out.vertices.len();
            out.vertices.extend_from_slice(&m.vertices);
            out.triangles.extend(m.triangles.iter().map(|t| t.map(|k| k + off)));
        }
        out
    }

    /// Merges vertices with identical coordinates, drops unused vertices and
    /// triangles that collapse. Vertex order follows first use.
    pub fn welded(&self) -> Mesh {
        let mut index: HashMap<[u64; 3], usize> = HashMap::new();
        let mut vertices = Vec::new();
        let mut triangles = Vec::with_capacity(self.triangles.len());
        for t in &self.triangles {
            let m = t.map(|k| {
                let p = self.vertices[k];
                *index.entry(p.bits()).or_insert_with(|| {
                    vertices.push(p);
                    vertices.len() - 1
                })
            });
            if m[0] != m[1] && m[1] != m[2] && m[0] != m[2] {
                triangles.push(m);
            }
        }
        Mesh { vertices, triangles }
    }

    /// Edge incidence: undirected edge → list of (triangle, directed forward?).
    pub(crate) fn edge_incidence(&self) -> BTreeMap<[usize; 2], Vec<(usize, bool)>> {
        let mut map: BTreeMap<[usize; 2], Vec<(usize, bool)>> = BTreeMap::new();
        for (ti, t) in self.triangles.iter().enumerate() {
            for k in 0..3 {
                let (a, b) = (t[k], t[(k + 1) % 3]);
                let key = if a < b { [a, b] } else { [b, a] };
                map.entry(key).or_default().push((ti, a < b));
            }
        }
        map
    }

    /// Number of edge-connected triangle components.
    pub fn component_count(&self) -> usize {
        self.components().iter().copied().max().map_or(0, |m| m + 1)
    }

    /// Component label per triangle (edge adjacency).
    pub fn components(&self) -> Vec<usize> {
        let n = self.triangles.len();
        let mut parent: Vec<usize> = (0..n).collect();
        fn find(p: &mut [usize], mut x: usize) -> usize {
            while p[x] != x {
                p[x] = p[p[x]];
                x = p[x];
            }
            x
        }
        for inc in self.edge_incidence().values() {
            for w in inc.windows(2) {
                let (a, b) = (find(&mut parent, w[0].0), find(&mut parent, w[1].0));
                if a != b {
                    parent[a.max(b)] = a.min(b);
                }
            }
        }
        let mut label = HashMap::new();
        (0..n)
            .map(|i| {
                let r = find(&mut parent, i);
                let next = label.len();
                *label.entry(r).or_insert(next)
            })
            .collect()
    }

    /// Splits the mesh into its edge-connected components.
    pub fn split_components(&self) -> Vec<Mesh> {
        let labels = self.components();
        let count = labels.iter().copied().max().map_or(0, |m| m + 1);
        let mut parts = vec![Vec::new(); count];
        for (ti, &l) in labels.iter().enumerate() {
            parts[l].push(self.triangles[ti]);
        }
        parts
            .into_iter()
            .map(|tris| {
                Mesh {
                    vertices: self.vertices.clone(),
                    triangles: tris,
                }
                .compacted()
            })
            .collect()
    }

    /// Drops unreferenced vertices.
    pub fn compacted(&self) -> Mesh {
        let mut map = vec![usize::MAX; self.vertices.len()];
        let mut vertices = Vec::new();
        let triangles = self
            .triangles
            .iter()
            .map(|t| {
                t.map(|k| {
                    if map[k] == usize::MAX {
                        map[k] = vertices.len();
                        vertices.push(self.vertices[k]);
                    }
                    map[k]
                })
            })
            .collect();
        Mesh { vertices, triangles }
    }

    /// Checks closedness and manifoldness; returns the offending edges otherwise.
    pub fn check_closed_manifold(&self) -> Result<()> {
        let mut bad = Vec::new();
        let mut reasons = Vec::new();
        for (e, inc) in self.edge_incidence() {
            if inc.len() != 2 {
                bad.push(e);
                let what = if inc.len() == 1 { "boundary" } else { "non-manifold" };
                if !reasons.contains(&what) {
                    reasons.push(what);
                }
            } else if inc[0].1 == inc[1].1 {
                bad.push(e);
                if !reasons.contains(&"inconsistently oriented") {
                    reasons.push("inconsistently oriented");
                }
            }
        }
        if bad.is_empty() {
            Ok(())
        } else {
            Err(Error::InvalidMesh {
                reason: format!("{} edges ({})", reasons.join(", "), bad.len()),
                edges: bad,
            })
        }
    }

    /// Checks the structural invariants (closed, oriented 2-manifold with
    /// positive volume). Self-intersection is not checked here.
    pub fn check_solid(&self) -> Result<()> {
        if self.is_empty() {
            return Ok(());
        }
        self.check_closed_manifold()?;
        let v = signed_volume(self);
        if v <= 0.0 {
            return Err(Error::mesh(format!("non-positive signed volume {v}")));
        }
        Ok(())
    }
}

fn signed_volume(m: &Mesh) -> f64 {
    let c = m.aabb().center();
    let c = if c.is_finite() { c } else { Point3::ORIGIN };
    let mut sum = 0.0;
    for t in m.triangle_iter() {
        let (p, q, r) = (t.p - c, t.q - c, t.r - c);
        sum += p.dot(q.cross(r));
    }
    sum / 6.0
}

/// Signed volume by the divergence theorem; requires a closed 2-manifold.
pub fn mesh_volume(m: &Mesh) -> Result<f64> {
    m.check_closed_manifold()?;
    Ok(signed_volume(m))
}

/// Surface area with the indices of degenerate triangles excluded from the sum.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct AreaReport {
    pub area: f64,
    pub degenerate: Vec<usize>,
}

/// Sum of triangle areas; degenerate triangles are reported and skipped.
pub fn mesh_area(m: &Mesh, tol: &Tolerance) -> AreaReport {
    let mut area = 0.0;
    let mut degenerate = Vec::new();
    for (i, t) in m.triangle_iter().enumerate() {
        let a = t.area();
        if a <= tol.eps * tol.eps {
            degenerate.push(i);
        } else {
            area += a;
        }
    }
    AreaReport { area, degenerate }
}

/// Outcome of [`validate_mesh`]. Edges are vertex-index pairs `[lo, hi]`.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct ValidationReport {
    pub vertex_count: usize,
    pub triangle_count: usize,
    pub empty: bool,
    pub closed: bool,
    pub boundary_edges: Vec<[usize; 2]>,
    pub manifold: bool,
    pub non_manifold_edges: Vec<[usize; 2]>,
    pub oriented: bool,
    pub misoriented_edges: Vec<[usize; 2]>,
    pub self_intersecting: bool,
    pub intersecting_pairs: Vec<[usize; 2]>,
    pub degenerate_triangles: Vec<usize>,
    pub volume: f64,
    pub positive_volume: bool,
}

impl ValidationReport {
    /// True when every check passes (the empty solid is valid).
    pub fn is_valid(&self) -> bool {
        self.empty
            || (self.closed
                && self.manifold
                && self.oriented
                && !self.self_intersecting
                && self.degenerate_triangles.is_empty()
                && self.positive_volume)
    }

    /// Names of the checks that failed.
    pub fn failures(&self) -> Vec<&'static str> {
        if self.empty {
            return Vec::new();
        }
        let mut f = Vec::new();
        if !self.closed {
            f.push("closed");
        }
        if !self.manifold {
            f.push("manifold");
        }
        if !self.oriented {
            f.push("oriented");
        }
        if self.self_intersecting {
            f.push("self-intersection");
        }
        if !self.degenerate_triangles.is_empty() {
            f.push("degenerate");
        }
        if !self.positive_volume {
            f.push("volume-sign");
        }
        f
    }

    pub fn to_json(&self) -> String {
        serde_json::to_string_pretty(self).expect("report serializes")
    }
}

/// Runs every structural check on a mesh. Never fails; the report carries
/// the failures.
pub fn validate_mesh(m: &Mesh, tol: &Tolerance) -> ValidationReport {
    let mut boundary = Vec::new();
    let mut non_manifold = Vec::new();
    let mut misoriented = Vec::new();
    for (e, inc) in m.edge_incidence() {
        match inc.len() {
            1 => boundary.push(e),
            2 => {
                if inc[0].1 == inc[1].1 {
                    misoriented.push(e);
                }
            }
            _ => non_manifold.push(e),
        }
    }
    let degenerate = mesh_area(m, tol).degenerate;
    let intersecting = crate::intersect::self_intersections(m);
    let volume = signed_volume(m);
    ValidationReport {
        vertex_count: m.vertices().len(),
        triangle_count: m.triangles().len(),
        empty: m.is_empty(),
        closed: boundary.is_empty(),
        boundary_edges: boundary,
        manifold: non_manifold.is_empty(),
        non_manifold_edges: non_manifold,
        oriented: misoriented.is_empty(),
        misoriented_edges: misoriented,
        self_intersecting: !intersecting.is_empty(),
        intersecting_pairs: intersecting,
        degenerate_triangles: degenerate,
        volume,
        positive_volume: volume > 0.0,
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::shapes;

    #[test]
    fn cube_and_tetra_measures() {
        let tol = Tolerance::default();
        let cube = shapes::unit_cube();
        assert!((mesh_volume(&cube).unwrap() - 1.0).abs() < 1e-15);
        assert!((mesh_area(&cube, &tol).area - 6.0).abs() < 1e-15);
        let tet = shapes::unit_tetrahedron();
        assert!((mesh_volume(&tet).unwrap() - 1.0 / 6.0).abs() < 1e-15);
    }

    #[test]
    fn open_triangle_area() {
        let m = Mesh::new(
            vec![
                Point3::new(0.0, 0.0, 0.0),
                Point3::new(1.0, 0.0, 0.0),
                Point3::new(0.0, 1.0, 0.0),
            ],
            vec![[0, 1, 2]],
        )
        .unwrap();
        assert_eq!(mesh_area(&m, &Tolerance::default()).area, 0.5);
        assert!(mesh_volume(&m).is_err());
    }

    #[test]
    fn reversed_orientation_negates_volume() {
        let cube = shapes::unit_cube();
        let flipped = cube.flipped();
        // A flipped mesh is still closed, so the volume is computable.
        assert!((mesh_volume(&flipped).unwrap() + 1.0).abs() < 1e-15);
        assert!(!validate_mesh(&flipped, &Tolerance::default()).is_valid());
    }

    #[test]
    fn cube_passes_validation() {
        let r = validate_mesh(&shapes::unit_cube(), &Tolerance::default());
        assert!(r.is_valid(), "{:?}", r.failures());
    }

    #[test]
    fn removed_triangle_lists_three_boundary_edges() {
        let cube = shapes::unit_cube();
        let mut tris = cube.triangles().to_vec();
        tris.remove(0);
        let holed = Mesh::new(cube.vertices().to_vec(), tris).unwrap();
        let r = validate_mesh(&holed, &Tolerance::default());
        assert!(!r.closed);
        assert_eq!(r.boundary_edges.len(), 3);
        match mesh_volume(&holed) {
            Err(Error::InvalidMesh { edges, .. }) => assert_eq!(edges.len(), 3),
            other => panic!("{other:?}"),
        }
    }

    #[test]
    fn cubes_sharing_an_edge_are_non_manifold() {
        let a = shapes::unit_cube();
        let b = a.translated(Point3::new(1.0, 1.0, 0.0));
        let m = Mesh::concat([&a, &b]).welded();
        let r = validate_mesh(&m, &Tolerance::default());
        assert!(!r.manifold);
        assert_eq!(r.non_manifold_edges.len(), 1);
        let [i, j] = r.non_manifold_edges[0];
        let (p, q) = (m.vertices()[i], m.vertices()[j]);
        for v in [p, q] {
            assert_eq!((v.x, v.y), (1.0, 1.0));
        }
        assert_ne!(p.z, q.z);
    }

    #[test]
    fn ingest_drops_degenerate_faces() {
        let tol = Tolerance::default();
        let cube = shapes::unit_cube();
        let mut faces: Vec<Vec<usize>> = cube.triangles().iter().map(|t| t.to_vec()).collect();
        faces.push(vec![0, 0, 1]);
        let (m, warnings) = Mesh::ingest(cube.vertices().to_vec(), faces, &tol).unwrap();
        assert_eq!(m.triangles().len(), 12);
        assert_eq!(warnings.len(), 1);
    }

    #[test]
    fn volume_scales_and_translates() {
        let m = shapes::icosphere(Point3::ORIGIN, 1.0, 2);
        let v = mesh_volume(&m).unwrap();
        let moved = m.translated(Point3::new(3.0, -2.0, 7.5));
        assert!((mesh_volume(&moved).unwrap() - v).abs() < 1e-12 * v);
        let scaled = m.scaled(2.5);
        assert!((mesh_volume(&scaled).unwrap() - v * 15.625).abs() < 1e-12 * v * 15.625);
    }
}
