//! Reading inputs: mesh files, point lists, scene manifests, and the
//! tolerance that applies to a run.

use std::collections::BTreeMap;
use std::fs;
use std::path::{Path, PathBuf};

use serde::{Deserialize, Serialize};
use serde_json::Value;
use solidkit::io::{self, MeshFormat, RawMesh};
use solidkit::{Aabb, Mesh, Point3, Tolerance};

use crate::exit::Failure;
use crate::output::RunReport;

pub const EPS_ENV: &str = "SOLIDKIT_EPS";

pub fn read_bytes(path: &Path, report: &mut RunReport) -> Result<Vec<u8>, Failure> {
    let bytes = fs::read(path).map_err(|e| Failure::io(path, e))?;
    report.input(path, &bytes);
    Ok(bytes)
}

pub fn read_text(path: &Path, report: &mut RunReport) -> Result<String, Failure> {
    let bytes = read_bytes(path, report)?;
    String::from_utf8(bytes)
        .map_err(|_| Failure::from(solidkit::Error::Parse(format!("{}: not UTF-8", path.display()))))
}

pub fn mesh_format(path: &Path) -> Result<MeshFormat, Failure> {
    MeshFormat::from_path(path).map_err(|e| Failure::usage(e.to_string()))
}

pub fn read_raw(path: &Path, report: &mut RunReport) -> Result<RawMesh, Failure> {
    let fmt = mesh_format(path)?;
    let text = read_text(path, report)?;
    Ok(io::parse(&text, fmt)?)
}

/// Triangulates a raw mesh, moving ingest warnings into the report.
pub fn ingest(raw: RawMesh, tol: &Tolerance, what: &str, report: &mut RunReport) -> Result<Mesh, Failure> {
    let (m, warnings) = raw.into_mesh(tol)?;
    report
        .warnings
        .extend(warnings.into_iter().map(|w| format!("{what}: {w}")));
    Ok(m)
}

/// Tolerance flags as given on the command line.
#[derive(Debug, Clone, Copy, Default)]
pub struct TolFlags {
    pub eps: Option<f64>,
    pub angular_eps: Option<f64>,
}

/// Resolves the run tolerance: flag, then environment, then 1e-9 × scene diameter.
pub fn tolerance<'a>(
    flags: TolFlags,
    points: impl IntoIterator<Item = &'a Point3>,
    report: &mut RunReport,
) -> Result<Tolerance, Failure> {
    let (eps, source) = match flags.eps {
        Some(e) => (e, "flag"),
        None => match std::env::var(EPS_ENV) {
            Ok(s) => {
                let e: f64 = s.trim().parse().map_err(|_| {
                    Failure::from(solidkit::Error::Parameter(format!("{EPS_ENV}={s:?} is not a number")))
                })?;
                (e, "env")
            }
            Err(_) => {
                let pts: Vec<Point3> = points.into_iter().copied().collect();
                let d = if pts.is_empty() {
                    0.0
                } else {
                    Aabb::from_points(&pts).diagonal()
                };
                (Tolerance::for_diameter(d).eps, "scene")
            }
        },
    };
    let angular = flags.angular_eps.unwrap_or(Tolerance::default().angular_eps);
    let tol = Tolerance::new(eps, angular)?;
    report.param("eps", tol.eps);
    report.param("eps_source", source);
    report.param("angular_eps", tol.angular_eps);
    Ok(tol)
}

/// Points from JSON (`[[x,y,z],...]` or `{"points": [...]}`) or from a mesh file's vertices.
pub fn read_points(path: &Path, report: &mut RunReport) -> Result<Vec<Point3>, Failure> {
    let is_json = path.extension().is_some_and(|e| e.eq_ignore_ascii_case("json"));
    if !is_json {
        return Ok(read_raw(path, report)?.vertices);
    }
    #[derive(Deserialize)]
    #[serde(untagged)]
    enum Doc {
        Bare(Vec<[f64; 3]>),
        Wrapped { points: Vec<[f64; 3]> },
    }
    let text = read_text(path, report)?;
    let pts = match serde_json::from_str::<Doc>(&text)? {
        Doc::Bare(p) | Doc::Wrapped { points: p } => p,
    };
    Ok(pts.into_iter().map(Point3::from_array).collect())
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum EntityKind {
    Point,
    Polyline,
    Face,
    Body,
}

/// Inline mesh geometry: polygonal faces over a vertex list.
#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct InlineMesh {
    pub vertices: Vec<[f64; 3]>,
    pub faces: Vec<Vec<usize>>,
}

#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct EntitySpec {
    pub id: String,
    pub kind: EntityKind,
    /// Mesh file, relative to the manifest.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub file: Option<PathBuf>,
    /// Inline geometry: `[x,y,z]` for a point, a list of points for a
    /// polyline, `{"vertices", "faces"}` for a face or body.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub geometry: Option<Value>,
    #[serde(default, skip_serializing_if = "BTreeMap::is_empty")]
    pub attributes: BTreeMap<String, Value>,
}

/// A list of typed entities with attributes.
#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct SceneManifest {
    pub entities: Vec<EntitySpec>,
}

#[derive(Debug, Clone)]
pub enum Geometry {
    Point(Point3),
    Polyline(Vec<Point3>),
    Face(RawMesh),
    Body(RawMesh),
}

impl Geometry {
    pub fn points(&self) -> &[Point3] {
        match self {
            Geometry::Point(p) => std::slice::from_ref(p),
            Geometry::Polyline(p) => p,
            Geometry::Face(m) | Geometry::Body(m) => &m.vertices,
        }
    }
}

#[derive(Debug, Clone)]
pub struct Entity {
    pub id: String,
    pub geometry: Geometry,
    pub attributes: BTreeMap<String, Value>,
}

fn bad(msg: String) -> Failure {
    Failure::from(solidkit::Error::InvalidInput(msg))
}

/// Reads a manifest and every file it references. Entity ids must be unique.
pub fn read_scene(path: &Path, report: &mut RunReport) -> Result<Vec<Entity>, Failure> {
    let text = read_text(path, report)?;
    let doc: SceneManifest = serde_json::from_str(&text)?;
    let base = path.parent().unwrap_or(Path::new("."));
    let mut seen = std::collections::BTreeSet::new();
    let mut out = Vec::new();
    for e in doc.entities {
        if !seen.insert(e.id.clone()) {
            return Err(bad(format!("duplicate entity id {:?}", e.id)));
        }
        let raw_mesh = |report: &mut RunReport| -> Result<RawMesh, Failure> {
            match (&e.file, &e.geometry) {
                (Some(f), None) => read_raw(&base.join(f), report),
                (None, Some(g)) => {
                    let m: InlineMesh = serde_json::from_value(g.clone())?;
                    Ok(RawMesh {
                        vertices: m.vertices.into_iter().map(Point3::from_array).collect(),
                        faces: m.faces,
                    })
                }
                _ => Err(bad(format!("entity {:?} needs exactly one of file or geometry", e.id))),
            }
        };
        let inline = || {
            e.geometry
                .clone()
                .ok_or_else(|| bad(format!("entity {:?} needs inline geometry", e.id)))
        };
        let geometry = match e.kind {
            EntityKind::Point => Geometry::Point(Point3::from_array(serde_json::from_value(inline()?)?)),
            EntityKind::Polyline => {
                let p: Vec<[f64; 3]> = serde_json::from_value(inline()?)?;
                Geometry::Polyline(p.into_iter().map(Point3::from_array).collect())
            }
            EntityKind::Face => Geometry::Face(raw_mesh(report)?),
            EntityKind::Body => Geometry::Body(raw_mesh(report)?),
        };
        out.push(Entity {
            id: e.id,
            geometry,
            attributes: e.attributes,
        });
    }
    Ok(out)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn manifest_with_inline_and_file_entities() {
        let dir = tempfile::tempdir().unwrap();
        fs::write(dir.path().join("cube.off"), io::to_off(&solidkit::shapes::unit_cube())).unwrap();
        let manifest = r#"{"entities": [
            {"id": "p", "kind": "point", "geometry": [1, 2, 3]},
            {"id": "c", "kind": "body", "file": "cube.off", "attributes": {"use": "storage"}}
        ]}"#;
        fs::write(dir.path().join("scene.json"), manifest).unwrap();
        let mut r = RunReport::new("test");
        let s = read_scene(&dir.path().join("scene.json"), &mut r).unwrap();
        assert_eq!(s.len(), 2);
        assert!(matches!(s[0].geometry, Geometry::Point(p) if p == Point3::new(1.0, 2.0, 3.0)));
        assert!(matches!(&s[1].geometry, Geometry::Body(m) if m.vertices.len() == 8));
        assert_eq!(r.inputs.len(), 2);
    }

    #[test]
    fn duplicate_ids_are_rejected() {
        let dir = tempfile::tempdir().unwrap();
        let manifest = r#"{"entities": [
            {"id": "p", "kind": "point", "geometry": [0, 0, 0]},
            {"id": "p", "kind": "point", "geometry": [1, 0, 0]}
        ]}"#;
        fs::write(dir.path().join("s.json"), manifest).unwrap();
        let err = read_scene(&dir.path().join("s.json"), &mut RunReport::new("t")).unwrap_err();
        assert_eq!(err.code, crate::exit::INVALID);
    }
}
