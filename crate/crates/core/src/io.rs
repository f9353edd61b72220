//! OFF and OBJ mesh formats.
//!
//! Coordinates are written with Rust's shortest round-trip float formatting,
//! so write → read reproduces every coordinate bit for bit.

use std::fmt::Write as _;
use std::path::Path;

use crate::error::{Error, Result};
use crate::geom::{Point3, Tolerance};
use crate::mesh::Mesh;

/// Polygon soup as read from a file, before triangulation.
#[derive(Debug, Clone, Default, PartialEq)]
pub struct RawMesh {
    pub vertices: Vec<Point3>,
    pub faces: Vec<Vec<usize>>,
}

impl RawMesh {
    /// Triangulates faces and drops degenerate triangles (returned as warnings).
    pub fn into_mesh(self, tol: &Tolerance) -> Result<(Mesh, Vec<String>)> {
        Mesh::ingest(self.vertices, self.faces, tol)
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum MeshFormat {
    Off,
    Obj,
}

impl MeshFormat {
    pub fn from_path(path: &Path) -> Result<MeshFormat> {
        match path
            .extension()
            .and_then(|e| e.to_str())
            .map(|e| e.to_ascii_lowercase())
            .as_deref()
        {
            Some("off") => Ok(MeshFormat::Off),
            Some("obj") => Ok(MeshFormat::Obj),
            _ => Err(Error::Parse(format!(
                "cannot infer mesh format of {} (expected .off or .obj)",
                path.display()
            ))),
        }
    }
}

fn parse_f64(tok: &str, line: usize) -> Result<f64> {
    let v: f64 = tok
        .parse()
        .map_err(|_| Error::Parse(format!("line {line}: bad number {tok:?}")))?;
    if !v.is_finite() {
        return Err(Error::Parse(format!("line {line}: non-finite coordinate")));
    }
    Ok(v)
}

fn parse_usize(tok: &str, line: usize) -> Result<usize> {
    tok.parse()
        .map_err(|_| Error::Parse(format!("line {line}: bad integer {tok:?}")))
}

/// Parses an OFF document.
pub fn parse_off(text: &str) -> Result<RawMesh> {
    let mut tokens = text.lines().enumerate().flat_map(|(i, l)| {
        let l = l.split('#').next().unwrap_or("");
        l.split_whitespace().map(move |t| (i + 1, t))
    });
    let (line, head) = tokens.next().ok_or_else(|| Error::Parse("empty OFF document".into()))?;
    let mut next = || {
        tokens
            .next()
            .ok_or_else(|| Error::Parse("unexpected end of OFF document".into()))
    };
    let nv = if head == "OFF" {
        let (l, t) = next()?;
        parse_usize(t, l)?
    } else if let Some(rest) = head.strip_prefix("OFF") {
        parse_usize(rest, line)?
    } else {
        return Err(Error::Parse(format!("line {line}: missing OFF header")));
    };
    let (l, t) = next()?;
    let nf = parse_usize(t, l)?;
    let (l, t) = next()?;
    parse_usize(t, l)?;
    let mut raw = RawMesh::default();
    for _ in 0..nv {
        let mut c = [0.0; 3];
        for v in &mut c {
            let (l, t) = next()?;
            *v = parse_f64(t, l)?;
        }
        raw.vertices.push(Point3::from_array(c));
    }
    for _ in 0..nf {
        let (l, t) = next()?;
        let k = parse_usize(t, l)?;
        let mut face = Vec::with_capacity(k);
        for _ in 0..k {
            let (l, t) = next()?;
            let i = parse_usize(t, l)?;
            if i >= nv {
                return Err(Error::Parse(format!("line {l}: vertex index {i} out of range")));
            }
            face.push(i);
        }
        raw.faces.push(face);
    }
    Ok(raw)
}

/// Parses the vertex and face records of an OBJ document. Everything else
/// (normals, texture coordinates, materials, groups) is ignored.
pub fn parse_obj(text: &str) -> Result<RawMesh> {
    let mut raw = RawMesh::default();
    for (i, line) in text.lines().enumerate() {
        let line_no = i + 1;
        let line = line.split('#').next().unwrap_or("");
        let mut it = line.split_whitespace();
        match it.next() {
            Some("v") => {
                let mut c = [0.0; 3];
                for v in &mut c {
                    let t = it
                        .next()
                        .ok_or_else(|| Error::Parse(format!("line {line_no}: short vertex")))?;
                    *v = parse_f64(t, line_no)?;
                }
                raw.vertices.push(Point3::from_array(c));
            }
            Some("f") => {
                let mut face = Vec::new();
                for t in it {
                    let first = t.split('/').next().unwrap_or("");
                    let k: i64 = first
                        .parse()
                        .map_err(|_| Error::Parse(format!("line {line_no}: bad index {t:?}")))?;
                    let n = raw.vertices.len() as i64;
                    let idx = if k > 0 { k - 1 } else { n + k };
                    if idx < 0 || idx >= n {
                        return Err(Error::Parse(format!("line {line_no}: vertex index {k} out of range")));
                    }
                    face.push(idx as usize);
                }
                raw.faces.push(face);
            }
            _ => {}
        }
    }
    Ok(raw)
}

pub fn to_off(m: &Mesh) -> String {
    let mut s = String::with_capacity(32 * (m.vertices().len() + m.triangles().len()));
    let _ = writeln!(s, "OFF\n{} {} 0", m.vertices().len(), m.triangles().len());
    for v in m.vertices() {
        let _ = writeln!(s, "{} {} {}", v.x, v.y, v.z);
    }
    for t in m.triangles() {
        let _ = writeln!(s, "3 {} {} {}", t[0], t[1], t[2]);
    }
    s
}

/// OFF text for a list of polygons (or polylines), each with its own vertices.
pub fn polygons_to_off(polys: &[Vec<Point3>]) -> String {
    let nv: usize = polys.iter().map(Vec::len).sum();
    let mut s = String::with_capacity(32 * (nv + polys.len()));
    let _ = writeln!(s, "OFF\n{nv} {} 0", polys.len());
    for v in polys.iter().flatten() {
        let _ = writeln!(s, "{} {} {}", v.x, v.y, v.z);
    }
    let mut k = 0;
    for p in polys {
        let _ = write!(s, "{}", p.len());
        for i in k..k + p.len() {
            let _ = write!(s, " {i}");
        }
        s.push('\n');
        k += p.len();
    }
    s
}

pub fn to_obj(m: &Mesh) -> String {
    let mut s = String::with_capacity(32 * (m.vertices().len() + m.triangles().len()));
    for v in m.vertices() {
        let _ = writeln!(s, "v {} {} {}", v.x, v.y, v.z);
    }
    for t in m.triangles() {
        let _ = writeln!(s, "f {} {} {}", t[0] + 1, t[1] + 1, t[2] + 1);
    }
    s
}

pub fn parse(text: &str, format: MeshFormat) -> Result<RawMesh> {
    match format {
        MeshFormat::Off => parse_off(text),
        MeshFormat::Obj => parse_obj(text),
    }
}

pub fn format(m: &Mesh, format: MeshFormat) -> String {
    match format {
        MeshFormat::Off => to_off(m),
        MeshFormat::Obj => to_obj(m),
    }
}

/// Reads a mesh file, inferring the format from its extension.
pub fn read_mesh(path: &Path, tol: &Tolerance) -> Result<(Mesh, Vec<String>)> {
    let fmt = MeshFormat::from_path(path)?;
    let text = std::fs::read_to_string(path).map_err(|e| Error::Io(format!("{}: {e}", path.display())))?;
    parse(&text, fmt)?.into_mesh(tol)
}
