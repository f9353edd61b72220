//! Buffers of point, line, face and body entities.
//!
//! The ball of radius `R` is approximated by an inscribed icosphere, so every
//! buffer under-approximates the true one: output vertices are at distance
//! at most `R` from the entity, and the boundary is no closer than
//! `R · (1 − sag(lod))`.

use rayon::prelude::*;

use crate::convex::{minkowski_sum_with_polytope, ConvexPolytope};
use crate::error::{Error, Result};
use crate::geom::{Point3, Segment3, Tolerance};
use crate::mesh::Mesh;
use crate::shapes;

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct BufferParams {
    pub distance: f64,
    pub sphere_lod: u32,
}

impl BufferParams {
    pub const DEFAULT_LOD: u32 = 3;

    pub fn new(distance: f64, sphere_lod: u32) -> Result<BufferParams> {
        if !(distance > 0.0 && distance.is_finite()) {
            return Err(Error::Parameter(format!(
                "buffer distance must be positive, got {distance}"
            )));
        }
        if !(1..=6).contains(&sphere_lod) {
            return Err(Error::Parameter(format!(
                "sphere lod must be in 1..=6, got {sphere_lod}"
            )));
        }
        Ok(BufferParams { distance, sphere_lod })
    }

    /// Radial sag of the ball approximation, as a distance.
    pub fn sag(&self) -> f64 {
        self.distance * shapes::icosphere_sag(self.sphere_lod)
    }

    fn ball_points(&self, center: Point3) -> Vec<Point3> {
        let (dirs, _) = shapes::icosphere_directions(self.sphere_lod);
        dirs.iter().map(|&d| center + d * self.distance).collect()
    }

    fn ball(&self) -> Result<ConvexPolytope> {
        ConvexPolytope::from_points(&self.ball_points(Point3::ORIGIN))
    }

    fn check(&self) -> Result<()> {
        BufferParams::new(self.distance, self.sphere_lod).map(|_| ())
    }
}

fn hull_of_balls(centers: &[Point3], params: &BufferParams) -> Result<Mesh> {
    let pts: Vec<Point3> = centers.iter().flat_map(|&c| params.ball_points(c)).collect();
    ConvexPolytope::from_points(&pts)?.to_solid_mesh(&Tolerance::for_points(&pts))
}

/// Icosphere of radius `R` around `p`.
pub fn buffer_point(p: Point3, params: &BufferParams) -> Result<Mesh> {
    params.check()?;
    p.check_finite()?;
    Ok(shapes::icosphere(p, params.distance, params.sphere_lod))
}

/// Union of per-segment capsules (hull of the balls at both ends).
pub fn buffer_polyline(line: &[Segment3], params: &BufferParams) -> Result<Mesh> {
    params.check()?;
    if line.is_empty() {
        return Err(Error::InvalidInput("polyline has no segments".into()));
    }
    for s in line {
        s.a.check_finite()?;
        s.b.check_finite()?;
    }
    let capsules: Vec<Mesh> = line
        .par_iter()
        .map(|s| hull_of_balls(&[s.a, s.b], params))
        .collect::<Result<_>>()?;
    crate::setops::union(&capsules)
}

/// Buffer of a triangulated planar polygon: union of per-triangle hulls of
/// the balls at its corners.
pub fn buffer_face(face: &Mesh, params: &BufferParams, tol: &Tolerance) -> Result<Mesh> {
    params.check()?;
    if face.triangles().is_empty() {
        return Err(Error::InvalidInput("face has no triangles".into()));
    }
    let total = face
        .triangle_iter()
        .map(|t| t.normal())
        .fold(Point3::ORIGIN, |a, n| a + n);
    if total.norm() == 0.0 {
        return Err(Error::InvalidInput("face has no consistent orientation".into()));
    }
    let n = total.normalized();
    for t in face.triangle_iter() {
        if t.area() == 0.0 {
            return Err(Error::InvalidInput("face contains a degenerate triangle".into()));
        }
        let angle = t.unit_normal().dot(n).clamp(-1.0, 1.0).acos();
        if angle > tol.angular_eps {
            return Err(Error::InvalidInput(format!(
                "face is not planar (triangle tilted by {angle:e} rad)"
            )));
        }
    }
    let pieces: Vec<Mesh> = face
        .triangle_iter()
        .collect::<Vec<_>>()
        .par_iter()
        .map(|t| hull_of_balls(&t.vertices(), params))
        .collect::<Result<_>>()?;
    crate::setops::union(&pieces)
}

/// Minkowski sum of a solid with the ball.
pub fn buffer_body(m: &Mesh, params: &BufferParams, tol: &Tolerance) -> Result<Mesh> {
    params.check()?;
    m.check_solid()?;
    minkowski_sum_with_polytope(m, &params.ball()?, tol)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::mesh::{mesh_volume, validate_mesh};
    use std::f64::consts::PI;

    fn vol(m: &Mesh) -> f64 {
        mesh_volume(m).unwrap()
    }

    fn p(r: f64, lod: u32) -> BufferParams {
        BufferParams::new(r, lod).unwrap()
    }

    #[test]
    fn params_are_checked() {
        assert!(BufferParams::new(0.0, 3).is_err());
        assert!(BufferParams::new(-1.0, 3).is_err());
        assert!(BufferParams::new(1.0, 0).is_err());
        assert!(BufferParams::new(1.0, 7).is_err());
        let bad = BufferParams {
            distance: -1.0,
            sphere_lod: 3,
        };
        assert!(matches!(buffer_point(Point3::ORIGIN, &bad), Err(Error::Parameter(_))));
    }

    #[test]
    fn point_ball() {
        let b = buffer_point(Point3::ORIGIN, &p(1.0, 3)).unwrap();
        let exact = 4.0 * PI / 3.0;
        assert!(vol(&b) < exact && vol(&b) > 0.98 * exact);
        let moved = buffer_point(Point3::new(5.0, 5.0, 5.0), &p(1.0, 3)).unwrap();
        assert_eq!(moved, b.translated(Point3::new(5.0, 5.0, 5.0)));
        let coarse = vol(&buffer_point(Point3::ORIGIN, &p(1.0, 1)).unwrap());
        let fine = vol(&buffer_point(Point3::ORIGIN, &p(1.0, 4)).unwrap());
        assert!(coarse < fine && fine < exact);
    }

    #[test]
    fn capsule_and_polyline() {
        let tol = Tolerance::default();
        let (r, l) = (0.5, 2.0);
        let s = Segment3::new(Point3::ORIGIN, Point3::new(l, 0.0, 0.0));
        let c = buffer_polyline(&[s], &p(r, 3)).unwrap();
        let exact = PI * r * r * l + 4.0 * PI * r * r * r / 3.0;
        assert!((vol(&c) - exact).abs() < 0.03 * exact, "{}", vol(&c));
        assert!(validate_mesh(&c, &tol).is_valid());
        let two = [
            Segment3::new(Point3::ORIGIN, Point3::new(1.0, 0.0, 0.0)),
            Segment3::new(Point3::new(1.0, 0.0, 0.0), Point3::new(l, 0.0, 0.0)),
        ];
        let c2 = buffer_polyline(&two, &p(r, 3)).unwrap();
        assert!((vol(&c2) - vol(&c)).abs() < 1e-6 * vol(&c));
        let bend = [
            Segment3::new(Point3::ORIGIN, Point3::new(1.0, 0.0, 0.0)),
            Segment3::new(Point3::new(1.0, 0.0, 0.0), Point3::new(1.0, 1.0, 0.0)),
        ];
        let b = buffer_polyline(&bend, &p(0.25, 2)).unwrap();
        let single = vol(&buffer_polyline(&bend[..1], &p(0.25, 2)).unwrap());
        assert!(vol(&b) < 2.0 * single);
        assert!(validate_mesh(&b, &tol).is_valid());
    }

    #[test]
    fn square_face() {
        let tol = Tolerance::default();
        let sq = Mesh::new(
            vec![
                Point3::new(0.0, 0.0, 0.0),
                Point3::new(1.0, 0.0, 0.0),
                Point3::new(1.0, 1.0, 0.0),
                Point3::new(0.0, 1.0, 0.0),
            ],
            vec![[0, 1, 2], [0, 2, 3]],
        )
        .unwrap();
        let r = 0.1;
        let b = buffer_face(&sq, &p(r, 3), &tol).unwrap();
        let steiner = 2.0 * r + 4.0 * PI * r * r / 2.0 + 4.0 * PI * r * r * r / 3.0;
        assert!((vol(&b) - steiner).abs() < 0.03 * steiner, "{} vs {steiner}", vol(&b));
        assert!(validate_mesh(&b, &tol).is_valid());
        let thin = buffer_face(&sq, &p(0.001, 2), &tol).unwrap();
        assert!((vol(&thin) - 0.002).abs() < 0.05 * 0.002);
        let bent = sq.mapped(|q| {
            if q.x == 1.0 && q.y == 1.0 {
                Point3::new(1.0, 1.0, 0.1)
            } else {
                q
            }
        });
        assert!(matches!(
            buffer_face(&bent, &p(r, 3), &tol),
            Err(Error::InvalidInput(_))
        ));
    }

    #[test]
    fn ball_body_grows_radius() {
        let tol = Tolerance::default();
        let s = shapes::icosphere(Point3::ORIGIN, 1.0, 3);
        let b = buffer_body(&s, &p(0.5, 3), &tol).unwrap();
        let exact = 4.0 * PI * 1.5f64.powi(3) / 3.0;
        assert!((vol(&b) - exact).abs() < 0.03 * exact, "{}", vol(&b));
        for v in b.vertices() {
            assert!(v.norm() <= 1.5 + 1e-9);
        }
    }

    #[test]
    fn cube_body_steiner() {
        let tol = Tolerance::default();
        let r = 0.2;
        let b = buffer_body(&shapes::unit_cube(), &p(r, 3), &tol).unwrap();
        let steiner = 1.0 + 6.0 * r + PI * 12.0 * r * r / 4.0 + 4.0 * PI * r * r * r / 3.0;
        assert!((vol(&b) - steiner).abs() < 0.03 * steiner, "{} vs {steiner}", vol(&b));
        assert!(validate_mesh(&b, &tol).is_valid());
    }
}
