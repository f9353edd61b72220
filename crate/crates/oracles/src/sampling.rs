//! Intersection kinds decided by dense sampling.
//!
//! Each oracle returns `None` when a sample lands so close to a boundary
//! that floating point cannot decide.

use crate::{cross, dot, norm, sub, V3};

pub const SAMPLES: usize = 10_000;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Kind {
    Empty,
    Points,
    Segments,
    Polygons,
}

struct Plane {
    origin: V3,
    normal: V3,
    tri: [V3; 3],
    scale: f64,
}

impl Plane {
    fn of(t: [V3; 3]) -> Plane {
        let n = cross(sub(t[1], t[0]), sub(t[2], t[0]));
        let l = norm(n);
        let scale = (0..3).map(|i| norm(sub(t[i], t[(i + 1) % 3]))).fold(0.0, f64::max);
        Plane {
            origin: t[0],
            normal: n.map(|x| x / l),
            tri: t,
            scale,
        }
    }

    fn dist(&self, p: V3) -> f64 {
        dot(self.normal, sub(p, self.origin))
    }

    /// Smallest barycentric coordinate of the projection of `p`, scaled to a
    /// length: positive inside, negative outside.
    fn inside_margin(&self, p: V3) -> f64 {
        (0..3)
            .map(|i| {
                let (a, b) = (self.tri[i], self.tri[(i + 1) % 3]);
                let e = sub(b, a);
                dot(cross(e, sub(p, a)), self.normal) / norm(e)
            })
            .fold(f64::INFINITY, f64::min)
    }
}

fn lerp(a: V3, b: V3, t: f64) -> V3 {
    [
        a[0] + (b[0] - a[0]) * t,
        a[1] + (b[1] - a[1]) * t,
        a[2] + (b[2] - a[2]) * t,
    ]
}

/// Kind of `segment ∩ triangle`: `Empty`, `Points` or `Segments` (coplanar).
pub fn segment_triangle(a: V3, b: V3, tri: [V3; 3]) -> Option<Kind> {
    let pl = Plane::of(tri);
    let scale = pl.scale.max(norm(sub(b, a)));
    let flat = 1e-12 * scale;
    let margin = 1e-9 * scale;
    let samples: Vec<V3> = (0..SAMPLES)
        .map(|i| lerp(a, b, i as f64 / (SAMPLES - 1) as f64))
        .collect();
    let d: Vec<f64> = samples.iter().map(|&p| pl.dist(p)).collect();
    if d.iter().all(|x| x.abs() <= flat) {
        let best = samples
            .iter()
            .map(|&p| pl.inside_margin(p))
            .fold(f64::NEG_INFINITY, f64::max);
        return if best > margin {
            Some(Kind::Segments)
        } else if best < -margin {
            Some(Kind::Empty)
        } else {
            None
        };
    }
    let mut verdict = Some(Kind::Empty);
    for i in 0..SAMPLES - 1 {
        let (d0, d1) = (d[i], d[i + 1]);
        if (d0 > 0.0) == (d1 > 0.0) && d0 != 0.0 && d1 != 0.0 {
            continue;
        }
        let t = if d0 == d1 { 0.0 } else { d0 / (d0 - d1) };
        let p = lerp(samples[i], samples[i + 1], t);
        let m = pl.inside_margin(p);
        if m > margin {
            return Some(Kind::Points);
        }
        if m >= -margin {
            verdict = None;
        }
    }
    if d.iter().any(|x| x.abs() <= margin) && verdict == Some(Kind::Empty) {
        // Grazes the plane without a clear sign change.
        let near = samples
            .iter()
            .zip(&d)
            .filter(|(_, x)| x.abs() <= margin)
            .any(|(&p, _)| pl.inside_margin(p) >= -margin);
        if near {
            return None;
        }
    }
    verdict
}

/// Kind of `triangle ∩ triangle`: `Empty`, `Segments` (transversal) or
/// `Polygons` (coplanar overlap).
pub fn triangle_triangle(a: [V3; 3], b: [V3; 3]) -> Option<Kind> {
    let pa = Plane::of(a);
    let scale = pa.scale.max(Plane::of(b).scale);
    if b.iter().all(|&p| pa.dist(p).abs() <= 1e-12 * scale) {
        let pb = Plane::of(b);
        let steps = 100;
        let mut best = f64::NEG_INFINITY;
        for (src, dst) in [(&a, &pb), (&b, &pa)] {
            for i in 0..=steps {
                for j in 0..=steps - i {
                    let (u, v) = (i as f64 / steps as f64, j as f64 / steps as f64);
                    let w = 1.0 - u - v;
                    let p = [0, 1, 2].map(|k| src[0][k] * w + src[1][k] * u + src[2][k] * v);
                    best = best.max(dst.inside_margin(p));
                }
            }
        }
        let margin = 1e-9 * scale;
        return if best > margin {
            Some(Kind::Polygons)
        } else if best < -margin {
            Some(Kind::Empty)
        } else {
            None
        };
    }
    let mut any = false;
    for (src, dst) in [(a, b), (b, a)] {
        for i in 0..3 {
            match segment_triangle(src[i], src[(i + 1) % 3], dst)? {
                Kind::Empty => {}
                _ => any = true,
            }
        }
    }
    Some(if any { Kind::Segments } else { Kind::Empty })
}
