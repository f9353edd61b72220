#![allow(dead_code)]

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use solidkit::{ConvexPolytope, Mesh, Point3};
use solidkit_oracles::V3;

pub fn rng(seed: u64) -> ChaCha8Rng {
    ChaCha8Rng::seed_from_u64(seed)
}

pub fn arrays(m: &Mesh) -> (Vec<V3>, Vec<[usize; 3]>) {
    (
        m.vertices().iter().map(|p| p.to_array()).collect(),
        m.triangles().to_vec(),
    )
}

pub fn inside(m: &Mesh) -> impl Fn(V3) -> bool {
    let (v, t) = arrays(m);
    move |p| solidkit_oracles::inside_mesh(&v, &t, p)
}

pub fn random_point(rng: &mut impl Rng, lo: f64, hi: f64) -> Point3 {
    Point3::new(rng.gen_range(lo..hi), rng.gen_range(lo..hi), rng.gen_range(lo..hi))
}

/// Points scattered on a randomly stretched sphere.
pub fn blob_points(rng: &mut impl Rng, centre: Point3, radius: f64, n: usize) -> Vec<Point3> {
    let stretch = Point3::new(
        rng.gen_range(0.6..1.4),
        rng.gen_range(0.6..1.4),
        rng.gen_range(0.6..1.4),
    );
    (0..n)
        .map(|_| loop {
            let d = random_point(rng, -1.0, 1.0);
            let l = d.norm();
            if l > 0.1 && l <= 1.0 {
                let u = d / l * radius;
                break centre + Point3::new(u.x * stretch.x, u.y * stretch.y, u.z * stretch.z);
            }
        })
        .collect()
}

pub fn random_convex(rng: &mut impl Rng, centre: Point3, radius: f64, n: usize) -> Mesh {
    ConvexPolytope::from_points(&blob_points(rng, centre, radius, n))
        .and_then(|p| p.to_mesh())
        .expect("random blob is full-dimensional")
}

/// A pair of overlapping random convex polytopes.
pub fn convex_pair(rng: &mut impl Rng) -> (Mesh, Mesh) {
    let n = rng.gen_range(8..24);
    let a = random_convex(rng, Point3::ORIGIN, 1.0, n);
    let c = random_point(rng, -0.8, 0.8);
    let (r, n) = (rng.gen_range(0.5..1.2), rng.gen_range(8..24));
    let b = random_convex(rng, c, r, n);
    (a, b)
}

pub fn rel_close(a: f64, b: f64, rel: f64) -> bool {
    (a - b).abs() <= rel * a.abs().max(b.abs()).max(f64::MIN_POSITIVE)
}
