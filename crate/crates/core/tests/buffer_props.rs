mod common;

use common::*;
use rand::Rng;
use solidkit::{
    buffer_body, buffer_face, buffer_point, buffer_polyline, mesh_volume, shapes, validate_mesh, BufferParams, Mesh,
    Point3, Segment3, Tolerance,
};

/// Cyclic axis permutation: a rotation that maps the icosphere onto itself.
fn rot(p: Point3) -> Point3 {
    Point3::new(p.z, p.x, p.y)
}

fn sorted(m: &Mesh) -> Vec<[f64; 3]> {
    let mut v: Vec<[f64; 3]> = m.vertices().iter().map(|p| p.to_array()).collect();
    v.sort_by(|a, b| a.partial_cmp(b).unwrap());
    v
}

fn surface_samples(m: &Mesh, r: &mut impl Rng, n: usize) -> Vec<Point3> {
    (0..n)
        .map(|_| {
            let t = m.triangle(r.gen_range(0..m.triangles().len()));
            let (mut u, mut v) = (r.gen::<f64>(), r.gen::<f64>());
            if u + v > 1.0 {
                (u, v) = (1.0 - u, 1.0 - v);
            }
            t.p + (t.q - t.p) * u + (t.r - t.p) * v
        })
        .collect()
}

fn polyline() -> Vec<Segment3> {
    let p = [
        Point3::new(0.0, 0.0, 0.0),
        Point3::new(1.0, 0.2, 0.0),
        Point3::new(1.4, 1.0, 0.3),
        Point3::new(0.6, 1.5, 0.9),
    ];
    p.windows(2).map(|w| Segment3::new(w[0], w[1])).collect()
}

fn dist_to_line(line: &[Segment3], q: Point3) -> f64 {
    line.iter().map(|s| s.distance_to(q)).fold(f64::INFINITY, f64::min)
}

#[test]
fn distance_law() {
    let mut r = rng(41);
    let params = BufferParams::new(0.3, 3).unwrap();
    let (rad, sag) = (params.distance, params.sag());
    let line = polyline();
    let b = buffer_polyline(&line, &params).unwrap();
    assert!(validate_mesh(&b, &Tolerance::default()).is_valid());
    for v in b.vertices() {
        assert!(dist_to_line(&line, *v) <= rad + 1e-9);
    }
    for q in surface_samples(&b, &mut r, 10_000) {
        assert!(dist_to_line(&line, q) >= rad - sag - 1e-9);
    }
    let c = Point3::new(1.0, -2.0, 0.5);
    let ball = buffer_point(c, &params).unwrap();
    for q in surface_samples(&ball, &mut r, 2000) {
        let d = q.distance(c);
        assert!(d >= rad - sag - 1e-12 && d <= rad + 1e-12);
    }
}

#[test]
fn monotone_and_contains_entity() {
    let mut r = rng(42);
    let line = polyline();
    let small = buffer_polyline(&line, &BufferParams::new(0.2, 2).unwrap()).unwrap();
    let large = buffer_polyline(&line, &BufferParams::new(0.3, 2).unwrap()).unwrap();
    let (in_small, in_large) = (inside(&small), inside(&large));
    let bb = small.aabb();
    let mut hits = 0;
    for _ in 0..10_000 {
        let q = Point3::new(
            r.gen_range(bb.min.x..bb.max.x),
            r.gen_range(bb.min.y..bb.max.y),
            r.gen_range(bb.min.z..bb.max.z),
        );
        if in_small(q.to_array()) {
            hits += 1;
            assert!(in_large(q.to_array()));
        }
    }
    assert!(hits > 200);
    for s in &line {
        for k in 0..=10 {
            assert!(in_small(s.a.lerp(s.b, k as f64 / 10.0).to_array()));
        }
    }
}

#[test]
fn equivariance() {
    let tol = Tolerance::default();
    let params = BufferParams::new(0.25, 2).unwrap();
    let d = Point3::new(3.0, -1.0, 2.0);
    let vol = |m: &Mesh| mesh_volume(m).unwrap();

    let p = Point3::new(0.5, 0.1, -0.2);
    let a = buffer_point(p, &params).unwrap();
    let (x, y) = (sorted(&buffer_point(rot(p), &params).unwrap()), sorted(&a.mapped(rot)));
    assert_eq!(x.len(), y.len());
    for u in &x {
        assert!(y.iter().any(|v| (0..3).all(|k| (u[k] - v[k]).abs() < 1e-12)));
    }

    let line = polyline();
    let a = buffer_polyline(&line, &params).unwrap();
    let moved: Vec<Segment3> = line.iter().map(|s| Segment3::new(s.a + d, s.b + d)).collect();
    let turned: Vec<Segment3> = line.iter().map(|s| Segment3::new(rot(s.a), rot(s.b))).collect();
    assert!(rel_close(
        vol(&buffer_polyline(&moved, &params).unwrap()),
        vol(&a),
        1e-9
    ));
    assert!(rel_close(
        vol(&buffer_polyline(&turned, &params).unwrap()),
        vol(&a),
        1e-9
    ));

    let face = Mesh::new(
        vec![
            Point3::new(0.0, 0.0, 0.0),
            Point3::new(1.0, 0.0, 0.0),
            Point3::new(0.3, 0.8, 0.0),
        ],
        vec![[0, 1, 2]],
    )
    .unwrap();
    let a = buffer_face(&face, &params, &tol).unwrap();
    assert!(rel_close(
        vol(&buffer_face(&face.translated(d), &params, &tol).unwrap()),
        vol(&a),
        1e-9
    ));
    assert!(rel_close(
        vol(&buffer_face(&face.mapped(rot), &params, &tol).unwrap()),
        vol(&a),
        1e-9
    ));

    let body = shapes::unit_tetrahedron();
    let a = buffer_body(&body, &params, &tol).unwrap();
    assert!(rel_close(
        vol(&buffer_body(&body.translated(d), &params, &tol).unwrap()),
        vol(&a),
        1e-9
    ));
    assert!(rel_close(
        vol(&buffer_body(&body.mapped(rot), &params, &tol).unwrap()),
        vol(&a),
        1e-9
    ));
    assert!(inside(&a)([0.1, 0.1, 0.1]));
}
