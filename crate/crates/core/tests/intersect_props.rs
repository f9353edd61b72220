mod common;

use common::*;
use rand::Rng;
use solidkit::intersect::{detect_pairs, segment_triangle, triangle_triangle};
use solidkit::{
    meet, mesh_volume, shapes, AabbTree, IntersectionKind, IntersectionOutcome, Point3, Segment3, Tolerance, Triangle3,
};
use solidkit_oracles::sampling::{self, Kind};

fn kind(k: Kind) -> IntersectionKind {
    match k {
        Kind::Empty => IntersectionKind::Empty,
        Kind::Points => IntersectionKind::Points,
        Kind::Segments => IntersectionKind::Segments,
        Kind::Polygons => IntersectionKind::Polygons,
    }
}

fn plane_residual(t: &Triangle3, p: Point3) -> f64 {
    t.unit_normal().dot(p - t.p).abs()
}

fn random_triangle(r: &mut impl Rng, flat: bool) -> Triangle3 {
    let mut p = || {
        let q = random_point(r, -1.0, 1.0);
        if flat {
            Point3::new(q.x, q.y, 0.0)
        } else {
            q
        }
    };
    Triangle3::new(p(), p(), p())
}

#[test]
fn segment_triangle_matches_sampling() {
    let mut r = rng(21);
    let tol = Tolerance::default();
    let (mut hits, mut undecided) = (0, 0);
    for i in 0..300 {
        let flat = i % 5 == 0;
        let t = random_triangle(&mut r, flat);
        let s = random_triangle(&mut r, flat);
        let seg = Segment3::new(s.p, s.q);
        let Some(expect) =
            sampling::segment_triangle(seg.a.to_array(), seg.b.to_array(), t.vertices().map(|p| p.to_array()))
        else {
            undecided += 1;
            continue;
        };
        let got = segment_triangle(&seg, &t, &tol).unwrap();
        assert_eq!(got.kind(), kind(expect), "pair {i}");
        if let IntersectionOutcome::Points(p) = &got {
            hits += 1;
            assert!(plane_residual(&t, p[0]) < 1e-9 * 4.0);
            assert!(seg.distance_to(p[0]) < 1e-9 * 4.0);
        }
    }
    assert!(hits > 10);
    assert_eq!(undecided, 0);
}

#[test]
fn triangle_triangle_matches_sampling_and_is_symmetric() {
    let mut r = rng(22);
    let tol = Tolerance::default();
    for i in 0..300 {
        let flat = i % 5 == 0;
        let a = random_triangle(&mut r, flat);
        let b = random_triangle(&mut r, flat);
        let got = triangle_triangle(&a, &b, &tol).unwrap();
        let back = triangle_triangle(&b, &a, &tol).unwrap();
        assert_eq!(got.kind(), back.kind());
        if let Some(expect) =
            sampling::triangle_triangle(a.vertices().map(|p| p.to_array()), b.vertices().map(|p| p.to_array()))
        {
            assert_eq!(got.kind(), kind(expect), "pair {i}");
        }
        for p in got.points() {
            assert!(plane_residual(&a, p) < 4e-9 && plane_residual(&b, p) < 4e-9);
        }
    }
}

fn random_boxes(r: &mut impl Rng, n: usize, span: f64) -> Vec<solidkit::Mesh> {
    (0..n)
        .map(|_| {
            let lo = random_point(r, 0.0, span);
            let size = Point3::new(r.gen_range(0.2..1.5), r.gen_range(0.2..1.5), r.gen_range(0.2..1.5));
            shapes::cuboid(lo, lo + size)
        })
        .collect()
}

#[test]
fn detect_pairs_equals_brute_force() {
    let mut r = rng(23);
    for n in [50, 200, 500] {
        let scene = random_boxes(&mut r, n, 12.0);
        let tree = AabbTree::for_scene(&scene);
        let got = detect_pairs(&scene, &tree).unwrap();
        let boxes: Vec<([f64; 3], [f64; 3])> = scene
            .iter()
            .map(|m| (m.aabb().min.to_array(), m.aabb().max.to_array()))
            .collect();
        assert_eq!(got, solidkit_oracles::overlapping_box_pairs(&boxes), "scene of {n}");
    }
}

#[test]
fn positive_meet_is_detected() {
    let mut r = rng(24);
    let scene: Vec<solidkit::Mesh> = (0..30)
        .map(|_| {
            let c = random_point(&mut r, 0.0, 4.0);
            random_convex(&mut r, c, 0.7, 10)
        })
        .collect();
    let tree = AabbTree::for_scene(&scene);
    let pairs = detect_pairs(&scene, &tree).unwrap();
    for i in 0..scene.len() {
        for j in i + 1..scene.len() {
            let m = meet(&[scene[i].clone(), scene[j].clone()]).unwrap();
            if mesh_volume(&m).unwrap() > 0.0 {
                assert!(pairs.contains(&(i, j)), "({i}, {j})");
            }
        }
    }
}
