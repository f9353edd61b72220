mod common;

use common::*;
use solidkit::{convex_decompose, mesh_volume, shapes, union, validate_mesh, Mesh, Point3, Tolerance};
use solidkit_oracles::hull::{mesh_is_convex, HRep};
use solidkit_oracles::voxel::Grid;

fn check(m: &Mesh, bound: usize) {
    let tol = Tolerance::default();
    let d = convex_decompose(m, None, &tol).unwrap();
    assert!(d.pieces.len() <= bound, "{} pieces > {bound}", d.pieces.len());
    let total: f64 = d.pieces.iter().map(|p| mesh_volume(p).unwrap()).sum();
    let v = mesh_volume(m).unwrap();
    assert!(rel_close(total, v, 1e-9), "{total} vs {v}");
    let hulls: Vec<HRep> = d
        .pieces
        .iter()
        .map(|p| {
            let (v, t) = arrays(p);
            assert!(mesh_is_convex(&v, &t, 1e-9));
            assert!(validate_mesh(p, &tol).is_valid());
            HRep::from_points(&v)
        })
        .collect();
    let bb = m.aabb();
    let g = Grid::covering(bb.min.to_array(), bb.max.to_array(), 64);
    let inside = inside(m);
    let (mut covered, mut interior) = (0usize, 0usize);
    for i in 0..g.n {
        for j in 0..g.n {
            for k in 0..g.n {
                let c = g.centre(i, j, k);
                let n = hulls.iter().filter(|h| h.excess(c) < -1e-12).count();
                assert!(n <= 1, "voxel centre {c:?} inside {n} pieces");
                covered += n;
                interior += inside(c) as usize;
            }
        }
    }
    assert!(covered.abs_diff(interior) <= interior / 50);
    let again = convex_decompose(m, None, &tol).unwrap();
    assert_eq!(again.pieces, d.pieces);
}

#[test]
fn fixtures() {
    check(&shapes::unit_cube(), 1);
    check(&shapes::l_prism(), 3);
    for k in 1..=4 {
        check(&shapes::staircase(k), k + 1);
    }
}

#[test]
fn union_of_offset_boxes() {
    let a = shapes::cuboid(Point3::ORIGIN, Point3::new(2.0, 1.0, 1.0));
    let b = shapes::cuboid(Point3::new(1.0, 0.5, 0.5), Point3::new(3.0, 2.0, 2.0));
    check(&union(&[a, b]).unwrap(), 6);
}

#[test]
fn convex_inputs_are_fixed_points() {
    let mut r = rng(31);
    for _ in 0..5 {
        let m = random_convex(&mut r, Point3::ORIGIN, 1.0, 20);
        let d = convex_decompose(&m, None, &Tolerance::default()).unwrap();
        assert_eq!(d.pieces, vec![m]);
    }
}
