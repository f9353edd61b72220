mod common;

use common::*;
use proptest::prelude::*;
use solidkit::{difference, meet, mesh_volume, symmetric_difference, union, validate_mesh, Mesh, Tolerance};
use solidkit_oracles::hull::HRep;
use solidkit_oracles::voxel::Grid;

fn vol(m: &Mesh) -> f64 {
    mesh_volume(m).unwrap()
}

fn hrep(m: &Mesh) -> HRep {
    HRep::from_points(&arrays(m).0)
}

#[test]
fn voxel_agreement_on_random_pairs() {
    let mut r = rng(11);
    for _ in 0..6 {
        let (a, b) = convex_pair(&mut r);
        let (ha, hb) = (hrep(&a), hrep(&b));
        let bb = a.aabb().union(b.aabb());
        let g = Grid::covering(bb.min.to_array(), bb.max.to_array(), 96);
        let vox = |f: &dyn Fn(bool, bool) -> bool| g.volume(|p| f(ha.contains(p), hb.contains(p)));
        let checks: [(Mesh, f64); 4] = [
            (union(&[a.clone(), b.clone()]).unwrap(), vox(&|x, y| x || y)),
            (meet(&[a.clone(), b.clone()]).unwrap(), vox(&|x, y| x && y)),
            (difference(&a, &b).unwrap(), vox(&|x, y| x && !y)),
            (symmetric_difference(&a, &b).unwrap(), vox(&|x, y| x != y)),
        ];
        let scale = vol(&a).max(vol(&b));
        for (m, expect) in &checks {
            assert!(validate_mesh(m, &Tolerance::for_diameter(bb.diagonal())).is_valid());
            assert!((vol(m) - expect).abs() < 0.02 * scale, "{} vs voxel {expect}", vol(m));
        }
    }
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(16))]

    #[test]
    fn inclusion_exclusion_and_de_morgan(seed in any::<u64>()) {
        let (a, b) = convex_pair(&mut rng(seed));
        let (va, vb) = (vol(&a), vol(&b));
        let u = vol(&union(&[a.clone(), b.clone()]).unwrap());
        let i = vol(&meet(&[a.clone(), b.clone()]).unwrap());
        let d = vol(&difference(&a, &b).unwrap());
        let x = vol(&symmetric_difference(&a, &b).unwrap());
        prop_assert!(rel_close(va + vb, u + i, 1e-6));
        prop_assert!(rel_close(d, va - i, 1e-6) || (d - (va - i)).abs() < 1e-9 * va);
        prop_assert!(rel_close(x, u - i, 1e-6) || (x - (u - i)).abs() < 1e-9 * va);
    }

    #[test]
    fn union_commutes(seed in any::<u64>()) {
        let (a, b) = convex_pair(&mut rng(seed));
        let ab = union(&[a.clone(), b.clone()]).unwrap();
        let ba = union(&[b, a]).unwrap();
        let gap = vol(&symmetric_difference(&ab, &ba).unwrap());
        prop_assert!(gap.abs() <= 1e-9 * vol(&ab));
    }
}

#[test]
fn union_associates() {
    let mut r = rng(5);
    let a = random_convex(&mut r, solidkit::Point3::ORIGIN, 1.0, 16);
    let b = random_convex(&mut r, solidkit::Point3::new(0.6, 0.0, 0.0), 1.0, 16);
    let c = random_convex(&mut r, solidkit::Point3::new(0.0, 0.6, 0.2), 1.0, 16);
    let left = union(&[union(&[a.clone(), b.clone()]).unwrap(), c.clone()]).unwrap();
    let right = union(&[a, union(&[b, c]).unwrap()]).unwrap();
    let gap = vol(&symmetric_difference(&left, &right).unwrap());
    assert!(gap.abs() <= 1e-9 * vol(&left));
}
