use criterion::{black_box, criterion_group, criterion_main, BatchSize, Criterion};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use solidkit::intersect::detect_pairs;
use solidkit::{
    buffer_body, convex_decompose, convex_hull, meet, minkowski_sum_general, overlay, shapes, union, AabbTree,
    AttributeRecord, BufferParams, Layer, Mesh, Point3, Polygon, Tolerance,
};

fn rng() -> ChaCha8Rng {
    ChaCha8Rng::seed_from_u64(7)
}

fn cloud(n: usize) -> Vec<Point3> {
    let mut r = rng();
    (0..n)
        .map(|_| Point3::new(r.gen_range(-1.0..1.0), r.gen_range(-1.0..1.0), r.gen_range(-1.0..1.0)))
        .collect()
}

fn boxes(n: usize, span: f64) -> Vec<Mesh> {
    let mut r = rng();
    (0..n)
        .map(|_| {
            let lo = Point3::new(r.gen_range(0.0..span), r.gen_range(0.0..span), r.gen_range(0.0..span));
            shapes::cuboid(
                lo,
                lo + Point3::new(r.gen_range(0.25..1.0), r.gen_range(0.25..1.0), r.gen_range(0.25..1.0)),
            )
        })
        .collect()
}

fn hull(c: &mut Criterion) {
    for n in [100, 1000, 10_000] {
        let pts = cloud(n);
        c.bench_function(&format!("hull/{n}"), |b| {
            b.iter(|| convex_hull(black_box(&pts)).unwrap())
        });
    }
}

fn booleans(c: &mut Criterion) {
    let a = shapes::icosphere(Point3::ORIGIN, 1.0, 2);
    let b = a.translated(Point3::new(0.6, 0.2, 0.1));
    let pair = [a, b];
    c.bench_function("boolean/union icosphere", |bn| {
        bn.iter(|| union(black_box(&pair)).unwrap())
    });
    c.bench_function("boolean/meet icosphere", |bn| {
        bn.iter(|| meet(black_box(&pair)).unwrap())
    });
}

fn buffers(c: &mut Criterion) {
    let tol = Tolerance::default();
    let cube = shapes::unit_cube();
    for lod in [1, 2, 3] {
        let params = BufferParams::new(0.25, lod).unwrap();
        c.bench_function(&format!("buffer/cube lod {lod}"), |b| {
            b.iter(|| buffer_body(black_box(&cube), &params, &tol).unwrap())
        });
    }
}

fn pairs(c: &mut Criterion) {
    for n in [500, 5000] {
        let scene = boxes(n, 26.0 * (n as f64 / 5000.0).cbrt());
        c.bench_function(&format!("detect_pairs/{n}"), |b| {
            b.iter(|| detect_pairs(black_box(&scene), &AabbTree::for_scene(&scene)).unwrap())
        });
    }
}

fn decompose_and_sum(c: &mut Criterion) {
    let tol = Tolerance::default();
    let stairs = shapes::staircase(4);
    c.bench_function("decompose/staircase 4", |b| {
        b.iter(|| convex_decompose(black_box(&stairs), None, &tol).unwrap())
    });
    let l = shapes::l_prism();
    let small = shapes::cuboid(Point3::ORIGIN, Point3::new(0.5, 0.5, 0.5));
    c.bench_function("minkowski/l-prism cube", |b| {
        b.iter(|| minkowski_sum_general(black_box(&l), &small, &tol).unwrap())
    });
}

fn overlays(c: &mut Criterion) {
    let grid = |name: &str, shift: f64| {
        (0..10).fold(Layer::new(name, "local"), |l, i| {
            let x = i as f64 + shift;
            l.with_region(Polygon::rect(x, shift, x + 0.9, 10.0 + shift), AttributeRecord::new())
        })
    };
    let layers = vec![grid("a", 0.0), grid("b", 0.35)];
    c.bench_function("overlay/10x10 strips", |b| {
        b.iter_batched(|| layers.clone(), |l| overlay(&l).unwrap(), BatchSize::SmallInput)
    });
}

criterion_group! {
    name = kernels;
    config = Criterion::default().sample_size(10);
    targets = hull, booleans, buffers, pairs, decompose_and_sum, overlays
}
criterion_main!(kernels);
