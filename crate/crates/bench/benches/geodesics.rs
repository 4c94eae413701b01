use criterion::{black_box, criterion_group, criterion_main, BenchmarkId, Criterion};
use geodeck_core::development::trace;
use geodeck_core::harness::check_comparison;
use geodeck_core::isosceles::{enumerate_reaching, realize_on, IsoscelesSpec};
use geodeck_core::regions::cut_along_closed_geodesic;
use geodeck_core::shortest_path::{intrinsic_distance, DEFAULT_DEPTH};
use geodeck_core::{shapes, LatticeGeodesicIndex, SurfacePoint, TangentDirection};

fn distance(c: &mut Criterion) {
    let mut g = c.benchmark_group("intrinsic_distance");
    for (name, s) in [
        ("cube", shapes::unit_cube()),
        ("icosahedron", shapes::regular_icosahedron()),
        ("hull50", shapes::random_hull(50, 0)),
    ] {
        let m = s.mesh();
        let a = SurfacePoint::raw(0, [0.2, 0.3, 0.5]);
        let b = SurfacePoint::raw(m.num_faces() - 1, [0.6, 0.3, 0.1]);
        g.bench_with_input(BenchmarkId::from_parameter(name), &(a, b), |bch, (a, b)| {
            bch.iter(|| intrinsic_distance(m, black_box(a), black_box(b), DEFAULT_DEPTH).unwrap())
        });
    }
    g.finish();
}

fn tracing(c: &mut Criterion) {
    let s = shapes::random_hull(50, 1);
    let m = s.mesh();
    let start = SurfacePoint::raw(0, [0.3, 0.3, 0.4]);
    let mut g = c.benchmark_group("trace");
    for len in [10.0, 100.0] {
        g.bench_with_input(BenchmarkId::from_parameter(len), &len, |bch, &len| {
            bch.iter(|| {
                let dir = TangentDirection::from_angle(0, 0.7);
                trace(m, start, dir, black_box(len), false)
            })
        });
    }
    g.finish();
}

fn isosceles(c: &mut Criterion) {
    let spec = IsoscelesSpec::new(0.9, 1.0, 1.1).unwrap();
    let s = spec.surface().unwrap();
    let e = *enumerate_reaching(&spec, 100.0).unwrap().last().unwrap();
    let idx = LatticeGeodesicIndex::new(e.m, e.n).unwrap();
    c.bench_function("enumerate_100", |b| {
        b.iter(|| enumerate_reaching(&spec, black_box(100.0)).unwrap())
    });
    c.bench_function("realize_100", |b| {
        b.iter(|| realize_on(&s, black_box(&idx)).unwrap())
    });
    let path = realize_on(&s, &idx).unwrap();
    c.bench_function("cut_100", |b| {
        b.iter(|| cut_along_closed_geodesic(&s, black_box(&path)).unwrap())
    });
}

fn checks(c: &mut Criterion) {
    let s = shapes::regular_icosahedron();
    c.bench_function("comparison_100_samples", |b| {
        b.iter(|| check_comparison(&s, 100, black_box(1)))
    });
}

criterion_group!(benches, distance, tracing, isosceles, checks);
criterion_main!(benches);
