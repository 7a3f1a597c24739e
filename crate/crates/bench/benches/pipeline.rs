use criterion::{criterion_group, criterion_main, Criterion};
use graphconfig_core::{
    build_complex, cell_system, maximal_cells, rat, sweep_types, MetricGraph, Ray, Restraints,
};
use std::hint::black_box;

fn bench_polytope_type(c: &mut Criterion) {
    let g = MetricGraph::parse("a b 2\na c 1/2\nc b 1/2\n").unwrap();
    let dist = g.distances();
    let cell = maximal_cells(&g, 2)
        .into_iter()
        .find(|c| c.chain_of(0).is_some())
        .unwrap();
    let sys = cell_system(&cell, &g, &dist);
    let r = Restraints::scalar(2, rat(5, 4)).unwrap();
    c.bench_function("polytope_type/order-cell", |b| {
        b.iter(|| black_box(sys.polytope.polytope_type(black_box(&r)).unwrap()))
    });
}

fn bench_build_complex(c: &mut Criterion) {
    let g = MetricGraph::corolla(3).unwrap();
    let r = Restraints::scalar(2, rat(1, 2)).unwrap();
    c.bench_function("build_complex/corolla-3", |b| {
        b.iter(|| black_box(build_complex(black_box(&g), 2, black_box(&r))))
    });
}

fn bench_sweep(c: &mut Criterion) {
    let g = MetricGraph::parse("h v1 1\nh v2 1\nh v3 1\n").unwrap();
    let ray = Ray::scalar(2).unwrap();
    let mut group = c.benchmark_group("sweep");
    group.sample_size(10);
    group.bench_function("three-star", |b| {
        b.iter(|| black_box(sweep_types(black_box(&g), 2, black_box(&ray))))
    });
    group.finish();
}

criterion_group!(
    benches,
    bench_polytope_type,
    bench_build_complex,
    bench_sweep
);
criterion_main!(benches);
