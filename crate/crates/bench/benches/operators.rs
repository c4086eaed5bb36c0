use std::hint::black_box;

use besov_bench::{ball_scheme, cusp, cusp_2d, interval_scheme};
use besov_core::analysis::moduli::modulus_avg;
use besov_core::analysis::quadrature::QuadratureSpec;
use besov_core::bsplines::basis_eval;
use besov_core::geometry::interior_cells;
use besov_core::operators::{recovery, sample_points};
use criterion::{criterion_group, criterion_main, BenchmarkId, Criterion};

fn splines(c: &mut Criterion) {
    let mut g = c.benchmark_group("basis_eval");
    for m in [1, 3, 5] {
        g.bench_with_input(BenchmarkId::from_parameter(m), &m, |b, &m| {
            b.iter(|| basis_eval(m, 4, &[3, 5], black_box(&[0.3, 0.41]), None).unwrap())
        });
    }
    g.finish();
}

fn quasi_interpolant(c: &mut Criterion) {
    let mut g = c.benchmark_group("quasi_interpolant");
    g.sample_size(20);
    let s1 = interval_scheme(2);
    let f = cusp();
    for k in [4, 6, 8] {
        g.bench_with_input(BenchmarkId::new("interval", k), &k, |b, &k| b.iter(|| s1.quasi_interpolant(&f, k).unwrap()));
    }
    let s2 = ball_scheme();
    let f2 = cusp_2d();
    for k in [3, 4] {
        g.bench_with_input(BenchmarkId::new("ball", k), &k, |b, &k| b.iter(|| s2.quasi_interpolant(&f2, k).unwrap()));
    }
    g.finish();
}

fn detail(c: &mut Criterion) {
    let s = ball_scheme();
    let f = cusp_2d();
    c.bench_function("detail/ball/4", |b| b.iter(|| s.detail(&f, 4).unwrap()));
}

fn geometry(c: &mut Criterion) {
    let s = ball_scheme();
    c.bench_function("interior_cells/ball/6", |b| b.iter(|| interior_cells(s.domain(), black_box(6))));
}

fn sampling(c: &mut Criterion) {
    let s = interval_scheme(2);
    let f = cusp();
    let samples = sample_points(s.domain(), 7, 2).unwrap().sample(&f);
    c.bench_function("recovery/interval/7", |b| b.iter(|| recovery(&samples, &s).unwrap()));
}

fn moduli(c: &mut Criterion) {
    let s = interval_scheme(2);
    let f = cusp();
    let spec = QuadratureSpec::default();
    c.bench_function("modulus_avg/interval", |b| {
        b.iter(|| modulus_avg(&f, s.domain(), 2, black_box(1.0 / 64.0), 2.0, &spec).unwrap())
    });
}

criterion_group!(benches, splines, quasi_interpolant, detail, geometry, sampling, moduli);
criterion_main!(benches);
