use criterion::{criterion_group, criterion_main, BenchmarkId, Criterion};
use std::hint::black_box;

use pronylab::error_geometry::{sample_error_set, symmetric_cluster, worst_case_errors};
use pronylab::varieties::{prony_curve, trace_curve};
use pronylab::{hankel_map, polynomial_roots, prony_solve};
use pronylab_bench::{regular_moments, regular_signal};

fn solve(c: &mut Criterion) {
    let mut group = c.benchmark_group("prony_solve");
    for d in 2..=6 {
        let mu = regular_moments(d, 1);
        group.bench_with_input(BenchmarkId::from_parameter(d), &mu, |b, mu| b.iter(|| prony_solve(black_box(mu))));
    }
    group.finish();
}

fn roots(c: &mut Criterion) {
    let mut group = c.benchmark_group("polynomial_roots");
    for d in [2, 4, 8] {
        let q = hankel_map(&regular_moments(d, 2)).unwrap();
        group.bench_with_input(BenchmarkId::from_parameter(d), &q, |b, q| b.iter(|| polynomial_roots(black_box(q))));
    }
    group.finish();
}

fn trace(c: &mut Criterion) {
    let s = regular_signal(3, 3);
    let curve = prony_curve(&s.moments(5)).unwrap();
    c.bench_function("trace_curve/d3_201", |b| b.iter(|| trace_curve(black_box(&curve), -2.0, 2.0, 201)));
}

fn error_scan(c: &mut Criterion) {
    let f = symmetric_cluster(2, 0.05).unwrap();
    let eps = 0.05f64.powi(3);
    c.bench_function("sample_error_set/d2_1000", |b| b.iter(|| sample_error_set(black_box(&f), eps, 1000, 0)));
    let mut group = c.benchmark_group("worst_case_errors");
    group.sample_size(10);
    group.bench_function("d2_256", |b| b.iter(|| worst_case_errors(black_box(&f), eps, 256, 0)));
    group.finish();
}

criterion_group!(benches, solve, roots, trace, error_scan);
criterion_main!(benches);
