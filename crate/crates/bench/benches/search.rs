use criterion::{criterion_group, criterion_main, BenchmarkId, Criterion};
use crossint_bench::{search_instances, theorem_cells};
use crossint_core::exploration::{alternating_maximization, exhaustive_search};
use crossint_core::verification::{brute_force_max, l_initial_scan, verify_proposition_fm, BruteForceOptions};
use crossint_core::Budget;
use std::hint::black_box;

fn engines(c: &mut Criterion) {
    let mut g = c.benchmark_group("weighted_bound");
    g.sample_size(10);
    let opts = BruteForceOptions::default();
    for (name, p) in theorem_cells() {
        g.bench_with_input(BenchmarkId::new("brute", name), &p, |b, p| {
            b.iter(|| brute_force_max(black_box(p), &opts).unwrap())
        });
        g.bench_with_input(BenchmarkId::new("l_initial", name), &p, |b, p| {
            b.iter(|| l_initial_scan(black_box(p), &opts).unwrap())
        });
    }
    g.finish();
}

fn shadows(c: &mut Criterion) {
    c.bench_function("shadow_minimum_n6k2l3r2", |b| {
        b.iter(|| verify_proposition_fm(6, 2, 3, 2, &Budget::default()).unwrap())
    });
}

fn searches(c: &mut Criterion) {
    let mut g = c.benchmark_group("explore");
    g.sample_size(10);
    for (name, inst) in search_instances() {
        g.bench_with_input(BenchmarkId::new("exhaustive", name), &inst, |b, inst| {
            b.iter(|| exhaustive_search(black_box(inst), &Budget::default()).unwrap())
        });
        g.bench_with_input(BenchmarkId::new("alternating", name), &inst, |b, inst| {
            b.iter(|| alternating_maximization(black_box(inst), 50, 1).unwrap())
        });
    }
    g.finish();
}

criterion_group!(benches, engines, shadows, searches);
criterion_main!(benches);
