use std::hint::black_box;

use criterion::{criterion_group, criterion_main, BenchmarkId, Criterion};
use hybridlink_bench::{operating_point, oracle_point};
use hybridlink_core::fock::{beamsplitter_unitary, FockRegister};
use hybridlink_core::hybrid::{lossy_he_logneg, lossy_he_logneg_oracle};
use hybridlink_core::qkd::{key_rate, max_distance};
use hybridlink_core::swap::{analytic_final_state, oracle_final_state};

fn closed_forms(c: &mut Criterion) {
    let p = operating_point();
    c.bench_function("analytic_final_state", |b| {
        b.iter(|| analytic_final_state(black_box(&p)).unwrap())
    });
    c.bench_function("key_rate", |b| b.iter(|| key_rate(black_box(&p)).unwrap()));
    c.bench_function("lossy_he_logneg", |b| {
        b.iter(|| lossy_he_logneg(black_box(0.5), black_box(0.7)).unwrap())
    });
    c.bench_function("max_distance", |b| {
        b.iter(|| max_distance(black_box(1e-8), 0.5, &p).unwrap())
    });
}

fn beamsplitter(c: &mut Criterion) {
    let mut group = c.benchmark_group("beamsplitter_unitary");
    for dim in [8usize, 16, 32] {
        let reg = FockRegister::new([("a", dim), ("b", dim)]).unwrap();
        group.bench_with_input(BenchmarkId::from_parameter(dim), &reg, |b, reg| {
            b.iter(|| beamsplitter_unitary(black_box(0.5), "a", "b", reg).unwrap())
        });
    }
    group.finish();
}

fn oracles(c: &mut Criterion) {
    let mut group = c.benchmark_group("oracle");
    group.sample_size(10);
    let p = oracle_point();
    for dim in [12usize, 24] {
        group.bench_with_input(BenchmarkId::new("swap", dim), &dim, |b, &dim| {
            b.iter(|| oracle_final_state(black_box(&p), dim).unwrap())
        });
        group.bench_with_input(BenchmarkId::new("lossy_he", dim), &dim, |b, &dim| {
            b.iter(|| lossy_he_logneg_oracle(black_box(0.5), 0.7, dim).unwrap())
        });
    }
    group.finish();
}

criterion_group!(benches, closed_forms, beamsplitter, oracles);
criterion_main!(benches);
