use criterion::{criterion_group, criterion_main, BenchmarkId, Criterion};
use std::hint::black_box;

use pmmf_bench::fixture_path;
use pmmf_core::bundled;
use pmmf_core::condition::certify;
use pmmf_core::forgetting::{one_sided_experiment, theoretical_envelope, OneSidedConfig};
use pmmf_core::inference::{forward_backward, smoothing_block};
use pmmf_core::StartLaw;

fn smoothing(c: &mut Criterion) {
    let model = bundled::cluster_hmm().unwrap();
    let mut group = c.benchmark_group("forward_backward");
    for n in [100usize, 1_000, 10_000] {
        let xs = fixture_path(&model, n, 1);
        group.bench_with_input(BenchmarkId::from_parameter(n), &xs, |b, xs| {
            b.iter(|| forward_backward(&model, black_box(xs), 1, xs.len(), &StartLaw::Initial).unwrap())
        });
    }
    group.finish();

    let xs = fixture_path(&model, 500, 2);
    let mut group = c.benchmark_group("smoothing_block");
    for m in [1usize, 2, 4] {
        group.bench_with_input(BenchmarkId::from_parameter(m), &m, |b, &m| {
            b.iter(|| smoothing_block(&model, &xs, (1, 500), 250, m, &StartLaw::Initial).unwrap())
        });
    }
    group.finish();
}

fn forgetting(c: &mut Criterion) {
    let model = bundled::cluster_hmm().unwrap();
    let cert = certify(&model).unwrap();
    let xs = fixture_path(&model, 300, 3);
    c.bench_function("theoretical_envelope/300", |b| {
        b.iter(|| theoretical_envelope(&cert, &model, black_box(&xs), 5, 200, 300).unwrap())
    });
    let mut cfg = OneSidedConfig::new(1, 5, (5..=100).step_by(5).collect(), 150);
    cfg.n_paths = 16;
    let mut group = c.benchmark_group("one_sided_experiment");
    group.sample_size(10);
    group.bench_function("16_paths", |b| b.iter(|| one_sided_experiment(&model, Some(&cert), &cfg).unwrap()));
    group.finish();
}

criterion_group!(benches, smoothing, forgetting);
criterion_main!(benches);
