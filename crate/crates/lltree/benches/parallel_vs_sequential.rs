//! Compares the data-parallel sample runner against the sequential
//! fallback on a realistic experiment batch, plus a static-build
//! throughput baseline.

use std::sync::Arc;

use criterion::{criterion_group, criterion_main, BenchmarkId, Criterion};
use std::hint::black_box;

use lltree::exp::run_samples_sequential;
use lltree::gen::gen_increasing_tree;
use lltree::hasse::HasseDiagram;
use lltree::LineLeafTree;

fn sample_job(n: usize, s: usize) -> u64 {
    let uni = Arc::new(gen_increasing_tree(n, 0xBE7 ^ s as u64));
    let members: Vec<usize> = (1..n).collect();
    let h = HasseDiagram::from_members(uni, &members).unwrap();
    let tree = LineLeafTree::build_static(h).unwrap();
    let mut total = 0u64;
    for u in 0..n {
        let (_, stats) = tree.search_with_stats(u).unwrap();
        total += stats.queries;
    }
    total
}

fn bench_sample_batches(c: &mut Criterion) {
    let mut group = c.benchmark_group("experiment_batch");
    group.sample_size(10);
    for &n in &[256usize, 1024] {
        let samples = 32usize;
        group.bench_with_input(BenchmarkId::new("sequential", n), &n, |b, &n| {
            b.iter(|| {
                let out = run_samples_sequential(samples, |s| sample_job(n, s));
                black_box(out)
            })
        });
        #[cfg(feature = "parallel")]
        group.bench_with_input(BenchmarkId::new("parallel", n), &n, |b, &n| {
            b.iter(|| {
                let out = lltree::exp::run_samples_parallel(samples, |s| sample_job(n, s));
                black_box(out)
            })
        });
    }
    group.finish();
}

fn bench_static_build(c: &mut Criterion) {
    let mut group = c.benchmark_group("build_static");
    for &n in &[1024usize, 8192] {
        let uni = Arc::new(gen_increasing_tree(n, 42));
        let members: Vec<usize> = (1..n).collect();
        group.bench_with_input(BenchmarkId::from_parameter(n), &n, |b, _| {
            b.iter(|| {
                let h = HasseDiagram::from_members(uni.clone(), &members).unwrap();
                black_box(LineLeafTree::build_static(h).unwrap())
            })
        });
    }
    group.finish();
}

criterion_group!(benches, bench_sample_batches, bench_static_build);
criterion_main!(benches);
