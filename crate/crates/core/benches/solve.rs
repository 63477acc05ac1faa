//! Throughput comparison: sequential vs data-parallel batch solving, plus
//! a single large solve.
//!
//! The `parallel` feature (default) backs the batch runner with rayon;
//! without it both entry points run sequentially and the comparison
//! collapses, which is the expected fallback behavior.

use criterion::{black_box, criterion_group, criterion_main, Criterion};

use rainbow_core::batch::{run_trials, run_trials_sequential, TrialSpec};
use rainbow_core::collection::Problem;
use rainbow_core::gen;
use rainbow_core::hamilton;

fn hamilton_specs(n: usize, trials: u64) -> Vec<TrialSpec> {
    (0..trials)
        .map(|seed| TrialSpec {
            problem: Problem::Hamilton,
            n,
            seed,
        })
        .collect()
}

fn matching_specs(n: usize, trials: u64) -> Vec<TrialSpec> {
    (0..trials)
        .map(|seed| TrialSpec {
            problem: Problem::Matching,
            n,
            seed,
        })
        .collect()
}

fn bench_hamilton_batch(c: &mut Criterion) {
    let mut group = c.benchmark_group("hamilton-batch-n60x16");
    group.sample_size(10);
    let specs = hamilton_specs(60, 16);
    group.bench_function("sequential", |b| {
        b.iter(|| black_box(run_trials_sequential(&specs)))
    });
    group.bench_function("parallel", |b| b.iter(|| black_box(run_trials(&specs))));
    group.finish();
}

fn bench_matching_batch(c: &mut Criterion) {
    let mut group = c.benchmark_group("matching-batch-n60x16");
    group.sample_size(10);
    let specs = matching_specs(60, 16);
    group.bench_function("sequential", |b| {
        b.iter(|| black_box(run_trials_sequential(&specs)))
    });
    group.bench_function("parallel", |b| b.iter(|| black_box(run_trials(&specs))));
    group.finish();
}

fn bench_single_solve(c: &mut Criterion) {
    let mut group = c.benchmark_group("hamilton-single");
    group.sample_size(10);
    let coll = gen::gen_random_dirac(200, Problem::Hamilton, 7).unwrap();
    group.bench_function("n200", |b| {
        b.iter(|| black_box(hamilton::find_hamilton(&coll).unwrap()))
    });
    group.finish();
}

criterion_group!(
    benches,
    bench_hamilton_batch,
    bench_matching_batch,
    bench_single_solve
);
criterion_main!(benches);
