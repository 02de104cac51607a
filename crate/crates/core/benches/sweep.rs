//! Parallel vs sequential sweeps and replications.
//!
//! Build with `--no-default-features` to see `parallel` fall back to the
//! sequential path.

use std::hint::black_box;

use criterion::{criterion_group, criterion_main, BenchmarkId, Criterion};
use pud_core::experiments::{linear_grid, run_sweep, run_sweep_sequential, Model, ModelParams, SweepParam, SweepSpec};
use pud_core::sim::{run_replications, run_stream};
use pud_core::{Capacity, ServiceDistribution, StandardPenalty, SystemConfig};

fn sweep_spec(packets: u64) -> SweepSpec {
    SweepSpec {
        base: ModelParams::new(Model::Mg11, 1.0).service(ServiceDistribution::exponential(1.0).unwrap()),
        vary: SweepParam::Lambda,
        values: linear_grid(0.1, 3.0, 16).unwrap(),
        packets,
        seed: 1,
        batches: 10,
        simulate: true,
    }
}

fn sweeps(c: &mut Criterion) {
    let mut g = c.benchmark_group("sweep_16_points");
    g.sample_size(10);
    for packets in [10_000u64, 100_000] {
        let spec = sweep_spec(packets);
        g.bench_with_input(BenchmarkId::new("parallel", packets), &spec, |b, s| {
            b.iter(|| black_box(run_sweep(s).unwrap()))
        });
        g.bench_with_input(BenchmarkId::new("sequential", packets), &spec, |b, s| {
            b.iter(|| black_box(run_sweep_sequential(s).unwrap()))
        });
    }
    g.finish();
}

fn replications(c: &mut Criterion) {
    let cfg = SystemConfig::new(0.8, ServiceDistribution::exponential(1.0).unwrap(), Capacity::Infinite).unwrap();
    let mut g = c.benchmark_group("replications_8x100k");
    g.sample_size(10);
    g.bench_function("parallel", |b| {
        b.iter(|| black_box(run_replications(&cfg, &StandardPenalty, 100_000, 1, 8, 10).unwrap()))
    });
    g.bench_function("sequential", |b| {
        b.iter(|| {
            let runs: Vec<_> = (0..8).map(|s| run_stream(&cfg, &StandardPenalty, 100_000, 1, s, 10).unwrap()).collect();
            black_box(runs)
        })
    });
    g.finish();
}

criterion_group!(benches, sweeps, replications);
criterion_main!(benches);
