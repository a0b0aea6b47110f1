use criterion::{criterion_group, criterion_main, BenchmarkId, Criterion};

use gw_majority::mc::{estimate, estimate_sequential, SimConfig};
use gw_majority::{OffspringDistribution, ProbabilityVector};

fn config(samples: u64) -> SimConfig {
    SimConfig {
        dist: OffspringDistribution::nary(3).unwrap(),
        height: 5,
        leaf_probs: ProbabilityVector::new(vec![0.2, 0.4, 0.4]).unwrap(),
        samples,
        seed: 42,
        parallel_batches: 16,
    }
}

fn bench_estimate(c: &mut Criterion) {
    let mut group = c.benchmark_group("mc_estimate");
    for samples in [10_000u64, 50_000] {
        let cfg = config(samples);
        group.bench_with_input(BenchmarkId::new("parallel", samples), &cfg, |b, cfg| {
            b.iter(|| estimate(cfg).unwrap())
        });
        group.bench_with_input(BenchmarkId::new("sequential", samples), &cfg, |b, cfg| {
            b.iter(|| estimate_sequential(cfg).unwrap())
        });
    }
    group.finish();
}

criterion_group!(benches, bench_estimate);
criterion_main!(benches);
