use criterion::{criterion_group, criterion_main, BenchmarkId, Criterion, Throughput};

use ndr_core::dist::GammaPairParams;
use ndr_core::sampling::{sample_batch, SampleKind, SeedSpec};
use ndr_core::validate::{histogram_check, FitConfig, Perturbation, Quantity};

const N: usize = 100_000;

fn batches(c: &mut Criterion) {
    let mut g = c.benchmark_group("sample_batch");
    g.throughput(Throughput::Elements(N as u64));
    for k in [1.0, 12.0] {
        let p = GammaPairParams::new(1.0, 0.64, k).unwrap();
        g.bench_with_input(BenchmarkId::new("ndr", k), &p, |b, p| {
            b.iter(|| sample_batch(p, N, SeedSpec::new(1, 0), SampleKind::Ndr).unwrap())
        });
    }
    g.finish();
}

fn histogram_fit(c: &mut Criterion) {
    let p = GammaPairParams::new(1.0, 0.64, 12.0).unwrap();
    let cfg = FitConfig::default();
    let mut g = c.benchmark_group("histogram_check");
    g.sample_size(10);
    g.bench_function("ndr_k12", |b| {
        b.iter(|| histogram_check(&p, Quantity::Ndr, N, 100, SeedSpec::new(1, 0), &cfg, Perturbation::default()).unwrap())
    });
    g.finish();
}

criterion_group!(benches, batches, histogram_fit);
criterion_main!(benches);
