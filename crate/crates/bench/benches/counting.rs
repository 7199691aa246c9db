use criterion::{criterion_group, criterion_main, BenchmarkId, Criterion};
use statconv_bench::sample_sets;
use statconv_core::index_sets::{density_bounds, exact_density};

const HORIZONS: &[u64] = &[1_000, 1_000_000, 1_000_000_000];

fn count_prefix(c: &mut Criterion) {
    let mut group = c.benchmark_group("count_prefix");
    for (label, set) in sample_sets() {
        for &n in HORIZONS {
            group.bench_with_input(BenchmarkId::new(label, n), &n, |b, &n| b.iter(|| set.count_prefix(n)));
        }
    }
    group.finish();
}

fn nth(c: &mut Criterion) {
    let mut group = c.benchmark_group("nth");
    for (label, set) in sample_sets() {
        group.bench_function(label, |b| b.iter(|| set.nth(10_000)));
    }
    group.finish();
}

fn densities(c: &mut Criterion) {
    let mut group = c.benchmark_group("density");
    for (label, set) in sample_sets() {
        group.bench_function(BenchmarkId::new("exact", label), |b| b.iter(|| exact_density(&set)));
        group.bench_function(BenchmarkId::new("bounds", label), |b| {
            b.iter(|| density_bounds(&set, 1_000_000))
        });
    }
    group.finish();
}

criterion_group!(counting_benches, count_prefix, nth, densities);
criterion_main!(counting_benches);
