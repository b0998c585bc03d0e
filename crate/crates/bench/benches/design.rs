use arma_core::design::design_fir;
use arma_core::{design_arma, DesignConfig, DesiredResponse, SpectralInterval};
use criterion::{criterion_group, criterion_main, BenchmarkId, Criterion};

fn bench_design(c: &mut Criterion) {
    let iv = SpectralInterval::new(0.0, 2.0).unwrap();
    let step = DesiredResponse::step(iv);
    let mut group = c.benchmark_group("design");
    group.sample_size(10);
    for k in [5, 10, 20] {
        group.bench_with_input(BenchmarkId::new("arma_step", k), &k, |b, &k| {
            b.iter(|| design_arma(&step, &DesignConfig::with_order(k)).unwrap())
        });
        group.bench_with_input(BenchmarkId::new("fir_step", k), &k, |b, &k| {
            b.iter(|| design_fir(&step, k, 1000).unwrap())
        });
    }
    group.finish();
}

criterion_group!(benches, bench_design);
criterion_main!(benches);
