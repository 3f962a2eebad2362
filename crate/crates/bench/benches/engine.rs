use criterion::{criterion_group, criterion_main, BenchmarkId, Criterion};

use bcl_bench::{dense_shocks, model, wavy_profile};
use bcl_core::fronttrack::{simulate, EngineOptions};
use bcl_core::ControlPair;

fn absorbing_runs(c: &mut Criterion) {
    let mut group = c.benchmark_group("engine");
    group.sample_size(20);
    for name in ["temple2", "gas"] {
        let m = model(name);
        let phi = wavy_profile(&m, 32, 0.1);
        group.bench_function(BenchmarkId::new("wavy", name), |b| {
            b.iter(|| simulate(m.clone(), &phi, ControlPair::absorbing(), EngineOptions::new(0.01), 2.0).unwrap())
        });
    }
    for n in [16, 64, 256] {
        let (gas, phi) = dense_shocks(n);
        group.bench_with_input(BenchmarkId::new("dense-shocks", n), &phi, |b, phi| {
            b.iter(|| simulate(gas.clone(), phi, ControlPair::absorbing(), EngineOptions::new(1e-4), 1.5).unwrap())
        });
    }
    group.finish();
}

criterion_group!(benches, absorbing_runs);
criterion_main!(benches);
