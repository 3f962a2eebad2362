use criterion::{black_box, criterion_group, criterion_main, BenchmarkId, Criterion};

use bcl_bench::{model, state_pairs};
use bcl_core::riemann::solve_riemann;

fn riemann(c: &mut Criterion) {
    let mut group = c.benchmark_group("riemann");
    for name in ["burgers", "temple2", "gas", "psystem"] {
        let m = model(name);
        let pairs = state_pairs(&m, 64);
        group.bench_with_input(BenchmarkId::from_parameter(name), &pairs, |b, pairs| {
            b.iter(|| {
                for (l, r) in pairs {
                    black_box(solve_riemann(m.as_ref(), l, r, 0.01).unwrap());
                }
            })
        });
    }
    group.finish();
}

criterion_group!(benches, riemann);
criterion_main!(benches);
