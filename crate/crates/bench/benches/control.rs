use criterion::{criterion_group, criterion_main, Criterion};

use bcl_bench::{model, wavy_profile};
use bcl_core::oleinik::{check_membership, default_h};
use bcl_core::stabilize::stabilize;
use bcl_core::steer::{default_rho_prime, steer_to_target, SteerOptions, TargetSpec};

fn control(c: &mut Criterion) {
    let temple = model("temple2");
    let rho = 0.8 * default_rho_prime(temple.as_ref());
    let phi = wavy_profile(&temple, 9, 0.2);
    let psi = TargetSpec::random(0.0, 1.0, rho, 3, 1).profile(temple.as_ref(), 0.0, 1.0).unwrap();

    let mut group = c.benchmark_group("control");
    group.sample_size(10);
    group.bench_function("membership", |b| {
        b.iter(|| check_membership(temple.as_ref(), &psi, rho / 0.8, default_h(0.0, 1.0), 0.1).unwrap())
    });
    group.bench_function("steer-nu-0.05", |b| {
        b.iter(|| steer_to_target(temple.clone(), &phi, &psi, 17.0, &SteerOptions::new(0.05)).unwrap())
    });
    let gas = model("gas");
    let data = wavy_profile(&gas, 9, 0.02);
    let u_star = gas.state_from_riemann(gas.riemann_box().center()).unwrap();
    group.bench_function("stabilize-gas", |b| b.iter(|| stabilize(gas.clone(), &data, &u_star, 2, 1e-3).unwrap()));
    group.finish();
}

criterion_group!(benches, control);
criterion_main!(benches);
