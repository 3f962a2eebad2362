//! Fixtures shared by the benchmarks in `benches/`.

use bcl_core::counterexample::{dense_shock_initial, ShockPattern};
use bcl_core::models::builtin;
use bcl_core::{Model, Profile, State, Vector};

pub fn model(name: &str) -> Model {
    builtin(name).expect("built-in model")
}

/// Deterministic pairs of states spread over the model box.
pub fn state_pairs(model: &Model, count: usize) -> Vec<(State, State)> {
    let bx = model.riemann_box();
    let at = |k: usize, phase: f64| {
        let mut w = Vector::zeros(model.dim());
        for i in 0..model.dim() {
            let s = 0.5 + 0.5 * ((k as f64 + 1.0) * (0.7 + phase) + i as f64 * 1.3).sin();
            w[i] = bx.lo[i] + s * (bx.hi[i] - bx.lo[i]);
        }
        model.state_from_riemann(w).expect("state in box")
    };
    (0..count).map(|k| (at(k, 0.0), at(k, 0.37))).collect()
}

/// Smooth oscillating profile around the box centre.
pub fn wavy_profile(model: &Model, pieces: usize, amplitude: f64) -> Profile {
    let c = model.riemann_box().center();
    Profile::sample(model.as_ref(), 0.0, 1.0, pieces, |x| {
        let mut w = c;
        for i in 0..model.dim() {
            w[i] += amplitude * ((7.0 + 2.0 * i as f64) * x + i as f64).sin();
        }
        w
    })
    .expect("profile in box")
}

pub fn dense_shocks(n: usize) -> (Model, Profile) {
    let gas = model("gas");
    let phi = dense_shock_initial(gas.as_ref(), 0.0, 1.0, n, 0.002, ShockPattern::Alternating, 7).expect("dense data");
    (gas, phi)
}
