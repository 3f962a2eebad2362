use std::sync::Arc;

use bcl_core::fronttrack::{simulate, EngineOptions};
use bcl_core::models::{builtin, Burgers, Gas};
use bcl_core::profile::Profile;
use bcl_core::riemann::WaveKind;
use bcl_core::{ControlPair, Engine, Model, State, Vector};

fn sw(model: &Model, w: Vector) -> State {
    model.state_from_riemann(w).unwrap()
}

#[test]
fn burgers_shocks_merge() {
    let model: Model = Arc::new(Burgers::default());
    let s = |u: f64| sw(&model, Vector::scalar(u));
    let phi = Profile::new(vec![0.0, 0.2, 0.4, 1.0], vec![s(3.0), s(2.0), s(1.0)]).unwrap();
    let traj = simulate(model.clone(), &phi, ControlPair::absorbing(), EngineOptions::new(0.1), 0.3).unwrap();
    let c: Vec<_> = traj.collisions().collect();
    assert_eq!(c.len(), 1);
    // 2.5 t + 0.2 = 1.5 t + 0.4
    assert!((c[0].time - 0.2).abs() < 1e-14);
    let out = traj.front(c[0].fronts_out[0]);
    assert_eq!(c[0].fronts_out.len(), 1);
    assert!((out.speed - 2.0).abs() < 1e-14);
}

#[test]
fn temple_crossing_keeps_amplitudes() {
    let model = builtin("temple2").unwrap();
    let phi = Profile::new(
        vec![0.0, 0.3, 0.6, 1.0],
        vec![
            sw(&model, Vector::pair(-2.0, 2.3)),
            sw(&model, Vector::pair(-2.0, 2.0)),
            sw(&model, Vector::pair(-2.4, 2.0)),
        ],
    )
    .unwrap();
    let traj = simulate(model.clone(), &phi, ControlPair::absorbing(), EngineOptions::new(0.1), 0.5).unwrap();
    let c: Vec<_> = traj.collisions().collect();
    assert_eq!(c.len(), 1);
    let out: Vec<_> = c[0].fronts_out.iter().map(|&id| traj.front(id)).collect();
    assert_eq!(out.len(), 2);
    assert_eq!((out[0].family, out[0].kind), (1, WaveKind::Shock));
    assert_eq!((out[1].family, out[1].kind), (2, WaveKind::Shock));
    let mut a_in: Vec<f64> = c[0].fronts_in.iter().map(|&id| traj.front(id).strength()).collect();
    let mut a_out: Vec<f64> = out.iter().map(|f| f.strength()).collect();
    a_in.sort_by(f64::total_cmp);
    a_out.sort_by(f64::total_cmp);
    assert_eq!(a_in, a_out);
}

#[test]
fn absorbing_run_empties_domain() {
    let model = builtin("temple2").unwrap();
    let phi = Profile::sample(model.as_ref(), 0.0, 1.0, 12, |x| Vector::pair(-2.0 - 0.2 * x, 2.0 + 0.3 * (6.0 * x).sin())).unwrap();
    let mut engine = Engine::new(model, &phi, ControlPair::absorbing(), EngineOptions::new(0.05)).unwrap();
    engine.run_until(16.0).unwrap();
    assert_eq!(engine.live_fronts(), 0);
    let traj = engine.into_trajectory();
    assert_eq!(traj.injected_fronts(0.0, 16.0), 0);
}

#[test]
fn gas_shock_run_conserves() {
    let model: Model = Arc::new(Gas::new(2.0, 1.0).unwrap());
    let mut states = Vec::new();
    let mut w = Vector::pair(-1.85, 2.15);
    for k in 0..30 {
        states.push(sw(&model, w));
        let i = k % 2;
        w[i] -= 0.01;
    }
    let breaks: Vec<f64> = (0..=30).map(|k| k as f64 / 30.0).collect();
    let phi = Profile::new(breaks, states).unwrap();
    let mut opts = EngineOptions::new(0.01);
    opts.track_integral = true;
    let traj = simulate(model.clone(), &phi, ControlPair::absorbing(), opts, 2.0).unwrap();
    let defects = traj.conservation_defects(model.as_ref()).unwrap();
    let total: f64 = defects.iter().sum();
    eprintln!("events {} defect {total:e}", traj.events.len());
    assert!(total <= 5e-9 * traj.events.len() as f64);
}
