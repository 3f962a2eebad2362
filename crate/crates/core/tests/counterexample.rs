use bcl_core::counterexample::{
    classify_all, persistence_experiment, shock_census, shock_profile, InteractionClass, PersistenceConfig, ShockPattern,
};
use bcl_core::fronttrack::{ControlPair, Engine, EngineOptions};
use bcl_core::models::builtin;
use bcl_core::WaveKind;

#[test]
fn same_family_collision_reflects_a_shock() {
    let model = builtin("gas").unwrap();
    let start = model.riemann_box().center();
    let phi = shock_profile(model.as_ref(), 0.0, 1.0, &[0.8, 0.81], ShockPattern::SameFamily(1), 0.1, start).unwrap();
    let mut engine = Engine::new(model.clone(), &phi, ControlPair::absorbing(), EngineOptions::new(1e-6)).unwrap();
    engine.run_until(1.0).unwrap();
    let traj = engine.into_trajectory();
    let tags = classify_all(&traj, 2e-6);
    let hit: Vec<_> = tags.iter().filter(|t| t.class == InteractionClass::SameFamilyShockShock).collect();
    assert_eq!(hit.len(), 1);
    assert!(hit[0].genuine);
    assert!(hit[0].reflects_shock());
    assert!(hit[0].outgoing_strength(1, WaveKind::Shock) > 0.15);
}

#[test]
fn census_counts_initial_shocks() {
    let model = builtin("gas").unwrap();
    let start = model.riemann_box().center();
    let phi = shock_profile(model.as_ref(), 0.0, 1.0, &[0.2, 0.5, 0.8], ShockPattern::Alternating, 0.05, start).unwrap();
    let mut engine = Engine::new(model.clone(), &phi, ControlPair::absorbing(), EngineOptions::new(1e-4)).unwrap();
    engine.run_until(3.0).unwrap();
    let traj = engine.into_trajectory();
    let census = shock_census(&traj, 2, &[0.0, 3.0], 2e-4).unwrap();
    assert_eq!(census.total(0), 3);
    assert_eq!(census.counts[0], vec![1, 2]);
    assert_eq!(census.total(1), 0);
    assert!(census.total_strength(0) > 0.14);
}

#[test]
fn empty_data_has_no_shocks() {
    let cfg = PersistenceConfig { n: 0, ..Default::default() };
    let rep = persistence_experiment(&cfg).unwrap();
    assert!(rep.wedge_hypothesis);
    assert_eq!(rep.tagged_events, 0);
    assert!((0..rep.census.times.len()).all(|k| rep.census.total(k) == 0));
    assert!(!rep.shocks_persist());
}

#[test]
fn dense_run_classifies_every_collision() {
    let cfg = PersistenceConfig { amplitude: 0.01, seed: 1, ..Default::default() };
    let rep = persistence_experiment(&cfg).unwrap();
    assert!(rep.tags.len() > 100);
    assert!(rep.tagged_events > 0);
    assert_eq!(rep.reflecting_events, rep.tagged_events);
    assert!(rep.census.total(0) == 64);
}
