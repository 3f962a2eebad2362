use bcl_core::models::builtin;
use bcl_core::profile::Profile;
use bcl_core::stabilize::stabilize;
use bcl_core::Vector;

fn wavy(name: &str, amp: f64) -> (bcl_core::models::Model, Profile, bcl_core::State) {
    let model = builtin(name).unwrap();
    let c = model.riemann_box().center();
    let u_star = model.state_from_riemann(c).unwrap();
    let phi = Profile::sample(model.as_ref(), 0.0, 1.0, 9, |x| {
        Vector::pair(c[0] + amp * (9.0 * x).sin(), c[1] + amp * (7.0 * x + 1.0).cos())
    })
    .unwrap();
    (model, phi, u_star)
}

#[test]
fn temple_reaches_target_in_one_cycle() {
    let (model, phi, u_star) = wavy("temple2", 0.015);
    let (_, rep) = stabilize(model, &phi, &u_star, 2, 1e-3).unwrap();
    assert_eq!(rep.tau_c, 4.0);
    assert_eq!(rep.absorbing_injections, 0);
    assert!(rep.cycles[0].tv > 0.0);
    assert_eq!(rep.cycles[1].tv, 0.0);
    assert_eq!(rep.cycles[1].sup_distance, 0.0);
}

#[test]
fn gas_lands_near_target() {
    let (model, phi, u_star) = wavy("gas", 0.015);
    let (_, rep) = stabilize(model, &phi, &u_star, 2, 1e-3).unwrap();
    assert_eq!(rep.absorbing_injections, 0);
    assert!(rep.cycles[1].sup_distance < 1e-9, "{}", rep.cycles[1].sup_distance);
}
