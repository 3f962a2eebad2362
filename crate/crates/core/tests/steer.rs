use bcl_core::models::builtin;
use bcl_core::profile::Profile;
use bcl_core::steer::{default_rho_prime, horizon, steer_to_target, SteerOptions, TargetSpec};
use bcl_core::Vector;

#[test]
fn error_shrinks_with_nu() {
    let model = builtin("temple2").unwrap();
    let rho = 0.8 * default_rho_prime(model.as_ref());
    let phi = Profile::sample(model.as_ref(), 0.0, 1.0, 7, |x| Vector::pair(-2.2 + 0.3 * x, 2.5 - 0.4 * x * x)).unwrap();
    let psi = TargetSpec::random(0.0, 1.0, rho, 3, 5).profile(model.as_ref(), 0.0, 1.0).unwrap();
    let tau = horizon(model.as_ref(), 0.0, 1.0).unwrap() + 1.0;
    let mut errs = Vec::new();
    for nu in [0.1, 0.05, 0.025] {
        let plan = steer_to_target(model.clone(), &phi, &psi, tau, &SteerOptions::new(nu)).unwrap();
        assert!(plan.membership.pass);
        assert!(plan.l1_error <= nu, "{} > {nu}", plan.l1_error);
        errs.push(plan.l1_error);
    }
    assert!(errs[1] <= 0.75 * errs[0] && errs[2] <= 0.75 * errs[1], "{errs:?}");
}

#[test]
fn short_horizon_is_rejected() {
    let model = builtin("temple2").unwrap();
    let phi = Profile::sample(model.as_ref(), 0.0, 1.0, 3, |_| Vector::pair(-2.0, 2.0)).unwrap();
    let psi = phi.clone();
    assert!(steer_to_target(model, &phi, &psi, 10.0, &SteerOptions::new(0.1)).is_err());
}
