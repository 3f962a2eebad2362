use bcl_bench::{dense_shocks, model, state_pairs, wavy_profile};
use bcl_core::profile::{total_variation, Coordinates};

#[test]
fn pairs_are_distinct_and_in_box() {
    for name in ["burgers", "temple2", "gas", "psystem"] {
        let m = model(name);
        let pairs = state_pairs(&m, 64);
        assert_eq!(pairs.len(), 64);
        assert!(pairs.iter().all(|(l, r)| l.w != r.w && m.riemann_box().contains(&l.w)));
    }
}

#[test]
fn profiles_build() {
    let m = model("temple2");
    let p = wavy_profile(&m, 32, 0.1);
    assert_eq!(p.pieces(), 32);
    let (_, phi) = dense_shocks(16);
    assert!((total_variation(&phi, Coordinates::Riemann) - 0.032).abs() < 1e-6);
}
