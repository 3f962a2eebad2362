//! One-sided difference quotients of the Riemann coordinates.
//!
//! For a piecewise-constant profile `ψ` on `[a, b]`, the quotient of family
//! `i` over a pair `x < y` is
//!
//! ```text
//! i > p:   (w_i(y) - w_i(x)) · (x - a) / (y - x)
//! i ≤ p:   (w_i(y) - w_i(x)) · (b - y) / (y - x)
//! ```
//!
//! and the set `K^ρ` asks for every quotient to stay below `ρ`. Pairs are
//! restricted to `y - x ≥ h` and drawn from piece midpoints plus a uniform
//! `h`-grid.

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::fronttrack::Trajectory;
use crate::models::System;
use crate::profile::{total_variation, Coordinates, Profile};

/// Worst quotient of one family.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct FamilyRatio {
    pub family: usize,
    /// `-∞` when no admissible pair exists.
    pub ratio: f64,
    pub witness: Option<(f64, f64)>,
    /// Largest upward jump of `w_family` and its location.
    pub max_jump: f64,
    pub jump_at: Option<f64>,
    pub pass: bool,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct OleinikReport {
    pub h: f64,
    pub rho: Option<f64>,
    pub eps_jump: Option<f64>,
    pub families: Vec<FamilyRatio>,
    pub pass: bool,
}

impl OleinikReport {
    pub fn max_ratio(&self) -> f64 {
        self.families.iter().map(|f| f.ratio).fold(f64::NEG_INFINITY, f64::max)
    }

    pub fn ratio(&self, family: usize) -> f64 {
        self.families[family - 1].ratio
    }
}

/// Default resolution `(b - a)/1000`.
pub fn default_h(a: f64, b: f64) -> f64 {
    (b - a) / 1000.0
}

fn sample_points(psi: &Profile, h: f64) -> Vec<f64> {
    let (a, b) = (psi.a(), psi.b());
    let steps = ((b - a) / h).floor() as usize;
    let mut xs: Vec<f64> = (0..=steps).map(|j| a + h * j as f64).filter(|&x| x <= b).collect();
    xs.extend(psi.breaks().windows(2).map(|p| 0.5 * (p[0] + p[1])));
    xs.sort_by(f64::total_cmp);
    xs.dedup();
    xs
}

/// Sup of `(v(y) - v(x)) · weight(x, y) / (y - x)` over `x < y`, `y - x ≥ h`.
fn sup_quotient(xs: &[f64], vs: &[f64], h: f64, weight: impl Fn(f64, f64) -> f64 + Sync) -> (f64, Option<(f64, f64)>) {
    // Slack so grid pairs exactly h apart are not lost to rounding.
    let h_eff = h * (1.0 - 1e-12);
    (0..xs.len())
        .into_par_iter()
        .map(|i| {
            let x = xs[i];
            let start = xs.partition_point(|&y| y < x + h_eff);
            let mut best = (f64::NEG_INFINITY, None);
            for j in start..xs.len() {
                let y = xs[j];
                let q = (vs[j] - vs[i]) * weight(x, y) / (y - x);
                if q > best.0 {
                    best = (q, Some((x, y)));
                }
            }
            best
        })
        .reduce(
            || (f64::NEG_INFINITY, None),
            |p, q| {
                // Deterministic tie-break on the witness.
                if q.0 > p.0 || (q.0 == p.0 && q.1.is_some() && (p.1.is_none() || q.1 < p.1)) {
                    q
                } else {
                    p
                }
            },
        )
}

fn check_h(psi: &Profile, h: f64) -> Result<()> {
    if !(h > 0.0 && h < psi.b() - psi.a()) {
        return Err(Error::Invalid(format!("resolution h = {h} must lie in (0, b - a)")));
    }
    Ok(())
}

fn family_ratios(model: &dyn System, psi: &Profile, h: f64) -> Result<Vec<FamilyRatio>> {
    check_h(psi, h)?;
    let (a, b) = (psi.a(), psi.b());
    let xs = sample_points(psi, h);
    let p = model.negative_families();
    let mut out = Vec::with_capacity(model.dim());
    for family in 1..=model.dim() {
        let i = family - 1;
        let vs: Vec<f64> = xs.iter().map(|&x| psi.eval(x).w[i]).collect();
        let (ratio, witness) = if family > p {
            sup_quotient(&xs, &vs, h, |x, _| x - a)
        } else {
            sup_quotient(&xs, &vs, h, |_, y| b - y)
        };
        let (mut max_jump, mut jump_at) = (0.0, None);
        for (k, pair) in psi.states().windows(2).enumerate() {
            let up = pair[1].w[i] - pair[0].w[i];
            if up > max_jump {
                max_jump = up;
                jump_at = Some(psi.breaks()[k + 1]);
            }
        }
        out.push(FamilyRatio { family, ratio, witness, max_jump, jump_at, pass: true });
    }
    Ok(out)
}

/// Per-family worst quotients at resolution `h`.
pub fn oleinik_ratios(model: &dyn System, psi: &Profile, h: f64) -> Result<OleinikReport> {
    let families = family_ratios(model, psi, h)?;
    Ok(OleinikReport { h, rho: None, eps_jump: None, families, pass: true })
}

/// Membership in `K^ρ` at resolution `h`: every quotient is at most `ρ` and
/// no upward jump exceeds `eps_jump`.
pub fn check_membership(model: &dyn System, psi: &Profile, rho: f64, h: f64, eps_jump: f64) -> Result<OleinikReport> {
    let mut families = family_ratios(model, psi, h)?;
    for f in &mut families {
        f.pass = f.ratio <= rho && f.max_jump <= eps_jump;
    }
    let pass = families.iter().all(|f| f.pass);
    Ok(OleinikReport { h, rho: Some(rho), eps_jump: Some(eps_jump), families, pass })
}

/// Decay check at one time: `sup (w_i(y) - w_i(x)) · t / (y - x)`.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct DecaySample {
    pub time: f64,
    /// Total variation in Riemann coordinates.
    pub total_variation: f64,
    /// Per-family measured constant.
    pub k: Vec<f64>,
    pub witness: Vec<Option<(f64, f64)>>,
    /// `total_variation < δ`.
    pub in_scope: bool,
    pub pass: bool,
}

impl DecaySample {
    pub fn measured(&self) -> f64 {
        self.k.iter().copied().fold(f64::NEG_INFINITY, f64::max)
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct DecayReport {
    pub h: f64,
    pub k: f64,
    pub delta: f64,
    pub samples: Vec<DecaySample>,
    pub pass: bool,
}

impl DecayReport {
    /// `max_t k(t) / min_t k(t)` over the samples, `None` if some measured
    /// constant is not positive.
    pub fn stability(&self) -> Option<f64> {
        let ks: Vec<f64> = self.samples.iter().map(|s| s.measured()).collect();
        let lo = ks.iter().copied().fold(f64::INFINITY, f64::min);
        let hi = ks.iter().copied().fold(f64::NEG_INFINITY, f64::max);
        (lo > 0.0).then(|| hi / lo)
    }
}

/// Samples the trajectory at each time `t > 0` and measures the one-sided
/// bound; the bound passes where every family stays at or below `k`.
pub fn decay_check(model: &dyn System, traj: &Trajectory, times: &[f64], h: f64, k: f64, delta: f64) -> Result<DecayReport> {
    let mut samples = Vec::with_capacity(times.len());
    for &t in times {
        if !(t > 0.0) {
            return Err(Error::Invalid(format!("sample time {t} must be positive")));
        }
        let profile = traj.sample_profile(t)?;
        check_h(&profile, h)?;
        let xs = sample_points(&profile, h);
        let mut ks = Vec::new();
        let mut witness = Vec::new();
        for i in 0..model.dim() {
            let vs: Vec<f64> = xs.iter().map(|&x| profile.eval(x).w[i]).collect();
            let (q, wit) = sup_quotient(&xs, &vs, h, |_, _| t);
            ks.push(q);
            witness.push(wit);
        }
        let tv = total_variation(&profile, Coordinates::Riemann);
        let pass = ks.iter().all(|&q| q <= k);
        samples.push(DecaySample { time: t, total_variation: tv, k: ks, witness, in_scope: tv < delta, pass });
    }
    let pass = samples.iter().all(|s| s.pass);
    Ok(DecayReport { h, k, delta, samples, pass })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::models::builtin;
    use crate::state::Vector;

    #[test]
    fn constant_profile_has_no_positive_quotient() {
        let model = builtin("temple2").unwrap();
        let s = model.state_from_riemann(Vector::pair(-2.0, 2.0)).unwrap();
        let psi = Profile::constant(0.0, 1.0, s).unwrap();
        let r = check_membership(model.as_ref(), &psi, 0.0, 0.01, 0.0).unwrap();
        assert!(r.pass);
        assert!(r.max_ratio() <= 0.0);
    }

    #[test]
    fn affine_ramp() {
        let model = builtin("temple2").unwrap();
        let psi = Profile::sample(model.as_ref(), 0.0, 1.0, 2000, |x| Vector::pair(-2.0, 1.5 + 0.5 * x)).unwrap();
        let r = oleinik_ratios(model.as_ref(), &psi, 0.01).unwrap();
        // Staircase of 2000 pieces inflates the continuum value 0.495 by O(1/(2000 h)).
        assert!((r.ratio(2) - 0.495).abs() < 1e-2, "{}", r.ratio(2));
    }

    #[test]
    fn upward_jump_fails_membership() {
        let model = builtin("temple2").unwrap();
        let lo = model.state_from_riemann(Vector::pair(-2.0, 1.5)).unwrap();
        let hi = model.state_from_riemann(Vector::pair(-2.0, 1.8)).unwrap();
        let psi = Profile::new(vec![0.0, 0.5, 1.0], vec![lo, hi]).unwrap();
        let r = check_membership(model.as_ref(), &psi, 100.0, 0.01, 0.01).unwrap();
        assert!(!r.pass);
        assert_eq!(r.families[1].jump_at, Some(0.5));
    }
}
