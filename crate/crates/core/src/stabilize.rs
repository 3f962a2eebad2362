//! Stabilization to a constant state with absorbing boundaries.
//!
//! Each cycle of length `3τ_c`, `τ_c = (b - a)/λ_min`, absorbs for `τ_c`,
//! measures the nearly constant state `u†` left behind, and then injects
//! the two waves of the Riemann problem `(u†, u*)`: the 1-wave through
//! `x = b` at `τ_c` and the 2-wave through `x = a` at `2τ_c`. Outside those
//! two instants both boundaries absorb.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::fronttrack::{ControlPair, Engine, EngineOptions, EventKind, Side, Trajectory};
use crate::models::{validate_model, Model, System};
use crate::profile::{total_variation, Coordinates, Profile};
use crate::riemann::solve_riemann;
use crate::state::State;

/// Quantities recorded at the end of a cycle (`k = 0` is the initial data).
#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct CycleRecord {
    pub k: usize,
    pub time: f64,
    /// Total variation in conservative variables.
    pub tv: f64,
    /// `sup ‖u - u*‖_∞`.
    pub sup_distance: f64,
    /// State measured after the absorbing phase that led to this record.
    pub u_dagger: Option<State>,
    pub middle: Option<State>,
    /// `sup ‖u - u†‖_∞` at the measurement.
    pub oscillation: Option<f64>,
    /// Total variation at the measurement, carried by interaction-born waves.
    pub tv_absorbed: Option<f64>,
    /// Fronts alive at the measurement that were not born in a collision.
    pub survivors: usize,
}

#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct StabilizationReport {
    pub tau_c: f64,
    pub u_star: State,
    pub cycles: Vec<CycleRecord>,
    /// Fronts that entered while only absorbing controls were active.
    pub absorbing_injections: usize,
    /// `max_k TV_{k+1}/TV_k²` over cycles with `TV_k > 0`.
    pub contraction: Option<f64>,
    /// Largest `κ` with `TV_k ≤ C0 exp(-2^{κ t_k})`, `C0 = e·TV_0`.
    pub kappa: Option<f64>,
}

impl StabilizationReport {
    pub fn tv_series(&self) -> Vec<f64> {
        self.cycles.iter().map(|c| c.tv).collect()
    }

    pub fn sup_series(&self) -> Vec<f64> {
        self.cycles.iter().map(|c| c.sup_distance).collect()
    }

    pub fn strictly_decreasing(&self) -> bool {
        self.cycles.windows(2).all(|p| p[1].tv < p[0].tv)
    }
}

/// Cycle length `(b - a)/λ_min`.
pub fn cycle_length(model: &dyn System, a: f64, b: f64) -> Result<f64> {
    let lambda_min = validate_model(model).lambda_min;
    if !(lambda_min > 0.0) {
        return Err(Error::Degenerate(format!("λ_min = {lambda_min} on Γ")));
    }
    Ok((b - a) / lambda_min)
}

/// Boundary values for one correction: `β` (entering through `b` at `τ_c`)
/// and `α = u*` (entering through `a` at `2τ_c`).
#[derive(Clone, Copy, Debug, Serialize, Deserialize)]
pub struct Correction {
    pub middle: State,
    pub beta: State,
    pub alpha: State,
}

/// Splits `u† → u*` into its 1-wave and 2-wave through the middle state.
pub fn corrective_injection(model: &dyn System, u_dagger: &State, u_star: &State, nu: f64) -> Result<Correction> {
    if model.dim() != 2 || model.negative_families() != 1 {
        return Err(Error::Invalid(format!("correction needs a 2×2 model with p = 1, got `{}`", model.name())));
    }
    let fan = solve_riemann(model, u_dagger, u_star, nu)?;
    let middle = fan
        .waves
        .iter()
        .filter(|w| w.family == 1)
        .last()
        .map(|w| w.right)
        .unwrap_or(*u_dagger);
    Ok(Correction { middle, beta: middle, alpha: *u_star })
}

fn record(engine: &Engine, k: usize, u_star: &State, profile: &Profile) -> CycleRecord {
    CycleRecord {
        k,
        time: engine.time(),
        tv: total_variation(profile, Coordinates::Conserved),
        sup_distance: profile.sup_distance(&u_star.u),
        u_dagger: None,
        middle: None,
        oscillation: None,
        tv_absorbed: None,
        survivors: 0,
    }
}

/// Fronts alive now that were not created by a collision.
fn non_interaction_fronts(engine: &Engine) -> usize {
    let events = engine.events();
    engine
        .fronts()
        .iter()
        .filter(|f| f.birth == 0 || events[(f.birth - 1) as usize].kind != EventKind::Collision)
        .count()
}

/// Runs `cycles` correction cycles from `φ` towards `u*`.
pub fn stabilize(model: Model, phi: &Profile, u_star: &State, cycles: usize, nu: f64) -> Result<(Trajectory, StabilizationReport)> {
    model.check_box(&u_star.w)?;
    let tau_c = cycle_length(model.as_ref(), phi.a(), phi.b())?;
    let mut opts = EngineOptions::new(nu);
    opts.track_integral = model.is_conservative();
    let mut engine = Engine::new(model.clone(), phi, ControlPair::absorbing(), opts)?;
    let mut records = vec![record(&engine, 0, u_star, phi)];
    let mut injection_events = Vec::new();
    for k in 0..cycles {
        let t0 = 3.0 * tau_c * k as f64;
        engine.run_until(t0 + tau_c)?;
        let measured = engine.profile()?;
        let u_dagger = model.state_from_conserved(measured.mean())?;
        let survivors = non_interaction_fronts(&engine);
        let correction = corrective_injection(model.as_ref(), &u_dagger, u_star, nu)?;
        engine.inject(Side::Right, correction.beta)?;
        injection_events.push(engine.event_count() as u64);
        engine.run_until(t0 + 2.0 * tau_c)?;
        engine.inject(Side::Left, correction.alpha)?;
        injection_events.push(engine.event_count() as u64);
        engine.run_until(t0 + 3.0 * tau_c)?;
        let profile = engine.profile()?;
        let mut rec = record(&engine, k + 1, u_star, &profile);
        rec.u_dagger = Some(u_dagger);
        rec.middle = Some(correction.middle);
        rec.oscillation = Some(measured.sup_distance(&u_dagger.u));
        rec.tv_absorbed = Some(total_variation(&measured, Coordinates::Conserved));
        rec.survivors = survivors;
        records.push(rec);
    }
    let traj = engine.into_trajectory();
    let absorbing_injections = traj
        .events
        .iter()
        .filter(|e| e.kind != EventKind::Collision && !injection_events.contains(&e.id))
        .map(|e| e.fronts_out.len())
        .sum();
    let contraction = records
        .windows(2)
        .filter(|p| p[0].tv > 0.0)
        .map(|p| p[1].tv / (p[0].tv * p[0].tv))
        .fold(None, |acc: Option<f64>, r| Some(acc.map_or(r, |m| m.max(r))));
    let kappa = fit_kappa(&records);
    let report = StabilizationReport { tau_c, u_star: *u_star, cycles: records, absorbing_injections, contraction, kappa };
    Ok((traj, report))
}

fn fit_kappa(records: &[CycleRecord]) -> Option<f64> {
    let tv0 = records.first()?.tv;
    if !(tv0 > 0.0) {
        return None;
    }
    let c0 = std::f64::consts::E * tv0;
    records
        .iter()
        .skip(1)
        .filter(|r| r.tv > 0.0 && r.time > 0.0)
        .map(|r| (-(r.tv / c0).ln()).log2() / r.time)
        .fold(None, |acc: Option<f64>, v| Some(acc.map_or(v, |m| m.min(v))))
}

/// Least-squares slope of `ln y` against `ln x`; `None` if any value is not
/// positive.
pub fn log_log_slope(x: &[f64], y: &[f64]) -> Option<f64> {
    if x.len() != y.len() || x.len() < 2 || x.iter().chain(y).any(|v| !(*v > 0.0)) {
        return None;
    }
    let lx: Vec<f64> = x.iter().map(|v| v.ln()).collect();
    let ly: Vec<f64> = y.iter().map(|v| v.ln()).collect();
    let n = lx.len() as f64;
    let mx = lx.iter().sum::<f64>() / n;
    let my = ly.iter().sum::<f64>() / n;
    let sxy: f64 = lx.iter().zip(&ly).map(|(a, b)| (a - mx) * (b - my)).sum();
    let sxx: f64 = lx.iter().map(|a| (a - mx) * (a - mx)).sum();
    (sxx > 0.0).then(|| sxy / sxx)
}
