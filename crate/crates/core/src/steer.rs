//! Exact controllability for Temple systems.
//!
//! Given initial data `φ` and a target `ψ` with decaying positive waves, the
//! controls are assembled from three blocks on `[0, τ]`:
//!
//! 1. `[0, T/4]`: both boundaries absorb, every front of `φ` leaves and the
//!    interval holds a constant `ω′`;
//! 2. `[T/4, 3T/4]`: one sweep per family turns `ω′` into the constant `ω`;
//! 3. `[3T/4, τ]`: the boundary traces of the solution obtained by tracking
//!    `ψ_ν` backward in time from `τ`, where `ω` is what remains once every
//!    backward front has exited.
//!
//! Here `T = 4(b - a)/λ_min` and `ψ_ν` is `ψ` rounded onto a `ν`-lattice.

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::fronttrack::{
    BoundaryMode, ControlPair, ControlSchedule, Engine, EngineOptions, EventKind, Side, Trajectory,
};
use crate::models::{validate_model, Model, ShockRule, System};
use crate::oleinik::{check_membership, default_h, OleinikReport};
use crate::profile::{l1_distance, Profile};
use crate::state::{State, Vector};

/// `T = 4(b - a)/λ_min` with `λ_min` measured over the model's box.
pub fn horizon(model: &dyn System, a: f64, b: f64) -> Result<f64> {
    let lambda_min = validate_model(model).lambda_min;
    if !(lambda_min > 0.0) {
        return Err(Error::Degenerate(format!("λ_min = {lambda_min} on Γ")));
    }
    Ok(4.0 * (b - a) / lambda_min)
}

/// Default decay constant for admissible targets: half the separation bound
/// `c0`. A family-2 ramp of slope `ρ′/(x - a + ℓ)` then needs at least
/// `(x - a)/ρ′ ≥ 2(x - a)/c0` reversed time before two of its fronts meet,
/// twice the time they need to leave through `x = a`.
pub fn default_rho_prime(model: &dyn System) -> f64 {
    0.5 * validate_model(model).c0
}

fn require_temple(model: &dyn System) -> Result<()> {
    if model.dim() != 2 || model.negative_families() != 1 || model.shock_rule() != ShockRule::Straight {
        return Err(Error::Invalid(format!("steering needs a 2×2 Temple model, got `{}`", model.name())));
    }
    Ok(())
}

/// Rounds every Riemann coordinate onto `v₀ + νℤ`, re-anchoring `v₀` after
/// every downward jump of at least `ν`, so that shocks and the constant
/// states next to them are kept exactly.
pub fn quantize(model: &dyn System, psi: &Profile, nu: f64) -> Result<Profile> {
    let n = model.dim();
    let mut anchors = psi.states()[0].w;
    let mut prev = psi.states()[0].w;
    let mut out = Vec::with_capacity(psi.pieces());
    for s in psi.states() {
        let mut q = Vector::zeros(n);
        for i in 0..n {
            if prev[i] - s.w[i] >= nu {
                anchors[i] = s.w[i];
            }
            q[i] = anchors[i] + ((s.w[i] - anchors[i]) / nu).round() * nu;
        }
        prev = s.w;
        // Rounding may step just outside Γ near its faces.
        let bounds = model.riemann_box();
        for i in 0..n {
            if q[i] > bounds.hi[i] {
                q[i] -= nu;
            } else if q[i] < bounds.lo[i] {
                q[i] += nu;
            }
        }
        out.push(model.state_from_riemann(q)?);
    }
    Profile::from_pieces(psi.breaks(), &out)
}

/// Result of the absorbing phase on `[0, T/4]`.
#[derive(Clone, Debug)]
pub struct Washout {
    pub omega_prime: State,
    /// Time the last front left the interval.
    pub last_exit: f64,
    pub trajectory: Trajectory,
}

/// Tracks `φ` with absorbing boundaries up to `window`; every front must
/// have left by then.
pub fn forward_washout(model: Model, phi: &Profile, nu: f64, window: f64) -> Result<Washout> {
    let mut engine = Engine::new(model, phi, ControlPair::absorbing(), EngineOptions::new(nu))?;
    engine.run_until(window)?;
    if engine.live_fronts() > 0 {
        return Err(Error::WashoutIncomplete(format!(
            "{} fronts still inside at t = {window}",
            engine.live_fronts()
        )));
    }
    let omega_prime = engine.trace(Side::Left);
    let trajectory = engine.into_trajectory();
    let last_exit = trajectory
        .events
        .iter()
        .filter(|e| matches!(e.kind, EventKind::BoundaryHitLeft | EventKind::BoundaryHitRight))
        .map(|e| e.time)
        .fold(0.0, f64::max);
    Ok(Washout { omega_prime, last_exit, trajectory })
}

/// Boundary values that turn the constant `ω′` into `ω`: the left value
/// changes only `w₂`, the right one only `w₁`.
#[derive(Clone, Copy, Debug, Serialize, Deserialize)]
pub struct Connection {
    pub alpha: State,
    pub beta: State,
}

pub fn connect_states(model: &dyn System, omega_prime: &State, omega: &State) -> Result<Connection> {
    require_temple(model)?;
    let alpha = model.state_from_riemann(Vector::pair(omega_prime.w[0], omega.w[1]))?;
    let beta = model.state_from_riemann(Vector::pair(omega.w[0], omega_prime.w[1]))?;
    Ok(Connection { alpha, beta })
}

/// A front of the backward block leaving the interval, in forward time.
#[derive(Clone, Copy, Debug, Serialize, Deserialize)]
pub struct Exit {
    pub time: f64,
    pub side: Side,
    /// Boundary value from `time` on.
    pub value: State,
}

#[derive(Clone, Debug)]
pub struct BackwardBlock {
    pub target: Profile,
    pub omega: State,
    /// Exits in increasing forward time.
    pub exits: Vec<Exit>,
    /// Forward time of the earliest exit, `τ` when nothing exits.
    pub tau_prime: f64,
    pub trajectory: Trajectory,
}

/// Tracks the quantized target backward from `τ` to `3T/4`.
pub fn backward_block(model: Model, target: &Profile, tau: f64, t_horizon: f64, nu: f64) -> Result<BackwardBlock> {
    require_temple(model.as_ref())?;
    let span = tau - 0.75 * t_horizon;
    if !(span > 0.0) {
        return Err(Error::HorizonTooShort(format!("τ = {tau} ≤ 3T/4 = {}", 0.75 * t_horizon)));
    }
    let mut engine = Engine::backward(model, target, nu)?;
    engine.run_until(span)?;
    if engine.live_fronts() > 0 {
        return Err(Error::HorizonTooShort(format!(
            "{} backward fronts still inside at t = 3T/4",
            engine.live_fronts()
        )));
    }
    let omega = engine.trace(Side::Left);
    let trajectory = engine.into_trajectory();
    let mut exits = Vec::new();
    // Reverse event order so that, among exits at one forward time, the last
    // switch applied is the state next to the boundary.
    for e in trajectory.events.iter().rev() {
        let (side, value) = match e.kind {
            EventKind::BoundaryHitLeft => (Side::Left, trajectory.front(e.fronts_in[0]).left),
            EventKind::BoundaryHitRight => (Side::Right, trajectory.front(e.fronts_in[0]).right),
            _ => continue,
        };
        exits.push(Exit { time: tau - e.time, side, value });
    }
    exits.sort_by(|p, q| p.time.total_cmp(&q.time));
    let tau_prime = exits.first().map_or(tau, |e| e.time);
    Ok(BackwardBlock { target: target.clone(), omega, exits, tau_prime, trajectory })
}

#[derive(Clone, Debug)]
pub struct SteerOptions {
    pub nu: f64,
    /// Decay constant the target must satisfy; [`default_rho_prime`] if unset.
    pub rho_prime: Option<f64>,
    /// Membership resolution; `(b - a)/1000` if unset.
    pub h: Option<f64>,
    /// Jump tolerance of the membership test; `2ν` if unset.
    pub eps_jump: Option<f64>,
}

impl SteerOptions {
    pub fn new(nu: f64) -> Self {
        SteerOptions { nu, rho_prime: None, h: None, eps_jump: None }
    }
}

#[derive(Clone, Debug)]
pub struct SteerPlan {
    pub t_horizon: f64,
    pub tau: f64,
    pub nu: f64,
    pub rho_prime: f64,
    pub membership: OleinikReport,
    pub omega_prime: State,
    pub omega: State,
    pub washout_exit: f64,
    pub tau_prime: f64,
    pub controls: ControlPair,
    pub achieved: Profile,
    pub l1_error: f64,
    /// `‖ψ_ν - ψ‖_{L¹}`, the part of the error due to quantization.
    pub quantization_error: f64,
    pub trajectory: Trajectory,
}

/// Builds boundary controls steering `φ` to `ψ` at time `τ > T`, then
/// re-simulates forward and reports the `L¹` distance to `ψ`.
pub fn steer_to_target(model: Model, phi: &Profile, psi: &Profile, tau: f64, opts: &SteerOptions) -> Result<SteerPlan> {
    require_temple(model.as_ref())?;
    let (a, b) = (psi.a(), psi.b());
    if (phi.a() - a).abs() > 1e-12 || (phi.b() - b).abs() > 1e-12 {
        return Err(Error::Invalid("φ and ψ live on different intervals".into()));
    }
    let nu = opts.nu;
    let t_horizon = horizon(model.as_ref(), a, b)?;
    if !(tau > t_horizon) {
        return Err(Error::HorizonTooShort(format!("τ = {tau} must exceed T = {t_horizon}")));
    }
    let rho_prime = opts.rho_prime.unwrap_or_else(|| default_rho_prime(model.as_ref()));
    let h = opts.h.unwrap_or_else(|| default_h(a, b));
    let eps_jump = opts.eps_jump.unwrap_or(2.0 * nu);
    let membership = check_membership(model.as_ref(), psi, rho_prime, h, eps_jump)?;
    if !membership.pass {
        return Err(Error::Invalid(format!(
            "target is outside K^ρ′ for ρ′ = {rho_prime}: worst ratio {}",
            membership.max_ratio()
        )));
    }

    let washout = forward_washout(model.clone(), phi, nu, 0.25 * t_horizon)?;
    let target = quantize(model.as_ref(), psi, nu)?;
    let quantization_error = l1_distance(&target, psi)?;
    let block = backward_block(model.clone(), &target, tau, t_horizon, nu)?;
    let link = connect_states(model.as_ref(), &washout.omega_prime, &block.omega)?;

    let mut alpha = vec![
        (0.0, BoundaryMode::Absorbing),
        (0.25 * t_horizon, BoundaryMode::Hold(link.alpha)),
        (0.75 * t_horizon, BoundaryMode::Hold(block.omega)),
    ];
    let mut beta = vec![
        (0.0, BoundaryMode::Absorbing),
        (0.25 * t_horizon, BoundaryMode::Hold(link.beta)),
        (0.75 * t_horizon, BoundaryMode::Hold(block.omega)),
    ];
    for exit in &block.exits {
        let entry = (exit.time, BoundaryMode::Hold(exit.value));
        match exit.side {
            Side::Left => alpha.push(entry),
            Side::Right => beta.push(entry),
        }
    }
    let controls = ControlPair {
        alpha: ControlSchedule { switches: alpha },
        beta: ControlSchedule { switches: beta },
    };

    let mut engine = Engine::new(model, phi, controls.clone(), EngineOptions::new(nu))?;
    engine.run_until(tau)?;
    let achieved = engine.profile()?;
    let l1_error = l1_distance(&achieved, psi)?;
    Ok(SteerPlan {
        t_horizon,
        tau,
        nu,
        rho_prime,
        membership,
        omega_prime: washout.omega_prime,
        omega: block.omega,
        washout_exit: washout.last_exit,
        tau_prime: block.tau_prime,
        controls,
        achieved,
        l1_error,
        quantization_error,
        trajectory: engine.into_trajectory(),
    })
}

/// Shape of a synthetic admissible target.
#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct TargetSpec {
    /// Base values `(w₁, w₂)` at the inflow ends.
    pub base: [f64; 2],
    /// Ramp constant; the quotients stay below it.
    pub rho: f64,
    /// Offsets `ℓ` of the logarithmic ramps.
    pub offset: [f64; 2],
    /// `(position, family, strength)` of each downward jump.
    pub shocks: Vec<(f64, usize, f64)>,
    pub pieces: usize,
}

impl TargetSpec {
    /// Random target on `[a, b]` for the default temple box: `1 + shocks`
    /// ramps per family, shock strengths in `[0.15, 0.3]`.
    pub fn random(a: f64, b: f64, rho: f64, shocks: usize, seed: u64) -> Self {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let base = [rng.gen_range(-2.4..-2.0), rng.gen_range(2.0..2.4)];
        let offset = [rng.gen_range(0.2..0.5), rng.gen_range(0.2..0.5)];
        let shocks = (0..shocks)
            .map(|k| {
                let x = a + (b - a) * rng.gen_range(0.1..0.9);
                (x, 1 + k % 2, rng.gen_range(0.15..0.3))
            })
            .collect();
        TargetSpec { base, rho, offset, shocks, pieces: 8000 }
    }

    /// `w₂ = base₂ + ρ ln((x - a + ℓ₂)/ℓ₂) - Σ shocks`, and the mirror image
    /// for `w₁`, which grows towards `x = b`.
    pub fn profile(&self, model: &dyn System, a: f64, b: f64) -> Result<Profile> {
        let len = b - a;
        let ramp2 = |x: f64| self.rho * ((x - a + self.offset[1] * len) / (self.offset[1] * len)).ln();
        let ramp1 = |x: f64| -self.rho * ((b - x + self.offset[0] * len) / ((1.0 + self.offset[0]) * len)).ln();
        let drop = |x: f64, family: usize| -> f64 {
            self.shocks.iter().filter(|s| s.1 == family && x >= s.0).map(|s| s.2).sum()
        };
        Profile::sample(model, a, b, self.pieces, |x| {
            Vector::pair(self.base[0] + ramp1(x) - drop(x, 1), self.base[1] + ramp2(x) - drop(x, 2))
        })
    }
}
