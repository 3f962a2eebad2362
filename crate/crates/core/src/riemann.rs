//! Exact Riemann solvers producing discretized wave fans.
//!
//! All wave curves are parameterised by the Riemann coordinate of their own
//! family. Rarefactions (increasing `w_i`) follow the integral curve, along
//! which every other coordinate is constant, and are split into fronts of
//! strength at most `ν`. Shocks (decreasing `w_i`) follow the shock curve
//! given by the model's [`ShockRule`](crate::models::ShockRule).

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::models::{shock_state, ShockRule, System};
use crate::state::{State, Vector};

/// Jumps below this size in a Riemann coordinate are treated as round-off.
pub const STRENGTH_FLOOR: f64 = 1e-13;

/// Relative slack when deciding how many fronts a rarefaction needs, so a
/// front of strength `ν` produced by an earlier split is never split again.
const SPLIT_SLACK: f64 = 1e-9;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum WaveKind {
    Shock,
    Rarefaction,
}

impl WaveKind {
    pub fn as_str(&self) -> &'static str {
        match self {
            WaveKind::Shock => "shock",
            WaveKind::Rarefaction => "rarefaction",
        }
    }
}

/// One elementary discontinuity of a fan.
#[derive(Clone, Copy, Debug, Serialize, Deserialize)]
pub struct Wave {
    pub family: usize,
    pub kind: WaveKind,
    pub left: State,
    pub right: State,
    pub speed: f64,
    /// `|Δw_family|`
    pub strength: f64,
}

/// Waves ordered left to right; consecutive waves share their states.
#[derive(Clone, Debug, Default, Serialize, Deserialize)]
pub struct WaveFan {
    pub waves: Vec<Wave>,
}

impl WaveFan {
    pub fn is_empty(&self) -> bool {
        self.waves.is_empty()
    }

    pub fn len(&self) -> usize {
        self.waves.len()
    }

    pub fn total_strength(&self, family: usize) -> f64 {
        self.waves.iter().filter(|w| w.family == family).map(|w| w.strength).sum()
    }

    pub fn has(&self, family: usize, kind: WaveKind) -> bool {
        self.waves.iter().any(|w| w.family == family && w.kind == kind)
    }
}

/// Speed assigned to a front of `family` between two states.
pub fn front_speed(model: &dyn System, family: usize, kind: WaveKind, left: &Vector, right: &Vector) -> Result<f64> {
    match kind {
        WaveKind::Rarefaction => {
            let i = family - 1;
            let mid = left.with(i, 0.5 * (left[i] + right[i]));
            Ok(model.speed(family, &mid))
        }
        WaveKind::Shock => match model.shock_rule() {
            ShockRule::Straight => Ok(0.5 * (model.speed(family, left) + model.speed(family, right))),
            ShockRule::Hugoniot => {
                let ul = model.from_riemann_coords(left);
                let ur = model.from_riemann_coords(right);
                let fl = model.flux(&ul).ok_or_else(|| Error::NonConservative(model.name().into()))?;
                let fr = model.flux(&ur).ok_or_else(|| Error::NonConservative(model.name().into()))?;
                let du = ur - ul;
                Ok((fr - fl).dot(&du) / du.dot(&du))
            }
        },
    }
}

/// Appends the `family` wave from `left` to `w_family = target`; returns the
/// state reached.
fn elementary(
    model: &dyn System,
    family: usize,
    left: State,
    target: f64,
    nu: f64,
    out: &mut Vec<Wave>,
) -> Result<State> {
    let i = family - 1;
    let delta = target - left.w[i];
    if delta.abs() <= STRENGTH_FLOOR {
        return Ok(left);
    }
    if delta > 0.0 {
        let pieces = ((delta / nu) - SPLIT_SLACK).ceil().max(1.0) as usize;
        let mut prev = left;
        for k in 1..=pieces {
            let wk = if k == pieces { target } else { left.w[i] + delta * k as f64 / pieces as f64 };
            let next = model.state_w(prev.w.with(i, wk));
            let speed = front_speed(model, family, WaveKind::Rarefaction, &prev.w, &next.w)?;
            out.push(Wave {
                family,
                kind: WaveKind::Rarefaction,
                left: prev,
                right: next,
                speed,
                strength: next.w[i] - prev.w[i],
            });
            prev = next;
        }
        Ok(prev)
    } else {
        let (w, speed) = shock_state(model, family, &left.w, target)?;
        let right = model.state_w(w);
        out.push(Wave { family, kind: WaveKind::Shock, left, right, speed, strength: -delta });
        Ok(right)
    }
}

/// Coordinate `w₁` reached at the end of the 2-wave when the 1-wave ends at
/// `w₁ = s`.
fn end_coordinate(model: &dyn System, wl: &Vector, wr: &Vector, s: f64) -> Result<f64> {
    let middle = if s >= wl[0] { wl.with(0, s) } else { shock_state(model, 1, wl, s)?.0 };
    if wr[1] >= middle[1] {
        Ok(middle[0])
    } else {
        Ok(shock_state(model, 2, &middle, wr[1])?.0[0])
    }
}

/// `w₁` of the middle state of a 2×2 Riemann problem.
fn middle_coordinate(model: &dyn System, wl: &Vector, wr: &Vector) -> Result<f64> {
    if model.shock_rule() == ShockRule::Straight {
        return Ok(wr[0]);
    }
    let g = |s: f64| end_coordinate(model, wl, wr, s).map(|e| e - wr[0]);
    let tol = 1e-15 * (1.0 + wr[0].abs());
    // Secant iteration from the straight-curve guess; g is close to the identity.
    let (mut s0, mut s1) = (wr[0], wr[0] + 1e-7);
    let (mut g0, mut g1) = (g(s0)?, g(s1)?);
    for _ in 0..60 {
        if g1 == 0.0 || (s1 - s0).abs() <= tol {
            return Ok(s1);
        }
        let denom = g1 - g0;
        if denom == 0.0 || !denom.is_finite() {
            break;
        }
        let s2 = s1 - g1 * (s1 - s0) / denom;
        if !s2.is_finite() {
            break;
        }
        s0 = s1;
        g0 = g1;
        s1 = s2;
        g1 = g(s1)?;
    }
    if g1.abs() <= 1e-14 {
        return Ok(s1);
    }
    // Bisection fallback on a bracket around the guess.
    let mut width = 1e-3 + (wr[0] - wl[0]).abs();
    for _ in 0..30 {
        let (mut lo, mut hi) = (wr[0] - width, wr[0] + width);
        let mut glo = g(lo)?;
        if glo.signum() != g(hi)?.signum() {
            for _ in 0..200 {
                let mid = 0.5 * (lo + hi);
                let gm = g(mid)?;
                if gm.signum() == glo.signum() {
                    lo = mid;
                    glo = gm;
                } else {
                    hi = mid;
                }
                if hi - lo <= tol {
                    break;
                }
            }
            return Ok(0.5 * (lo + hi));
        }
        width *= 2.0;
    }
    Err(Error::NoConvergence(format!("Riemann middle state for {wl:?} | {wr:?}")))
}

/// Solves the Riemann problem `(left, right)` and discretizes rarefactions
/// into fronts of strength at most `nu`.
pub fn solve_riemann(model: &dyn System, left: &State, right: &State, nu: f64) -> Result<WaveFan> {
    if !(nu > 0.0) {
        return Err(Error::Invalid(format!("approximation parameter ν must be positive, got {nu}")));
    }
    model.check_box(&left.w)?;
    model.check_box(&right.w)?;
    let mut waves = Vec::new();
    if left.w == right.w {
        return Ok(WaveFan { waves });
    }
    let reached = match model.dim() {
        1 => elementary(model, 1, *left, right.w[0], nu, &mut waves)?,
        2 => {
            let s = middle_coordinate(model, &left.w, &right.w)?;
            let middle = elementary(model, 1, *left, s, nu, &mut waves)?;
            elementary(model, 2, middle, right.w[1], nu, &mut waves)?
        }
        n => return Err(Error::Invalid(format!("Riemann solver supports n ≤ 2, got {n}"))),
    };
    let mismatch = (reached.w - right.w).norm_inf();
    if mismatch > 1e-9 {
        return Err(Error::NoConvergence(format!(
            "fan from {:?} ends at {:?}, expected {:?}",
            left.w, reached.w, right.w
        )));
    }
    // Close the chain exactly on the requested right state.
    if let Some(last) = waves.last_mut() {
        last.right = *right;
        let i = last.family - 1;
        last.strength = (right.w[i] - last.left.w[i]).abs();
    }
    for wave in &waves {
        model.check_box(&wave.right.w)?;
    }
    Ok(WaveFan { waves })
}

/// Waves entering the domain through `x = a` when the boundary value
/// `control` faces the interior trace `trace`: the strictly positive-speed
/// part of the fan of `(control, trace)`.
pub fn solve_boundary_riemann_left(model: &dyn System, control: &State, trace: &State, nu: f64) -> Result<WaveFan> {
    let fan = solve_riemann(model, control, trace, nu)?;
    Ok(WaveFan { waves: fan.waves.into_iter().filter(|w| w.speed > 0.0).collect() })
}

/// Mirror of [`solve_boundary_riemann_left`] at `x = b`: the strictly
/// negative-speed part of the fan of `(trace, control)`.
pub fn solve_boundary_riemann_right(model: &dyn System, control: &State, trace: &State, nu: f64) -> Result<WaveFan> {
    let fan = solve_riemann(model, trace, control, nu)?;
    Ok(WaveFan { waves: fan.waves.into_iter().filter(|w| w.speed < 0.0).collect() })
}

/// `‖f(u_R) - f(u_L) - σ (u_R - u_L)‖`.
pub fn rh_residual(model: &dyn System, left: &State, right: &State, speed: f64) -> Result<f64> {
    let fl = model.flux(&left.u).ok_or_else(|| Error::NonConservative(model.name().into()))?;
    let fr = model.flux(&right.u).ok_or_else(|| Error::NonConservative(model.name().into()))?;
    Ok((fr - fl - speed * (right.u - left.u)).norm2())
}
