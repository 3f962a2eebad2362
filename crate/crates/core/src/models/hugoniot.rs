use super::{ShockRule, System};
use crate::error::{Error, Result};
use crate::state::Vector;

const NEWTON_TOL: f64 = 1e-12;
const NEWTON_MAX_ITER: usize = 50;

/// Point of the `family`-shock curve issuing from `left` (Riemann
/// coordinates) whose `w_family` equals `target`, together with the shock
/// speed.
///
/// For [`ShockRule::Straight`] the other coordinates are unchanged and the
/// speed is the mean of `λ_family` on both sides. For
/// [`ShockRule::Hugoniot`] the remaining coordinate is found by Newton
/// iteration on the Rankine–Hugoniot relation, with a bisection fallback.
pub fn shock_state(model: &dyn System, family: usize, left: &Vector, target: f64) -> Result<(Vector, f64)> {
    let i = family - 1;
    match model.shock_rule() {
        ShockRule::Straight => {
            let right = left.with(i, target);
            let speed = 0.5 * (model.speed(family, left) + model.speed(family, &right));
            Ok((right, speed))
        }
        ShockRule::Hugoniot => hugoniot(model, family, left, target),
    }
}

fn flux_of(model: &dyn System, w: &Vector) -> Result<(Vector, Vector)> {
    let u = model.from_riemann_coords(w);
    let f = model
        .flux(&u)
        .ok_or_else(|| Error::NonConservative(model.name().to_string()))?;
    Ok((u, f))
}

fn hugoniot(model: &dyn System, family: usize, left: &Vector, target: f64) -> Result<(Vector, f64)> {
    let (ul, fl) = flux_of(model, left)?;
    let i = family - 1;
    if model.dim() == 1 {
        let right = left.with(0, target);
        let (ur, fr) = flux_of(model, &right)?;
        return Ok((right, (fr[0] - fl[0]) / (ur[0] - ul[0])));
    }
    if model.dim() != 2 {
        return Err(Error::Invalid("Hugoniot solver supports n ≤ 2".into()));
    }
    let j = 1 - i;
    // Normalised RH defect: (Δf ∧ Δu) / |Δu|², zero iff Δf ∥ Δu.
    let defect = |x: f64| -> Result<f64> {
        let w = left.with(i, target).with(j, x);
        let (ur, fr) = flux_of(model, &w)?;
        let du = ur - ul;
        let df = fr - fl;
        Ok(df.wedge(&du) / du.dot(&du))
    };

    let x0 = left[j];
    let delta = (target - left[i]).abs();
    let mut x = x0;
    let mut converged = false;
    for _ in 0..NEWTON_MAX_ITER {
        let g = defect(x)?;
        let h = 1e-7 * (1.0 + x.abs());
        let dg = (defect(x + h)? - defect(x - h)?) / (2.0 * h);
        if !dg.is_finite() || dg == 0.0 {
            break;
        }
        let step = g / dg;
        x -= step;
        if !x.is_finite() || (x - x0).abs() > 2.0 * delta + 1e-3 {
            break;
        }
        if step.abs() <= NEWTON_TOL * (1.0 + x.abs()) {
            converged = true;
            break;
        }
    }
    if !converged {
        x = bisect(&defect, x0, delta.max(1e-8))?;
    }
    let right = left.with(i, target).with(j, x);
    let (ur, fr) = flux_of(model, &right)?;
    let du = ur - ul;
    let speed = (fr - fl).dot(&du) / du.dot(&du);
    Ok((right, speed))
}

fn bisect(defect: &dyn Fn(f64) -> Result<f64>, x0: f64, scale: f64) -> Result<f64> {
    let mut width = scale;
    for _ in 0..20 {
        let (mut lo, mut hi) = (x0 - width, x0 + width);
        let (glo, ghi) = (defect(lo)?, defect(hi)?);
        if glo.signum() != ghi.signum() {
            let mut glo = glo;
            for _ in 0..200 {
                let mid = 0.5 * (lo + hi);
                let gm = defect(mid)?;
                if gm.signum() == glo.signum() {
                    lo = mid;
                    glo = gm;
                } else {
                    hi = mid;
                }
                if hi - lo <= 1e-15 * (1.0 + mid.abs()) {
                    break;
                }
            }
            return Ok(0.5 * (lo + hi));
        }
        width *= 2.0;
    }
    Err(Error::NoConvergence(format!("Hugoniot locus near w = {x0}")))
}
