use serde::Serialize;

use super::System;
use crate::state::Vector;

/// Points per axis of the validation grid over Γ.
pub const GRID_POINTS: usize = 21;

/// Signs of the three wedge products required for the shock-persistence
/// hypothesis on 2×2 systems (all three must be negative).
#[derive(Clone, Copy, Debug, Serialize, PartialEq)]
pub struct WedgeSigns {
    /// max over the grid of `r₁ ∧ r₂`
    pub r1_r2: f64,
    /// max over the grid of `r₁ ∧ (Dr₁·r₁)`
    pub r1_dr1: f64,
    /// max over the grid of `r₂ ∧ (Dr₂·r₂)`
    pub r2_dr2: f64,
}

impl WedgeSigns {
    pub fn all_negative(&self) -> bool {
        self.r1_r2 < 0.0 && self.r1_dr1 < 0.0 && self.r2_dr2 < 0.0
    }
}

/// Grid-sampled hypothesis report for a model over its box Γ.
#[derive(Clone, Debug, Serialize)]
pub struct ValidationReport {
    pub model: String,
    pub samples: usize,
    pub strictly_hyperbolic: bool,
    pub genuinely_nonlinear: bool,
    /// min over grid and families of `Dλ_i·r_i`
    pub min_nonlinearity: f64,
    pub speed_separated: bool,
    pub c0: f64,
    pub lambda_min: f64,
    pub lambda_max: f64,
    pub chart_roundtrip_error: f64,
    pub eigen_residual: f64,
    pub wedges: Option<WedgeSigns>,
    pub failures: Vec<String>,
}

impl ValidationReport {
    /// Strict hyperbolicity, genuine nonlinearity and speed separation.
    pub fn passes(&self) -> bool {
        self.strictly_hyperbolic && self.genuinely_nonlinear && self.speed_separated
    }

    pub fn wedge_hypothesis(&self) -> bool {
        self.wedges.map(|w| w.all_negative()).unwrap_or(false)
    }
}

fn speed_at_u(model: &dyn System, family: usize, u: &Vector) -> f64 {
    model.speed(family, &model.to_riemann_coords(u))
}

fn step(u: &Vector) -> f64 {
    1e-6 * u.norm_inf().max(1.0)
}

/// `Dr_i · r_i` by central differences along `r_i`.
fn eigenvector_derivative(model: &dyn System, family: usize, u: &Vector) -> Vector {
    let r = model.eigenvector(family, u);
    let h = step(u);
    let rp = model.eigenvector(family, &(*u + h * r));
    let rm = model.eigenvector(family, &(*u - (h * r)));
    (0.5 / h) * (rp - rm)
}

/// Wedge products at a single conservative state of a 2×2 model.
pub fn wedge_products(model: &dyn System, u: &Vector) -> WedgeSigns {
    let r1 = model.eigenvector(1, u);
    let r2 = model.eigenvector(2, u);
    WedgeSigns {
        r1_r2: r1.wedge(&r2),
        r1_dr1: r1.wedge(&eigenvector_derivative(model, 1, u)),
        r2_dr2: r2.wedge(&eigenvector_derivative(model, 2, u)),
    }
}

pub fn validate_model(model: &dyn System) -> ValidationReport {
    let n = model.dim();
    let p = model.negative_families();
    let grid = model.riemann_box().grid(GRID_POINTS);
    let mut failures = Vec::new();
    let mut strictly_hyperbolic = true;
    let mut min_nonlinearity = f64::INFINITY;
    let mut c0 = f64::INFINITY;
    let mut lambda_min = f64::INFINITY;
    let mut lambda_max: f64 = 0.0;
    let mut chart_err: f64 = 0.0;
    let mut residual: f64 = 0.0;
    let mut wedges: Option<WedgeSigns> = None;
    let conservative = model.is_conservative();

    for w in &grid {
        let u = model.from_riemann_coords(w);
        let speeds = model.speeds(w);
        for i in 1..n {
            if !(speeds[i - 1] < speeds[i]) {
                strictly_hyperbolic = false;
                failures.push(format!("λ not strictly ordered at w = {w:?}"));
            }
        }
        for i in 0..n {
            lambda_min = lambda_min.min(speeds[i].abs());
            lambda_max = lambda_max.max(speeds[i].abs());
        }
        let left_gap = if p > 0 { -speeds[p - 1] } else { f64::INFINITY };
        let right_gap = if p < n { speeds[p] } else { f64::INFINITY };
        c0 = c0.min(left_gap.min(right_gap));

        let back = model.to_riemann_coords(&u);
        chart_err = chart_err.max((back - *w).norm_inf());

        let m = model.characteristic_matrix(&u);
        for family in 1..=n {
            let r = model.eigenvector(family, &u);
            let res = (m.mul_vec(&r) - speeds[family - 1] * r).norm2();
            residual = residual.max(res);
            let h = step(&u);
            let dl = (speed_at_u(model, family, &(u + h * r)) - speed_at_u(model, family, &(u - h * r)))
                / (2.0 * h);
            min_nonlinearity = min_nonlinearity.min(dl);
        }

        if n == 2 && conservative {
            let ws = wedge_products(model, &u);
            wedges = Some(match wedges {
                None => ws,
                Some(acc) => WedgeSigns {
                    r1_r2: acc.r1_r2.max(ws.r1_r2),
                    r1_dr1: acc.r1_dr1.max(ws.r1_dr1),
                    r2_dr2: acc.r2_dr2.max(ws.r2_dr2),
                },
            });
        }
    }

    let genuinely_nonlinear = min_nonlinearity > 1e-6;
    if !genuinely_nonlinear {
        failures.push(format!("Dλ·r not bounded away from 0 (min {min_nonlinearity:e})"));
    }
    let speed_separated = c0 > 0.0 && c0.is_finite();
    if !speed_separated {
        failures.push(format!("speed separation fails (c0 = {c0})"));
    }
    if chart_err > 1e-10 {
        failures.push(format!("Riemann chart round-trip error {chart_err:e}"));
    }
    if residual > 1e-9 {
        failures.push(format!("eigen residual {residual:e}"));
    }
    failures.dedup();

    ValidationReport {
        model: model.name().to_string(),
        samples: grid.len(),
        strictly_hyperbolic,
        genuinely_nonlinear,
        min_nonlinearity,
        speed_separated,
        c0,
        lambda_min,
        lambda_max,
        chart_roundtrip_error: chart_err,
        eigen_residual: residual,
        wedges,
        failures,
    }
}
