use super::{Matrix, RiemannBox, ShockRule, System};
use crate::error::{Error, Result};
use crate::state::Vector;

/// The p-system `v_t - u_x = 0`, `u_t + p(v)_x = 0` with `p(v) = κ v^{-γ}`,
/// conservative variables `(v, u)`.
///
/// Speeds are `∓c(v)` with `c = sqrt(-p'(v))`. Same-family shock collisions
/// reflect a rarefaction instead of a shock, which makes this the contrast
/// model for shock persistence experiments.
#[derive(Clone, Debug)]
pub struct PSystem {
    gamma: f64,
    kappa: f64,
    bounds: RiemannBox,
}

impl PSystem {
    /// Default box: half-width `0.2` square in `w` centred on `(v, u) = (1, 0)`.
    pub fn new(gamma: f64, kappa: f64) -> Result<Self> {
        if !(gamma > 1.0) || !(kappa > 0.0) {
            return Err(Error::Invalid(format!("p-system needs γ > 1, κ > 0; got {gamma}, {kappa}")));
        }
        let mut sys = PSystem { gamma, kappa, bounds: RiemannBox::new(Vector::pair(-1.0, -1.0), Vector::pair(1.0, 1.0))? };
        let w0 = sys.to_riemann_coords(&Vector::pair(1.0, 0.0));
        sys.bounds = RiemannBox::new(
            Vector::pair(w0[0] - 0.2, w0[1] - 0.2),
            Vector::pair(w0[0] + 0.2, w0[1] + 0.2),
        )?;
        Ok(sys)
    }

    pub fn with_box(gamma: f64, kappa: f64, bounds: RiemannBox) -> Result<Self> {
        let mut sys = PSystem::new(gamma, kappa)?;
        sys.bounds = bounds;
        for w in bounds.grid(2) {
            if !(sys.from_riemann_coords(&w)[0] > 0.0) {
                return Err(Error::Invalid(format!("p-system box {bounds:?} leaves v > 0")));
            }
        }
        Ok(sys)
    }

    fn c(&self, v: f64) -> f64 {
        (self.kappa * self.gamma).sqrt() * v.powf(-0.5 * (self.gamma + 1.0))
    }

    /// Antiderivative of `c`, increasing in `v`.
    fn phi(&self, v: f64) -> f64 {
        let e = 0.5 * (1.0 - self.gamma);
        (self.kappa * self.gamma).sqrt() * v.powf(e) / e
    }

    fn phi_inv(&self, phi: f64) -> f64 {
        let e = 0.5 * (1.0 - self.gamma);
        (phi * e / (self.kappa * self.gamma).sqrt()).powf(1.0 / e)
    }
}

impl System for PSystem {
    fn name(&self) -> &str {
        "psystem"
    }
    fn dim(&self) -> usize {
        2
    }
    fn negative_families(&self) -> usize {
        1
    }
    fn riemann_box(&self) -> &RiemannBox {
        &self.bounds
    }
    fn flux(&self, u: &Vector) -> Option<Vector> {
        Some(Vector::pair(-u[1], self.kappa * u[0].powf(-self.gamma)))
    }
    fn to_riemann_coords(&self, u: &Vector) -> Vector {
        let phi = self.phi(u[0]);
        Vector::pair(u[1] + phi, u[1] - phi)
    }
    fn from_riemann_coords(&self, w: &Vector) -> Vector {
        let v = self.phi_inv(0.5 * (w[0] - w[1]));
        Vector::pair(v, 0.5 * (w[0] + w[1]))
    }
    fn speed(&self, family: usize, w: &Vector) -> f64 {
        let c = self.c(self.from_riemann_coords(w)[0]);
        match family {
            1 => -c,
            _ => c,
        }
    }
    fn eigenvector(&self, family: usize, u: &Vector) -> Vector {
        let c = self.c(u[0]);
        let r = match family {
            1 => Vector::pair(1.0, c),
            _ => Vector::pair(-1.0, c),
        };
        (1.0 / r.norm2()) * r
    }
    fn characteristic_matrix(&self, u: &Vector) -> Matrix {
        super::fd_jacobian(|v| self.flux(v).unwrap(), u)
    }
    fn shock_rule(&self) -> ShockRule {
        ShockRule::Hugoniot
    }
}
