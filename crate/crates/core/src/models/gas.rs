use super::{Matrix, RiemannBox, ShockRule, System};
use crate::error::{Error, Result};
use crate::state::Vector;

/// Isentropic gas in velocity form, conservative variables `(ρ, u)`:
///
/// ```text
/// ρ_t + (uρ)_x = 0
/// u_t + (u²/2 + K²/(γ-1) ρ^{γ-1})_x = 0
/// ```
///
/// With sound speed `c = K ρ^{(γ-1)/2}` the eigenvalues are `u ∓ c` and the
/// Riemann coordinates are `w₁ = u - 2c/(γ-1)`, `w₂ = u + 2c/(γ-1)`.
#[derive(Clone, Debug)]
pub struct Gas {
    gamma: f64,
    k: f64,
    bounds: RiemannBox,
}

impl Gas {
    /// Gas model with the default box: a half-width `0.2` square in `w`
    /// centred on `(ρ, u) = (1, 0)`.
    pub fn new(gamma: f64, k: f64) -> Result<Self> {
        Self::check_params(gamma, k)?;
        let s = 2.0 * k / (gamma - 1.0);
        let bounds = RiemannBox::new(Vector::pair(-s - 0.2, s - 0.2), Vector::pair(-s + 0.2, s + 0.2))?;
        Self::with_box(gamma, k, bounds)
    }

    pub fn with_box(gamma: f64, k: f64, bounds: RiemannBox) -> Result<Self> {
        Self::check_params(gamma, k)?;
        let gas = Gas { gamma, k, bounds };
        for w in bounds.grid(2) {
            if gas.sound_speed_w(&w) <= 0.0 || gas.speed(1, &w) >= 0.0 || gas.speed(2, &w) <= 0.0 {
                return Err(Error::Invalid(format!("gas box {bounds:?} is not subsonic")));
            }
        }
        Ok(gas)
    }

    fn check_params(gamma: f64, k: f64) -> Result<()> {
        if !(gamma > 1.0 && gamma < 3.0) {
            return Err(Error::Invalid(format!("gas requires 1 < γ < 3, got {gamma}")));
        }
        if !(k > 0.0) {
            return Err(Error::Invalid(format!("gas requires K > 0, got {k}")));
        }
        Ok(())
    }

    pub fn gamma(&self) -> f64 {
        self.gamma
    }

    pub fn k(&self) -> f64 {
        self.k
    }

    fn sound_speed(&self, rho: f64) -> f64 {
        self.k * rho.powf(0.5 * (self.gamma - 1.0))
    }

    fn sound_speed_w(&self, w: &Vector) -> f64 {
        0.25 * (self.gamma - 1.0) * (w[1] - w[0])
    }
}

impl System for Gas {
    fn name(&self) -> &str {
        "gas"
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
        let (rho, vel) = (u[0], u[1]);
        let g = self.gamma;
        Some(Vector::pair(
            vel * rho,
            0.5 * vel * vel + self.k * self.k / (g - 1.0) * rho.powf(g - 1.0),
        ))
    }
    fn to_riemann_coords(&self, u: &Vector) -> Vector {
        let c = self.sound_speed(u[0]);
        let s = 2.0 * c / (self.gamma - 1.0);
        Vector::pair(u[1] - s, u[1] + s)
    }
    fn from_riemann_coords(&self, w: &Vector) -> Vector {
        let c = self.sound_speed_w(w);
        let rho = (c / self.k).powf(2.0 / (self.gamma - 1.0));
        Vector::pair(rho, 0.5 * (w[0] + w[1]))
    }
    fn speed(&self, family: usize, w: &Vector) -> f64 {
        let vel = 0.5 * (w[0] + w[1]);
        let c = self.sound_speed_w(w);
        match family {
            1 => vel - c,
            _ => vel + c,
        }
    }
    fn eigenvector(&self, family: usize, u: &Vector) -> Vector {
        let c = self.sound_speed(u[0]);
        let r = match family {
            1 => Vector::pair(-u[0], c),
            _ => Vector::pair(u[0], c),
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
