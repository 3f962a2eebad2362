use super::{Matrix, RiemannBox, ShockRule, System};
use crate::state::Vector;

/// Inviscid Burgers equation `u_t + (u²/2)_x = 0` on states `u ∈ [1, 3]`.
///
/// All speeds are positive (`p = 0`), so every wave enters at `x = a` and
/// leaves at `x = b`. Used to sanity-check the engine.
#[derive(Clone, Debug)]
pub struct Burgers {
    bounds: RiemannBox,
}

impl Burgers {
    pub fn new(lo: f64, hi: f64) -> crate::Result<Self> {
        if lo <= 0.0 {
            return Err(crate::Error::Invalid("burgers states must be positive".into()));
        }
        Ok(Burgers { bounds: RiemannBox::new(Vector::scalar(lo), Vector::scalar(hi))? })
    }
}

impl Default for Burgers {
    fn default() -> Self {
        Burgers::new(1.0, 3.0).expect("valid default box")
    }
}

impl System for Burgers {
    fn name(&self) -> &str {
        "burgers"
    }
    fn dim(&self) -> usize {
        1
    }
    fn negative_families(&self) -> usize {
        0
    }
    fn riemann_box(&self) -> &RiemannBox {
        &self.bounds
    }
    fn flux(&self, u: &Vector) -> Option<Vector> {
        Some(Vector::scalar(0.5 * u[0] * u[0]))
    }
    fn to_riemann_coords(&self, u: &Vector) -> Vector {
        *u
    }
    fn from_riemann_coords(&self, w: &Vector) -> Vector {
        *w
    }
    fn speed(&self, _family: usize, w: &Vector) -> f64 {
        w[0]
    }
    fn eigenvector(&self, _family: usize, _u: &Vector) -> Vector {
        Vector::scalar(1.0)
    }
    fn characteristic_matrix(&self, u: &Vector) -> Matrix {
        super::fd_jacobian(|v| self.flux(v).unwrap(), u)
    }
    fn shock_rule(&self) -> ShockRule {
        ShockRule::Hugoniot
    }
}
