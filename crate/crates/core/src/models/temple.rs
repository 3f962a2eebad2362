use super::{Matrix, RiemannBox, ShockRule, System};
use crate::state::Vector;

/// A genuinely nonlinear 2×2 Temple-class system given directly in Riemann
/// coordinates:
///
/// ```text
/// λ₁(w) = w₁ + w₂/4,    λ₂(w) = w₂ + w₁/4,
/// ```
///
/// on `Γ = [-3, -1] × [1, 3]`. An `i`-wave changes only `w_i`, so wave
/// curves are straight lines and interactions only change front speeds.
/// The system is simulated in `w` alone and carries no conservative flux;
/// the "conservative" variables coincide with `w`.
#[derive(Clone, Debug)]
pub struct Temple2 {
    bounds: RiemannBox,
}

impl Temple2 {
    pub fn with_box(bounds: RiemannBox) -> crate::Result<Self> {
        let model = Temple2 { bounds };
        // λ₁ < 0 < λ₂ must hold on every corner, the extremes of affine maps.
        let corners = bounds.grid(2);
        if corners.iter().any(|w| model.speed(1, w) >= 0.0 || model.speed(2, w) <= 0.0) {
            return Err(crate::Error::Invalid(format!(
                "temple2 box {bounds:?} violates λ₁ < 0 < λ₂"
            )));
        }
        Ok(model)
    }
}

impl Default for Temple2 {
    fn default() -> Self {
        let bounds = RiemannBox::new(Vector::pair(-3.0, 1.0), Vector::pair(-1.0, 3.0))
            .expect("valid default box");
        Temple2 { bounds }
    }
}

impl System for Temple2 {
    fn name(&self) -> &str {
        "temple2"
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
    fn flux(&self, _u: &Vector) -> Option<Vector> {
        None
    }
    fn to_riemann_coords(&self, u: &Vector) -> Vector {
        *u
    }
    fn from_riemann_coords(&self, w: &Vector) -> Vector {
        *w
    }
    fn speed(&self, family: usize, w: &Vector) -> f64 {
        match family {
            1 => w[0] + 0.25 * w[1],
            _ => w[1] + 0.25 * w[0],
        }
    }
    fn eigenvector(&self, family: usize, _u: &Vector) -> Vector {
        match family {
            1 => Vector::pair(1.0, 0.0),
            _ => Vector::pair(0.0, 1.0),
        }
    }
    /// Diagonal characteristic matrix of `w_t + diag(λ(w)) w_x = 0`.
    fn characteristic_matrix(&self, u: &Vector) -> Matrix {
        let mut m = Matrix::zeros(2);
        m.data[0][0] = self.speed(1, u);
        m.data[1][1] = self.speed(2, u);
        m
    }
    fn shock_rule(&self) -> ShockRule {
        ShockRule::Straight
    }
}
