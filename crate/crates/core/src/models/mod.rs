//! Hyperbolic system abstraction and the built-in models.
//!
//! Every model exposes its eigenstructure in terms of a complete set of
//! Riemann coordinates `w`, which is what the Riemann solver and the front
//! tracker operate on. Conservative variables `u` are kept alongside for flux
//! evaluation and conservation checks.

mod burgers;
mod gas;
mod hugoniot;
mod psystem;
mod temple;
mod validate;

use std::fmt;
use std::sync::Arc;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::state::{State, Vector, MAX_DIM};

pub use burgers::Burgers;
pub use gas::Gas;
pub use hugoniot::shock_state;
pub use psystem::PSystem;
pub use temple::Temple2;
pub use validate::{validate_model, wedge_products, ValidationReport, WedgeSigns};

/// Slack used when testing membership of Riemann coordinates in the box.
pub const BOX_SLACK: f64 = 1e-12;

/// Shared, immutable handle to a model.
pub type Model = Arc<dyn System>;

/// How shock curves and shock speeds are obtained.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum ShockRule {
    /// Temple class: an `i`-shock changes only `w_i` and travels with the
    /// mean of the characteristic speeds on its two sides.
    Straight,
    /// Hugoniot locus from the conservative flux, solved by Newton iteration.
    Hugoniot,
}

/// Product box `[w_1⁻, w_1⁺] × … × [w_n⁻, w_n⁺]` in Riemann coordinates.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct RiemannBox {
    pub lo: Vector,
    pub hi: Vector,
}

impl RiemannBox {
    pub fn new(lo: Vector, hi: Vector) -> Result<Self> {
        if lo.len() != hi.len() || lo.iter().zip(hi.iter()).any(|(l, h)| !(l < h)) {
            return Err(Error::Invalid(format!("degenerate box {lo:?} .. {hi:?}")));
        }
        Ok(RiemannBox { lo, hi })
    }

    pub fn contains(&self, w: &Vector) -> bool {
        w.len() == self.lo.len()
            && (0..w.len()).all(|i| w[i] >= self.lo[i] - BOX_SLACK && w[i] <= self.hi[i] + BOX_SLACK)
    }

    pub fn center(&self) -> Vector {
        0.5 * (self.lo + self.hi)
    }

    /// Tensor grid with `per_axis` points on each axis, endpoints included.
    pub fn grid(&self, per_axis: usize) -> Vec<Vector> {
        let n = self.lo.len();
        let axis = |i: usize, k: usize| {
            self.lo[i] + (self.hi[i] - self.lo[i]) * k as f64 / (per_axis - 1) as f64
        };
        match n {
            1 => (0..per_axis).map(|k| Vector::scalar(axis(0, k))).collect(),
            _ => (0..per_axis)
                .flat_map(|k| (0..per_axis).map(move |l| (k, l)))
                .map(|(k, l)| Vector::pair(axis(0, k), axis(1, l)))
                .collect(),
        }
    }
}

/// Small dense square matrix.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct Matrix {
    pub n: usize,
    pub data: [[f64; MAX_DIM]; MAX_DIM],
}

impl Matrix {
    pub fn zeros(n: usize) -> Self {
        Matrix { n, data: [[0.0; MAX_DIM]; MAX_DIM] }
    }

    pub fn mul_vec(&self, v: &Vector) -> Vector {
        let mut out = Vector::zeros(self.n);
        for i in 0..self.n {
            out[i] = (0..self.n).map(|j| self.data[i][j] * v[j]).sum();
        }
        out
    }
}

/// A strictly hyperbolic system `u_t + f(u)_x = 0` with Riemann coordinates.
///
/// Families are numbered `1..=dim()`, ordered by increasing characteristic
/// speed. Families `1..=negative_families()` travel left, the rest travel
/// right.
pub trait System: Send + Sync + fmt::Debug {
    fn name(&self) -> &str;
    fn dim(&self) -> usize;
    /// Number `p` of families with strictly negative speed.
    fn negative_families(&self) -> usize;
    fn riemann_box(&self) -> &RiemannBox;
    /// Conservative flux, `None` for models defined only in Riemann coordinates.
    fn flux(&self, u: &Vector) -> Option<Vector>;
    fn to_riemann_coords(&self, u: &Vector) -> Vector;
    fn from_riemann_coords(&self, w: &Vector) -> Vector;
    /// Characteristic speed `λ_family` as a function of the Riemann coordinates.
    fn speed(&self, family: usize, w: &Vector) -> f64;
    /// Unit right eigenvector in conservative variables, oriented so that
    /// `Dλ·r > 0`.
    fn eigenvector(&self, family: usize, u: &Vector) -> Vector;
    /// Matrix whose eigenpairs are checked against [`System::eigenvector`]:
    /// the flux Jacobian for conservative models.
    fn characteristic_matrix(&self, u: &Vector) -> Matrix;
    fn shock_rule(&self) -> ShockRule;
}

impl<'a> dyn System + 'a {
    pub fn is_conservative(&self) -> bool {
        self.flux(&self.from_riemann_coords(&self.riemann_box().center())).is_some()
    }

    /// Builds a state from Riemann coordinates without checking the box.
    pub fn state_w(&self, w: Vector) -> State {
        State { u: self.from_riemann_coords(&w), w }
    }

    pub fn state_from_riemann(&self, w: Vector) -> Result<State> {
        self.check_box(&w)?;
        Ok(self.state_w(w))
    }

    pub fn state_from_conserved(&self, u: Vector) -> Result<State> {
        if u.len() != self.dim() || !u.is_finite() {
            return Err(Error::Domain(format!("bad state {u:?} for {}", self.name())));
        }
        let w = self.to_riemann_coords(&u);
        self.check_box(&w)?;
        Ok(State { u, w })
    }

    pub fn check_box(&self, w: &Vector) -> Result<()> {
        if w.len() == self.dim() && w.is_finite() && self.riemann_box().contains(w) {
            Ok(())
        } else {
            Err(Error::OutOfBox(w.as_slice().to_vec()))
        }
    }

    pub fn speeds(&self, w: &Vector) -> Vector {
        let mut out = Vector::zeros(self.dim());
        for i in 0..self.dim() {
            out[i] = self.speed(i + 1, w);
        }
        out
    }
}

/// Central finite-difference Jacobian with step `1e-6` scaled by the state
/// magnitude.
pub fn fd_jacobian(f: impl Fn(&Vector) -> Vector, u: &Vector) -> Matrix {
    let n = u.len();
    let mut m = Matrix::zeros(n);
    for j in 0..n {
        let h = 1e-6 * u[j].abs().max(1.0);
        let fp = f(&u.with(j, u[j] + h));
        let fm = f(&u.with(j, u[j] - h));
        for i in 0..n {
            m.data[i][j] = (fp[i] - fm[i]) / (2.0 * h);
        }
    }
    m
}

/// Eigenvalues and oriented unit eigenvectors at a state.
#[derive(Clone, Debug)]
pub struct Spectrum {
    pub values: Vector,
    pub vectors: Vec<Vector>,
}

pub fn eval_flux(model: &dyn System, s: &State) -> Result<Vector> {
    model.check_box(&s.w).map_err(|_| Error::Domain(format!("{:?} outside Γ", s.u)))?;
    model
        .flux(&s.u)
        .ok_or_else(|| Error::NonConservative(model.name().to_string()))
}

pub fn eigen(model: &dyn System, s: &State) -> Result<Spectrum> {
    model.check_box(&s.w).map_err(|_| Error::Domain(format!("{:?} outside Γ", s.u)))?;
    let values = model.speeds(&s.w);
    for i in 1..values.len() {
        if !(values[i - 1] < values[i]) {
            return Err(Error::Degenerate(format!("λ = {values:?} at {:?}", s.u)));
        }
    }
    let vectors = (1..=model.dim()).map(|i| model.eigenvector(i, &s.u)).collect();
    Ok(Spectrum { values, vectors })
}

pub fn to_riemann(model: &dyn System, s: &State) -> Result<Vector> {
    let w = model.to_riemann_coords(&s.u);
    model.check_box(&w)?;
    Ok(w)
}

pub fn from_riemann(model: &dyn System, w: &Vector) -> Result<State> {
    model.state_from_riemann(*w)
}

/// Looks up a built-in model by name with default parameters.
pub fn builtin(name: &str) -> Result<Model> {
    Ok(match name {
        "burgers" => Arc::new(Burgers::default()),
        "temple2" => Arc::new(Temple2::default()),
        "gas" => Arc::new(Gas::new(2.0, 1.0)?),
        "psystem" => Arc::new(PSystem::new(2.0, 1.0)?),
        other => return Err(Error::Invalid(format!("unknown model `{other}`"))),
    })
}
