//! Piecewise-constant profiles on `[a, b]`.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::models::System;
use crate::state::{State, Vector};

/// Which variables a norm is measured in.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Coordinates {
    Conserved,
    Riemann,
}

impl Coordinates {
    fn pick(self, s: &State) -> Vector {
        match self {
            Coordinates::Conserved => s.u,
            Coordinates::Riemann => s.w,
        }
    }
}

/// Breakpoints `a = x₀ < … < x_m = b` and the constant state on each piece.
#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct Profile {
    breaks: Vec<f64>,
    states: Vec<State>,
}

impl Profile {
    pub fn new(breaks: Vec<f64>, states: Vec<State>) -> Result<Self> {
        if states.is_empty() || breaks.len() != states.len() + 1 {
            return Err(Error::Invalid(format!(
                "profile needs m+1 breakpoints for m states (got {} and {})",
                breaks.len(),
                states.len()
            )));
        }
        if breaks.windows(2).any(|p| !(p[0] < p[1])) || breaks.iter().any(|x| !x.is_finite()) {
            return Err(Error::Invalid("profile breakpoints must be strictly increasing".into()));
        }
        Ok(Profile { breaks, states })
    }

    pub fn constant(a: f64, b: f64, state: State) -> Result<Self> {
        Profile::new(vec![a, b], vec![state])
    }

    /// Builds a profile from possibly repeated breakpoints, dropping
    /// zero-length pieces and merging equal neighbours.
    pub fn from_pieces(breaks: &[f64], states: &[State]) -> Result<Self> {
        let mut xs = vec![breaks[0]];
        let mut ss: Vec<State> = Vec::new();
        for (k, s) in states.iter().enumerate() {
            let (x0, x1) = (breaks[k], breaks[k + 1]);
            if !(x1 > x0) {
                continue;
            }
            match ss.last() {
                Some(prev) if prev == s => {
                    *xs.last_mut().unwrap() = x1;
                }
                _ => {
                    ss.push(*s);
                    xs.push(x1);
                }
            }
        }
        if ss.is_empty() {
            // Degenerate: every piece has zero length; keep the last state.
            ss.push(*states.last().ok_or_else(|| Error::Invalid("empty profile".into()))?);
            xs.push(*breaks.last().unwrap());
        }
        Profile::new(xs, ss)
    }

    /// Samples `f` at piece midpoints of a uniform partition into `pieces`.
    pub fn sample(
        model: &dyn System,
        a: f64,
        b: f64,
        pieces: usize,
        f: impl Fn(f64) -> Vector,
    ) -> Result<Self> {
        let breaks: Vec<f64> = (0..=pieces).map(|k| a + (b - a) * k as f64 / pieces as f64).collect();
        let states = breaks
            .windows(2)
            .map(|p| model.state_from_riemann(f(0.5 * (p[0] + p[1]))))
            .collect::<Result<Vec<_>>>()?;
        Profile::from_pieces(&breaks, &states)
    }

    pub fn a(&self) -> f64 {
        self.breaks[0]
    }

    pub fn b(&self) -> f64 {
        *self.breaks.last().unwrap()
    }

    pub fn breaks(&self) -> &[f64] {
        &self.breaks
    }

    pub fn states(&self) -> &[State] {
        &self.states
    }

    pub fn pieces(&self) -> usize {
        self.states.len()
    }

    /// Interior jump locations `x₁ … x_{m-1}`.
    pub fn jumps(&self) -> &[f64] {
        &self.breaks[1..self.breaks.len() - 1]
    }

    /// State at `x`; right-continuous, and the last piece at `x = b`.
    pub fn eval(&self, x: f64) -> &State {
        let k = self.breaks[1..self.breaks.len() - 1].partition_point(|&bk| bk <= x);
        &self.states[k]
    }

    /// Spatial average of the conservative variables.
    pub fn mean(&self) -> Vector {
        let mut acc = 0.0 * self.states[0].u;
        for (k, s) in self.states.iter().enumerate() {
            acc = acc + (self.breaks[k + 1] - self.breaks[k]) * s.u;
        }
        (1.0 / (self.b() - self.a())) * acc
    }

    /// `∫_a^b u dx`.
    pub fn integral(&self) -> Vector {
        (self.b() - self.a()) * self.mean()
    }

    /// Largest `‖u(x) - target‖_∞` over the pieces.
    pub fn sup_distance(&self, target: &Vector) -> f64 {
        self.states.iter().map(|s| (s.u - *target).norm_inf()).fold(0.0, f64::max)
    }

    pub fn all_in_box(&self, model: &dyn System) -> bool {
        self.states.iter().all(|s| model.riemann_box().contains(&s.w))
    }
}

/// Sum of `|Δ·|₁` over the jumps of the profile.
pub fn total_variation(profile: &Profile, coords: Coordinates) -> f64 {
    profile
        .states()
        .windows(2)
        .map(|p| (coords.pick(&p[1]) - coords.pick(&p[0])).norm1())
        .fold(0.0, |acc, v| acc + v)
}

/// Exact `∫_a^b |p - q|₁ dx` in conservative variables, over the merged
/// breakpoints of both profiles.
pub fn l1_distance(p: &Profile, q: &Profile) -> Result<f64> {
    if (p.a() - q.a()).abs() > 1e-12 || (p.b() - q.b()).abs() > 1e-12 {
        return Err(Error::Invalid("profiles live on different intervals".into()));
    }
    let mut xs: Vec<f64> = p.breaks().iter().chain(q.breaks()).copied().collect();
    xs.sort_by(f64::total_cmp);
    xs.dedup();
    let mut total = 0.0;
    for pair in xs.windows(2) {
        let (x0, x1) = (pair[0], pair[1]);
        if x1 <= x0 {
            continue;
        }
        let mid = 0.5 * (x0 + x1);
        total += (x1 - x0) * (p.eval(mid).u - q.eval(mid).u).norm1();
    }
    Ok(total)
}
