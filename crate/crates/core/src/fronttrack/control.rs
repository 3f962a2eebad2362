use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::state::State;

#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Side {
    Left,
    Right,
}

impl Side {
    pub fn as_str(&self) -> &'static str {
        match self {
            Side::Left => "left",
            Side::Right => "right",
        }
    }
}

/// Boundary behaviour between two switch times.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum BoundaryMode {
    /// Control equal to the current trace: nothing ever enters.
    Absorbing,
    /// Dirichlet value in the weak sense: incoming families of the boundary
    /// Riemann fan enter, outgoing families are discarded.
    Hold(State),
}

/// Piecewise-constant boundary control, as a sorted list of switches.
#[derive(Clone, Debug, Default, PartialEq, Serialize, Deserialize)]
pub struct ControlSchedule {
    pub switches: Vec<(f64, BoundaryMode)>,
}

impl ControlSchedule {
    pub fn absorbing() -> Self {
        ControlSchedule { switches: vec![(0.0, BoundaryMode::Absorbing)] }
    }

    pub fn constant(state: State) -> Self {
        ControlSchedule { switches: vec![(0.0, BoundaryMode::Hold(state))] }
    }

    pub fn from_values(values: Vec<(f64, State)>) -> Result<Self> {
        let s = ControlSchedule {
            switches: values.into_iter().map(|(t, s)| (t, BoundaryMode::Hold(s))).collect(),
        };
        s.validate()?;
        Ok(s)
    }

    pub fn validate(&self) -> Result<()> {
        if self.switches.windows(2).any(|p| !(p[0].0 <= p[1].0)) {
            return Err(Error::Invalid("control switch times must be nondecreasing".into()));
        }
        if self.switches.iter().any(|(t, _)| !(t.is_finite() && *t >= 0.0)) {
            return Err(Error::Invalid("control switch times must be finite and ≥ 0".into()));
        }
        Ok(())
    }

    /// Mode in force at time `t` (right-continuous); absorbing before the
    /// first switch.
    pub fn mode_at(&self, t: f64) -> BoundaryMode {
        let k = self.switches.partition_point(|(ts, _)| *ts <= t);
        if k == 0 {
            BoundaryMode::Absorbing
        } else {
            self.switches[k - 1].1
        }
    }
}

/// Boundary controls `α` at `x = a` and `β` at `x = b`.
#[derive(Clone, Debug, Default, PartialEq, Serialize, Deserialize)]
pub struct ControlPair {
    pub alpha: ControlSchedule,
    pub beta: ControlSchedule,
}

impl ControlPair {
    pub fn absorbing() -> Self {
        ControlPair { alpha: ControlSchedule::absorbing(), beta: ControlSchedule::absorbing() }
    }

    pub fn constant(alpha: State, beta: State) -> Self {
        ControlPair { alpha: ControlSchedule::constant(alpha), beta: ControlSchedule::constant(beta) }
    }

    pub fn side(&self, side: Side) -> &ControlSchedule {
        match side {
            Side::Left => &self.alpha,
            Side::Right => &self.beta,
        }
    }

    pub fn switch_count(&self) -> usize {
        self.alpha.switches.len() + self.beta.switches.len()
    }
}
