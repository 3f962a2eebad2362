use serde::{Deserialize, Serialize};

use super::control::Side;
use crate::error::Result;
use crate::models::System;
use crate::profile::Profile;
use crate::riemann::WaveKind;
use crate::state::{State, Vector};

/// One tracked discontinuity, travelling along `x(t) = x0 + speed (t - t0)`.
#[derive(Clone, Copy, Debug, Serialize, Deserialize)]
pub struct Front {
    pub id: u64,
    pub family: usize,
    pub kind: WaveKind,
    pub x0: f64,
    pub t0: f64,
    pub speed: f64,
    pub left: State,
    pub right: State,
    /// Event that created the front (`0` for the initial data).
    pub birth: u64,
}

impl Front {
    pub fn position(&self, t: f64) -> f64 {
        self.x0 + self.speed * (t - self.t0)
    }

    /// `|Δw_family|`
    pub fn strength(&self) -> f64 {
        let i = self.family - 1;
        (self.right.w[i] - self.left.w[i]).abs()
    }
}

/// A front together with the end of its life.
#[derive(Clone, Copy, Debug, Serialize, Deserialize)]
pub struct FrontRecord {
    pub front: Front,
    /// Time the front died, `None` if alive at the end of the run.
    pub t_end: Option<f64>,
    pub death: Option<u64>,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum EventKind {
    Collision,
    BoundaryHitLeft,
    BoundaryHitRight,
    ControlChange(Side),
}

impl EventKind {
    pub fn as_str(&self) -> &'static str {
        match self {
            EventKind::Collision => "collision",
            EventKind::BoundaryHitLeft => "boundary-hit-left",
            EventKind::BoundaryHitRight => "boundary-hit-right",
            EventKind::ControlChange(Side::Left) => "control-change-left",
            EventKind::ControlChange(Side::Right) => "control-change-right",
        }
    }
}

/// A resolved event. `left`/`right` are the outer states of the collision,
/// or (control, trace) for boundary events.
#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct EventRecord {
    pub id: u64,
    pub time: f64,
    pub position: f64,
    pub kind: EventKind,
    pub fronts_in: Vec<u64>,
    pub fronts_out: Vec<u64>,
    pub left: State,
    pub right: State,
}

/// Everything recorded by a run of the engine.
#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct Trajectory {
    pub a: f64,
    pub b: f64,
    pub t_start: f64,
    pub t_final: f64,
    pub events: Vec<EventRecord>,
    /// All fronts ever created, indexed by id.
    pub fronts: Vec<FrontRecord>,
    pub trace_left: Vec<(f64, State)>,
    pub trace_right: Vec<(f64, State)>,
    /// `(t, ∫u dx)` after each event, when integral tracking is enabled.
    pub integrals: Vec<(f64, Vector)>,
}

/// Value of a right-continuous piecewise-constant trace at `t`.
pub fn trace_at(trace: &[(f64, State)], t: f64) -> State {
    let k = trace.partition_point(|(ts, _)| *ts <= t);
    trace[k.max(1) - 1].1
}

impl Trajectory {
    pub fn front(&self, id: u64) -> &Front {
        &self.fronts[id as usize].front
    }

    fn alive_at(&self, rec: &FrontRecord, t: f64) -> bool {
        rec.front.t0 <= t && rec.t_end.map_or(t <= self.t_final, |te| t < te)
    }

    /// Profile at time `t ∈ [t_start, t_final]`, rebuilt from the front
    /// records alive at `t`.
    pub fn sample_profile(&self, t: f64) -> Result<Profile> {
        let mut alive: Vec<(f64, &Front)> = self
            .fronts
            .iter()
            .filter(|r| self.alive_at(r, t))
            .map(|r| (r.front.position(t).clamp(self.a, self.b), &r.front))
            .collect();
        if alive.is_empty() {
            return Profile::constant(self.a, self.b, trace_at(&self.trace_left, t));
        }
        alive.sort_by(|p, q| p.0.total_cmp(&q.0).then(p.1.id.cmp(&q.1.id)));
        let mut breaks = vec![self.a];
        let mut states = vec![alive[0].1.left];
        for (x, f) in &alive {
            breaks.push(*x);
            states.push(f.right);
        }
        breaks.push(self.b);
        Profile::from_pieces(&breaks, &states)
    }

    /// Piecewise-constant traces at `x = a` and `x = b`.
    pub fn boundary_traces(&self) -> (&[(f64, State)], &[(f64, State)]) {
        (&self.trace_left, &self.trace_right)
    }

    /// Straight segments `(t0, x0, t1, x1, family, kind)` of every front life.
    pub fn segments(&self) -> Vec<(f64, f64, f64, f64, usize, WaveKind)> {
        self.fronts
            .iter()
            .map(|r| {
                let t1 = r.t_end.unwrap_or(self.t_final);
                let f = &r.front;
                (f.t0, f.x0, t1, f.position(t1), f.family, f.kind)
            })
            .collect()
    }

    pub fn collisions(&self) -> impl Iterator<Item = &EventRecord> {
        self.events.iter().filter(|e| e.kind == EventKind::Collision)
    }

    /// Fronts injected through a boundary (boundary responses and control
    /// changes), counted over `[t0, t1]`.
    pub fn injected_fronts(&self, t0: f64, t1: f64) -> usize {
        self.events
            .iter()
            .filter(|e| e.kind != EventKind::Collision && e.time >= t0 && e.time <= t1)
            .map(|e| e.fronts_out.len())
            .sum()
    }

    /// Per-interval conservation defects
    /// `|∫u(t_{k+1}) - ∫u(t_k) - (t_{k+1} - t_k)(f(u(t,a)) - f(u(t,b)))|₁`
    /// from the recorded integrals. Empty when integrals were not tracked.
    pub fn conservation_defects(&self, model: &dyn System) -> Result<Vec<f64>> {
        let mut out = Vec::with_capacity(self.integrals.len());
        for pair in self.integrals.windows(2) {
            let ((t0, m0), (t1, m1)) = (pair[0], pair[1]);
            if t1 <= t0 {
                out.push((m1 - m0).norm1());
                continue;
            }
            let mid = 0.5 * (t0 + t1);
            let fa = crate::models::eval_flux(model, &trace_at(&self.trace_left, mid))?;
            let fb = crate::models::eval_flux(model, &trace_at(&self.trace_right, mid))?;
            out.push((m1 - m0 - (t1 - t0) * (fa - fb)).norm1());
        }
        Ok(out)
    }
}
