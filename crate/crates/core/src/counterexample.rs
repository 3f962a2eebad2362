//! Shock persistence for gas dynamics.
//!
//! When two shocks of the same family meet, the fan that leaves the
//! collision contains a shock of the other family if the wedge products
//! `r₁∧r₂`, `r₁∧Dr₁·r₁`, `r₂∧Dr₂·r₂` are all negative. Starting from many
//! small shocks with absorbing boundaries, new shocks therefore keep being
//! born. The p-system has `r₁∧r₂ > 0` and reflects rarefactions instead.

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::fronttrack::{ControlPair, Engine, EngineOptions, EventKind, EventRecord, Trajectory};
use crate::models::{shock_state, validate_model, Gas, Model, System};
use crate::oleinik::{decay_check, DecayReport};
use crate::profile::Profile;
use crate::riemann::{solve_riemann, WaveKind};
use crate::state::{State, Vector};

/// Which family each successive jump belongs to.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum ShockPattern {
    Alternating,
    SameFamily(usize),
}

impl ShockPattern {
    fn family(&self, k: usize) -> usize {
        match self {
            ShockPattern::Alternating => 2 - k % 2,
            ShockPattern::SameFamily(i) => *i,
        }
    }
}

/// Piecewise-constant data whose jumps at `positions` are single shocks,
/// each lowering one Riemann coordinate by `amplitude` along its shock
/// curve, starting from `start` on the left.
pub fn shock_profile(
    model: &dyn System,
    a: f64,
    b: f64,
    positions: &[f64],
    pattern: ShockPattern,
    amplitude: f64,
    start: Vector,
) -> Result<Profile> {
    if !(amplitude > 0.0) {
        return Err(Error::Invalid(format!("amplitude must be positive, got {amplitude}")));
    }
    let mut breaks = vec![a];
    breaks.extend_from_slice(positions);
    breaks.push(b);
    let mut w = start;
    let mut states = vec![model.state_from_riemann(w)?];
    for k in 0..positions.len() {
        let family = pattern.family(k);
        w = shock_state(model, family, &w, w[family - 1] - amplitude)?.0;
        states.push(model.state_from_riemann(w)?);
    }
    Profile::new(breaks, states)
}

/// Starting state that keeps `N` downward jumps of `amplitude` centred in
/// the box.
fn centred_start(model: &dyn System, n: usize, amplitude: f64, pattern: ShockPattern) -> Vector {
    let mut start = model.riemann_box().center();
    let mut drops = Vector::zeros(model.dim());
    for k in 0..n {
        drops[pattern.family(k) - 1] += amplitude;
    }
    for i in 0..model.dim() {
        start[i] += 0.5 * drops[i];
    }
    start
}

/// `N` admissible shocks at seeded uniform positions in `]a, b[`.
pub fn dense_shock_initial(
    model: &dyn System,
    a: f64,
    b: f64,
    n: usize,
    amplitude: f64,
    pattern: ShockPattern,
    seed: u64,
) -> Result<Profile> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut positions: Vec<f64> = Vec::with_capacity(n);
    while positions.len() < n {
        let x = a + (b - a) * rng.gen_range(0.0..1.0);
        if x > a && x < b && !positions.contains(&x) {
            positions.push(x);
        }
    }
    positions.sort_by(f64::total_cmp);
    let start = centred_start(model, n, amplitude, pattern);
    shock_profile(model, a, b, &positions, pattern, amplitude, start)
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum InteractionClass {
    SameFamilyShockShock,
    ShockRarefactionSameFamily,
    SameFamilyRarefaction,
    Transversal,
    Boundary,
}

impl InteractionClass {
    pub fn as_str(&self) -> &'static str {
        match self {
            InteractionClass::SameFamilyShockShock => "same-family-shock-shock",
            InteractionClass::ShockRarefactionSameFamily => "shock-rarefaction-same-family",
            InteractionClass::SameFamilyRarefaction => "same-family-rarefaction",
            InteractionClass::Transversal => "transversal",
            InteractionClass::Boundary => "boundary",
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct WaveTag {
    pub family: usize,
    pub kind: WaveKind,
    pub strength: f64,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct InteractionTag {
    pub event: u64,
    pub time: f64,
    pub position: f64,
    pub incoming: Vec<WaveTag>,
    pub outgoing: Vec<WaveTag>,
    pub class: InteractionClass,
    /// Every incoming wave is stronger than the threshold it was tagged with.
    pub genuine: bool,
}

impl InteractionTag {
    fn incoming_family(&self) -> Option<usize> {
        let f = self.incoming.first()?.family;
        self.incoming.iter().all(|w| w.family == f).then_some(f)
    }

    /// Strongest outgoing wave of `family` and `kind`, zero if none.
    pub fn outgoing_strength(&self, family: usize, kind: WaveKind) -> f64 {
        self.outgoing
            .iter()
            .filter(|w| w.family == family && w.kind == kind)
            .map(|w| w.strength)
            .fold(0.0, f64::max)
    }

    /// For same-family collisions: the family that did not take part.
    pub fn opposite_family(&self) -> Option<usize> {
        self.incoming_family().map(|f| 3 - f)
    }

    /// Same-family shock collision with a shock of the other family leaving.
    pub fn reflects_shock(&self) -> bool {
        self.class == InteractionClass::SameFamilyShockShock
            && self.opposite_family().is_some_and(|o| self.outgoing_strength(o, WaveKind::Shock) > 0.0)
    }

    pub fn reflects_rarefaction(&self) -> bool {
        self.opposite_family().is_some_and(|o| self.outgoing_strength(o, WaveKind::Rarefaction) > 0.0)
    }
}

fn tags_of(traj: &Trajectory, ids: &[u64]) -> Vec<WaveTag> {
    ids.iter()
        .map(|&id| {
            let f = traj.front(id);
            WaveTag { family: f.family, kind: f.kind, strength: f.strength() }
        })
        .collect()
}

fn classify_waves(incoming: &[WaveTag]) -> InteractionClass {
    let first = incoming[0].family;
    if incoming.iter().any(|w| w.family != first) {
        return InteractionClass::Transversal;
    }
    let shocks = incoming.iter().filter(|w| w.kind == WaveKind::Shock).count();
    if shocks == incoming.len() {
        InteractionClass::SameFamilyShockShock
    } else if shocks == 0 {
        InteractionClass::SameFamilyRarefaction
    } else {
        InteractionClass::ShockRarefactionSameFamily
    }
}

/// Tags one event of a trajectory. Waves at or below `threshold` make the
/// event non-genuine.
pub fn classify_interaction(event: &EventRecord, traj: &Trajectory, threshold: f64) -> InteractionTag {
    let incoming = tags_of(traj, &event.fronts_in);
    let outgoing = tags_of(traj, &event.fronts_out);
    let class = if event.kind == EventKind::Collision && !incoming.is_empty() {
        classify_waves(&incoming)
    } else {
        InteractionClass::Boundary
    };
    let genuine = !incoming.is_empty() && incoming.iter().all(|w| w.strength > threshold);
    InteractionTag {
        event: event.id,
        time: event.time,
        position: event.position,
        incoming,
        outgoing,
        class,
        genuine,
    }
}

/// Tags every collision of a trajectory.
pub fn classify_all(traj: &Trajectory, threshold: f64) -> Vec<InteractionTag> {
    traj.collisions().map(|e| classify_interaction(e, traj, threshold)).collect()
}

/// Classifies the outer Riemann problem of two same-family shocks
/// `left → middle → right` without running the tracker.
pub fn classify_pair(model: &dyn System, left: &State, middle: &State, right: &State, nu: f64) -> Result<InteractionTag> {
    let inc = [
        solve_riemann(model, left, middle, nu)?,
        solve_riemann(model, middle, right, nu)?,
    ];
    let incoming: Vec<WaveTag> = inc
        .iter()
        .flat_map(|f| f.waves.iter().map(|w| WaveTag { family: w.family, kind: w.kind, strength: w.strength }))
        .collect();
    if incoming.is_empty() {
        return Err(Error::Invalid("empty interaction".into()));
    }
    let out = solve_riemann(model, left, right, nu)?;
    let outgoing = out.waves.iter().map(|w| WaveTag { family: w.family, kind: w.kind, strength: w.strength }).collect();
    let class = classify_waves(&incoming);
    Ok(InteractionTag { event: 0, time: 0.0, position: 0.0, incoming, outgoing, class, genuine: true })
}

/// Shock counts at sample times.
#[derive(Clone, Debug, Default, PartialEq, Serialize, Deserialize)]
pub struct ShockCensus {
    pub times: Vec<f64>,
    /// `counts[k][i]`: shocks of family `i + 1` at `times[k]`.
    pub counts: Vec<Vec<usize>>,
    pub strengths: Vec<Vec<f64>>,
    /// Smallest distance between consecutive counted shocks, `None` if fewer
    /// than two.
    pub min_spacing: Vec<Option<f64>>,
    pub threshold: f64,
}

impl ShockCensus {
    pub fn total(&self, k: usize) -> usize {
        self.counts[k].iter().sum()
    }

    pub fn total_strength(&self, k: usize) -> f64 {
        self.strengths[k].iter().sum()
    }
}

/// Counts shock fronts stronger than `threshold` at each time.
pub fn shock_census(traj: &Trajectory, dim: usize, times: &[f64], threshold: f64) -> Result<ShockCensus> {
    let mut census = ShockCensus { threshold, ..Default::default() };
    for &t in times {
        let mut counts = vec![0; dim];
        let mut strengths = vec![0.0; dim];
        let mut xs = Vec::new();
        for rec in &traj.fronts {
            let f = &rec.front;
            let alive = f.t0 <= t && rec.t_end.map_or(t <= traj.t_final, |te| t < te);
            if alive && f.kind == WaveKind::Shock && f.strength() > threshold {
                counts[f.family - 1] += 1;
                strengths[f.family - 1] += f.strength();
                xs.push(f.position(t));
            }
        }
        xs.sort_by(f64::total_cmp);
        let spacing = xs.windows(2).map(|p| p[1] - p[0]).fold(None, |acc: Option<f64>, d| Some(acc.map_or(d, |m| m.min(d))));
        census.times.push(t);
        census.counts.push(counts);
        census.strengths.push(strengths);
        census.min_spacing.push(spacing);
    }
    Ok(census)
}

#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct PersistenceConfig {
    pub gamma: f64,
    pub k: f64,
    pub a: f64,
    pub b: f64,
    pub n: usize,
    pub amplitude: f64,
    pub pattern: ShockPattern,
    /// Horizon as a multiple of the exit time `(b - a)/λ_min`.
    pub exit_times: f64,
    pub samples: usize,
    pub nu: f64,
    pub seed: u64,
    /// Times at which the one-sided decay constant is measured.
    pub decay_times: Vec<f64>,
    pub decay_delta: f64,
}

impl Default for PersistenceConfig {
    fn default() -> Self {
        PersistenceConfig {
            gamma: 2.0,
            k: 1.0,
            a: 0.0,
            b: 1.0,
            n: 64,
            amplitude: 0.002,
            pattern: ShockPattern::Alternating,
            exit_times: 3.0,
            samples: 31,
            nu: 1e-4,
            seed: 7,
            decay_times: vec![1.0, 2.0, 3.0],
            decay_delta: 0.5,
        }
    }
}

#[derive(Clone, Debug)]
pub struct PersistenceReport {
    pub horizon: f64,
    pub wedge_hypothesis: bool,
    pub census: ShockCensus,
    pub tags: Vec<InteractionTag>,
    pub decay: DecayReport,
    /// Same-family genuine shock collisions, and those reflecting a shock.
    pub tagged_events: usize,
    pub reflecting_events: usize,
    pub trajectory: Trajectory,
}

impl PersistenceReport {
    pub fn shocks_persist(&self) -> bool {
        (0..self.census.times.len()).all(|k| self.census.total(k) > 0)
    }
}

/// Runs dense-shock data with absorbing boundaries to `exit_times` exit
/// times and collects the census, the interaction tags and the decay check.
pub fn persistence_experiment(cfg: &PersistenceConfig) -> Result<PersistenceReport> {
    let model: Model = std::sync::Arc::new(Gas::new(cfg.gamma, cfg.k)?);
    persistence_with_model(model, cfg)
}

/// As [`persistence_experiment`] for any 2×2 model.
pub fn persistence_with_model(model: Model, cfg: &PersistenceConfig) -> Result<PersistenceReport> {
    let report = validate_model(model.as_ref());
    let lambda_min = report.lambda_min;
    if !(lambda_min > 0.0) {
        return Err(Error::Degenerate(format!("λ_min = {lambda_min}")));
    }
    let horizon = cfg.exit_times * (cfg.b - cfg.a) / lambda_min;
    let phi = if cfg.n == 0 {
        Profile::constant(cfg.a, cfg.b, model.state_from_riemann(model.riemann_box().center())?)?
    } else {
        dense_shock_initial(model.as_ref(), cfg.a, cfg.b, cfg.n, cfg.amplitude, cfg.pattern, cfg.seed)?
    };
    let mut engine = Engine::new(model.clone(), &phi, ControlPair::absorbing(), EngineOptions::new(cfg.nu))?;
    engine.run_until(horizon)?;
    let traj = engine.into_trajectory();
    let samples = cfg.samples.max(2);
    let times: Vec<f64> = (0..samples).map(|k| horizon * k as f64 / (samples - 1) as f64).collect();
    let threshold = 2.0 * cfg.nu;
    let census = shock_census(&traj, model.dim(), &times, threshold)?;
    let tags = classify_all(&traj, threshold);
    let tagged: Vec<&InteractionTag> = tags
        .iter()
        .filter(|t| t.genuine && t.class == InteractionClass::SameFamilyShockShock)
        .collect();
    let reflecting_events = tagged.iter().filter(|t| t.reflects_shock()).count();
    let h = (cfg.b - cfg.a) / 1000.0;
    let decay_times: Vec<f64> = cfg.decay_times.iter().copied().filter(|&t| t <= horizon).collect();
    let decay = decay_check(model.as_ref(), &traj, &decay_times, h, f64::INFINITY, cfg.decay_delta)?;
    Ok(PersistenceReport {
        horizon,
        wedge_hypothesis: report.wedge_hypothesis(),
        census,
        tagged_events: tagged.len(),
        reflecting_events,
        tags,
        decay,
        trajectory: traj,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::models::builtin;

    #[test]
    fn dense_data_is_admissible() {
        let model = builtin("gas").unwrap();
        let phi = dense_shock_initial(model.as_ref(), 0.0, 1.0, 64, 0.002, ShockPattern::Alternating, 1).unwrap();
        let tv = crate::profile::total_variation(&phi, crate::profile::Coordinates::Riemann);
        // Shock curves move the other coordinate at third order in the amplitude.
        assert!((tv - 0.128).abs() < 1e-6, "{tv}");
        for p in phi.states().windows(2) {
            let fan = solve_riemann(model.as_ref(), &p[0], &p[1], 1e-3).unwrap();
            assert_eq!(fan.len(), 1);
            assert_eq!(fan.waves[0].kind, WaveKind::Shock);
        }
    }

    #[test]
    fn gas_and_psystem_reflect_differently() {
        for (name, expect_shock) in [("gas", true), ("psystem", false)] {
            let model = builtin(name).unwrap();
            let c = model.riemann_box().center();
            let left = c.with(1, c[1] + 0.1);
            let middle = shock_state(model.as_ref(), 2, &left, c[1]).unwrap().0;
            let right = shock_state(model.as_ref(), 2, &middle, c[1] - 0.1).unwrap().0;
            let s = |w: Vector| model.state_from_riemann(w).unwrap();
            let tag = classify_pair(model.as_ref(), &s(left), &s(middle), &s(right), 1e-3).unwrap();
            assert_eq!(tag.class, InteractionClass::SameFamilyShockShock);
            assert_eq!(tag.reflects_shock(), expect_shock, "{name}: {tag:?}");
            assert_eq!(tag.reflects_rarefaction(), !expect_shock, "{name}: {tag:?}");
        }
    }
}
