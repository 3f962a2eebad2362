//! Run configuration: a single JSON document, parsed strictly.

use std::path::{Path, PathBuf};

use serde::{Deserialize, Serialize};

use bcl_core::counterexample::ShockPattern;

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct RunConfig {
    pub model: ModelSpec,
    #[serde(default = "unit_interval")]
    pub interval: [f64; 2],
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub initial: Option<ProfileSource>,
    #[serde(default)]
    pub controls: ControlSpec,
    #[serde(default = "default_nu")]
    pub nu: f64,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub horizon: Option<f64>,
    #[serde(default, skip_serializing_if = "Vec::is_empty")]
    pub sample_times: Vec<f64>,
    #[serde(default)]
    pub seed: u64,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub out: Option<PathBuf>,
    #[serde(default)]
    pub engine: EngineLimits,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub riemann: Option<RiemannOptions>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub attain: Option<AttainOptions>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub steer: Option<SteerConfig>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub stabilize: Option<StabilizeConfig>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub counterexample: Option<CounterexampleConfig>,
}

fn unit_interval() -> [f64; 2] {
    [0.0, 1.0]
}

fn default_nu() -> f64 {
    0.05
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ModelSpec {
    pub name: String,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub gamma: Option<f64>,
    /// Pressure constant (`K` for gas, `κ` for the p-system).
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub k: Option<f64>,
    /// Box Γ in Riemann coordinates.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub bounds: Option<BoxSpec>,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct BoxSpec {
    pub lo: Vec<f64>,
    pub hi: Vec<f64>,
}

/// Where a piecewise-constant profile comes from. States are given in
/// Riemann coordinates.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case", deny_unknown_fields)]
pub enum ProfileSource {
    Inline { breaks: Vec<f64>, w: Vec<Vec<f64>> },
    File(PathBuf),
    Constant(Vec<f64>),
    /// Linear interpolation between two states, sampled on `pieces` cells.
    Ramp { left: Vec<f64>, right: Vec<f64>, pieces: usize },
    /// Seeded uniform values within `spread` of the box centre.
    Random { pieces: usize, spread: f64 },
    /// Seeded temple2 target with log ramps and downward shocks.
    Target {
        #[serde(default, skip_serializing_if = "Option::is_none")]
        rho: Option<f64>,
        shocks: usize,
    },
}

#[derive(Clone, Debug, Default, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case", deny_unknown_fields)]
pub enum ControlSpec {
    #[default]
    Absorbing,
    Constant { left: Vec<f64>, right: Vec<f64> },
    /// Headered CSV with columns `side,t,mode,w1[,w2]`.
    File(PathBuf),
    Schedule { left: Vec<Switch>, right: Vec<Switch> },
}

/// A control switch; no `w` means absorbing from `t` on.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct Switch {
    pub t: f64,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub w: Option<Vec<f64>>,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct EngineLimits {
    #[serde(default = "default_front_cap")]
    pub front_cap: usize,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub max_events: Option<usize>,
}

fn default_front_cap() -> usize {
    bcl_core::fronttrack::DEFAULT_FRONT_CAP
}

impl Default for EngineLimits {
    fn default() -> Self {
        EngineLimits { front_cap: default_front_cap(), max_events: None }
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct RiemannOptions {
    pub left: Vec<f64>,
    pub right: Vec<f64>,
}

#[derive(Clone, Debug, Default, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct AttainOptions {
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub rho: Option<f64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub h: Option<f64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub eps_jump: Option<f64>,
    /// Profile to test; the initial profile if absent.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub profile: Option<ProfileSource>,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct SteerConfig {
    pub target: ProfileSource,
    /// Defaults to `T + 1`.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub tau: Option<f64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub rho_prime: Option<f64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub h: Option<f64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub eps_jump: Option<f64>,
}

#[derive(Clone, Debug, Default, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct StabilizeConfig {
    /// Defaults to the box centre.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub u_star: Option<Vec<f64>>,
    #[serde(default = "default_cycles")]
    pub cycles: usize,
}

fn default_cycles() -> usize {
    3
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct CounterexampleConfig {
    #[serde(default = "default_n")]
    pub n: usize,
    #[serde(default = "default_amplitude")]
    pub amplitude: f64,
    #[serde(default = "default_pattern")]
    pub pattern: ShockPattern,
    #[serde(default = "default_exit_times")]
    pub exit_times: f64,
    #[serde(default = "default_samples")]
    pub samples: usize,
    #[serde(default = "default_decay_times")]
    pub decay_times: Vec<f64>,
    #[serde(default = "default_decay_delta")]
    pub decay_delta: f64,
}

fn default_n() -> usize {
    64
}
fn default_amplitude() -> f64 {
    0.002
}
fn default_pattern() -> ShockPattern {
    ShockPattern::Alternating
}
fn default_exit_times() -> f64 {
    3.0
}
fn default_samples() -> usize {
    31
}
fn default_decay_times() -> Vec<f64> {
    vec![1.0, 2.0, 3.0]
}
fn default_decay_delta() -> f64 {
    0.5
}

impl Default for CounterexampleConfig {
    fn default() -> Self {
        serde_json::from_str("{}").expect("defaults")
    }
}

#[derive(Debug)]
pub struct ConfigError(pub String);

impl std::fmt::Display for ConfigError {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.write_str(&self.0)
    }
}

impl std::error::Error for ConfigError {}

fn bad(msg: impl Into<String>) -> ConfigError {
    ConfigError(msg.into())
}

fn positive(name: &str, v: f64) -> Result<(), ConfigError> {
    if v > 0.0 && v.is_finite() {
        Ok(())
    } else {
        Err(bad(format!("{name} must be positive and finite, got {v}")))
    }
}

/// Strict parse followed by range validation.
pub fn parse_config(text: &str) -> Result<RunConfig, ConfigError> {
    let cfg: RunConfig = serde_json::from_str(text).map_err(|e| bad(format!("config: {e}")))?;
    cfg.validate()?;
    Ok(cfg)
}

pub fn load_config(path: &Path) -> Result<RunConfig, ConfigError> {
    let text = std::fs::read_to_string(path).map_err(|e| bad(format!("{}: {e}", path.display())))?;
    let mut cfg = parse_config(&text)?;
    cfg.rebase(path.parent().unwrap_or(Path::new(".")));
    Ok(cfg)
}

impl RunConfig {
    pub fn a(&self) -> f64 {
        self.interval[0]
    }

    pub fn b(&self) -> f64 {
        self.interval[1]
    }

    pub fn validate(&self) -> Result<(), ConfigError> {
        let [a, b] = self.interval;
        if !(a.is_finite() && b.is_finite() && a < b) {
            return Err(bad(format!("interval [{a}, {b}] must satisfy a < b")));
        }
        positive("nu", self.nu)?;
        if let Some(h) = self.horizon {
            positive("horizon", h)?;
        }
        if self.sample_times.iter().any(|t| !(t.is_finite() && *t >= 0.0)) {
            return Err(bad("sample_times must be finite and nonnegative"));
        }
        if self.sample_times.windows(2).any(|p| !(p[0] <= p[1])) {
            return Err(bad("sample_times must be sorted"));
        }
        if self.engine.front_cap == 0 {
            return Err(bad("engine.front_cap must be at least 1"));
        }
        for v in [self.model.gamma, self.model.k].into_iter().flatten() {
            positive("model parameter", v)?;
        }
        if let Some(bx) = &self.model.bounds {
            if bx.lo.len() != bx.hi.len() || bx.lo.iter().zip(&bx.hi).any(|(l, h)| !(l < h)) {
                return Err(bad("model.bounds needs lo < hi componentwise"));
            }
        }
        if let ControlSpec::Schedule { left, right } = &self.controls {
            for s in left.iter().chain(right) {
                if !(s.t.is_finite() && s.t >= 0.0) {
                    return Err(bad(format!("control switch time {} must be nonnegative", s.t)));
                }
            }
        }
        if let Some(o) = &self.attain {
            for v in [o.rho, o.h, o.eps_jump].into_iter().flatten() {
                if !(v.is_finite() && v >= 0.0) {
                    return Err(bad(format!("attain option {v} must be finite and nonnegative")));
                }
            }
        }
        if let Some(s) = &self.steer {
            for v in [s.tau, s.rho_prime, s.h, s.eps_jump].into_iter().flatten() {
                positive("steer option", v)?;
            }
        }
        if let Some(s) = &self.stabilize {
            if s.cycles == 0 {
                return Err(bad("stabilize.cycles must be at least 1"));
            }
        }
        if let Some(c) = &self.counterexample {
            positive("counterexample.amplitude", c.amplitude)?;
            positive("counterexample.exit_times", c.exit_times)?;
            positive("counterexample.decay_delta", c.decay_delta)?;
            if c.samples < 2 {
                return Err(bad("counterexample.samples must be at least 2"));
            }
        }
        Ok(())
    }

    /// Resolves relative file paths against the config's directory.
    pub fn rebase(&mut self, dir: &Path) {
        fn fix(p: &mut PathBuf, dir: &Path) {
            if p.is_relative() {
                *p = dir.join(&*p);
            }
        }
        let mut sources: Vec<&mut ProfileSource> = Vec::new();
        if let Some(s) = self.initial.as_mut() {
            sources.push(s);
        }
        if let Some(s) = self.attain.as_mut().and_then(|o| o.profile.as_mut()) {
            sources.push(s);
        }
        if let Some(s) = self.steer.as_mut() {
            sources.push(&mut s.target);
        }
        for s in sources {
            if let ProfileSource::File(p) = s {
                fix(p, dir);
            }
        }
        if let ControlSpec::File(p) = &mut self.controls {
            fix(p, dir);
        }
        if let Some(p) = self.out.as_mut() {
            fix(p, dir);
        }
    }

    /// Canonical JSON used for hashing and the manifest.
    pub fn canonical(&self) -> String {
        serde_json::to_string(self).expect("config serializes")
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn minimal_config_gets_defaults() {
        let cfg = parse_config(r#"{"model": {"name": "temple2"}}"#).unwrap();
        assert_eq!(cfg.interval, [0.0, 1.0]);
        assert_eq!(cfg.controls, ControlSpec::Absorbing);
        assert_eq!(cfg.nu, 0.05);
        assert_eq!(cfg.engine, EngineLimits::default());
    }

    #[test]
    fn unknown_keys_are_rejected() {
        assert!(parse_config(r#"{"model": {"name": "gas"}, "nuu": 0.1}"#).is_err());
        assert!(parse_config(r#"{"model": {"name": "gas", "gama": 2}}"#).is_err());
        assert!(parse_config(r#"{"model": {"name": "gas"}, "controls": {"constant": {"left": [1], "right": [1], "x": 1}}}"#).is_err());
    }

    #[test]
    fn round_trip_is_identity() {
        let text = r#"{
            "model": {"name": "gas", "gamma": 1.4, "k": 1.0, "bounds": {"lo": [-2.2, 1.8], "hi": [-1.8, 2.2]}},
            "interval": [0.0, 2.0],
            "initial": {"ramp": {"left": [-2.1, 1.9], "right": [-1.9, 2.1], "pieces": 10}},
            "controls": {"schedule": {"left": [{"t": 0.0}, {"t": 1.5, "w": [-2.0, 2.0]}], "right": []}},
            "nu": 0.012345678901234567,
            "horizon": 3.0,
            "sample_times": [0.0, 1.0],
            "seed": 9,
            "counterexample": {"n": 8, "pattern": {"same-family": 2}}
        }"#;
        let cfg = parse_config(text).unwrap();
        let again = parse_config(&cfg.canonical()).unwrap();
        assert_eq!(cfg, again);
        assert_eq!(cfg.canonical(), again.canonical());
    }

    #[test]
    fn ranges_are_checked() {
        assert!(parse_config(r#"{"model": {"name": "gas"}, "nu": 0}"#).is_err());
        assert!(parse_config(r#"{"model": {"name": "gas"}, "interval": [1, 0]}"#).is_err());
        assert!(parse_config(r#"{"model": {"name": "gas"}, "sample_times": [2, 1]}"#).is_err());
    }
}
