//! Turns config blocks into core objects. Every failure here is a config error.

use std::path::Path;
use std::sync::Arc;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use bcl_core::fronttrack::{BoundaryMode, ControlPair, ControlSchedule};
use bcl_core::models::{Burgers, Gas, PSystem, RiemannBox, Temple2};
use bcl_core::steer::{default_rho_prime, TargetSpec};
use bcl_core::{Model, Profile, State, Vector};

use crate::config::{ConfigError, ControlSpec, ModelSpec, ProfileSource, RunConfig};

fn bad(msg: impl std::fmt::Display) -> ConfigError {
    ConfigError(msg.to_string())
}

pub fn build_model(spec: &ModelSpec) -> Result<Model, ConfigError> {
    let bounds = match &spec.bounds {
        Some(b) => Some(RiemannBox::new(Vector::from_slice(&b.lo), Vector::from_slice(&b.hi)).map_err(bad)?),
        None => None,
    };
    let no_params = |name: &str| -> Result<(), ConfigError> {
        if spec.gamma.is_some() || spec.k.is_some() {
            return Err(bad(format!("model `{name}` takes no gamma/k")));
        }
        Ok(())
    };
    let model: Model = match spec.name.as_str() {
        "burgers" => {
            no_params("burgers")?;
            match bounds {
                Some(b) if b.lo.len() == 1 => Arc::new(Burgers::new(b.lo[0], b.hi[0]).map_err(bad)?),
                Some(_) => return Err(bad("burgers bounds must be one-dimensional")),
                None => Arc::new(Burgers::default()),
            }
        }
        "temple2" => {
            no_params("temple2")?;
            match bounds {
                Some(b) => Arc::new(Temple2::with_box(b).map_err(bad)?),
                None => Arc::new(Temple2::default()),
            }
        }
        "gas" => {
            let (g, k) = (spec.gamma.unwrap_or(2.0), spec.k.unwrap_or(1.0));
            match bounds {
                Some(b) => Arc::new(Gas::with_box(g, k, b).map_err(bad)?),
                None => Arc::new(Gas::new(g, k).map_err(bad)?),
            }
        }
        "psystem" => {
            let (g, k) = (spec.gamma.unwrap_or(2.0), spec.k.unwrap_or(1.0));
            match bounds {
                Some(b) => Arc::new(PSystem::with_box(g, k, b).map_err(bad)?),
                None => Arc::new(PSystem::new(g, k).map_err(bad)?),
            }
        }
        other => return Err(bad(format!("unknown model `{other}`"))),
    };
    if let Some(b) = &spec.bounds {
        if b.lo.len() != model.dim() {
            return Err(bad(format!("bounds have dimension {}, model `{}` has {}", b.lo.len(), spec.name, model.dim())));
        }
    }
    Ok(model)
}

pub fn state(model: &Model, w: &[f64]) -> Result<State, ConfigError> {
    if w.len() != model.dim() {
        return Err(bad(format!("state {w:?} has {} components, model needs {}", w.len(), model.dim())));
    }
    model.state_from_riemann(Vector::from_slice(w)).map_err(bad)
}

/// Reads a headered profile CSV (`x_left,x_right,w1[,w2]`, other columns
/// ignored). Only rows at the first time value are used when a `t` column
/// is present.
fn read_profile(model: &Model, path: &Path) -> Result<Profile, ConfigError> {
    let mut rdr = csv::ReaderBuilder::new()
        .comment(Some(b'#'))
        .from_path(path)
        .map_err(|e| bad(format!("{}: {e}", path.display())))?;
    let headers = rdr.headers().map_err(bad)?.clone();
    let col = |name: &str| headers.iter().position(|h| h == name);
    let xl = col("x_left").ok_or_else(|| bad("profile CSV needs an x_left column"))?;
    let xr = col("x_right").ok_or_else(|| bad("profile CSV needs an x_right column"))?;
    let wc: Vec<usize> = (1..=model.dim())
        .map(|i| col(&format!("w{i}")).ok_or_else(|| bad(format!("profile CSV needs a w{i} column"))))
        .collect::<Result<_, _>>()?;
    let tc = col("t");
    let num = |s: &str| s.trim().parse::<f64>().map_err(|e| bad(format!("{}: `{s}`: {e}", path.display())));
    let mut breaks = Vec::new();
    let mut states = Vec::new();
    let mut t0 = None;
    for rec in rdr.records() {
        let rec = rec.map_err(bad)?;
        if let Some(tc) = tc {
            let t = num(&rec[tc])?;
            if *t0.get_or_insert(t) != t {
                break;
            }
        }
        if breaks.is_empty() {
            breaks.push(num(&rec[xl])?);
        }
        breaks.push(num(&rec[xr])?);
        let w: Vec<f64> = wc.iter().map(|&c| num(&rec[c])).collect::<Result<_, _>>()?;
        states.push(state(model, &w)?);
    }
    Profile::new(breaks, states).map_err(bad)
}

pub fn profile(model: &Model, cfg: &RunConfig, source: &ProfileSource) -> Result<Profile, ConfigError> {
    let (a, b) = (cfg.a(), cfg.b());
    let p = match source {
        ProfileSource::Inline { breaks, w } => {
            let states = w.iter().map(|w| state(model, w)).collect::<Result<Vec<_>, _>>()?;
            Profile::new(breaks.clone(), states).map_err(bad)?
        }
        ProfileSource::File(path) => read_profile(model, path)?,
        ProfileSource::Constant(w) => Profile::constant(a, b, state(model, w)?).map_err(bad)?,
        ProfileSource::Ramp { left, right, pieces } => {
            if left.len() != model.dim() || right.len() != model.dim() || *pieces == 0 {
                return Err(bad("ramp needs two states of the model's dimension and pieces ≥ 1"));
            }
            let (l, r) = (Vector::from_slice(left), Vector::from_slice(right));
            Profile::sample(model.as_ref(), a, b, *pieces, |x| {
                let s = (x - a) / (b - a);
                (1.0 - s) * l + s * r
            })
            .map_err(bad)?
        }
        ProfileSource::Random { pieces, spread } => {
            if *pieces == 0 || !(*spread >= 0.0) {
                return Err(bad("random profile needs pieces ≥ 1 and spread ≥ 0"));
            }
            let mut rng = ChaCha8Rng::seed_from_u64(cfg.seed);
            let c = model.riemann_box().center();
            let values: Vec<Vector> = (0..*pieces)
                .map(|_| {
                    let mut w = c;
                    for i in 0..model.dim() {
                        w[i] += if *spread > 0.0 { rng.gen_range(-spread..*spread) } else { 0.0 };
                    }
                    w
                })
                .collect();
            let n = *pieces;
            Profile::sample(model.as_ref(), a, b, n, |x| values[(((x - a) / (b - a) * n as f64) as usize).min(n - 1)]).map_err(bad)?
        }
        ProfileSource::Target { rho, shocks } => {
            let rho = rho.unwrap_or_else(|| 0.8 * default_rho_prime(model.as_ref()));
            TargetSpec::random(a, b, rho, *shocks, cfg.seed).profile(model.as_ref(), a, b).map_err(bad)?
        }
    };
    if (p.a() - a).abs() > 1e-12 || (p.b() - b).abs() > 1e-12 {
        return Err(bad(format!("profile lives on [{}, {}], config interval is [{a}, {b}]", p.a(), p.b())));
    }
    Ok(p)
}

pub fn initial(model: &Model, cfg: &RunConfig) -> Result<Profile, ConfigError> {
    let source = cfg.initial.as_ref().ok_or_else(|| bad("this subcommand needs an `initial` profile"))?;
    profile(model, cfg, source)
}

fn read_controls(model: &Model, path: &Path) -> Result<ControlPair, ConfigError> {
    let mut rdr = csv::ReaderBuilder::new()
        .comment(Some(b'#'))
        .from_path(path)
        .map_err(|e| bad(format!("{}: {e}", path.display())))?;
    let mut pair = ControlPair { alpha: ControlSchedule::default(), beta: ControlSchedule::default() };
    for rec in rdr.records() {
        let rec = rec.map_err(bad)?;
        if rec.len() < 3 {
            return Err(bad("controls CSV rows need side,t,mode"));
        }
        let t: f64 = rec[1].trim().parse().map_err(|e| bad(format!("control time `{}`: {e}", &rec[1])))?;
        let mode = match rec[2].trim() {
            "absorbing" => BoundaryMode::Absorbing,
            "hold" => {
                let w: Vec<f64> = (3..3 + model.dim())
                    .map(|i| rec.get(i).unwrap_or("").trim().parse::<f64>().map_err(|e| bad(format!("control value: {e}"))))
                    .collect::<Result<_, _>>()?;
                BoundaryMode::Hold(state(model, &w)?)
            }
            other => return Err(bad(format!("unknown control mode `{other}`"))),
        };
        match rec[0].trim() {
            "left" => pair.alpha.switches.push((t, mode)),
            "right" => pair.beta.switches.push((t, mode)),
            other => return Err(bad(format!("unknown control side `{other}`"))),
        }
    }
    Ok(pair)
}

pub fn controls(model: &Model, spec: &ControlSpec) -> Result<ControlPair, ConfigError> {
    let pair = match spec {
        ControlSpec::Absorbing => ControlPair::absorbing(),
        ControlSpec::Constant { left, right } => ControlPair::constant(state(model, left)?, state(model, right)?),
        ControlSpec::File(path) => read_controls(model, path)?,
        ControlSpec::Schedule { left, right } => {
            let side = |switches: &[crate::config::Switch]| -> Result<ControlSchedule, ConfigError> {
                let mut s = ControlSchedule::default();
                for sw in switches {
                    let mode = match &sw.w {
                        Some(w) => BoundaryMode::Hold(state(model, w)?),
                        None => BoundaryMode::Absorbing,
                    };
                    s.switches.push((sw.t, mode));
                }
                Ok(s)
            };
            ControlPair { alpha: side(left)?, beta: side(right)? }
        }
    };
    pair.alpha.validate().map_err(bad)?;
    pair.beta.validate().map_err(bad)?;
    Ok(pair)
}
