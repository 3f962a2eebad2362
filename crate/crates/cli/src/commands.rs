use anyhow::Result;
use serde_json::json;

use bcl_core::counterexample::{persistence_with_model, PersistenceConfig};
use bcl_core::fronttrack::{Engine, EngineOptions};
use bcl_core::models::{validate_model, ShockRule};
use bcl_core::oleinik::{check_membership, default_h};
use bcl_core::profile::{total_variation, Coordinates};
use bcl_core::riemann::solve_riemann;
use bcl_core::stabilize::stabilize;
use bcl_core::steer::{default_rho_prime, horizon, steer_to_target, SteerOptions};
use bcl_core::{Model, Profile};

use crate::config::{AttainOptions, ConfigError, CounterexampleConfig, RunConfig, StabilizeConfig};
use crate::inputs;
use crate::output::{fmt, RunDir};

/// A run that completed and wrote its outputs but whose model or data
/// failed a required hypothesis.
#[derive(Debug)]
pub struct HypothesisFailure(pub String);

impl std::fmt::Display for HypothesisFailure {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.write_str(&self.0)
    }
}

impl std::error::Error for HypothesisFailure {}

fn need<T>(block: Option<T>, name: &str) -> Result<T> {
    block.ok_or_else(|| ConfigError(format!("this subcommand needs a `{name}` block")).into())
}

fn engine_options(cfg: &RunConfig, model: &Model) -> EngineOptions {
    let mut opts = EngineOptions::new(cfg.nu);
    opts.front_cap = cfg.engine.front_cap;
    if let Some(m) = cfg.engine.max_events {
        opts.max_events = m;
    }
    opts.track_integral = model.is_conservative();
    opts
}

pub fn riemann(cfg: &RunConfig, model: &Model, out: &mut RunDir) -> Result<()> {
    let opts = need(cfg.riemann.as_ref(), "riemann")?;
    let left = inputs::state(model, &opts.left)?;
    let right = inputs::state(model, &opts.right)?;
    let fan = solve_riemann(model.as_ref(), &left, &right, cfg.nu)?;
    out.fan(&fan, model.dim())?;
    let strengths: Vec<f64> = (1..=model.dim()).map(|i| fan.total_strength(i)).collect();
    out.json("metrics.json", "metrics", json!({"waves": fan.len(), "family_strength": strengths}))
}

pub fn simulate(cfg: &RunConfig, model: &Model, out: &mut RunDir) -> Result<()> {
    let phi = inputs::initial(model, cfg)?;
    let controls = inputs::controls(model, &cfg.controls)?;
    let t_end = need(cfg.horizon, "horizon")?;
    let mut times = cfg.sample_times.clone();
    if times.is_empty() {
        times = vec![0.0, t_end];
    }
    if times.iter().any(|&t| t > t_end) {
        return Err(ConfigError(format!("sample times must not exceed the horizon {t_end}")).into());
    }
    let mut engine = Engine::new(model.clone(), &phi, controls, engine_options(cfg, model))?;
    let profiles = engine.run_sampled(&times)?;
    engine.run_until(t_end)?;
    let live = engine.live_fronts();
    let traj = engine.into_trajectory();
    let samples: Vec<(f64, Profile)> = times.iter().copied().zip(profiles).collect();
    out.events(&traj, model.dim())?;
    out.fronts(&traj)?;
    out.profiles("profiles.csv", &samples, model.dim())?;
    let defect: Option<f64> = if model.is_conservative() {
        Some(traj.conservation_defects(model.as_ref())?.iter().sum())
    } else {
        None
    };
    let tv: Vec<f64> = samples.iter().map(|(_, p)| total_variation(p, Coordinates::Riemann)).collect();
    out.json(
        "metrics.json",
        "metrics",
        json!({
            "events": traj.events.len(),
            "collisions": traj.collisions().count(),
            "fronts_created": traj.fronts.len(),
            "fronts_alive": live,
            "sample_times": times,
            "total_variation_w": tv,
            "conservation_defect": defect,
        }),
    )
}

pub fn attain_check(cfg: &RunConfig, model: &Model, out: &mut RunDir) -> Result<()> {
    let opts = cfg.attain.clone().unwrap_or_default();
    let AttainOptions { rho, h, eps_jump, profile } = opts;
    let psi = match &profile {
        Some(src) => inputs::profile(model, cfg, src)?,
        None => inputs::initial(model, cfg)?,
    };
    let rho = rho.unwrap_or_else(|| default_rho_prime(model.as_ref()));
    let h = h.unwrap_or_else(|| default_h(cfg.a(), cfg.b()));
    let eps = eps_jump.unwrap_or(2.0 * cfg.nu);
    let report = check_membership(model.as_ref(), &psi, rho, h, eps)?;
    println!("member: {} (max ratio {}, ρ {rho})", report.pass, fmt(report.max_ratio()));
    out.json("membership.json", "membership", serde_json::to_value(&report)?)
}

pub fn steer(cfg: &RunConfig, model: &Model, out: &mut RunDir) -> Result<()> {
    let sc = need(cfg.steer.as_ref(), "steer")?;
    if model.dim() != 2 || model.shock_rule() != ShockRule::Straight {
        return Err(HypothesisFailure(format!("steering needs a 2×2 Temple model, got `{}`", model.name())).into());
    }
    let validation = validate_model(model.as_ref());
    if !validation.passes() {
        return Err(HypothesisFailure(format!("model fails validation: {:?}", validation.failures)).into());
    }
    let phi = inputs::initial(model, cfg)?;
    let psi = inputs::profile(model, cfg, &sc.target)?;
    let t_horizon = horizon(model.as_ref(), cfg.a(), cfg.b())?;
    let tau = sc.tau.unwrap_or(t_horizon + 1.0);
    let opts = SteerOptions { nu: cfg.nu, rho_prime: sc.rho_prime, h: sc.h, eps_jump: sc.eps_jump };
    let rho_prime = sc.rho_prime.unwrap_or_else(|| default_rho_prime(model.as_ref()));
    let membership = check_membership(
        model.as_ref(),
        &psi,
        rho_prime,
        sc.h.unwrap_or_else(|| default_h(cfg.a(), cfg.b())),
        sc.eps_jump.unwrap_or(2.0 * cfg.nu),
    )?;
    out.json("membership.json", "membership", serde_json::to_value(&membership)?)?;
    if !membership.pass {
        return Err(HypothesisFailure(format!("target is outside K^ρ′, worst ratio {}", membership.max_ratio())).into());
    }
    let plan = steer_to_target(model.clone(), &phi, &psi, tau, &opts)?;
    out.controls(&plan.controls.alpha, &plan.controls.beta, model.dim())?;
    out.events(&plan.trajectory, model.dim())?;
    out.fronts(&plan.trajectory)?;
    out.profiles("profiles.csv", &[(0.0, phi), (tau, plan.achieved.clone())], model.dim())?;
    out.profiles("target.csv", &[(tau, psi)], model.dim())?;
    out.json(
        "metrics.json",
        "metrics",
        json!({
            "t_horizon": plan.t_horizon,
            "tau": plan.tau,
            "nu": plan.nu,
            "rho_prime": plan.rho_prime,
            "washout_exit": plan.washout_exit,
            "tau_prime": plan.tau_prime,
            "omega_prime": plan.omega_prime.w.as_slice(),
            "omega": plan.omega.w.as_slice(),
            "l1_error": plan.l1_error,
            "quantization_error": plan.quantization_error,
            "switches": plan.controls.switch_count(),
            "events": plan.trajectory.events.len(),
        }),
    )
}

pub fn stabilize_cmd(cfg: &RunConfig, model: &Model, out: &mut RunDir) -> Result<()> {
    let sc = cfg.stabilize.clone().unwrap_or(StabilizeConfig { u_star: None, cycles: 3 });
    let phi = inputs::initial(model, cfg)?;
    let u_star = match &sc.u_star {
        Some(w) => inputs::state(model, w)?,
        None => inputs::state(model, model.riemann_box().center().as_slice())?,
    };
    let (traj, report) = stabilize(model.clone(), &phi, &u_star, sc.cycles, cfg.nu)?;
    let header = ["k", "time", "tv", "sup_distance", "oscillation", "tv_absorbed", "survivors"].map(String::from);
    let rows = report.cycles.iter().map(|c| {
        vec![
            c.k.to_string(),
            fmt(c.time),
            fmt(c.tv),
            fmt(c.sup_distance),
            c.oscillation.map(fmt).unwrap_or_default(),
            c.tv_absorbed.map(fmt).unwrap_or_default(),
            c.survivors.to_string(),
        ]
    });
    out.csv("cycles.csv", "cycles", &header, rows)?;
    out.events(&traj, model.dim())?;
    out.json("metrics.json", "metrics", serde_json::to_value(&report)?)
}

pub fn counterexample(cfg: &RunConfig, model: &Model, out: &mut RunDir) -> Result<()> {
    let cc = cfg.counterexample.clone().unwrap_or_default();
    let CounterexampleConfig { n, amplitude, pattern, exit_times, samples, decay_times, decay_delta } = cc;
    let pc = PersistenceConfig {
        a: cfg.a(),
        b: cfg.b(),
        n,
        amplitude,
        pattern,
        exit_times,
        samples,
        nu: cfg.nu,
        seed: cfg.seed,
        decay_times,
        decay_delta,
        ..PersistenceConfig::default()
    };
    let rep = persistence_with_model(model.clone(), &pc)?;
    let dim = model.dim();
    let mut header = vec!["t".to_string(), "total".to_string()];
    header.extend((1..=dim).map(|i| format!("count{i}")));
    header.extend((1..=dim).map(|i| format!("strength{i}")));
    header.push("min_spacing".into());
    let c = &rep.census;
    let rows = (0..c.times.len()).map(|k| {
        let mut row = vec![fmt(c.times[k]), c.total(k).to_string()];
        row.extend(c.counts[k].iter().map(|v| v.to_string()));
        row.extend(c.strengths[k].iter().map(|&v| fmt(v)));
        row.push(c.min_spacing[k].map(fmt).unwrap_or_default());
        row
    });
    out.csv("census.csv", "census", &header, rows)?;
    let header = ["event", "time", "position", "class", "genuine", "incoming", "outgoing", "reflects_shock", "reflects_rarefaction"].map(String::from);
    let waves = |v: &[bcl_core::counterexample::WaveTag]| {
        v.iter().map(|w| format!("{}{}:{}", w.family, &w.kind.as_str()[..1], fmt(w.strength))).collect::<Vec<_>>().join(" ")
    };
    let rows = rep.tags.iter().map(|t| {
        vec![
            t.event.to_string(),
            fmt(t.time),
            fmt(t.position),
            t.class.as_str().to_string(),
            t.genuine.to_string(),
            waves(&t.incoming),
            waves(&t.outgoing),
            t.reflects_shock().to_string(),
            t.reflects_rarefaction().to_string(),
        ]
    });
    out.csv("tags.csv", "tags", &header, rows)?;
    out.events(&rep.trajectory, dim)?;
    let ks: Vec<f64> = rep.decay.samples.iter().map(|s| s.measured()).collect();
    out.json(
        "metrics.json",
        "metrics",
        json!({
            "horizon": rep.horizon,
            "wedge_hypothesis": rep.wedge_hypothesis,
            "shocks_persist": rep.shocks_persist(),
            "threshold": c.threshold,
            "tagged_events": rep.tagged_events,
            "reflecting_events": rep.reflecting_events,
            "events": rep.trajectory.events.len(),
            "decay_times": rep.decay.samples.iter().map(|s| s.time).collect::<Vec<_>>(),
            "decay_k": ks,
            "decay_stability": rep.decay.stability(),
        }),
    )?;
    if !rep.wedge_hypothesis {
        return Err(HypothesisFailure(format!("model `{}` violates the wedge-sign hypothesis", model.name())).into());
    }
    Ok(())
}

pub fn validate(model: &Model, out: &mut RunDir) -> Result<()> {
    let report = validate_model(model.as_ref());
    out.json("validation.json", "validation", serde_json::to_value(&report)?)?;
    println!(
        "{}: hyperbolic {}, genuinely nonlinear {}, speed separated {}, λ_min {}, wedge hypothesis {}",
        report.model,
        report.strictly_hyperbolic,
        report.genuinely_nonlinear,
        report.speed_separated,
        fmt(report.lambda_min),
        report.wedge_hypothesis()
    );
    if !report.passes() {
        return Err(HypothesisFailure(format!("model `{}` fails validation: {:?}", report.model, report.failures)).into());
    }
    Ok(())
}
