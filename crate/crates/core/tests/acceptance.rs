//! Acceptance suite. Prints one PASS/FAIL line per criterion and exits
//! non-zero if any criterion fails.

use std::process::ExitCode;
use std::time::Instant;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use bcl_core::counterexample::{classify_pair, persistence_experiment, shock_profile, PersistenceConfig, ShockPattern};
use bcl_core::fronttrack::{simulate, EngineOptions};
use bcl_core::models::builtin;
use bcl_core::oleinik::oleinik_ratios;
use bcl_core::profile::{total_variation, Coordinates, Profile};
use bcl_core::riemann::{rh_residual, solve_riemann};
use bcl_core::stabilize::{log_log_slope, stabilize};
use bcl_core::steer::{default_rho_prime, horizon, steer_to_target, SteerOptions, TargetSpec};
use bcl_core::{ControlPair, Engine, Model, Vector, WaveKind};

// Criterion 1
const RH_TOL: f64 = 1e-9;
const PAIRS_PER_MODEL: usize = 200;
const C1_BUDGET_S: f64 = 5.0;
// Criterion 2
const DEFECT_PER_EVENT: f64 = 5e-9;
const EVENT_RUN: usize = 10_000;
// Criterion 4
const C4_RUNS: u64 = 20;
const C4_TAU_BAR: f64 = 0.2;
const C4_NU: f64 = 1e-3;
const C4_SPREAD: f64 = 0.1;
// Criterion 5
const C5_TARGETS: u64 = 10;
const C5_NUS: [f64; 3] = [0.1, 0.05, 0.025];
const C5_ERROR_CONSTANT: f64 = 1.0;
const C5_MAX_RATIO: f64 = 0.75;
const C5_BUDGET_S: f64 = 60.0;
// Criterion 6
const C6_TV0: [f64; 3] = [0.1, 0.05, 0.025];
const C6_SLOPE: f64 = 2.0;
const C6_SLOPE_TOL: f64 = 0.3;
const C6_CYCLES: usize = 3;
// Criterion 7
const C7_DECAY_RATIO: f64 = 2.0;
const C7_AMPLITUDES: [f64; 2] = [0.002, 0.01];

struct Line {
    id: u32,
    pass: bool,
    detail: String,
}

fn report(id: u32, pass: bool, detail: String) -> Line {
    Line { id, pass, detail }
}

fn random_w(model: &Model, rng: &mut ChaCha8Rng) -> Vector {
    let bx = model.riemann_box();
    let mut w = Vector::zeros(model.dim());
    for i in 0..model.dim() {
        w[i] = rng.gen_range(bx.lo[i]..=bx.hi[i]);
    }
    w
}

fn criterion_1() -> Line {
    let start = Instant::now();
    let mut worst_rh = 0.0f64;
    let mut failures = Vec::new();
    let mut fans = 0usize;
    for name in ["burgers", "temple2", "gas", "psystem"] {
        let model = builtin(name).unwrap();
        let mut rng = ChaCha8Rng::seed_from_u64(1);
        for k in 0..PAIRS_PER_MODEL {
            let l = model.state_from_riemann(random_w(&model, &mut rng)).unwrap();
            let r = model.state_from_riemann(random_w(&model, &mut rng)).unwrap();
            let fan = match solve_riemann(model.as_ref(), &l, &r, 0.05) {
                Ok(f) => f,
                Err(e) => {
                    failures.push(format!("{name}#{k}: {e}"));
                    continue;
                }
            };
            fans += 1;
            let chained = fan.waves.first().map_or(true, |w| w.left.w == l.w)
                && fan.waves.last().map_or(true, |w| w.right.w == r.w)
                && fan.waves.windows(2).all(|p| p[0].right.w == p[1].left.w);
            if !chained {
                failures.push(format!("{name}#{k}: broken chain"));
            }
            for w in fan.waves.iter().filter(|w| w.kind == WaveKind::Shock) {
                let (ll, lr) = (model.speed(w.family, &w.left.w), model.speed(w.family, &w.right.w));
                if !(ll > w.speed && w.speed > lr) {
                    failures.push(format!("{name}#{k}: Lax {ll} > {} > {lr} violated", w.speed));
                }
                if model.is_conservative() {
                    let rh = rh_residual(model.as_ref(), &w.left, &w.right, w.speed).unwrap();
                    worst_rh = worst_rh.max(rh);
                    if rh > RH_TOL {
                        failures.push(format!("{name}#{k}: RH residual {rh:e}"));
                    }
                }
            }
            if !solve_riemann(model.as_ref(), &l, &l, 0.05).unwrap().is_empty() {
                failures.push(format!("{name}#{k}: identity fan not empty"));
            }
        }
    }
    let secs = start.elapsed().as_secs_f64();
    let pass = failures.is_empty() && secs < C1_BUDGET_S;
    report(
        1,
        pass,
        format!("{fans} fans, worst RH {worst_rh:.2e}, {} failures {:?}, {secs:.2}s", failures.len(), failures.iter().take(3).collect::<Vec<_>>()),
    )
}

fn defect_run(model: &Model, phi: &Profile, nu: f64) -> (usize, f64) {
    let mut opts = EngineOptions::new(nu);
    opts.track_integral = true;
    let mut engine = Engine::new(model.clone(), phi, ControlPair::absorbing(), opts).unwrap();
    let events = engine.run_events(EVENT_RUN).unwrap();
    let traj = engine.into_trajectory();
    let defect: f64 = traj.conservation_defects(model.as_ref()).unwrap().iter().sum();
    (events, defect)
}

fn criterion_2() -> Line {
    let burgers = builtin("burgers").unwrap();
    let mut rng = ChaCha8Rng::seed_from_u64(2);
    let n = 3000;
    let values: Vec<f64> = (0..n).map(|_| rng.gen_range(1.0..=3.0)).collect();
    let phi_b = Profile::sample(burgers.as_ref(), 0.0, 1.0, n, |x| {
        Vector::scalar(values[((x * n as f64) as usize).min(n - 1)])
    })
    .unwrap();
    let (eb, db) = defect_run(&burgers, &phi_b, 0.01);

    let gas = builtin("gas").unwrap();
    let phi_g = bcl_core::counterexample::dense_shock_initial(gas.as_ref(), 0.0, 1.0, 300, 0.001, ShockPattern::Alternating, 2).unwrap();
    let (eg, dg) = defect_run(&gas, &phi_g, 1e-3);

    let ok_b = eb == EVENT_RUN && db <= DEFECT_PER_EVENT * eb as f64;
    let ok_g = eg == EVENT_RUN && dg <= DEFECT_PER_EVENT * eg as f64;
    report(2, ok_b && ok_g, format!("burgers {eb} events defect {db:.2e}; gas {eg} events defect {dg:.2e}; bound {DEFECT_PER_EVENT:e}/event"))
}

fn criterion_3() -> Line {
    let model = builtin("temple2").unwrap();
    let n = 150;
    let phi = Profile::sample(model.as_ref(), 0.0, 1.0, n, |x| Vector::pair(-2.9 + 1.8 * x, 1.1 + 1.8 * x)).unwrap();
    let mut engine = Engine::new(model.clone(), &phi, ControlPair::absorbing(), EngineOptions::new(0.02)).unwrap();
    let events = engine.run_events(EVENT_RUN).unwrap();
    let traj = engine.into_trajectory();
    let mut collisions = 0;
    let mut broken = 0;
    for e in traj.collisions() {
        collisions += 1;
        for family in 1..=2 {
            let mut a_in: Vec<u64> = e.fronts_in.iter().map(|&id| traj.front(id)).filter(|f| f.family == family).map(|f| f.strength().to_bits()).collect();
            let mut a_out: Vec<u64> = e.fronts_out.iter().map(|&id| traj.front(id)).filter(|f| f.family == family).map(|f| f.strength().to_bits()).collect();
            a_in.sort_unstable();
            a_out.sort_unstable();
            if a_in != a_out {
                broken += 1;
            }
        }
    }
    report(3, events == EVENT_RUN && broken == 0, format!("{events} events, {collisions} collisions, {broken} multiset mismatches"))
}

fn criterion_4() -> Line {
    let model = builtin("temple2").unwrap();
    let h = (1.0 - 0.0) / 1000.0;
    let mut worst = f64::NEG_INFINITY;
    let mut bad = Vec::new();
    for seed in 0..C4_RUNS {
        let mut rng = ChaCha8Rng::seed_from_u64(400 + seed);
        let pieces = 6;
        let c = model.riemann_box().center();
        let ws: Vec<Vector> = (0..pieces)
            .map(|_| Vector::pair(c[0] + rng.gen_range(-C4_SPREAD..C4_SPREAD), c[1] + rng.gen_range(-C4_SPREAD..C4_SPREAD)))
            .collect();
        let phi = Profile::sample(model.as_ref(), 0.0, 1.0, pieces, |x| ws[((x * pieces as f64) as usize).min(pieces - 1)]).unwrap();
        let mut engine = Engine::new(model.clone(), &phi, ControlPair::absorbing(), EngineOptions::new(C4_NU)).unwrap();
        let snaps = engine.run_sampled(&[C4_TAU_BAR, 2.0 * C4_TAU_BAR]).unwrap();
        let r1 = oleinik_ratios(model.as_ref(), &snaps[0], h).unwrap();
        let r2 = oleinik_ratios(model.as_ref(), &snaps[1], h).unwrap();
        for family in 1..=2 {
            let d = r2.ratio(family) - r1.ratio(family);
            worst = worst.max(d);
            if d > 0.0 {
                bad.push((seed, family, r1.ratio(family), r2.ratio(family)));
            }
        }
    }
    report(4, bad.is_empty(), format!("{C4_RUNS} runs, h {h:e}, max increase {worst:.3e}, violations {bad:?}"))
}

fn criterion_5() -> Line {
    let start = Instant::now();
    let model = builtin("temple2").unwrap();
    let rho = 0.8 * default_rho_prime(model.as_ref());
    let tau = horizon(model.as_ref(), 0.0, 1.0).unwrap() + 1.0;
    let mut fails = Vec::new();
    let mut worst_ratio = 0.0f64;
    let mut worst_scaled = 0.0f64;
    for seed in 0..C5_TARGETS {
        let mut rng = ChaCha8Rng::seed_from_u64(500 + seed);
        let c = model.riemann_box().center();
        let (p, q) = (rng.gen_range(-0.3..0.3), rng.gen_range(-0.3..0.3));
        let phi = Profile::sample(model.as_ref(), 0.0, 1.0, 9, |x| Vector::pair(c[0] + p * (5.0 * x).sin(), c[1] + q * (4.0 * x).cos())).unwrap();
        let psi = TargetSpec::random(0.0, 1.0, rho, 3, seed).profile(model.as_ref(), 0.0, 1.0).unwrap();
        let mut errs = Vec::new();
        for nu in C5_NUS {
            match steer_to_target(model.clone(), &phi, &psi, tau, &SteerOptions::new(nu)) {
                Ok(plan) => {
                    if !plan.membership.pass {
                        fails.push(format!("target {seed} not in K"));
                    }
                    worst_scaled = worst_scaled.max(plan.l1_error / nu);
                    if plan.l1_error > C5_ERROR_CONSTANT * nu {
                        fails.push(format!("target {seed} ν {nu}: error {:.3e}", plan.l1_error));
                    }
                    errs.push(plan.l1_error);
                }
                Err(e) => fails.push(format!("target {seed} ν {nu}: {e}")),
            }
        }
        for p in errs.windows(2) {
            let ratio = p[1] / p[0];
            worst_ratio = worst_ratio.max(ratio);
            if !(ratio <= C5_MAX_RATIO) {
                fails.push(format!("target {seed}: ratio {ratio:.3}"));
            }
        }
    }
    let secs = start.elapsed().as_secs_f64();
    report(
        5,
        fails.is_empty() && secs < C5_BUDGET_S,
        format!("max error/ν {worst_scaled:.3}, worst halving ratio {worst_ratio:.3}, {secs:.2}s, failures {fails:?}"),
    )
}

fn criterion_6() -> Line {
    let model = builtin("temple2").unwrap();
    let c = model.riemann_box().center();
    let u_star = model.state_from_riemann(c).unwrap();
    let shape = |amp: f64| {
        Profile::sample(model.as_ref(), 0.0, 1.0, 9, move |x| Vector::pair(c[0] + amp * (9.0 * x).sin(), c[1] + amp * (7.0 * x + 1.0).cos()))
            .unwrap()
    };
    let unit = total_variation(&shape(0.01), Coordinates::Conserved) / 0.01;
    let mut tv0 = Vec::new();
    let mut tv1 = Vec::new();
    let mut decreasing = true;
    let mut injected = 0;
    for target in C6_TV0 {
        let phi = shape(target / unit);
        let (_, rep) = stabilize(model.clone(), &phi, &u_star, C6_CYCLES, 1e-3).unwrap();
        tv0.push(rep.cycles[0].tv);
        tv1.push(rep.cycles[1].tv);
        decreasing &= rep.strictly_decreasing();
        injected += rep.absorbing_injections;
    }
    let slope = log_log_slope(&tv0, &tv1);
    let slope_ok = slope.is_some_and(|s| (s - C6_SLOPE).abs() <= C6_SLOPE_TOL);
    report(
        6,
        slope_ok && decreasing && injected == 0,
        format!("TV0 {tv0:.4?}, TV1 {tv1:?}, slope {slope:?}, strictly decreasing {decreasing}, absorbing injections {injected}"),
    )
}

fn criterion_7() -> Line {
    let mut details = Vec::new();
    let mut persist = true;
    let mut tagged = 0;
    let mut reflecting = 0;
    let mut stable = true;
    for amplitude in C7_AMPLITUDES {
        let cfg = PersistenceConfig { amplitude, seed: 1, ..Default::default() };
        let rep = persistence_experiment(&cfg).unwrap();
        let counts: Vec<usize> = (0..rep.census.times.len()).map(|k| rep.census.total(k)).collect();
        let first_zero = counts.iter().position(|&c| c == 0).map(|k| rep.census.times[k]);
        persist &= rep.shocks_persist();
        tagged += rep.tagged_events;
        reflecting += rep.reflecting_events;
        let ks: Vec<f64> = rep.decay.samples.iter().map(|s| s.measured()).collect();
        let ratio = rep.decay.stability();
        stable &= ratio.is_some_and(|r| r <= C7_DECAY_RATIO);
        details.push(format!(
            "amp {amplitude}: horizon {:.3}, first zero count at {first_zero:?}, tagged {}/{} reflecting, k(t) {ks:?}, max/min {ratio:?}",
            rep.horizon, rep.reflecting_events, rep.tagged_events
        ));
    }
    let all_reflect = tagged > 0 && reflecting == tagged;
    report(7, persist && all_reflect && stable, format!("persist {persist}, reflect {reflecting}/{tagged}, k stable {stable}; {}", details.join("; ")))
}

fn criterion_8() -> Line {
    let mut lines = Vec::new();
    let mut ok = true;
    for (name, want_shock) in [("gas", true), ("psystem", false)] {
        let model = builtin(name).unwrap();
        let start = model.riemann_box().center();
        let phi = shock_profile(model.as_ref(), 0.0, 1.0, &[0.4, 0.6], ShockPattern::SameFamily(1), 0.1, start).unwrap();
        let s = phi.states();
        let tag = classify_pair(model.as_ref(), &s[0], &s[1], &s[2], 1e-4).unwrap();
        let got = (tag.reflects_shock(), tag.reflects_rarefaction());
        ok &= got == (want_shock, !want_shock);
        lines.push(format!("{name}: reflected shock {} rarefaction {}", got.0, got.1));
    }
    report(8, ok, lines.join(", "))
}

fn event_log(traj: &bcl_core::Trajectory) -> String {
    let mut out = String::new();
    for e in &traj.events {
        out.push_str(&format!("{:?}\n", e));
    }
    out
}

fn criterion_9() -> Line {
    let runs: Vec<Box<dyn Fn() -> String>> = vec![
        Box::new(|| {
            let model = builtin("gas").unwrap();
            let phi = bcl_core::counterexample::dense_shock_initial(model.as_ref(), 0.0, 1.0, 64, 0.01, ShockPattern::Alternating, 9).unwrap();
            event_log(&simulate(model, &phi, ControlPair::absorbing(), EngineOptions::new(1e-4), 3.0).unwrap())
        }),
        Box::new(|| {
            let model = builtin("temple2").unwrap();
            let phi = Profile::sample(model.as_ref(), 0.0, 1.0, 9, |x| Vector::pair(-2.0 + 0.2 * (6.0 * x).sin(), 2.0 + 0.2 * x)).unwrap();
            let psi = TargetSpec::random(0.0, 1.0, 0.8 * default_rho_prime(model.as_ref()), 3, 3).profile(model.as_ref(), 0.0, 1.0).unwrap();
            let plan = steer_to_target(model, &phi, &psi, 17.0, &SteerOptions::new(0.05)).unwrap();
            event_log(&plan.trajectory)
        }),
        Box::new(|| {
            let model = builtin("temple2").unwrap();
            let u = model.state_from_riemann(model.riemann_box().center()).unwrap();
            let phi = Profile::sample(model.as_ref(), 0.0, 1.0, 9, |x| Vector::pair(-2.0 + 0.05 * (9.0 * x).sin(), 2.0 - 0.05 * x)).unwrap();
            event_log(&stabilize(model, &phi, &u, 2, 1e-3).unwrap().0)
        }),
    ];
    let mut identical = 0;
    let mut events = 0;
    for run in &runs {
        let (x, y) = (run(), run());
        events += x.lines().count();
        if x == y {
            identical += 1;
        }
    }
    report(9, identical == runs.len(), format!("{identical}/{} configs byte-identical over {events} logged events", runs.len()))
}

fn main() -> ExitCode {
    let criteria: [fn() -> Line; 9] =
        [criterion_1, criterion_2, criterion_3, criterion_4, criterion_5, criterion_6, criterion_7, criterion_8, criterion_9];
    let mut failed = 0;
    for c in criteria {
        let line = c();
        println!("criterion {}: {} ({})", line.id, if line.pass { "PASS" } else { "FAIL" }, line.detail);
        if !line.pass {
            failed += 1;
        }
    }
    println!("{} of {} criteria passed", criteria.len() - failed, criteria.len());
    if failed == 0 {
        ExitCode::SUCCESS
    } else {
        ExitCode::FAILURE
    }
}
