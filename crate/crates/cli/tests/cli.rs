use std::fs;
use std::path::{Path, PathBuf};
use std::process::Command;

use bcl_cli::config::{load_config, parse_config, ControlSpec, ProfileSource};
use bcl_core::counterexample::ShockPattern;

fn configs() -> PathBuf {
    Path::new(env!("CARGO_MANIFEST_DIR")).join("tests/configs")
}

fn bcl(sub: &str, config: &str, out: &Path, extra: &[&str]) -> (i32, String) {
    let output = Command::new(env!("CARGO_BIN_EXE_bcl"))
        .arg(sub)
        .arg("--config")
        .arg(configs().join(config))
        .arg("--out")
        .arg(out)
        .args(extra)
        .output()
        .expect("binary runs");
    (output.status.code().unwrap_or(-1), String::from_utf8_lossy(&output.stderr).into_owned())
}

fn write_config(dir: &Path, text: &str) -> PathBuf {
    let path = dir.join("config.json");
    fs::write(&path, text).unwrap();
    path
}

fn bcl_inline(sub: &str, text: &str) -> (i32, tempfile::TempDir) {
    let dir = tempfile::tempdir().unwrap();
    let path = write_config(dir.path(), text);
    let status = Command::new(env!("CARGO_BIN_EXE_bcl"))
        .arg(sub)
        .arg("--config")
        .arg(&path)
        .arg("--out")
        .arg(dir.path().join("out"))
        .status()
        .unwrap();
    (status.code().unwrap_or(-1), dir)
}

#[test]
fn golden_configs_parse() {
    let sim = load_config(&configs().join("simulate.json")).unwrap();
    assert_eq!(sim.model.name, "burgers");
    assert_eq!(sim.sample_times, vec![0.0, 0.25, 0.5, 1.0]);
    assert!(matches!(&sim.initial, Some(ProfileSource::File(p)) if p.ends_with("burgers_profile.csv")));
    assert!(matches!(&sim.controls, ControlSpec::File(p) if p.is_absolute() || p.starts_with(configs())));

    let ce = load_config(&configs().join("counterexample.json")).unwrap();
    let c = ce.counterexample.unwrap();
    assert_eq!((c.n, c.amplitude, c.samples, c.pattern), (64, 0.01, 16, ShockPattern::Alternating));
    assert_eq!(c.decay_times, vec![1.0, 2.0, 3.0]);

    let steer = load_config(&configs().join("steer.json")).unwrap();
    let s = steer.steer.unwrap();
    assert_eq!(s.target, ProfileSource::Target { rho: None, shocks: 3 });
    assert_eq!(s.tau, Some(17.0));

    for name in ["riemann", "attain", "stabilize", "validate"] {
        let text = fs::read_to_string(configs().join(format!("{name}.json"))).unwrap();
        let cfg = parse_config(&text).unwrap();
        assert_eq!(parse_config(&cfg.canonical()).unwrap(), cfg, "{name}");
    }
}

#[test]
fn every_subcommand_writes_headered_outputs() {
    let cases = [
        ("riemann", "riemann.json", "waves.csv"),
        ("simulate", "simulate.json", "events.csv"),
        ("attain-check", "attain.json", "membership.json"),
        ("steer", "steer.json", "controls.csv"),
        ("stabilize", "stabilize.json", "cycles.csv"),
        ("counterexample", "counterexample.json", "census.csv"),
        ("validate-model", "validate.json", "validation.json"),
    ];
    for (sub, config, file) in cases {
        let dir = tempfile::tempdir().unwrap();
        let (code, err) = bcl(sub, config, dir.path(), &[]);
        assert_eq!(code, 0, "{sub}: {err}");
        let text = fs::read_to_string(dir.path().join(file)).unwrap();
        if file.ends_with(".csv") {
            assert!(text.starts_with("# schema: bcl-"), "{sub}");
        } else {
            assert!(text.contains("\"schema\": \"bcl-"), "{sub}");
        }
        let manifest: serde_json::Value = serde_json::from_str(&fs::read_to_string(dir.path().join("manifest.json")).unwrap()).unwrap();
        assert_eq!(manifest["subcommand"], sub);
        assert_eq!(manifest["config_sha256"].as_str().unwrap().len(), 64);
    }
}

#[test]
fn floats_round_trip_through_csv() {
    let dir = tempfile::tempdir().unwrap();
    let (code, _) = bcl("riemann", "riemann.json", dir.path(), &[]);
    assert_eq!(code, 0);
    let text = fs::read_to_string(dir.path().join("waves.csv")).unwrap();
    let row = text.lines().nth(2).unwrap();
    let left_w1: f64 = row.split(',').nth(4).unwrap().parse().unwrap();
    assert_eq!(left_w1, -2.1);
    let speed = row.split(',').nth(2).unwrap();
    assert_eq!(speed.split('e').next().unwrap().trim_start_matches('-').len(), 18);
}

fn strip_timestamp(manifest: &str) -> String {
    manifest.lines().filter(|l| !l.contains("\"timestamp\"")).collect::<Vec<_>>().join("\n")
}

#[test]
fn reruns_are_byte_identical() {
    for (sub, config) in [("simulate", "simulate.json"), ("steer", "steer.json"), ("counterexample", "counterexample.json")] {
        let (d1, d2) = (tempfile::tempdir().unwrap(), tempfile::tempdir().unwrap());
        assert_eq!(bcl(sub, config, d1.path(), &[]).0, 0);
        assert_eq!(bcl(sub, config, d2.path(), &[]).0, 0);
        for entry in fs::read_dir(d1.path()).unwrap() {
            let name = entry.unwrap().file_name();
            let a = fs::read_to_string(d1.path().join(&name)).unwrap();
            let b = fs::read_to_string(d2.path().join(&name)).unwrap();
            if name == "manifest.json" {
                assert_eq!(strip_timestamp(&a), strip_timestamp(&b));
            } else {
                assert_eq!(a, b, "{sub}: {name:?}");
            }
        }
    }
}

#[test]
fn flags_override_config() {
    let dir = tempfile::tempdir().unwrap();
    assert_eq!(bcl("steer", "steer.json", dir.path(), &["--nu", "0.025", "--seed", "8"]).0, 0);
    let manifest: serde_json::Value = serde_json::from_str(&fs::read_to_string(dir.path().join("manifest.json")).unwrap()).unwrap();
    assert_eq!(manifest["seed"], 8);
    assert_eq!(manifest["config"]["nu"], 0.025);
    let metrics: serde_json::Value = serde_json::from_str(&fs::read_to_string(dir.path().join("metrics.json")).unwrap()).unwrap();
    assert!(metrics["l1_error"].as_f64().unwrap() <= 0.025);
}

#[test]
fn config_errors_exit_2() {
    assert_eq!(bcl_inline("simulate", r#"{"model": {"name": "gas"}, "bogus": 1}"#).0, 2);
    assert_eq!(bcl_inline("simulate", r#"{"model": {"name": "nosuch"}, "horizon": 1}"#).0, 2);
    assert_eq!(bcl_inline("simulate", r#"{"model": {"name": "gas"}, "horizon": 1}"#).0, 2);
    assert_eq!(bcl_inline("riemann", r#"{"model": {"name": "gas"}, "riemann": {"left": [0, 0], "right": [-2, 2]}}"#).0, 2);
    let missing = tempfile::tempdir().unwrap();
    let status = Command::new(env!("CARGO_BIN_EXE_bcl"))
        .args(["simulate", "--config"])
        .arg(missing.path().join("absent.json"))
        .status()
        .unwrap();
    assert_eq!(status.code(), Some(2));
}

#[test]
fn hypothesis_failures_exit_3() {
    let (code, dir) = bcl_inline(
        "steer",
        r#"{"model": {"name": "gas"}, "initial": {"constant": [-2, 2]}, "steer": {"target": {"constant": [-2, 2]}}}"#,
    );
    assert_eq!(code, 3);
    assert!(dir.path().join("out/manifest.json").exists());
    let (code, dir) = bcl_inline("counterexample", r#"{"model": {"name": "psystem"}, "nu": 0.0001, "counterexample": {"n": 8}}"#);
    assert_eq!(code, 3);
    assert!(dir.path().join("out/census.csv").exists());
    let steep = r#"{"model": {"name": "temple2"}, "initial": {"constant": [-2, 2]},
        "steer": {"target": {"ramp": {"left": [-2, 1.2], "right": [-2, 2.8], "pieces": 50}}}}"#;
    assert_eq!(bcl_inline("steer", steep).0, 3);
}

#[test]
fn numerical_aborts_exit_4() {
    let text = r#"{"model": {"name": "burgers"}, "initial": {"random": {"pieces": 50, "spread": 0.9}},
        "horizon": 1.0, "engine": {"front_cap": 1000000, "max_events": 5}}"#;
    assert_eq!(bcl_inline("simulate", text).0, 4);
    let text = r#"{"model": {"name": "temple2"}, "initial": {"constant": [-2, 2]},
        "steer": {"target": {"constant": [-2, 2]}, "tau": 5}}"#;
    assert_eq!(bcl_inline("steer", text).0, 4);
}
