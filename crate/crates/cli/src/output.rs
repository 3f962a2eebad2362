//! Run directory writer. Every file starts with a schema line.

use std::fs;
use std::io::Write;
use std::path::{Path, PathBuf};
use std::time::{SystemTime, UNIX_EPOCH};

use anyhow::{Context, Result};
use serde_json::{json, Value};
use sha2::{Digest, Sha256};

use bcl_core::fronttrack::{BoundaryMode, ControlSchedule, Trajectory};
use bcl_core::profile::Profile;
use bcl_core::riemann::WaveFan;
use bcl_core::State;

pub const SCHEMA_VERSION: u32 = 1;

/// 17 significant digits, enough to round-trip any `f64`.
pub fn fmt(x: f64) -> String {
    if x.is_finite() {
        format!("{x:.16e}")
    } else {
        x.to_string()
    }
}

fn opt(x: Option<f64>) -> String {
    x.map(fmt).unwrap_or_default()
}

fn coords(names: &str, dim: usize) -> Vec<String> {
    (1..=dim).map(|i| format!("{names}{i}")).collect()
}

fn state_cells(s: &State) -> Vec<String> {
    s.w.iter().chain(s.u.iter()).map(|&v| fmt(v)).collect()
}

fn state_header(prefix: &str, dim: usize) -> Vec<String> {
    let mut h = coords(&format!("{prefix}w"), dim);
    h.extend(coords(&format!("{prefix}u"), dim));
    h
}

pub struct RunDir {
    dir: PathBuf,
    files: Vec<String>,
}

impl RunDir {
    pub fn create(dir: &Path) -> Result<Self> {
        fs::create_dir_all(dir).with_context(|| format!("creating {}", dir.display()))?;
        Ok(RunDir { dir: dir.to_path_buf(), files: Vec::new() })
    }

    /// Writes `# schema: bcl-<schema>/<version>` followed by a CSV table.
    pub fn csv(&mut self, name: &str, schema: &str, header: &[String], rows: impl IntoIterator<Item = Vec<String>>) -> Result<()> {
        let path = self.dir.join(name);
        let mut file = fs::File::create(&path).with_context(|| format!("creating {}", path.display()))?;
        writeln!(file, "# schema: bcl-{schema}/{SCHEMA_VERSION}")?;
        let mut w = csv::Writer::from_writer(file);
        w.write_record(header)?;
        for row in rows {
            w.write_record(&row)?;
        }
        w.flush()?;
        self.files.push(name.to_string());
        Ok(())
    }

    /// Writes a JSON object with a leading `schema` field.
    pub fn json(&mut self, name: &str, schema: &str, body: Value) -> Result<()> {
        let mut doc = serde_json::Map::new();
        doc.insert("schema".into(), json!(format!("bcl-{schema}/{SCHEMA_VERSION}")));
        match body {
            Value::Object(m) => doc.extend(m),
            other => {
                doc.insert("data".into(), other);
            }
        }
        let path = self.dir.join(name);
        let mut text = serde_json::to_string_pretty(&Value::Object(doc))?;
        text.push('\n');
        fs::write(&path, text).with_context(|| format!("writing {}", path.display()))?;
        self.files.push(name.to_string());
        Ok(())
    }

    pub fn events(&mut self, traj: &Trajectory, dim: usize) -> Result<()> {
        let mut header: Vec<String> = ["event", "time", "position", "kind", "fronts_in", "fronts_out"].map(String::from).to_vec();
        header.extend(state_header("left_", dim));
        header.extend(state_header("right_", dim));
        let rows = traj.events.iter().map(|e| {
            let ids = |v: &[u64]| v.iter().map(|i| i.to_string()).collect::<Vec<_>>().join(" ");
            let mut row = vec![e.id.to_string(), fmt(e.time), fmt(e.position), e.kind.as_str().to_string(), ids(&e.fronts_in), ids(&e.fronts_out)];
            row.extend(state_cells(&e.left));
            row.extend(state_cells(&e.right));
            row
        });
        self.csv("events.csv", "events", &header, rows)
    }

    pub fn fronts(&mut self, traj: &Trajectory) -> Result<()> {
        let header = ["id", "family", "kind", "x0", "t0", "speed", "strength", "birth", "t_end", "death"].map(String::from);
        let rows = traj.fronts.iter().map(|r| {
            let f = &r.front;
            vec![
                f.id.to_string(),
                f.family.to_string(),
                f.kind.as_str().to_string(),
                fmt(f.x0),
                fmt(f.t0),
                fmt(f.speed),
                fmt(f.strength()),
                f.birth.to_string(),
                opt(r.t_end),
                r.death.map(|d| d.to_string()).unwrap_or_default(),
            ]
        });
        self.csv("fronts.csv", "fronts", &header, rows)
    }

    /// Profiles stacked by time: one row per piece.
    pub fn profiles(&mut self, name: &str, samples: &[(f64, Profile)], dim: usize) -> Result<()> {
        let mut header: Vec<String> = ["t", "x_left", "x_right"].map(String::from).to_vec();
        header.extend(state_header("", dim));
        let mut rows = Vec::new();
        for (t, p) in samples {
            for (k, s) in p.states().iter().enumerate() {
                let mut row = vec![fmt(*t), fmt(p.breaks()[k]), fmt(p.breaks()[k + 1])];
                row.extend(state_cells(s));
                rows.push(row);
            }
        }
        self.csv(name, "profile", &header, rows)
    }

    pub fn fan(&mut self, fan: &WaveFan, dim: usize) -> Result<()> {
        let mut header: Vec<String> = ["family", "kind", "speed", "strength"].map(String::from).to_vec();
        header.extend(state_header("left_", dim));
        header.extend(state_header("right_", dim));
        let rows = fan.waves.iter().map(|w| {
            let mut row = vec![w.family.to_string(), w.kind.as_str().to_string(), fmt(w.speed), fmt(w.strength)];
            row.extend(state_cells(&w.left));
            row.extend(state_cells(&w.right));
            row
        });
        self.csv("waves.csv", "waves", &header, rows)
    }

    pub fn controls(&mut self, alpha: &ControlSchedule, beta: &ControlSchedule, dim: usize) -> Result<()> {
        let mut header: Vec<String> = ["side", "t", "mode"].map(String::from).to_vec();
        header.extend(coords("w", dim));
        let mut rows = Vec::new();
        for (side, sched) in [("left", alpha), ("right", beta)] {
            for (t, mode) in &sched.switches {
                let mut row = vec![side.to_string(), fmt(*t)];
                match mode {
                    BoundaryMode::Absorbing => {
                        row.push("absorbing".into());
                        row.extend(std::iter::repeat(String::new()).take(dim));
                    }
                    BoundaryMode::Hold(s) => {
                        row.push("hold".into());
                        row.extend(s.w.iter().map(|&v| fmt(v)));
                    }
                }
                rows.push(row);
            }
        }
        self.csv("controls.csv", "controls", &header, rows)
    }

    /// Manifest: config hash, versions and seed. The timestamp is the only
    /// field that differs between identical runs.
    pub fn manifest(mut self, subcommand: &str, canonical_config: &str, seed: u64, exit_code: u8) -> Result<()> {
        let hash = hex::encode(Sha256::digest(canonical_config.as_bytes()));
        let stamp = SystemTime::now().duration_since(UNIX_EPOCH).map(|d| d.as_secs()).unwrap_or(0);
        let files = std::mem::take(&mut self.files);
        let config: Value = serde_json::from_str(canonical_config)?;
        self.json(
            "manifest.json",
            "manifest",
            json!({
                "subcommand": subcommand,
                "config_sha256": hash,
                "config": config,
                "versions": {"bcl-cli": env!("CARGO_PKG_VERSION"), "bcl-core": bcl_core::VERSION},
                "seed": seed,
                "exit_code": exit_code,
                "files": files,
                "timestamp": stamp,
            }),
        )
    }
}
