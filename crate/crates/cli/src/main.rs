//! `bcl`: front tracking and boundary control runs from a JSON config.
//!
//! Exit codes: 0 success, 2 config error, 3 model-hypothesis failure,
//! 4 numerical abort, 1 anything else (I/O).

use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand};

use bcl_cli::commands::{self, HypothesisFailure};
use bcl_cli::config::{load_config, ConfigError, RunConfig};
use bcl_cli::inputs;
use bcl_cli::output::RunDir;

#[derive(Parser)]
#[command(name = "bcl", version, about = "Wavefront tracking and boundary control for 1-D conservation laws")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Solve one Riemann problem and write its wave fan.
    Riemann(Common),
    /// Run the front tracking engine to the horizon.
    Simulate(Common),
    /// Test a profile for membership in the attainable-set surrogate.
    AttainCheck(Common),
    /// Synthesize boundary controls reaching a target (Temple models).
    Steer(Common),
    /// Drive data to a constant state with absorbing boundaries.
    Stabilize(Common),
    /// Dense-shock persistence experiment.
    Counterexample(Common),
    /// Check hyperbolicity, nonlinearity and wedge signs on the model box.
    ValidateModel(Common),
}

#[derive(Args)]
struct Common {
    #[arg(long)]
    config: PathBuf,
    /// Output directory (overrides `out` in the config).
    #[arg(long)]
    out: Option<PathBuf>,
    #[arg(long)]
    seed: Option<u64>,
    #[arg(long)]
    nu: Option<f64>,
}

impl Command {
    fn parts(&self) -> (&'static str, &Common) {
        match self {
            Command::Riemann(c) => ("riemann", c),
            Command::Simulate(c) => ("simulate", c),
            Command::AttainCheck(c) => ("attain-check", c),
            Command::Steer(c) => ("steer", c),
            Command::Stabilize(c) => ("stabilize", c),
            Command::Counterexample(c) => ("counterexample", c),
            Command::ValidateModel(c) => ("validate-model", c),
        }
    }
}

fn exit_code(err: &anyhow::Error) -> u8 {
    if err.downcast_ref::<ConfigError>().is_some() {
        return 2;
    }
    if err.downcast_ref::<HypothesisFailure>().is_some() {
        return 3;
    }
    if let Some(e) = err.downcast_ref::<bcl_core::Error>() {
        return match e {
            bcl_core::Error::Invalid(_) => 2,
            bcl_core::Error::Degenerate(_) | bcl_core::Error::NonConservative(_) => 3,
            _ => 4,
        };
    }
    1
}

fn load(common: &Common) -> Result<RunConfig, ConfigError> {
    let mut cfg = load_config(&common.config)?;
    if let Some(out) = &common.out {
        cfg.out = Some(out.clone());
    }
    if let Some(seed) = common.seed {
        cfg.seed = seed;
    }
    if let Some(nu) = common.nu {
        cfg.nu = nu;
    }
    cfg.validate()?;
    Ok(cfg)
}

fn run(name: &str, command: &Command, cfg: &RunConfig) -> anyhow::Result<()> {
    let model = inputs::build_model(&cfg.model)?;
    let dir = cfg.out.clone().ok_or_else(|| ConfigError("no output directory: pass --out or set `out`".into()))?;
    let mut out = RunDir::create(&dir)?;
    let result = match command {
        Command::Riemann(_) => commands::riemann(cfg, &model, &mut out),
        Command::Simulate(_) => commands::simulate(cfg, &model, &mut out),
        Command::AttainCheck(_) => commands::attain_check(cfg, &model, &mut out),
        Command::Steer(_) => commands::steer(cfg, &model, &mut out),
        Command::Stabilize(_) => commands::stabilize_cmd(cfg, &model, &mut out),
        Command::Counterexample(_) => commands::counterexample(cfg, &model, &mut out),
        Command::ValidateModel(_) => commands::validate(&model, &mut out),
    };
    let status = match &result {
        Ok(()) => 0,
        Err(e) => exit_code(e),
    };
    // The output location does not take part in the config hash.
    let hashed = RunConfig { out: None, ..cfg.clone() };
    out.manifest(name, &hashed.canonical(), cfg.seed, status)?;
    result
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    let (name, common) = cli.command.parts();
    let result = load(common).map_err(anyhow::Error::from).and_then(|cfg| run(name, &cli.command, &cfg));
    match result {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("error: {e:#}");
            ExitCode::from(exit_code(&e))
        }
    }
}
