//! `nonkp` — scenario runner for the coupled dispersive-system toolkit.
//!
//! ```text
//! nonkp <scenario> [--config <path>] [--out <dir>] [--seed <u64>]
//!       [--threads <n>] [--set section.key=value ...]
//! ```
//!
//! Scenarios: simulate, dispersion-table, mass-wave, bourgain-scaling,
//! dn-verify, conservation. Artifacts land in `--out`, then
//! `$NONKP_OUT_DIR/<scenario>`, then `./nonkp-out/<scenario>`. Exit status
//! is 0 iff every asserted tolerance passed; failures leave a
//! machine-readable `failure.json` in the output directory.

mod config;
mod output;
mod scenarios;

use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Parser, Subcommand};

use config::{ConfigReader, RawConfig};
use scenarios::{Ctx, RunError};

const BUILD_DESCRIBE: &str = env!("NONKP_BUILD_DESCRIBE");

#[derive(Parser)]
#[command(name = "nonkp", version, about = "Pseudospectral runner and verification scenarios for the coupled KP-type system")]
struct Cli {
    #[command(subcommand)]
    scenario: ScenarioCmd,

    /// Sectioned key = value configuration file.
    #[arg(long, global = true)]
    config: Option<PathBuf>,

    /// Output directory (default: $NONKP_OUT_DIR/<scenario> or ./nonkp-out/<scenario>).
    #[arg(long, global = true)]
    out: Option<PathBuf>,

    /// Seed override for randomized scenario data.
    #[arg(long, global = true)]
    seed: Option<u64>,

    /// Worker threads for scenario sweeps.
    #[arg(long, global = true, default_value_t = 1)]
    threads: usize,

    /// Override a config value, e.g. --set run.dt=0.01 (repeatable).
    #[arg(long = "set", global = true, value_name = "SECTION.KEY=VALUE")]
    sets: Vec<String>,
}

#[derive(Subcommand, Clone, Copy)]
enum ScenarioCmd {
    /// Evolve random smooth data and write snapshots plus diagnostics.
    Simulate,
    /// Fit every low mode's frequency from an exact linear run against the
    /// two dispersion branches.
    DispersionTable,
    /// Check the wave equation satisfied by the transverse mass profile.
    MassWave,
    /// Space-time norm scaling checks: cutoff norms, the free-evolution
    /// estimate, and the time-localized Duhamel sweep.
    BourgainScaling,
    /// Dirichlet-Neumann expansion against exact harmonic solutions.
    DnVerify,
    /// Long Hamiltonian-conservation run at the default resolution.
    Conservation,
}

impl ScenarioCmd {
    fn name(self) -> &'static str {
        match self {
            ScenarioCmd::Simulate => "simulate",
            ScenarioCmd::DispersionTable => "dispersion-table",
            ScenarioCmd::MassWave => "mass-wave",
            ScenarioCmd::BourgainScaling => "bourgain-scaling",
            ScenarioCmd::DnVerify => "dn-verify",
            ScenarioCmd::Conservation => "conservation",
        }
    }
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    let name = cli.scenario.name();

    let out = cli
        .out
        .clone()
        .or_else(|| std::env::var_os("NONKP_OUT_DIR").map(|root| PathBuf::from(root).join(name)))
        .unwrap_or_else(|| PathBuf::from("nonkp-out").join(name));
    if let Err(e) = std::fs::create_dir_all(&out) {
        eprintln!("nonkp: cannot create output directory {}: {e}", out.display());
        return ExitCode::from(3);
    }

    let mut raw = match &cli.config {
        Some(path) => match RawConfig::load(path) {
            Ok(raw) => raw,
            Err(e) => {
                eprintln!("nonkp: {e}");
                return ExitCode::from(2);
            }
        },
        None => RawConfig::default(),
    };
    for spec in &cli.sets {
        if let Err(e) = raw.set(spec) {
            eprintln!("nonkp: {e}");
            return ExitCode::from(2);
        }
    }

    let ctx = Ctx {
        out: out.clone(),
        seed_override: cli.seed,
        threads: cli.threads.max(1),
        build: BUILD_DESCRIBE,
    };
    let reader = ConfigReader::new(raw);
    let result = match cli.scenario {
        ScenarioCmd::Simulate => scenarios::simulate(reader, &ctx),
        ScenarioCmd::DispersionTable => scenarios::dispersion_table(reader, &ctx),
        ScenarioCmd::MassWave => scenarios::mass_wave(reader, &ctx),
        ScenarioCmd::BourgainScaling => scenarios::bourgain_scaling(reader, &ctx),
        ScenarioCmd::DnVerify => scenarios::dn_verify(reader, &ctx),
        ScenarioCmd::Conservation => scenarios::conservation(reader, &ctx),
    };

    match result {
        Ok(()) => ExitCode::SUCCESS,
        Err(RunError::Config(e)) => {
            eprintln!("nonkp: {e}");
            ExitCode::from(2)
        }
        Err(RunError::Io(e)) => {
            eprintln!("nonkp: io error: {e}");
            ExitCode::from(3)
        }
        Err(RunError::Failed(failure)) => {
            if let Err(e) = failure.write(&out) {
                eprintln!("nonkp: cannot write failure.json: {e}");
            }
            eprintln!(
                "nonkp: {name} failed: {} ({})",
                failure.reason, failure.detail
            );
            ExitCode::FAILURE
        }
    }
}
