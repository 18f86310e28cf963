use std::path::PathBuf;
use std::process::ExitCode;

use anyhow::{Context, Result};
use clap::{Parser, Subcommand};
use squeeze_cli::{run, Command, RunConfig};

#[derive(Debug, Parser)]
#[command(name = "squeeze", version, about = "Squeezing-spectrum analysis and noise-ellipse rotation")]
struct Cli {
    #[command(subcommand)]
    command: Sub,

    /// Run configuration (TOML). Defaults apply when omitted.
    #[arg(long, global = true)]
    config: Option<PathBuf>,

    /// Output directory.
    #[arg(long, global = true)]
    out: Option<PathBuf>,

    /// Noise trace CSV, overriding the config.
    #[arg(long, global = true)]
    trace: Option<PathBuf>,

    /// Two-photon detuning δ in MHz for spectrum and phase-compare.
    #[arg(long, global = true, allow_negative_numbers = true)]
    delta: Option<f64>,

    /// Inter-sideband phase shift Δφ in radians.
    #[arg(long, global = true, allow_negative_numbers = true)]
    dphi: Option<f64>,

    /// Deconvolution regularization ε.
    #[arg(long, global = true)]
    eps: Option<f64>,

    /// Analysis frequency of the phase lock in MHz.
    #[arg(long, global = true)]
    lock_omega: Option<f64>,

    /// Reserved; every computation is deterministic.
    #[arg(long, global = true)]
    seed: Option<u64>,
}

#[derive(Debug, Clone, Copy, Subcommand)]
enum Sub {
    /// Recover the zero-analysis-frequency noise curves.
    Deconvolve,
    /// Squeezing spectrum at one detuning.
    Spectrum,
    /// Shot-noise-limit frequency for each configured detuning.
    SnlfTable,
    /// Scanned-minimum versus phase-locked noise.
    PhaseCompare,
    /// Probe phase shift versus detuning.
    LangevinSweep,
}

fn config(cli: &Cli) -> Result<RunConfig> {
    let mut cfg = match &cli.config {
        Some(path) => RunConfig::load(path)?,
        None => RunConfig::default(),
    };
    if let Some(p) = &cli.trace {
        cfg.input.trace = Some(p.clone());
    }
    if let Some(d) = &cli.out {
        cfg.output.dir = d.clone();
    }
    if let Some(d) = cli.delta {
        cfg.spectrum.delta_mhz = d;
        cfg.phase.delta_mhz = d;
    }
    if let Some(v) = cli.dphi {
        cfg.phase.dphi_rad = v;
    }
    if let Some(v) = cli.eps {
        cfg.deconvolution.eps = v;
    }
    if let Some(v) = cli.lock_omega {
        cfg.phase.lock_omega_mhz = v;
    }
    cfg.validate().context("invalid settings")?;
    cfg.check_inputs_exist()?;
    Ok(cfg)
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    let command = match cli.command {
        Sub::Deconvolve => Command::Deconvolve,
        Sub::Spectrum => Command::Spectrum,
        Sub::SnlfTable => Command::SnlfTable,
        Sub::PhaseCompare => Command::PhaseCompare,
        Sub::LangevinSweep => Command::LangevinSweep,
    };
    match config(&cli).and_then(|cfg| run(command, &cfg)) {
        Ok((report, written)) => {
            print!("{}", report.summary);
            for p in written {
                println!("wrote {}", p.display());
            }
            ExitCode::SUCCESS
        }
        Err(e) => {
            eprintln!("error: {e:#}");
            ExitCode::FAILURE
        }
    }
}
