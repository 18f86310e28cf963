//! Configuration, file formats and subcommands of the `squeeze` tool.

// `!(x > 0.0)` is used on purpose so that NaN is rejected too.
#![allow(clippy::neg_cmp_op_on_partial_ord)]

pub mod commands;
pub mod config;
pub mod io;
pub mod output;
pub mod plot;

use std::path::PathBuf;

use anyhow::Result;

pub use commands::Report;
pub use config::RunConfig;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Command {
    Deconvolve,
    Spectrum,
    SnlfTable,
    PhaseCompare,
    LangevinSweep,
}

/// Runs a subcommand and writes its outputs into the configured directory.
pub fn run(command: Command, cfg: &RunConfig) -> Result<(Report, Vec<PathBuf>)> {
    let report = match command {
        Command::Deconvolve => commands::cmd_deconvolve(cfg)?,
        Command::Spectrum => commands::cmd_spectrum(cfg)?,
        Command::SnlfTable => commands::cmd_snlf_table(cfg)?,
        Command::PhaseCompare => commands::cmd_phase_compare(cfg)?,
        Command::LangevinSweep => commands::cmd_langevin_sweep(cfg)?,
    };
    let written = report.artifacts.commit(&cfg.output.dir)?;
    Ok((report, written))
}
