//! Subcommands. Each returns its artifacts and a short text summary; nothing
//! touches the file system until [`Artifacts::commit`].

use std::f64::consts::PI;
use std::fmt::Write as _;

use anyhow::{bail, Context, Result};
use num_complex::Complex64;
use squeeze_core::deconvolution::{recover_zero_frequency, roundtrip_residual};
use squeeze_core::envelope::{lower_envelope, snlf};
use squeeze_core::langevin::{
    dphi_for_phase_model, phase_shift_sweep, CoefficientProfile, CoefficientSource, MediumParams, PhaseSweep,
};
use squeeze_core::phase::{compare_sweep, PhaseComparison, PhaseResolvedNoise, SidebandPhaseShift};
use squeeze_core::spectrum::{synthesize_spectrum, NoiseTrace, SqueezingSpectrum};
use squeeze_core::units::linear_to_db;
use squeeze_core::{Curve, Frequency};

use crate::config::{grid, DphiMode, RunConfig};
use crate::io::{self, SnlfRow};
use crate::output::Artifacts;
use crate::plot::{Figure, Series};

/// Files to write plus human-readable result lines.
#[derive(Debug, Default)]
pub struct Report {
    pub artifacts: Artifacts,
    pub summary: String,
}

pub fn load_trace(cfg: &RunConfig) -> Result<NoiseTrace> {
    let Some(path) = &cfg.input.trace else {
        bail!("no input trace: set [input] trace in the config or pass --trace");
    };
    io::load_noise_trace(path, cfg.input.analysis_frequency_mhz)
}

/// Zero-analysis-frequency min and max channels, linear units.
#[derive(Debug, Clone)]
pub struct ZeroFrequency {
    pub min: Curve,
    pub max: Curve,
    pub residual_min: f64,
    pub residual_max: f64,
}

pub fn zero_frequency(cfg: &RunConfig, trace: &NoiseTrace) -> Result<ZeroFrequency> {
    let dc = cfg.deconvolution_config()?;
    let run = |channel: Curve, name: &str| -> Result<(Curve, f64)> {
        let g = recover_zero_frequency(&channel, &dc).with_context(|| format!("deconvolution of the {name} channel"))?;
        let residual = roundtrip_residual(&channel.map(|v| 2.0 * v), &dc)
            .with_context(|| format!("deconvolution round trip of the {name} channel"))?;
        if let Some((x, v)) = g.curve.grid().points().zip(g.curve.values()).find(|(_, v)| !(**v > 0.0)) {
            bail!(
                "deconvolution of the {name} channel: recovered noise {v} at δ = {x} MHz is not positive; \
                 increase the regularization eps"
            );
        }
        Ok((g.curve, residual))
    };
    let (min, residual_min) = run(trace.min_channel(), "min-phase")?;
    let (max, residual_max) = run(trace.max_channel(), "max-phase")?;
    let (min, max) = reconcile_order(min, max)?;
    Ok(ZeroFrequency { min, max, residual_min, residual_max })
}

/// Relative amount by which the recovered min channel may exceed the max
/// channel before it counts as an error rather than regularization ringing.
pub const ORDER_TOL: f64 = 1e-3;

/// Where deconvolution ringing lifts the min channel above the max channel
/// by less than [`ORDER_TOL`], both are replaced by their mean.
fn reconcile_order(min: Curve, max: Curve) -> Result<(Curve, Curve)> {
    let mut lo = min.values().to_vec();
    let mut hi = max.values().to_vec();
    for (i, x) in min.grid().points().enumerate() {
        if lo[i] > hi[i] {
            if lo[i] - hi[i] > ORDER_TOL * hi[i] {
                bail!(
                    "deconvolution: recovered min-phase noise {} exceeds max-phase noise {} at δ = {x} MHz",
                    lo[i],
                    hi[i]
                );
            }
            let m = 0.5 * (lo[i] + hi[i]);
            lo[i] = m;
            hi[i] = m;
        }
    }
    Ok((Curve::new(*min.grid(), lo)?, Curve::new(*max.grid(), hi)?))
}

fn db(values: &[f64]) -> Result<Vec<f64>> {
    values.iter().map(|&v| Ok(linear_to_db(v)?)).collect()
}

pub fn cmd_deconvolve(cfg: &RunConfig) -> Result<Report> {
    let trace = load_trace(cfg)?;
    let zf = zero_frequency(cfg, &trace)?;
    let g = NoiseTrace::from_linear(
        *zf.min.grid(),
        zf.min.values().to_vec(),
        zf.max.values().to_vec(),
        Frequency::analysis(0.0)?,
    )
    .context("deconvolved channels")?;

    let mut report = Report::default();
    report.artifacts.render("zero_frequency.csv", |w| {
        io::write_noise_trace(&g, w, &["zero-analysis-frequency noise recovered by deconvolution"])
    })?;
    let x: Vec<f64> = trace.grid().points().collect();
    let gx: Vec<f64> = g.grid().points().collect();
    let fig = Figure {
        title: "Deconvolved zero-frequency noise",
        x_label: "two-photon detuning δ (MHz)",
        y_label: "noise relative to shot noise (dB)",
        series: vec![
            Series::new("measured min", &x, &db(trace.n_min())?),
            Series::new("measured max", &x, &db(trace.n_max())?),
            Series::new("zero-frequency min", &gx, &db(g.n_min())?),
            Series::new("zero-frequency max", &gx, &db(g.n_max())?),
        ],
        reference: Some(0.0),
    };
    report.artifacts.add("zero_frequency.svg", fig.render()?.into_bytes());
    writeln!(report.summary, "round-trip residual: min {:.3e}, max {:.3e}", zf.residual_min, zf.residual_max)?;
    Ok(report)
}

fn spectrum_at(cfg: &RunConfig, g: &Curve, delta: f64) -> Result<SqueezingSpectrum> {
    synthesize_spectrum(g, Frequency::mhz(delta)?, &cfg.spectrum_omegas())
        .with_context(|| format!("sideband synthesis at δ = {delta} MHz"))
}

fn envelope_snlf(cfg: &RunConfig, s: &SqueezingSpectrum) -> Result<(Vec<f64>, SnlfRow)> {
    let grid = squeeze_core::UniformGrid::from_points(s.omega())?;
    let env = lower_envelope(&Curve::new(grid, s.noise_db().to_vec())?, &cfg.envelope_config())
        .context("envelope of the synthesized spectrum")?;
    let found = snlf(s.omega(), env.values())?;
    Ok((env.into_values(), SnlfRow { delta_mhz: s.delta().value(), snlf: found }))
}

fn describe(row: &SnlfRow) -> String {
    match row.snlf.frequency() {
        Some(f) => format!("SNLF {:.3} MHz, SNLF+δ {:.3} MHz", f.value(), f.value() + row.delta_mhz),
        None => format!("{:?}", row.snlf),
    }
}

pub fn cmd_spectrum(cfg: &RunConfig) -> Result<Report> {
    let trace = load_trace(cfg)?;
    let zf = zero_frequency(cfg, &trace)?;
    let s = spectrum_at(cfg, &zf.min, cfg.spectrum.delta_mhz)?;
    let (env, row) = envelope_snlf(cfg, &s)?;

    let mut report = Report::default();
    report.artifacts.render("spectrum.csv", |w| io::write_spectrum(&s, w))?;
    let fig = Figure {
        title: &format!("Squeezing spectrum at δ = {} MHz", cfg.spectrum.delta_mhz),
        x_label: "analysis frequency ω_a (MHz)",
        y_label: "noise relative to shot noise (dB)",
        series: vec![Series::new("sideband sum", s.omega(), s.noise_db()), Series::new("lower envelope", s.omega(), &env)],
        reference: Some(0.0),
    };
    report.artifacts.add("spectrum.svg", fig.render()?.into_bytes());
    writeln!(report.summary, "δ = {} MHz: {}", cfg.spectrum.delta_mhz, describe(&row))?;
    Ok(report)
}

/// SNLF rows and the spectra behind them.
pub fn snlf_rows(cfg: &RunConfig, g: &Curve) -> Result<Vec<(SqueezingSpectrum, SnlfRow)>> {
    cfg.snlf
        .deltas_mhz
        .iter()
        .map(|&d| {
            let s = spectrum_at(cfg, g, d)?;
            let (_, row) = envelope_snlf(cfg, &s)?;
            Ok((s, row))
        })
        .collect()
}

pub fn cmd_snlf_table(cfg: &RunConfig) -> Result<Report> {
    let trace = load_trace(cfg)?;
    let zf = zero_frequency(cfg, &trace)?;
    let rows = snlf_rows(cfg, &zf.min)?;

    let mut report = Report::default();
    let table: Vec<SnlfRow> = rows.iter().map(|r| r.1).collect();
    report.artifacts.render("snlf_table.csv", |w| io::write_snlf_table(&table, w))?;
    let fig = Figure {
        title: "Squeezing spectra and shot-noise-limit frequencies",
        x_label: "analysis frequency ω_a (MHz)",
        y_label: "noise relative to shot noise (dB)",
        series: rows
            .iter()
            .map(|(s, r)| Series::new(format!("δ = {} MHz", r.delta_mhz), s.omega(), s.noise_db()))
            .collect(),
        reference: Some(0.0),
    };
    report.artifacts.add("snlf_spectra.svg", fig.render()?.into_bytes());
    for r in &table {
        writeln!(report.summary, "δ = {} MHz: {}", r.delta_mhz, describe(r))?;
    }
    let sums: Vec<f64> = table.iter().map(SnlfRow::snlf_plus_delta).filter(|v| v.is_finite()).collect();
    if sums.len() == table.len() {
        let spread = sums.iter().cloned().fold(f64::NEG_INFINITY, f64::max) - sums.iter().cloned().fold(f64::INFINITY, f64::min);
        writeln!(report.summary, "SNLF+δ spread: {spread:.3} MHz")?;
    }
    Ok(report)
}

/// Phenomenological model or tabulated profile, as configured.
pub enum Coefficients {
    Model(MediumParams),
    Table(CoefficientProfile),
}

impl CoefficientSource for Coefficients {
    fn coefficients(&self, delta_mhz: f64) -> squeeze_core::Result<(Complex64, Complex64)> {
        match self {
            Coefficients::Model(p) => p.coefficients(delta_mhz),
            Coefficients::Table(t) => t.coefficients(delta_mhz),
        }
    }
}

pub fn coefficients(cfg: &RunConfig) -> Result<Coefficients> {
    match &cfg.input.coefficients {
        Some(path) => {
            let file = std::fs::File::open(path).with_context(|| format!("cannot open {}", path.display()))?;
            let table = CoefficientProfile::from_csv(file)
                .with_context(|| format!("invalid coefficient table {}", path.display()))?;
            Ok(Coefficients::Table(table))
        }
        None => Ok(Coefficients::Model(cfg.medium_params())),
    }
}

pub fn sweep(cfg: &RunConfig, deltas: &[f64]) -> Result<PhaseSweep> {
    let source = coefficients(cfg)?;
    phase_shift_sweep(
        &source,
        cfg.langevin.initial_phase_rad,
        cfg.medium.cell_length_m,
        deltas,
        cfg.langevin.steps,
    )
    .context("propagation phase sweep")
}

/// Scanned-minimum versus locked spectra at the configured detuning.
pub fn phase_comparison(cfg: &RunConfig, zf: &ZeroFrequency) -> Result<PhaseComparison> {
    let p = PhaseResolvedNoise::from_channels(&zf.min, &zf.max).context("phase model: building N₊, N₋")?;
    let step = zf.min.grid().step();
    let omegas = grid(0.0, cfg.phase.omega_max_mhz, step);
    let delta = Frequency::mhz(cfg.phase.delta_mhz)?;
    let lock = Frequency::analysis(cfg.phase.lock_omega_mhz)?;
    let cmp = match cfg.phase.dphi_mode {
        DphiMode::Scalar => {
            let shift = SidebandPhaseShift(cfg.phase.dphi_rad);
            compare_sweep(&p, delta, &omegas, lock, |_| Ok(shift))
        }
        DphiMode::Langevin => {
            let reach = cfg.phase.omega_max_mhz.max(cfg.phase.lock_omega_mhz);
            let s = sweep(cfg, &grid(delta.value() - reach, delta.value() + reach, cfg.langevin.delta_step_mhz))?;
            compare_sweep(&p, delta, &omegas, lock, |w| dphi_for_phase_model(&s, delta.value(), w.value()))
        }
    };
    cmp.context("phase model: scanned-minimum and locked spectra")
}

pub fn cmd_phase_compare(cfg: &RunConfig) -> Result<Report> {
    let trace = load_trace(cfg)?;
    let zf = zero_frequency(cfg, &trace)?;
    let cmp = phase_comparison(cfg, &zf)?;

    let mut report = Report::default();
    report.artifacts.render("phase_compare.csv", |w| io::write_phase_comparison(&cmp, w))?;
    let fig = Figure {
        title: &format!("Scanned minimum and locked noise at δ = {} MHz", cfg.phase.delta_mhz),
        x_label: "analysis frequency ω_a (MHz)",
        y_label: "noise relative to shot noise (dB)",
        series: vec![
            Series::new("minimum over LO phase", &cmp.omega, &db(&cmp.n_min)?),
            Series::new(format!("locked at ω_a = {} MHz", cfg.phase.lock_omega_mhz), &cmp.omega, &db(&cmp.n_locked)?),
        ],
        reference: Some(0.0),
    };
    report.artifacts.add("phase_compare.svg", fig.render()?.into_bytes());
    let gap = cmp.n_min.iter().zip(&cmp.n_locked).map(|(a, b)| linear_to_db(*b).unwrap_or(0.0) - linear_to_db(*a).unwrap_or(0.0));
    writeln!(
        report.summary,
        "lock phase {:.4} rad (ellipse angle {:.4} rad){}; largest locked-minus-minimum gap {:.3} dB",
        cmp.lock.phase.0,
        cmp.lock.phase.ellipse_angle(),
        if cmp.lock.degenerate { ", degenerate" } else { "" },
        gap.fold(0.0, f64::max)
    )?;
    Ok(report)
}

pub fn cmd_langevin_sweep(cfg: &RunConfig) -> Result<Report> {
    let s = sweep(cfg, &cfg.langevin_grid())?;
    let mut report = Report::default();
    report.artifacts.render("phase_sweep.csv", |w| io::write_phase_sweep(&s, w))?;
    let shift_pi: Vec<f64> = s.shift().iter().map(|v| v / PI).collect();
    let fig = Figure {
        title: "Probe phase shift versus two-photon detuning",
        x_label: "two-photon detuning δ (MHz)",
        y_label: "phase shift φ_α − φ₀ (units of π)",
        series: vec![Series::new("φ_α − φ₀", &s.delta, &shift_pi)],
        reference: Some(0.0),
    };
    report.artifacts.add("phase_sweep.svg", fig.render()?.into_bytes());
    let (peak, at) = s.peak();
    writeln!(report.summary, "peak phase shift {:.4}π at δ = {at} MHz", peak / PI)?;
    Ok(report)
}
