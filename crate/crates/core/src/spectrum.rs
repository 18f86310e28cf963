//! Noise traces, squeezing spectra, and the incoherent two-sideband sum.
//!
//! A homodyne measurement at analysis frequency ω_a and two-photon detuning δ
//! collects noise from the sidebands at δ + ω_a and δ − ω_a. They add as
//! power, so every average here is taken on linear noise powers.

use crate::error::{Error, Result};
use crate::grid::{Curve, UniformGrid};
use crate::units::{db_to_linear, linear_to_db, Frequency, NoisePower};

/// Noise versus two-photon detuning at a fixed analysis frequency, with the
/// LO phase set to minimize (`n_min`) and maximize (`n_max`) the noise.
#[derive(Debug, Clone, PartialEq)]
pub struct NoiseTrace {
    grid: UniformGrid,
    n_min: Vec<f64>,
    n_max: Vec<f64>,
    analysis_frequency: Frequency,
}

impl NoiseTrace {
    /// Builds a trace from linear channels (shot noise = 1).
    pub fn from_linear(
        grid: UniformGrid,
        n_min: Vec<f64>,
        n_max: Vec<f64>,
        analysis_frequency: Frequency,
    ) -> Result<Self> {
        if n_min.len() != grid.len() || n_max.len() != grid.len() {
            return Err(Error::Argument(format!(
                "trace channels ({}, {}) do not match grid length {}",
                n_min.len(),
                n_max.len(),
                grid.len()
            )));
        }
        for (i, (&lo, &hi)) in n_min.iter().zip(&n_max).enumerate() {
            if !(lo.is_finite() && lo > 0.0 && hi.is_finite() && hi > 0.0) {
                return Err(Error::data(format!(
                    "row {i}: noise powers must be finite and positive ({lo}, {hi})"
                )));
            }
            if lo > hi {
                return Err(Error::data(format!(
                    "row {i} at {} MHz: min-phase noise {lo} exceeds max-phase noise {hi}",
                    grid.at(i)
                )));
            }
        }
        Ok(NoiseTrace { grid, n_min, n_max, analysis_frequency })
    }

    /// Builds a trace from channels in dB relative to shot noise.
    pub fn from_db(
        grid: UniformGrid,
        n_min_db: &[f64],
        n_max_db: &[f64],
        analysis_frequency: Frequency,
    ) -> Result<Self> {
        let to_lin = |v: &[f64]| v.iter().map(|&x| db_to_linear(x)).collect::<Vec<_>>();
        Self::from_linear(grid, to_lin(n_min_db), to_lin(n_max_db), analysis_frequency)
    }

    pub fn grid(&self) -> &UniformGrid {
        &self.grid
    }

    pub fn analysis_frequency(&self) -> Frequency {
        self.analysis_frequency
    }

    pub fn n_min(&self) -> &[f64] {
        &self.n_min
    }

    pub fn n_max(&self) -> &[f64] {
        &self.n_max
    }

    pub fn min_channel(&self) -> Curve {
        Curve::new(self.grid, self.n_min.clone()).expect("lengths checked at construction")
    }

    pub fn max_channel(&self) -> Curve {
        Curve::new(self.grid, self.n_max.clone()).expect("lengths checked at construction")
    }

    pub fn len(&self) -> usize {
        self.grid.len()
    }

    pub fn is_empty(&self) -> bool {
        self.grid.is_empty()
    }
}

/// Noise versus analysis frequency at a fixed two-photon detuning.
#[derive(Debug, Clone, PartialEq)]
pub struct SqueezingSpectrum {
    omega: Vec<f64>,
    noise_db: Vec<f64>,
    delta: Frequency,
}

impl SqueezingSpectrum {
    pub fn new(omega: Vec<f64>, noise_db: Vec<f64>, delta: Frequency) -> Result<Self> {
        if omega.len() != noise_db.len() {
            return Err(Error::Argument(format!(
                "spectrum has {} frequencies but {} noise values",
                omega.len(),
                noise_db.len()
            )));
        }
        if omega.is_empty() {
            return Err(Error::Argument("spectrum is empty".into()));
        }
        if let Some(i) = omega.windows(2).position(|w| !(w[1] > w[0])) {
            return Err(Error::data(format!(
                "analysis frequencies not strictly increasing at index {}",
                i + 1
            )));
        }
        if omega[0] < 0.0 {
            return Err(Error::Argument("analysis frequencies must be >= 0".into()));
        }
        if noise_db.iter().any(|x| !x.is_finite()) {
            return Err(Error::Argument("spectrum contains non-finite noise values".into()));
        }
        Ok(SqueezingSpectrum { omega, noise_db, delta })
    }

    pub fn omega(&self) -> &[f64] {
        &self.omega
    }

    pub fn noise_db(&self) -> &[f64] {
        &self.noise_db
    }

    pub fn delta(&self) -> Frequency {
        self.delta
    }
}

/// Noise at `(omega_a, delta)` from the zero-analysis-frequency curve `g`
/// (linear units): the mean of the two sideband powers.
pub fn sideband_sum(g: &Curve, omega_a: Frequency, delta: Frequency) -> Result<NoisePower> {
    let (w, d) = (omega_a.value(), delta.value());
    let upper = g
        .interpolate(d + w)
        .map_err(|e| Error::Range(format!("upper sideband at δ+ω_a = {} MHz: {e}", d + w)))?;
    let lower = g
        .interpolate(d - w)
        .map_err(|e| Error::Range(format!("lower sideband at δ−ω_a = {} MHz: {e}", d - w)))?;
    NoisePower::linear((upper + lower) / 2.0)
}

/// Squeezing spectrum at fixed `delta`, one sideband sum per analysis
/// frequency, reported in dB.
pub fn synthesize_spectrum(
    g: &Curve,
    delta: Frequency,
    omega_grid: &[f64],
) -> Result<SqueezingSpectrum> {
    let noise_db = omega_grid
        .iter()
        .map(|&w| {
            let p = sideband_sum(g, Frequency::analysis(w)?, delta)?;
            linear_to_db(p.to_linear())
        })
        .collect::<Result<Vec<_>>>()?;
    SqueezingSpectrum::new(omega_grid.to_vec(), noise_db, delta)
}
