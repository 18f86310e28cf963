//! Phase-resolved noise and the locked-versus-scanned comparison.
//!
//! At zero analysis frequency and detuning δ', the noise seen at LO phase φ is
//! `N₊ + N₋ cos φ`, with the maximum at φ = 0 and the minimum at φ = π. Two
//! sidebands contribute incoherently, the upper one offset in phase by Δφ.
//! The phase parameter is 2π-periodic; the quadrature (ellipse) angle is φ/2.

use std::f64::consts::PI;

use num_complex::Complex64;

use crate::error::{Error, Result};
use crate::grid::{Curve, UniformGrid};
use crate::spectrum::NoiseTrace;
use crate::units::{Frequency, NoisePower};

/// Below this magnitude the combined sinusoid is treated as constant in φ.
pub const DEGENERACY_TOL: f64 = 1e-12;

/// Relative slack allowed when deconvolved channels cross by rounding noise.
const ORDERING_TOL: f64 = 1e-9;

/// LO phase in radians, 2π-periodic.
#[derive(Debug, Clone, Copy, PartialEq, PartialOrd)]
pub struct LoPhase(pub f64);

impl LoPhase {
    /// The phase folded into `[0, 2π)`.
    pub fn normalized(self) -> f64 {
        self.0.rem_euclid(2.0 * PI)
    }

    /// Orientation of the noise ellipse, half the LO phase.
    pub fn ellipse_angle(self) -> f64 {
        self.normalized() / 2.0
    }
}

/// Phase offset of the upper sideband relative to the lower one, radians.
#[derive(Debug, Clone, Copy, PartialEq, PartialOrd, Default)]
pub struct SidebandPhaseShift(pub f64);

/// Sinusoidal phase dependence at one detuning.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SidebandNoise {
    pub plus: f64,
    pub minus: f64,
}

impl SidebandNoise {
    pub fn at_phase(&self, phi: LoPhase) -> f64 {
        self.plus + self.minus * phi.0.cos()
    }
}

/// (N₊, N₋) per detuning, in linear units.
#[derive(Debug, Clone, PartialEq)]
pub struct PhaseResolvedNoise {
    grid: UniformGrid,
    n_plus: Vec<f64>,
    n_minus: Vec<f64>,
}

impl PhaseResolvedNoise {
    /// From min-phase and max-phase channels on a shared grid.
    pub fn from_channels(min: &Curve, max: &Curve) -> Result<Self> {
        if min.grid() != max.grid() {
            return Err(Error::Argument("min and max channels are on different grids".into()));
        }
        let mut n_plus = Vec::with_capacity(min.values().len());
        let mut n_minus = Vec::with_capacity(min.values().len());
        for (i, (&lo, &hi)) in min.values().iter().zip(max.values()).enumerate() {
            if !(lo > 0.0 && lo.is_finite() && hi.is_finite()) {
                return Err(Error::data(format!(
                    "row {i} at {} MHz: channels must be positive and finite ({lo}, {hi})",
                    min.grid().at(i)
                )));
            }
            if lo > hi + ORDERING_TOL * hi.abs() {
                return Err(Error::data(format!(
                    "row {i} at {} MHz: min-phase noise {lo} exceeds max-phase noise {hi}",
                    min.grid().at(i)
                )));
            }
            n_plus.push((hi + lo) / 2.0);
            n_minus.push(((hi - lo) / 2.0).max(0.0));
        }
        Ok(PhaseResolvedNoise { grid: *min.grid(), n_plus, n_minus })
    }

    pub fn grid(&self) -> &UniformGrid {
        &self.grid
    }

    pub fn n_plus(&self) -> &[f64] {
        &self.n_plus
    }

    pub fn n_minus(&self) -> &[f64] {
        &self.n_minus
    }

    /// Phase dependence at an exact grid detuning.
    pub fn at(&self, detuning: Frequency) -> Result<SidebandNoise> {
        let i = self.grid.node(detuning.value()).ok_or_else(|| {
            Error::Range(format!(
                "detuning {detuning} is not on the phase-resolved grid \
                 (start {} MHz, step {} MHz, {} points)",
                self.grid.start(),
                self.grid.step(),
                self.grid.len()
            ))
        })?;
        Ok(SidebandNoise { plus: self.n_plus[i], minus: self.n_minus[i] })
    }

    fn sidebands(&self, omega_a: Frequency, delta: Frequency) -> Result<(SidebandNoise, SidebandNoise)> {
        let (w, d) = (omega_a.value(), delta.value());
        let lower = self.at(Frequency::mhz(d - w)?)?;
        let upper = self.at(Frequency::mhz(d + w)?)?;
        Ok((lower, upper))
    }
}

/// N₊ = (max + min)/2 and N₋ = (max − min)/2 from a measured trace.
pub fn build_phase_resolved(trace: &NoiseTrace) -> Result<PhaseResolvedNoise> {
    PhaseResolvedNoise::from_channels(&trace.min_channel(), &trace.max_channel())
}

pub fn noise_at_phase(p: &PhaseResolvedNoise, detuning: Frequency, phi: LoPhase) -> Result<NoisePower> {
    NoisePower::linear(p.at(detuning)?.at_phase(phi))
}

/// Mean of the lower sideband at φ and the upper sideband at φ + Δφ.
pub fn two_sideband_noise(
    p: &PhaseResolvedNoise,
    omega_a: Frequency,
    delta: Frequency,
    phi: LoPhase,
    dphi: SidebandPhaseShift,
) -> Result<NoisePower> {
    let (lower, upper) = p.sidebands(omega_a, delta)?;
    let n = (lower.at_phase(phi) + upper.at_phase(LoPhase(phi.0 + dphi.0))) / 2.0;
    NoisePower::linear(n)
}

/// Minimum over LO phase and the phase that attains it.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct PhaseMinimum {
    pub noise: NoisePower,
    pub phase: LoPhase,
    /// The noise does not depend on φ; `phase` is the conventional π.
    pub degenerate: bool,
}

/// Phasor of the φ-dependent part: `N₋ᴸ + N₋ᵁ e^{iΔφ}`.
fn combined_phasor(lower: &SidebandNoise, upper: &SidebandNoise, dphi: SidebandPhaseShift) -> Complex64 {
    Complex64::new(lower.minus, 0.0) + Complex64::from_polar(upper.minus, dphi.0)
}

fn minimizer(z: Complex64) -> (LoPhase, bool) {
    if z.norm() < DEGENERACY_TOL {
        (LoPhase(PI), true)
    } else {
        (LoPhase(PI - z.arg()), false)
    }
}

/// Closed-form minimum of the two-sideband noise over LO phase.
///
/// Writing the noise as `P + Re[Z e^{iφ}]/2` with `P = (N₊ᴸ + N₊ᵁ)/2` and
/// `Z = N₋ᴸ + N₋ᵁ e^{iΔφ}`, the minimum is `P − |Z|/2` at `φ* = π − arg Z`.
pub fn n_min(
    p: &PhaseResolvedNoise,
    omega_a: Frequency,
    delta: Frequency,
    dphi: SidebandPhaseShift,
) -> Result<PhaseMinimum> {
    let (lower, upper) = p.sidebands(omega_a, delta)?;
    min_over_phase(&lower, &upper, dphi)
}

/// [`n_min`] for an explicit pair of sidebands.
pub fn min_over_phase(
    lower: &SidebandNoise,
    upper: &SidebandNoise,
    dphi: SidebandPhaseShift,
) -> Result<PhaseMinimum> {
    let z = combined_phasor(lower, upper, dphi);
    let mean = (lower.plus + upper.plus) / 2.0;
    let (phase, degenerate) = minimizer(z);
    Ok(PhaseMinimum { noise: NoisePower::linear(mean - z.norm() / 2.0)?, phase, degenerate })
}

/// Two-sideband noise with the LO phase frozen at `phi1`.
pub fn n_locked(
    p: &PhaseResolvedNoise,
    omega_a: Frequency,
    delta: Frequency,
    dphi: SidebandPhaseShift,
    phi1: LoPhase,
) -> Result<NoisePower> {
    two_sideband_noise(p, omega_a, delta, phi1, dphi)
}

/// Locking phase: the minimizer at the lock analysis frequency.
pub fn lock_phase(
    p: &PhaseResolvedNoise,
    delta: Frequency,
    dphi: SidebandPhaseShift,
    lock_omega: Frequency,
) -> Result<PhaseMinimum> {
    n_min(p, lock_omega, delta, dphi)
}

/// Scanned-minimum and locked spectra over a sweep of analysis frequencies.
#[derive(Debug, Clone, PartialEq)]
pub struct PhaseComparison {
    pub delta: Frequency,
    pub lock: PhaseMinimum,
    pub omega: Vec<f64>,
    pub n_min: Vec<f64>,
    pub n_locked: Vec<f64>,
    pub optimal_phase: Vec<f64>,
    pub dphi: Vec<f64>,
}

/// Sweeps `omegas` at fixed `delta`. `dphi` supplies Δφ per analysis
/// frequency, which allows both a scalar and a detuning-derived shift.
pub fn compare_sweep(
    p: &PhaseResolvedNoise,
    delta: Frequency,
    omegas: &[f64],
    lock_omega: Frequency,
    dphi: impl Fn(Frequency) -> Result<SidebandPhaseShift>,
) -> Result<PhaseComparison> {
    let lock = lock_phase(p, delta, dphi(lock_omega)?, lock_omega)?;
    let mut out = PhaseComparison {
        delta,
        lock,
        omega: Vec::with_capacity(omegas.len()),
        n_min: Vec::with_capacity(omegas.len()),
        n_locked: Vec::with_capacity(omegas.len()),
        optimal_phase: Vec::with_capacity(omegas.len()),
        dphi: Vec::with_capacity(omegas.len()),
    };
    for &w in omegas {
        let omega = Frequency::analysis(w)?;
        let shift = dphi(omega)?;
        let min = n_min(p, omega, delta, shift)?;
        let locked = n_locked(p, omega, delta, shift, lock.phase)?;
        out.omega.push(w);
        out.n_min.push(min.noise.to_linear());
        out.n_locked.push(locked.to_linear());
        out.optimal_phase.push(min.phase.normalized());
        out.dphi.push(shift.0);
    }
    Ok(out)
}
