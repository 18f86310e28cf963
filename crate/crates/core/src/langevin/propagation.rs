//! Probe-field propagation `d/dz [α; α*] = [[A, B], [B*, A*]] [α; α*]` and the
//! phase equation `dφ/dz = Im A + Im B cos 2φ − Re B sin 2φ`.

use std::f64::consts::PI;

use num_complex::Complex64;

use super::coefficients::CoefficientSource;
use crate::error::{Error, Result};
use crate::phase::SidebandPhaseShift;

/// Default number of fixed RK4 steps across the cell.
pub const DEFAULT_STEPS: usize = 1000;

/// Probe amplitude α; α* is derived.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct FieldState(pub Complex64);

impl FieldState {
    pub fn amplitude(&self) -> Complex64 {
        self.0
    }

    pub fn phase(&self) -> f64 {
        self.0.arg()
    }
}

/// `(cos or cosh)(r)` and `sin(r)/r` or `sinh(r)/r` for `r² = q`.
fn even_odd(q: f64) -> (f64, f64) {
    let r = q.abs().sqrt();
    if r < 1e-4 {
        // series in q, exact to rounding for |q| < 1e-8
        return (1.0 + q / 2.0 + q * q / 24.0, 1.0 + q / 6.0 + q * q / 120.0);
    }
    if q > 0.0 {
        (r.cosh(), r.sinh() / r)
    } else {
        (r.cos(), r.sin() / r)
    }
}

/// Exact solution over `length` meters via the matrix exponential.
///
/// The generator splits as `Re A · I + N` with `N = [[i Im A, B], [B*, −i Im A]]`
/// and `N² = (|B|² − (Im A)²) I`, so `exp(Nz) = cosh(sz) I + sinh(sz)/s N`.
pub fn propagate(a: Complex64, b: Complex64, alpha0: FieldState, length: f64) -> Result<FieldState> {
    if !(length >= 0.0 && length.is_finite()) {
        return Err(Error::Argument(format!("length must be finite and >= 0, got {length}")));
    }
    if ![a.re, a.im, b.re, b.im, alpha0.0.re, alpha0.0.im].iter().all(|v| v.is_finite()) {
        return Err(Error::Argument("coefficients and initial field must be finite".into()));
    }
    if length == 0.0 {
        return Ok(alpha0);
    }
    let s2 = b.norm_sqr() - a.im * a.im;
    let (c, sinc) = even_odd(s2 * length * length);
    let z = alpha0.0;
    let n_alpha = Complex64::new(0.0, a.im) * z + b * z.conj();
    let out = (a.re * length).exp() * (c * z + sinc * length * n_alpha);
    Ok(FieldState(out))
}

fn phase_rate(a: Complex64, b: Complex64, phi: f64) -> f64 {
    let (s, c) = (2.0 * phi).sin_cos();
    a.im + b.im * c - b.re * s
}

/// Fixed-step classical RK4 integration of the phase equation.
pub fn phase_evolution(a: Complex64, b: Complex64, phi0: f64, length: f64, steps: usize) -> Result<f64> {
    if steps == 0 {
        return Err(Error::Argument("steps must be >= 1".into()));
    }
    if !(length >= 0.0 && length.is_finite()) {
        return Err(Error::Argument(format!("length must be finite and >= 0, got {length}")));
    }
    if ![a.im, b.re, b.im, phi0].iter().all(|v| v.is_finite()) {
        return Err(Error::Argument("coefficients and initial phase must be finite".into()));
    }
    let h = length / steps as f64;
    let mut phi = phi0;
    for i in 0..steps {
        let k1 = phase_rate(a, b, phi);
        let k2 = phase_rate(a, b, phi + 0.5 * h * k1);
        let k3 = phase_rate(a, b, phi + 0.5 * h * k2);
        let k4 = phase_rate(a, b, phi + h * k3);
        phi += h / 6.0 * (k1 + 2.0 * k2 + 2.0 * k3 + k4);
        if !phi.is_finite() {
            return Err(Error::Numerical {
                z: (i + 1) as f64 * h,
                message: "phase became non-finite".into(),
            });
        }
    }
    Ok(phi)
}

/// Output phase φ_α versus two-photon detuning.
#[derive(Debug, Clone, PartialEq)]
pub struct PhaseSweep {
    pub delta: Vec<f64>,
    /// Unwrapped phase φ_α(δ), radians.
    pub phase: Vec<f64>,
    pub phi0: f64,
}

impl PhaseSweep {
    /// φ_α(δ) − φ₀.
    pub fn shift(&self) -> Vec<f64> {
        self.phase.iter().map(|p| p - self.phi0).collect()
    }

    /// Largest shift and the detuning at which it occurs.
    pub fn peak(&self) -> (f64, f64) {
        self.shift()
            .into_iter()
            .zip(&self.delta)
            .fold((f64::NEG_INFINITY, f64::NAN), |acc, (s, &d)| if s > acc.0 { (s, d) } else { acc })
    }

    /// Linear interpolation of φ_α at `delta_mhz`.
    pub fn phase_at(&self, delta_mhz: f64) -> Result<f64> {
        let d = &self.delta;
        let (first, last) = (d[0], d[d.len() - 1]);
        if !(delta_mhz >= first && delta_mhz <= last) {
            return Err(Error::Range(format!(
                "detuning {delta_mhz} MHz outside sweep range [{first}, {last}] MHz"
            )));
        }
        let i = d.partition_point(|&x| x <= delta_mhz).saturating_sub(1);
        if i + 1 >= d.len() || d[i] == delta_mhz {
            return Ok(self.phase[i]);
        }
        let t = (delta_mhz - d[i]) / (d[i + 1] - d[i]);
        Ok(self.phase[i] + t * (self.phase[i + 1] - self.phase[i]))
    }
}

/// Per-detuning phase evolution across the cell, unwrapped by nearest-branch
/// continuation from the previous grid point.
pub fn phase_shift_sweep(
    source: &impl CoefficientSource,
    phi0: f64,
    length: f64,
    delta_grid: &[f64],
    steps: usize,
) -> Result<PhaseSweep> {
    if delta_grid.is_empty() {
        return Err(Error::Argument("detuning grid is empty".into()));
    }
    if let Some(i) = delta_grid.windows(2).position(|w| !(w[1] > w[0])) {
        return Err(Error::Argument(format!("detuning grid not strictly increasing at index {}", i + 1)));
    }
    let mut phase: Vec<f64> = Vec::with_capacity(delta_grid.len());
    for &d in delta_grid {
        let (a, b) = source.coefficients(d)?;
        let raw = phase_evolution(a, b, phi0, length, steps)?;
        let p = match phase.last() {
            Some(&prev) => raw - 2.0 * PI * ((raw - prev) / (2.0 * PI)).round(),
            None => raw,
        };
        phase.push(p);
    }
    Ok(PhaseSweep { delta: delta_grid.to_vec(), phase, phi0 })
}

/// Inter-sideband phase shift `φ_α(δ+ω_a) − φ_α(δ−ω_a)`.
pub fn dphi_for_phase_model(sweep: &PhaseSweep, delta_mhz: f64, omega_mhz: f64) -> Result<SidebandPhaseShift> {
    let upper = sweep.phase_at(delta_mhz + omega_mhz)?;
    let lower = sweep.phase_at(delta_mhz - omega_mhz)?;
    Ok(SidebandPhaseShift(upper - lower))
}
