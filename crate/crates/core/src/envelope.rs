//! Lower envelopes of phase-scanned noise traces and the shot-noise-limit
//! frequency (SNLF).
//!
//! While the LO phase is scanned, the recorded spectrum oscillates between
//! the squeezed and anti-squeezed quadratures. A low-pass filter alone tracks
//! the mean of those oscillations, so the envelope is taken in two stages: a
//! morphological opening (sliding minimum, then sliding maximum over the same
//! window) isolates the minima, and a zero-phase second-order Butterworth
//! low-pass smooths the result.

use std::collections::VecDeque;

use crate::error::{Error, Result};
use crate::grid::Curve;
use crate::spectrum::SqueezingSpectrum;
use crate::units::Frequency;

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct EnvelopeConfig {
    /// Sliding-window width in MHz; one LO-scan oscillation period.
    pub window_mhz: f64,
    /// Low-pass cutoff, in cycles per MHz of analysis frequency.
    pub cutoff: f64,
}

impl Default for EnvelopeConfig {
    fn default() -> Self {
        EnvelopeConfig { window_mhz: 1.0, cutoff: 0.2 }
    }
}

/// Lower envelope of an oscillating trace sampled in dB on a uniform grid.
pub fn lower_envelope(trace: &Curve, cfg: &EnvelopeConfig) -> Result<Curve> {
    let step = trace.grid().step();
    let n = trace.values().len();
    if trace.values().iter().any(|v| !v.is_finite()) {
        return Err(Error::Argument("trace contains non-finite values".into()));
    }
    if !(cfg.window_mhz > 0.0) {
        return Err(Error::Argument(format!("window must be positive, got {}", cfg.window_mhz)));
    }
    let half = ((cfg.window_mhz / step) / 2.0).round().max(1.0) as usize;
    if 2 * half + 1 > n {
        return Err(Error::Argument(format!(
            "envelope window of {} samples is longer than the trace ({n} samples)",
            2 * half + 1
        )));
    }
    let nyquist = 0.5 / step;
    if !(cfg.cutoff > 0.0 && cfg.cutoff < nyquist) {
        return Err(Error::Argument(format!(
            "cutoff {} must lie in (0, {nyquist}) cycles/MHz for a {step} MHz grid",
            cfg.cutoff
        )));
    }

    // Opening (min then max) lies below the trace and keeps monotone stretches
    // intact. The smoothed curve is clamped to it, so filter overshoot near
    // the edges never lifts the envelope above the trace.
    let eroded = sliding_extremum(trace.values(), half, |a, b| a <= b);
    let opened = sliding_extremum(&eroded, half, |a, b| a >= b);
    let smoothed = Biquad::butterworth_lowpass(cfg.cutoff, step).filtfilt(&opened);
    let envelope = smoothed.iter().zip(&opened).map(|(s, o)| s.min(*o)).collect();
    Curve::new(*trace.grid(), envelope)
}

/// Centered sliding extremum over `[i - half, i + half]`, truncated at the
/// edges (monotonic deque). `keep(a, b)` is true when `a` dominates `b`.
fn sliding_extremum(x: &[f64], half: usize, keep: impl Fn(f64, f64) -> bool) -> Vec<f64> {
    let n = x.len();
    let mut out = Vec::with_capacity(n);
    let mut dq: VecDeque<usize> = VecDeque::new();
    let mut next = 0;
    for i in 0..n {
        let (lo, hi) = (i.saturating_sub(half), (i + half).min(n - 1));
        while next <= hi {
            while let Some(&back) = dq.back() {
                if keep(x[next], x[back]) {
                    dq.pop_back();
                } else {
                    break;
                }
            }
            dq.push_back(next);
            next += 1;
        }
        while let Some(&front) = dq.front() {
            if front < lo {
                dq.pop_front();
            } else {
                break;
            }
        }
        out.push(x[*dq.front().expect("window is never empty")]);
    }
    out
}

/// Second-order IIR section, transposed direct form II.
#[derive(Debug, Clone, Copy)]
struct Biquad {
    b: [f64; 3],
    a: [f64; 2],
}

impl Biquad {
    /// Bilinear-transform Butterworth low-pass; `cutoff` in cycles per unit
    /// of the sampling variable, `step` the sample spacing.
    fn butterworth_lowpass(cutoff: f64, step: f64) -> Self {
        let k = (std::f64::consts::PI * cutoff * step).tan();
        let q = std::f64::consts::FRAC_1_SQRT_2;
        let norm = 1.0 / (1.0 + k / q + k * k);
        let b0 = k * k * norm;
        Biquad {
            b: [b0, 2.0 * b0, b0],
            a: [2.0 * (k * k - 1.0) * norm, (1.0 - k / q + k * k) * norm],
        }
    }

    fn run(&self, x: &[f64]) -> Vec<f64> {
        let [b0, b1, b2] = self.b;
        let [a1, a2] = self.a;
        // start in steady state for a constant input equal to x[0]
        let x0 = x[0];
        let mut z2 = (b2 - a2) * x0;
        let mut z1 = (b1 - a1) * x0 + z2;
        x.iter()
            .map(|&xi| {
                let y = b0 * xi + z1;
                z1 = b1 * xi - a1 * y + z2;
                z2 = b2 * xi - a2 * y;
                y
            })
            .collect()
    }

    /// Forward-backward filtering with odd-reflection padding at both ends.
    fn filtfilt(&self, x: &[f64]) -> Vec<f64> {
        let n = x.len();
        if n < 2 {
            return x.to_vec();
        }
        let pad = (n - 1).min(9.max(self.settling_samples()));
        let mut ext = Vec::with_capacity(n + 2 * pad);
        ext.extend((1..=pad).rev().map(|k| 2.0 * x[0] - x[k]));
        ext.extend_from_slice(x);
        ext.extend((1..=pad).map(|k| 2.0 * x[n - 1] - x[n - 1 - k]));

        let mut y = self.run(&ext);
        y.reverse();
        let mut y = self.run(&y);
        y.reverse();
        y[pad..pad + n].to_vec()
    }

    /// Rough number of samples for the impulse response to decay.
    fn settling_samples(&self) -> usize {
        // pole radius of the section
        let r = self.a[1].abs().sqrt();
        if r >= 1.0 {
            return usize::MAX / 4;
        }
        (3.0 * 7.0 / -r.ln()).ceil() as usize
    }
}

/// Outcome of the shot-noise-limit frequency search.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum Snlf {
    /// The envelope crosses from below to above the SNL at this frequency.
    Crossing(Frequency),
    /// The envelope never dips below 0 dB.
    NoSqueezing,
    /// The envelope is squeezed somewhere but never returns to the SNL on
    /// the sampled grid.
    SqueezedToEdge,
}

impl Snlf {
    pub fn frequency(&self) -> Option<Frequency> {
        match self {
            Snlf::Crossing(f) => Some(*f),
            _ => None,
        }
    }
}

/// First upward 0 dB crossing of an envelope sampled at increasing
/// analysis frequencies, located by linear interpolation.
pub fn snlf(omega: &[f64], envelope_db: &[f64]) -> Result<Snlf> {
    if omega.is_empty() || envelope_db.is_empty() {
        return Err(Error::Argument("empty envelope".into()));
    }
    if omega.len() != envelope_db.len() {
        return Err(Error::Argument(format!(
            "envelope has {} frequencies but {} values",
            omega.len(),
            envelope_db.len()
        )));
    }
    if envelope_db.iter().chain(omega).any(|v| !v.is_finite()) {
        return Err(Error::Argument("envelope contains non-finite values".into()));
    }
    for i in 1..omega.len() {
        let (e0, e1) = (envelope_db[i - 1], envelope_db[i]);
        if e0 < 0.0 && e1 >= 0.0 {
            let t = -e0 / (e1 - e0);
            let w = omega[i - 1] + t * (omega[i] - omega[i - 1]);
            return Ok(Snlf::Crossing(Frequency::mhz(w)?));
        }
    }
    if envelope_db.iter().any(|&e| e < 0.0) {
        Ok(Snlf::SqueezedToEdge)
    } else {
        Ok(Snlf::NoSqueezing)
    }
}

impl SqueezingSpectrum {
    pub fn snlf(&self) -> Result<Snlf> {
        snlf(self.omega(), self.noise_db())
    }
}
