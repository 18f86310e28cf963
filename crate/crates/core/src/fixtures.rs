//! Synthetic noise curves for tests and demonstrations.
//!
//! These are analytic shapes, not measured data. The two-photon-detuning
//! trace reproduces the qualitative features of a phase-sensitive 4WM
//! squeezer: a squeezing dip near δ = −2 MHz over a broad squeezed band on
//! the red side, and excess noise peaking near δ = +18 MHz on the gain line,
//! with tails returning to the shot-noise limit.

use crate::error::Result;
use crate::grid::{Curve, UniformGrid};
use crate::spectrum::NoiseTrace;
use crate::units::{db_to_linear, Frequency};

/// Detuning span and spacing of the shipped trace, MHz.
pub const TRACE_START: f64 = -80.0;
pub const TRACE_STOP: f64 = 80.0;
pub const TRACE_STEP: f64 = 0.25;

fn logistic(u: f64) -> f64 {
    1.0 / (1.0 + (-u).exp())
}

/// Zero-analysis-frequency min-phase noise, dB.
pub fn zero_frequency_min_db(x: f64) -> f64 {
    let plateau = -3.2 * logistic((x + 50.0) / 2.5) * logistic(-(x - 3.0) / 1.2);
    let dip = -1.6 * (-(x + 2.0).powi(2) / (2.0 * 2.5 * 2.5)).exp();
    let excess = 7.0 * logistic((x - 6.2) / 1.6) * logistic(-(x - 30.0) / 3.0);
    plateau + dip + excess
}

/// Zero-analysis-frequency max-phase noise, dB.
pub fn zero_frequency_max_db(x: f64) -> f64 {
    let anti = 8.0 * logistic((x + 50.0) / 2.5) * logistic(-(x - 30.0) / 3.0);
    let peak = 7.0 * (-(x - 18.0).powi(2) / (2.0 * 5.0 * 5.0)).exp();
    anti + peak
}

pub fn trace_grid() -> UniformGrid {
    UniformGrid::span(TRACE_START, TRACE_STOP, TRACE_STEP).expect("static grid")
}

/// Zero-analysis-frequency (min, max) channels in linear units.
pub fn zero_frequency_curves() -> (Curve, Curve) {
    let grid = trace_grid();
    (
        Curve::from_fn(grid, |x| db_to_linear(zero_frequency_min_db(x))),
        Curve::from_fn(grid, |x| db_to_linear(zero_frequency_max_db(x))),
    )
}

/// The trace as measured at analysis frequency `a`: each channel is the
/// two-sideband average of the zero-frequency curve.
pub fn synthetic_trace_at(a: f64) -> Result<NoiseTrace> {
    let grid = trace_grid();
    let measure = |f: fn(f64) -> f64| -> Vec<f64> {
        grid.points()
            .map(|x| (db_to_linear(f(x + a)) + db_to_linear(f(x - a))) / 2.0)
            .collect()
    };
    NoiseTrace::from_linear(
        grid,
        measure(zero_frequency_min_db),
        measure(zero_frequency_max_db),
        Frequency::analysis(a)?,
    )
}

/// The shipped trace, measured at 1 MHz.
pub fn synthetic_trace() -> NoiseTrace {
    synthetic_trace_at(1.0).expect("static fixture")
}

/// Single-sided zero-frequency curve in dB: squeezed (about −3.5 dB, slowly
/// varying) for δ ≤ 0 and rising smoothly to strong excess noise over the first 3 MHz above.
pub fn single_sided_db(x: f64) -> f64 {
    if x <= 0.0 {
        -3.5 + 0.004 * x
    } else {
        let t = (x / 3.0).min(1.0);
        let smooth = t * t * (3.0 - 2.0 * t);
        -3.5 + 15.5 * smooth
    }
}

/// [`single_sided_db`] sampled in linear units on `[-80, 80]` MHz.
pub fn single_sided() -> Curve {
    Curve::from_fn(UniformGrid::span(-80.0, 80.0, 0.05).expect("static grid"), |x| {
        db_to_linear(single_sided_db(x))
    })
}
