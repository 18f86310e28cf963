//! Recovery of the zero-analysis-frequency noise curve from a trace measured
//! at analysis frequency `a`.
//!
//! The measured curve obeys the shift-and-add model `f(δ) = g(δ+a) + g(δ−a)`.
//! In the conjugate variable `t` this is multiplication by `2cos(2πat)`, which
//! vanishes at `t = (2k+1)/(4a)`. The inverse is regularized as
//! `cos / (2(cos² + ε))`, which reduces to the plain division as `ε → 0`.
//!
//! Measured traces are not periodic, so before transforming the linear
//! baseline through the end points is removed, the residual is tapered with a
//! raised cosine and zero padded. A linear baseline `b` satisfies
//! `b(δ+a) + b(δ−a) = 2b(δ)`, so `b/2` is added back after inversion.

use std::f64::consts::PI;

use num_complex::Complex64;
use rustfft::FftPlanner;

use crate::error::{Error, Result};
use crate::grid::{Curve, UniformGrid};
use crate::units::Frequency;

/// Edge treatment applied before transforming.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum Taper {
    /// Treat the input as one period of a periodic signal.
    None,
    /// Remove the end-point baseline and taper the residual with a raised
    /// cosine over `fraction` of the span at each end.
    RaisedCosine { fraction: f64 },
}

impl Default for Taper {
    fn default() -> Self {
        Taper::RaisedCosine { fraction: 0.1 }
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct DeconvolutionConfig {
    /// Analysis frequency of the measured trace.
    pub shift_a: Frequency,
    pub regularization_eps: f64,
    pub taper: Taper,
    pub pad_factor: usize,
}

impl Default for DeconvolutionConfig {
    fn default() -> Self {
        DeconvolutionConfig {
            shift_a: Frequency::mhz(1.0).expect("finite"),
            regularization_eps: 1e-3,
            taper: Taper::default(),
            pad_factor: 4,
        }
    }
}

impl DeconvolutionConfig {
    pub fn validate(&self) -> Result<()> {
        if !(self.shift_a.value() > 0.0) {
            return Err(Error::Argument(format!("shift a must be > 0, got {}", self.shift_a)));
        }
        if !(self.regularization_eps >= 0.0 && self.regularization_eps.is_finite()) {
            return Err(Error::Argument(format!(
                "regularization eps must be finite and >= 0, got {}",
                self.regularization_eps
            )));
        }
        if !(1..=16).contains(&self.pad_factor) {
            return Err(Error::Argument(format!(
                "pad factor must be in [1, 16], got {}",
                self.pad_factor
            )));
        }
        if let Taper::RaisedCosine { fraction } = self.taper {
            if !(0.0..=0.5).contains(&fraction) {
                return Err(Error::Argument(format!(
                    "taper fraction must be in [0, 0.5], got {fraction}"
                )));
            }
        }
        Ok(())
    }
}

/// Output of [`deconvolve`].
#[derive(Debug, Clone, PartialEq)]
pub struct Deconvolved {
    /// Zero-analysis-frequency curve on the working grid (the input grid,
    /// or a refined grid whose spacing divides `a`).
    pub curve: Curve,
    /// ‖Im g‖ / ‖Re g‖ after the inverse transform.
    pub imaginary_residue: f64,
}

/// Kernel values below this are treated as zeros of `cos(2πat)` when
/// `ε = 0`, and the corresponding bins are dropped.
const KERNEL_NULL_TOL: f64 = 1e-9;

/// Relative tolerance for `a` being an integer number of grid steps.
const SHIFT_TOL: f64 = 1e-9;

/// Number of grid steps in `a`, if `a` is an integer multiple of `step`.
fn shift_steps(step: f64, a: f64) -> Option<usize> {
    let ratio = a / step;
    let k = ratio.round();
    if k >= 1.0 && ((ratio - k) / k).abs() <= SHIFT_TOL {
        Some(k as usize)
    } else {
        None
    }
}

/// Returns the curve on a grid whose spacing divides `a`, together with the
/// shift in samples. Off-grid shifts are handled by band-limited resampling
/// onto the next finer such grid.
pub fn align_to_shift(curve: &Curve, a: Frequency) -> Result<(Curve, usize)> {
    let step = curve.grid().step();
    let a = a.value();
    if let Some(k) = shift_steps(step, a) {
        return Ok((curve.clone(), k));
    }
    let m = (a / step).ceil().max(1.0);
    let new_step = a / m;
    let resampled = resample_band_limited(curve, new_step)?;
    let k = shift_steps(resampled.grid().step(), a).ok_or_else(|| {
        Error::Argument(format!("shift {a} MHz is not representable on the resampled grid"))
    })?;
    Ok((resampled, k))
}

/// Trigonometric interpolation of the detrended curve onto a new spacing.
fn resample_band_limited(curve: &Curve, new_step: f64) -> Result<Curve> {
    let grid = curve.grid();
    let n = grid.len();
    if n < 2 {
        return Err(Error::Argument("cannot resample a single-point curve".into()));
    }
    let v = curve.values();
    let (b0, b1) = (v[0], v[n - 1]);
    let baseline = |p: f64| b0 + (b1 - b0) * p / (n - 1) as f64;
    let mut spec: Vec<Complex64> =
        v.iter().enumerate().map(|(i, &x)| Complex64::new(x - baseline(i as f64), 0.0)).collect();
    FftPlanner::new().plan_fft_forward(n).process(&mut spec);

    let new_grid = UniformGrid::span(grid.start(), grid.end(), new_step)?;
    let values = new_grid
        .points()
        .map(|x| {
            let p = grid.position(x);
            let mut acc = spec[0].re;
            for (j, c) in spec.iter().enumerate().take(n / 2 + 1).skip(1) {
                let phase = Complex64::from_polar(1.0, 2.0 * PI * j as f64 * p / n as f64);
                // Nyquist bin of an even-length transform is shared by ±j
                let w = if 2 * j == n { 1.0 } else { 2.0 };
                acc += w * (c * phase).re;
            }
            acc / n as f64 + baseline(p)
        })
        .collect();
    Curve::new(new_grid, values)
}

/// Shift-and-add forward model `f(δ) = g(δ+a) + g(δ−a)` on the interior grid
/// where both shifted samples exist.
pub fn forward_model(g: &Curve, a: Frequency) -> Result<Curve> {
    if !(a.value() > 0.0) {
        return Err(Error::Argument(format!("shift a must be > 0, got {a}")));
    }
    let (g, k) = align_to_shift(g, a)?;
    shift_and_add(&g, k)
}

fn shift_and_add(g: &Curve, k: usize) -> Result<Curve> {
    let n = g.grid().len();
    if n <= 2 * k {
        return Err(Error::Argument(format!(
            "grid of {n} points has no interior for a shift of {k} samples"
        )));
    }
    let v = g.values();
    let values = (k..n - k).map(|i| v[i + k] + v[i - k]).collect();
    let grid = UniformGrid::new(g.grid().at(k), g.grid().step(), n - 2 * k)?;
    Curve::new(grid, values)
}

/// Regularized Fourier inversion of the shift-and-add model.
pub fn deconvolve(f: &Curve, cfg: &DeconvolutionConfig) -> Result<Deconvolved> {
    cfg.validate()?;
    if f.values().iter().any(|v| !v.is_finite()) {
        return Err(Error::Argument("input curve contains NaN or infinite values".into()));
    }
    let (work, k) = align_to_shift(f, cfg.shift_a)?;
    let n = work.grid().len();
    let step = work.grid().step();
    let a = cfg.shift_a.value();
    if (n as f64) * step < 4.0 * a {
        return Err(Error::Argument(format!(
            "grid span {} MHz is too short to resolve the kernel period 1/(2a) for a = {a} MHz",
            n as f64 * step
        )));
    }

    let v = work.values();
    let baseline: Vec<f64> = match cfg.taper {
        Taper::None => vec![0.0; n],
        Taper::RaisedCosine { .. } => {
            let (b0, b1) = (v[0], v[n - 1]);
            (0..n).map(|i| b0 + (b1 - b0) * i as f64 / (n - 1).max(1) as f64).collect()
        }
    };
    let window = taper_window(cfg.taper, n);

    let m = n * cfg.pad_factor;
    let mut buf = vec![Complex64::new(0.0, 0.0); m];
    for i in 0..n {
        buf[i] = Complex64::new((v[i] - baseline[i]) * window[i], 0.0);
    }

    let mut planner = FftPlanner::new();
    planner.plan_fft_forward(m).process(&mut buf);
    let unitary = 1.0 / (m as f64).sqrt();
    let eps = cfg.regularization_eps;
    for (j, z) in buf.iter_mut().enumerate() {
        // a·t_j with t_j = j/(m·step) folded to the signed frequency
        let j = if j <= m / 2 { j as f64 } else { j as f64 - m as f64 };
        let c = (2.0 * PI * j * k as f64 / m as f64).cos();
        // exact kernel nulls evaluate to ~1e-16 rather than 0
        let h = if c.abs() < KERNEL_NULL_TOL && eps == 0.0 { 0.0 } else { c / (2.0 * (c * c + eps)) };
        *z *= h * unitary;
    }
    planner.plan_fft_inverse(m).process(&mut buf);

    let re: Vec<f64> = (0..n).map(|i| buf[i].re * unitary + baseline[i] / 2.0).collect();
    let im_norm = (0..n).map(|i| (buf[i].im * unitary).powi(2)).sum::<f64>().sqrt();
    let re_norm = re.iter().map(|x| x * x).sum::<f64>().sqrt();
    let imaginary_residue = if re_norm > 0.0 { im_norm / re_norm } else { im_norm };

    Ok(Deconvolved { curve: Curve::new(*work.grid(), re)?, imaginary_residue })
}

fn taper_window(taper: Taper, n: usize) -> Vec<f64> {
    let mut w = vec![1.0; n];
    if let Taper::RaisedCosine { fraction } = taper {
        let ramp = ((fraction * (n - 1) as f64).round() as usize).min(n / 2);
        for i in 0..ramp {
            let x = 0.5 * (1.0 - (PI * i as f64 / ramp as f64).cos());
            w[i] = x;
            w[n - 1 - i] = x;
        }
    }
    w
}

/// ‖forward_model(deconvolve(f)) − f‖ / ‖f‖ over the common support.
pub fn roundtrip_residual(f: &Curve, cfg: &DeconvolutionConfig) -> Result<f64> {
    let g = deconvolve(f, cfg)?.curve;
    let (work, k) = align_to_shift(f, cfg.shift_a)?;
    let back = shift_and_add(&g, k)?;
    let reference = &work.values()[k..k + back.values().len()];
    let num: f64 = back.values().iter().zip(reference).map(|(x, y)| (x - y).powi(2)).sum();
    let den: f64 = reference.iter().map(|y| y * y).sum();
    if den == 0.0 {
        return Ok(num.sqrt());
    }
    Ok((num / den).sqrt())
}

/// Zero-analysis-frequency noise curve from a measured channel in linear
/// units. The measurement averages the two sidebands, so it is doubled to
/// obtain the shift-and-add input.
pub fn recover_zero_frequency(measured: &Curve, cfg: &DeconvolutionConfig) -> Result<Deconvolved> {
    deconvolve(&measured.map(|x| 2.0 * x), cfg)
}
