//! Models for the frequency-dependent rotation of the squeezing ellipse of
//! four-wave-mixing squeezed vacuum.
//!
//! - [`spectrum`]: two-sideband noise synthesis of squeezing spectra.
//! - [`envelope`]: lower envelopes of phase-scanned traces and the
//!   shot-noise-limit frequency.
//! - [`deconvolution`]: recovery of the zero-analysis-frequency noise curve.
//! - [`phase`]: phase-resolved noise, scanned minimum versus locked phase.
//! - [`langevin`]: probe propagation and the detuning-dependent phase shift.

// `!(x > 0.0)` is used on purpose so that NaN is rejected too.
#![allow(clippy::neg_cmp_op_on_partial_ord)]

pub mod deconvolution;
pub mod envelope;
pub mod error;
pub mod fixtures;
pub mod grid;
pub mod langevin;
pub mod phase;
pub mod spectrum;
pub mod units;

pub use error::{Error, Result};
pub use grid::{Curve, UniformGrid};
pub use units::{Frequency, NoisePower};
