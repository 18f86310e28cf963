//! Probe-field propagation through the pumped vapor and the resulting
//! detuning-dependent phase of the squeezed quadrature.

mod coefficients;
mod propagation;

pub use coefficients::{
    ab_phenomenological, CoefficientProfile, CoefficientSource, MediumParams, PROFILE_HEADER,
    REFERENCE_DETUNING_GHZ, REFERENCE_OPTICAL_DEPTH, REFERENCE_PUMP_MW,
};
pub use propagation::{
    dphi_for_phase_model, phase_evolution, phase_shift_sweep, propagate, FieldState, PhaseSweep,
    DEFAULT_STEPS,
};

/// Initial probe phase φ₀, radians, fitted together with the line shape.
pub const DEFAULT_INITIAL_PHASE: f64 = -1.4616;
