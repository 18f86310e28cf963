//! Physical quantities and unit conventions.
//!
//! Frequencies are carried in MHz. Noise powers are relative to the shot-noise
//! limit and are always tagged with their representation, so a dB value can
//! never be mistaken for a linear one.

use std::fmt;

use crate::error::{Error, Result};

/// Reduced Planck constant (CODATA 2018), J·s.
pub const HBAR: f64 = 1.054_571_817e-34;

/// Ground-state hyperfine splitting of the 85Rb D1 line, MHz.
pub const HYPERFINE_SPLITTING: Frequency = Frequency(3036.0);

/// A frequency in MHz. Used both for two-photon detunings (any sign) and
/// analysis frequencies (non-negative).
#[derive(Debug, Clone, Copy, PartialEq, PartialOrd, Default)]
pub struct Frequency(f64);

impl Frequency {
    pub fn mhz(value: f64) -> Result<Self> {
        if !value.is_finite() {
            return Err(Error::Argument(format!("frequency must be finite, got {value}")));
        }
        Ok(Frequency(value))
    }

    /// An analysis frequency, which must be non-negative.
    pub fn analysis(value: f64) -> Result<Self> {
        let f = Self::mhz(value)?;
        if value < 0.0 {
            return Err(Error::Argument(format!(
                "analysis frequency must be >= 0 MHz, got {value}"
            )));
        }
        Ok(f)
    }

    pub fn value(self) -> f64 {
        self.0
    }
}

impl fmt::Display for Frequency {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{} MHz", self.0)
    }
}

/// Noise power relative to the shot-noise limit.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum NoisePower {
    /// Decibels, SNL = 0 dB.
    Db(f64),
    /// Linear power, SNL = 1.0.
    Linear(f64),
}

impl NoisePower {
    pub const SHOT_NOISE: NoisePower = NoisePower::Linear(1.0);

    pub fn db(value: f64) -> Result<Self> {
        if !value.is_finite() {
            return Err(Error::Argument(format!("dB noise power must be finite, got {value}")));
        }
        Ok(NoisePower::Db(value))
    }

    pub fn linear(value: f64) -> Result<Self> {
        if !(value.is_finite() && value > 0.0) {
            return Err(Error::Domain(format!(
                "linear noise power must be finite and > 0, got {value}"
            )));
        }
        Ok(NoisePower::Linear(value))
    }

    pub fn to_linear(self) -> f64 {
        match self {
            NoisePower::Db(x) => db_to_linear(x),
            NoisePower::Linear(x) => x,
        }
    }

    pub fn to_db(self) -> Result<f64> {
        match self {
            NoisePower::Db(x) => Ok(x),
            NoisePower::Linear(x) => linear_to_db(x),
        }
    }
}

pub fn db_to_linear(db: f64) -> f64 {
    10f64.powf(db / 10.0)
}

pub fn linear_to_db(linear: f64) -> Result<f64> {
    if !(linear > 0.0) || !linear.is_finite() {
        return Err(Error::Domain(format!(
            "cannot express non-positive or non-finite power {linear} in dB"
        )));
    }
    Ok(10.0 * linear.log10())
}

/// Measurement time and mirror mass for the standard quantum limit.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SqlParams {
    tau: f64,
    mass: f64,
}

impl SqlParams {
    /// `tau` in seconds, `mass` in kilograms; both must be positive.
    pub fn new(tau: f64, mass: f64) -> Result<Self> {
        if !(tau.is_finite() && tau > 0.0) {
            return Err(Error::Argument(format!("measurement time must be > 0 s, got {tau}")));
        }
        if !(mass.is_finite() && mass > 0.0) {
            return Err(Error::Argument(format!("mirror mass must be > 0 kg, got {mass}")));
        }
        Ok(SqlParams { tau, mass })
    }

    pub fn tau(&self) -> f64 {
        self.tau
    }

    pub fn mass(&self) -> f64 {
        self.mass
    }
}

/// Standard-quantum-limit arm-length sensitivity sqrt(ħτ/m), in meters.
pub fn sql_displacement(p: &SqlParams) -> f64 {
    (HBAR * p.tau / p.mass).sqrt()
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_relative_eq;

    #[test]
    fn db_conversion_examples() {
        assert_eq!(db_to_linear(0.0), 1.0);
        assert_relative_eq!(db_to_linear(-4.0), 0.398_107_170_553_497_2, max_relative = 1e-14);
        assert_relative_eq!(db_to_linear(3.0103), 2.0, max_relative = 1e-5);
    }

    #[test]
    fn db_round_trip() {
        for &x in &[-30.0, -4.0, -0.1, 0.0, 1e-9, 3.0103, 17.5] {
            let back = linear_to_db(db_to_linear(x)).unwrap();
            assert!((back - x).abs() <= 1e-12 * x.abs().max(1.0));
        }
    }

    #[test]
    fn inverse_rejects_non_positive() {
        assert!(matches!(linear_to_db(0.0), Err(Error::Domain(_))));
        assert!(matches!(linear_to_db(-1.0), Err(Error::Domain(_))));
        assert!(NoisePower::linear(0.0).is_err());
        assert!(NoisePower::db(f64::NAN).is_err());
    }

    #[test]
    fn tagged_noise_power() {
        assert_eq!(NoisePower::Db(0.0).to_linear(), 1.0);
        assert_eq!(NoisePower::SHOT_NOISE.to_db().unwrap(), 0.0);
        assert_relative_eq!(NoisePower::Linear(0.55).to_db().unwrap(), -2.596_373_105_057_561, max_relative = 1e-12);
    }

    #[test]
    fn sql_examples() {
        let unit = sql_displacement(&SqlParams::new(1.0, 1.0).unwrap());
        assert_relative_eq!(unit, 1.026_923_471_832_249e-17, max_relative = 1e-10);
        let four_tau = sql_displacement(&SqlParams::new(4.0, 1.0).unwrap());
        let four_mass = sql_displacement(&SqlParams::new(1.0, 4.0).unwrap());
        assert_relative_eq!(four_tau, 2.0 * unit, max_relative = 1e-15);
        assert_relative_eq!(four_mass, 0.5 * unit, max_relative = 1e-15);
    }

    #[test]
    fn sql_params_validated() {
        assert!(SqlParams::new(0.0, 1.0).is_err());
        assert!(SqlParams::new(1.0, -2.0).is_err());
    }

    #[test]
    fn analysis_frequency_non_negative() {
        assert!(Frequency::analysis(-1.0).is_err());
        assert!(Frequency::mhz(-1.0).is_ok());
        assert!(Frequency::mhz(f64::INFINITY).is_err());
    }
}
