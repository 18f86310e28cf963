//! Propagation coefficients A(δ), B(δ) of the probe field.
//!
//! Two backends: a phenomenological complex-Lorentzian Raman line, and a
//! tabulated profile loaded from CSV (for coefficients computed with a full
//! microscopic model elsewhere).

use std::io::{Read, Write};

use num_complex::Complex64;

use crate::error::{Error, Result};

/// Anything that can supply (A, B) in m⁻¹ at a two-photon detuning in MHz.
pub trait CoefficientSource {
    fn coefficients(&self, delta_mhz: f64) -> Result<(Complex64, Complex64)>;
}

/// Medium and pump parameters, plus the four line-shape parameters of the
/// phenomenological backend.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct MediumParams {
    /// One-photon detuning Δ, GHz.
    pub one_photon_detuning_ghz: f64,
    /// Pump power, mW.
    pub pump_power_mw: f64,
    pub optical_depth: f64,
    /// Vapor cell length, m.
    pub cell_length_m: f64,
    /// Raman line center δ_R, MHz.
    pub raman_center_mhz: f64,
    /// Raman line full width Γ₂, MHz.
    pub raman_width_mhz: f64,
    /// Single-pass parametric gain g₀ at line center (dimensionless).
    pub gain_strength: f64,
    /// Strength of the dispersive light shift in Im A (dimensionless).
    pub lightshift_scale: f64,
    /// Re A = −|B| · absorption_ratio. Does not affect the phase.
    pub absorption_ratio: f64,
}

/// Reference operating point at which the coupling scale is 1.
pub const REFERENCE_DETUNING_GHZ: f64 = 0.8;
pub const REFERENCE_PUMP_MW: f64 = 200.0;
pub const REFERENCE_OPTICAL_DEPTH: f64 = 1000.0;

impl Default for MediumParams {
    /// Operating point of the experiment with line-shape parameters fitted
    /// by `examples/fit_medium.rs` (output in `data/fitted_medium.txt`).
    fn default() -> Self {
        MediumParams {
            one_photon_detuning_ghz: REFERENCE_DETUNING_GHZ,
            pump_power_mw: REFERENCE_PUMP_MW,
            optical_depth: REFERENCE_OPTICAL_DEPTH,
            cell_length_m: 0.0125,
            raman_center_mhz: 7.4489,
            raman_width_mhz: 9.1234,
            gain_strength: 1.1705,
            lightshift_scale: 1.1889,
            absorption_ratio: 0.5,
        }
    }
}

impl MediumParams {
    pub fn validate(&self) -> Result<()> {
        let positive = [
            ("one-photon detuning", self.one_photon_detuning_ghz),
            ("pump power", self.pump_power_mw),
            ("optical depth", self.optical_depth),
            ("cell length", self.cell_length_m),
            ("raman width", self.raman_width_mhz),
        ];
        for (name, v) in positive {
            if !(v.is_finite() && v > 0.0) {
                return Err(Error::Argument(format!("{name} must be finite and > 0, got {v}")));
            }
        }
        for (name, v) in [
            ("raman center", self.raman_center_mhz),
            ("gain strength", self.gain_strength),
            ("lightshift scale", self.lightshift_scale),
            ("absorption ratio", self.absorption_ratio),
        ] {
            if !v.is_finite() {
                return Err(Error::Argument(format!("{name} must be finite, got {v}")));
            }
        }
        Ok(())
    }

    /// Raman coupling relative to the reference operating point; scales as
    /// optical depth × pump power / one-photon detuning.
    pub fn coupling_scale(&self) -> f64 {
        (self.optical_depth / REFERENCE_OPTICAL_DEPTH)
            * (self.pump_power_mw / REFERENCE_PUMP_MW)
            * (REFERENCE_DETUNING_GHZ / self.one_photon_detuning_ghz)
    }
}

/// Phenomenological coefficients at detuning `delta_mhz`.
///
/// `B = s·(g₀/L)·(Γ₂/2)/((Γ₂/2) − i(δ−δ_R))` is a complex Lorentzian gain line
/// and `A = −|B|·r + i·s·(κ/L)·Re[(δ−δ_R)/((Γ₂/2) − i(δ−δ_R))]` carries loss and
/// a dispersive light shift, with `s` the coupling scale.
pub fn ab_phenomenological(params: &MediumParams, delta_mhz: f64) -> Result<(Complex64, Complex64)> {
    params.validate()?;
    if !delta_mhz.is_finite() {
        return Err(Error::Argument(format!("detuning must be finite, got {delta_mhz}")));
    }
    let s = params.coupling_scale();
    let l = params.cell_length_m;
    let half = params.raman_width_mhz / 2.0;
    let x = delta_mhz - params.raman_center_mhz;
    let denom = Complex64::new(half, -x);
    let b = (s * params.gain_strength / l) * (half / denom);
    let dispersion = (x / denom).re;
    let a = Complex64::new(-b.norm() * params.absorption_ratio, s * params.lightshift_scale * dispersion / l);
    Ok((a, b))
}

impl CoefficientSource for MediumParams {
    fn coefficients(&self, delta_mhz: f64) -> Result<(Complex64, Complex64)> {
        ab_phenomenological(self, delta_mhz)
    }
}

/// Tabulated A(δ), B(δ), linearly interpolated between rows.
#[derive(Debug, Clone, PartialEq)]
pub struct CoefficientProfile {
    delta: Vec<f64>,
    a: Vec<Complex64>,
    b: Vec<Complex64>,
}

pub const PROFILE_HEADER: [&str; 5] = ["delta_mhz", "re_A", "im_A", "re_B", "im_B"];

impl CoefficientProfile {
    pub fn new(delta: Vec<f64>, a: Vec<Complex64>, b: Vec<Complex64>) -> Result<Self> {
        if delta.is_empty() || delta.len() != a.len() || delta.len() != b.len() {
            return Err(Error::Argument("profile columns must be non-empty and of equal length".into()));
        }
        for (i, w) in delta.windows(2).enumerate() {
            if !(w[1] > w[0]) {
                return Err(Error::data(format!("detuning grid not strictly increasing at row {}", i + 2)));
            }
        }
        if delta.iter().any(|v| !v.is_finite())
            || a.iter().chain(&b).any(|z| !(z.re.is_finite() && z.im.is_finite()))
        {
            return Err(Error::data("profile contains non-finite entries"));
        }
        Ok(CoefficientProfile { delta, a, b })
    }

    /// Samples any source on the given detunings.
    pub fn tabulate(source: &impl CoefficientSource, delta: &[f64]) -> Result<Self> {
        let mut a = Vec::with_capacity(delta.len());
        let mut b = Vec::with_capacity(delta.len());
        for &d in delta {
            let (ai, bi) = source.coefficients(d)?;
            a.push(ai);
            b.push(bi);
        }
        Self::new(delta.to_vec(), a, b)
    }

    pub fn delta(&self) -> &[f64] {
        &self.delta
    }

    pub fn a(&self) -> &[Complex64] {
        &self.a
    }

    pub fn b(&self) -> &[Complex64] {
        &self.b
    }

    /// Reads `delta_mhz,re_A,im_A,re_B,im_B`; `#` lines are comments.
    /// Errors carry the 1-based line number of the offending row.
    pub fn from_csv(reader: impl Read) -> Result<Self> {
        let mut rdr = csv::ReaderBuilder::new().comment(Some(b'#')).trim(csv::Trim::All).from_reader(reader);
        let headers = rdr.headers().map_err(|e| Error::data(format!("cannot read header: {e}")))?.clone();
        let cols: Vec<usize> = PROFILE_HEADER
            .iter()
            .map(|name| {
                headers
                    .iter()
                    .position(|h| h == *name)
                    .ok_or_else(|| Error::data_at(1, format!("missing column `{name}`")))
            })
            .collect::<Result<_>>()?;

        let (mut delta, mut a, mut b) = (Vec::new(), Vec::new(), Vec::new());
        for rec in rdr.records() {
            let rec = rec.map_err(|e| {
                let line = e.position().map(|p| p.line() as usize);
                Error::Data { line, message: format!("malformed row: {e}") }
            })?;
            let line = rec.position().map(|p| p.line() as usize).unwrap_or(0);
            let field = |c: usize| -> Result<f64> {
                let raw = rec.get(c).ok_or_else(|| Error::data_at(line, "row has too few fields"))?;
                let v: f64 = raw
                    .parse()
                    .map_err(|_| Error::data_at(line, format!("cannot parse `{raw}` as a number")))?;
                if !v.is_finite() {
                    return Err(Error::data_at(line, format!("non-finite value `{raw}`")));
                }
                Ok(v)
            };
            let d = field(cols[0])?;
            if let Some(&prev) = delta.last() {
                if !(d > prev) {
                    return Err(Error::data_at(
                        line,
                        format!("detuning {d} MHz does not increase (previous row {prev} MHz)"),
                    ));
                }
            }
            delta.push(d);
            a.push(Complex64::new(field(cols[1])?, field(cols[2])?));
            b.push(Complex64::new(field(cols[3])?, field(cols[4])?));
        }
        if delta.is_empty() {
            return Err(Error::data("coefficient table has no rows"));
        }
        Self::new(delta, a, b)
    }

    /// Writes the table with shortest round-trip float formatting.
    pub fn write_csv(&self, writer: impl Write) -> Result<()> {
        let io = |e: csv::Error| Error::data(format!("cannot write coefficient table: {e}"));
        let mut w = csv::Writer::from_writer(writer);
        w.write_record(PROFILE_HEADER).map_err(io)?;
        for i in 0..self.delta.len() {
            w.write_record([
                self.delta[i].to_string(),
                self.a[i].re.to_string(),
                self.a[i].im.to_string(),
                self.b[i].re.to_string(),
                self.b[i].im.to_string(),
            ])
            .map_err(io)?;
        }
        w.flush().map_err(|e| Error::data(format!("cannot write coefficient table: {e}")))
    }
}

impl CoefficientSource for CoefficientProfile {
    fn coefficients(&self, delta_mhz: f64) -> Result<(Complex64, Complex64)> {
        let d = &self.delta;
        let (first, last) = (d[0], d[d.len() - 1]);
        if !(delta_mhz >= first && delta_mhz <= last) {
            return Err(Error::Range(format!(
                "detuning {delta_mhz} MHz outside tabulated range [{first}, {last}] MHz"
            )));
        }
        let i = d.partition_point(|&x| x <= delta_mhz).saturating_sub(1);
        if i + 1 >= d.len() || d[i] == delta_mhz {
            return Ok((self.a[i], self.b[i]));
        }
        let t = (delta_mhz - d[i]) / (d[i + 1] - d[i]);
        Ok((self.a[i] + (self.a[i + 1] - self.a[i]) * t, self.b[i] + (self.b[i + 1] - self.b[i]) * t))
    }
}
