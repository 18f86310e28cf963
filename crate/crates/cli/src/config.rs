//! Run configuration: a flat TOML file of `[section]` headers and
//! `key = value` lines. Every key has a default, so an empty file is valid.

use std::f64::consts::PI;
use std::path::{Path, PathBuf};

use anyhow::{bail, ensure, Context, Result};
use serde::Deserialize;
use squeeze_core::deconvolution::{DeconvolutionConfig, Taper};
use squeeze_core::envelope::EnvelopeConfig;
use squeeze_core::langevin::{MediumParams, DEFAULT_INITIAL_PHASE, DEFAULT_STEPS};
use squeeze_core::Frequency;

#[derive(Debug, Clone, Default, Deserialize, PartialEq)]
#[serde(default, deny_unknown_fields)]
pub struct RunConfig {
    pub input: InputSection,
    pub deconvolution: DeconvolutionSection,
    pub spectrum: SpectrumSection,
    pub snlf: SnlfSection,
    pub phase: PhaseSection,
    pub medium: MediumSection,
    pub langevin: LangevinSection,
    pub output: OutputSection,
}

#[derive(Debug, Clone, Deserialize, PartialEq)]
#[serde(default, deny_unknown_fields)]
pub struct InputSection {
    /// Noise trace CSV (`delta_mhz,noise_min_db,noise_max_db`).
    pub trace: Option<PathBuf>,
    /// Analysis frequency at which the trace was recorded, MHz.
    pub analysis_frequency_mhz: f64,
    /// Tabulated A/B coefficients; replaces the phenomenological model.
    pub coefficients: Option<PathBuf>,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum TaperKind {
    None,
    RaisedCosine,
}

#[derive(Debug, Clone, Deserialize, PartialEq)]
#[serde(default, deny_unknown_fields)]
pub struct DeconvolutionSection {
    pub eps: f64,
    pub taper: TaperKind,
    pub taper_fraction: f64,
    pub pad_factor: usize,
}

#[derive(Debug, Clone, Deserialize, PartialEq)]
#[serde(default, deny_unknown_fields)]
pub struct SpectrumSection {
    pub delta_mhz: f64,
    pub omega_max_mhz: f64,
    pub omega_step_mhz: f64,
    pub envelope_window_mhz: f64,
    pub envelope_cutoff: f64,
}

#[derive(Debug, Clone, Deserialize, PartialEq)]
#[serde(default, deny_unknown_fields)]
pub struct SnlfSection {
    pub deltas_mhz: Vec<f64>,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum DphiMode {
    /// One Δφ for every analysis frequency.
    Scalar,
    /// Δφ(ω_a) = φ_α(δ+ω_a) − φ_α(δ−ω_a) from the propagation sweep.
    Langevin,
}

#[derive(Debug, Clone, Deserialize, PartialEq)]
#[serde(default, deny_unknown_fields)]
pub struct PhaseSection {
    pub dphi_mode: DphiMode,
    pub dphi_rad: f64,
    pub lock_omega_mhz: f64,
    pub delta_mhz: f64,
    pub omega_max_mhz: f64,
}

#[derive(Debug, Clone, Deserialize, PartialEq)]
#[serde(default, deny_unknown_fields)]
pub struct MediumSection {
    pub one_photon_detuning_ghz: f64,
    pub pump_power_mw: f64,
    pub optical_depth: f64,
    pub cell_length_m: f64,
    pub raman_center_mhz: f64,
    pub raman_width_mhz: f64,
    pub gain_strength: f64,
    pub lightshift_scale: f64,
    pub absorption_ratio: f64,
}

#[derive(Debug, Clone, Deserialize, PartialEq)]
#[serde(default, deny_unknown_fields)]
pub struct LangevinSection {
    pub initial_phase_rad: f64,
    pub steps: usize,
    pub delta_start_mhz: f64,
    pub delta_stop_mhz: f64,
    pub delta_step_mhz: f64,
}

#[derive(Debug, Clone, Deserialize, PartialEq)]
#[serde(default, deny_unknown_fields)]
pub struct OutputSection {
    pub dir: PathBuf,
}

impl Default for DeconvolutionSection {
    fn default() -> Self {
        DeconvolutionSection { eps: 1e-3, taper: TaperKind::RaisedCosine, taper_fraction: 0.1, pad_factor: 4 }
    }
}

impl Default for SpectrumSection {
    fn default() -> Self {
        SpectrumSection {
            delta_mhz: -4.0,
            omega_max_mhz: 40.0,
            omega_step_mhz: 0.25,
            envelope_window_mhz: 1.0,
            envelope_cutoff: 0.2,
        }
    }
}

impl Default for SnlfSection {
    fn default() -> Self {
        SnlfSection { deltas_mhz: vec![0.0, -4.0, -12.0, -20.0] }
    }
}

impl Default for PhaseSection {
    fn default() -> Self {
        PhaseSection {
            dphi_mode: DphiMode::Scalar,
            dphi_rad: 0.2 * PI,
            lock_omega_mhz: 1.0,
            delta_mhz: -4.0,
            omega_max_mhz: 30.0,
        }
    }
}

impl Default for MediumSection {
    fn default() -> Self {
        let p = MediumParams::default();
        MediumSection {
            one_photon_detuning_ghz: p.one_photon_detuning_ghz,
            pump_power_mw: p.pump_power_mw,
            optical_depth: p.optical_depth,
            cell_length_m: p.cell_length_m,
            raman_center_mhz: p.raman_center_mhz,
            raman_width_mhz: p.raman_width_mhz,
            gain_strength: p.gain_strength,
            lightshift_scale: p.lightshift_scale,
            absorption_ratio: p.absorption_ratio,
        }
    }
}

impl Default for LangevinSection {
    fn default() -> Self {
        LangevinSection {
            initial_phase_rad: DEFAULT_INITIAL_PHASE,
            steps: DEFAULT_STEPS,
            delta_start_mhz: -30.0,
            delta_stop_mhz: 40.0,
            delta_step_mhz: 0.25,
        }
    }
}

impl Default for OutputSection {
    fn default() -> Self {
        OutputSection { dir: PathBuf::from("out") }
    }
}

impl Default for InputSection {
    fn default() -> Self {
        InputSection { trace: None, analysis_frequency_mhz: 1.0, coefficients: None }
    }
}

impl RunConfig {
    /// Parses and validates a config file. Relative input paths are taken
    /// relative to the file's directory.
    pub fn load(path: &Path) -> Result<Self> {
        let text = std::fs::read_to_string(path).with_context(|| format!("cannot read config {}", path.display()))?;
        let mut cfg = Self::parse(&text).with_context(|| format!("invalid config {}", path.display()))?;
        let base = path.parent().unwrap_or(Path::new("."));
        for p in [&mut cfg.input.trace, &mut cfg.input.coefficients].into_iter().flatten() {
            if p.is_relative() {
                *p = base.join(&*p);
            }
        }
        if cfg.output.dir.is_relative() {
            cfg.output.dir = base.join(&cfg.output.dir);
        }
        cfg.check_inputs_exist()?;
        Ok(cfg)
    }

    pub fn parse(text: &str) -> Result<Self> {
        let cfg: RunConfig = toml::from_str(text)?;
        cfg.validate()?;
        Ok(cfg)
    }

    pub fn check_inputs_exist(&self) -> Result<()> {
        for p in [&self.input.trace, &self.input.coefficients].into_iter().flatten() {
            ensure!(p.is_file(), "input file {} does not exist", p.display());
        }
        Ok(())
    }

    pub fn validate(&self) -> Result<()> {
        self.deconvolution_config()?.validate()?;
        self.medium_params().validate()?;
        ensure!(!self.snlf.deltas_mhz.is_empty(), "[snlf] deltas_mhz must not be empty");
        for (name, v) in [
            ("[spectrum] omega_max_mhz", self.spectrum.omega_max_mhz),
            ("[spectrum] omega_step_mhz", self.spectrum.omega_step_mhz),
            ("[phase] omega_max_mhz", self.phase.omega_max_mhz),
            ("[langevin] delta_step_mhz", self.langevin.delta_step_mhz),
        ] {
            ensure!(v.is_finite() && v > 0.0, "{name} must be finite and > 0, got {v}");
        }
        ensure!(
            self.langevin.delta_stop_mhz > self.langevin.delta_start_mhz,
            "[langevin] delta_stop_mhz must exceed delta_start_mhz"
        );
        ensure!(self.langevin.steps >= 1, "[langevin] steps must be >= 1");
        ensure!(self.phase.dphi_rad.is_finite(), "[phase] dphi_rad must be finite");
        Frequency::analysis(self.phase.lock_omega_mhz)?;
        Ok(())
    }

    pub fn deconvolution_config(&self) -> Result<DeconvolutionConfig> {
        let taper = match self.deconvolution.taper {
            TaperKind::None => Taper::None,
            TaperKind::RaisedCosine => Taper::RaisedCosine { fraction: self.deconvolution.taper_fraction },
        };
        let a = self.input.analysis_frequency_mhz;
        if !(a.is_finite() && a > 0.0) {
            bail!("[input] analysis_frequency_mhz must be finite and > 0, got {a}");
        }
        Ok(DeconvolutionConfig {
            shift_a: Frequency::mhz(a)?,
            regularization_eps: self.deconvolution.eps,
            taper,
            pad_factor: self.deconvolution.pad_factor,
        })
    }

    pub fn envelope_config(&self) -> EnvelopeConfig {
        EnvelopeConfig { window_mhz: self.spectrum.envelope_window_mhz, cutoff: self.spectrum.envelope_cutoff }
    }

    pub fn medium_params(&self) -> MediumParams {
        let m = &self.medium;
        MediumParams {
            one_photon_detuning_ghz: m.one_photon_detuning_ghz,
            pump_power_mw: m.pump_power_mw,
            optical_depth: m.optical_depth,
            cell_length_m: m.cell_length_m,
            raman_center_mhz: m.raman_center_mhz,
            raman_width_mhz: m.raman_width_mhz,
            gain_strength: m.gain_strength,
            lightshift_scale: m.lightshift_scale,
            absorption_ratio: m.absorption_ratio,
        }
    }

    /// Detunings of the propagation sweep, `start + i·step` up to `stop`.
    pub fn langevin_grid(&self) -> Vec<f64> {
        grid(self.langevin.delta_start_mhz, self.langevin.delta_stop_mhz, self.langevin.delta_step_mhz)
    }

    pub fn spectrum_omegas(&self) -> Vec<f64> {
        grid(0.0, self.spectrum.omega_max_mhz, self.spectrum.omega_step_mhz)
    }
}

/// `start, start + step, …` through `stop` (inclusive within rounding).
pub fn grid(start: f64, stop: f64, step: f64) -> Vec<f64> {
    let n = ((stop - start) / step + 1e-9).floor() as usize;
    (0..=n).map(|i| start + step * i as f64).collect()
}
