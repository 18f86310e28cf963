//! Acceptance checks. Runs without the libtest harness so that every
//! criterion prints exactly one PASS or FAIL line.

use std::f64::consts::PI;
use std::path::Path;
use std::process::ExitCode;
use std::time::{Duration, Instant};

use num_complex::Complex64;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use squeeze_cli::commands::{phase_comparison, snlf_rows, zero_frequency};
use squeeze_cli::config::RunConfig;
use squeeze_core::deconvolution::{deconvolve, forward_model, roundtrip_residual, DeconvolutionConfig, Taper};
use squeeze_core::fixtures::{synthetic_trace, single_sided};
use squeeze_core::langevin::{
    phase_evolution, phase_shift_sweep, propagate, FieldState, MediumParams, DEFAULT_INITIAL_PHASE, DEFAULT_STEPS,
};
use squeeze_core::phase::{
    compare_sweep, min_over_phase, LoPhase, PhaseResolvedNoise, SidebandNoise, SidebandPhaseShift,
};
use squeeze_core::spectrum::{sideband_sum, synthesize_spectrum};
use squeeze_core::units::linear_to_db;
use squeeze_core::{Curve, Frequency, UniformGrid};

type Outcome = Result<String, String>;
type Criterion = (&'static str, fn() -> Outcome);

fn check(ok: bool, msg: String) -> Outcome {
    if ok {
        Ok(msg)
    } else {
        Err(msg)
    }
}

fn within(elapsed: Duration, limit_s: f64) -> Result<(), String> {
    if elapsed.as_secs_f64() < limit_s {
        Ok(())
    } else {
        Err(format!("runtime {:.3} s exceeds {limit_s} s", elapsed.as_secs_f64()))
    }
}

fn pipeline_config() -> RunConfig {
    let mut cfg = RunConfig::default();
    cfg.input.trace = Some(Path::new(env!("CARGO_MANIFEST_DIR")).join("../../fixtures/synthetic_trace.csv"));
    cfg
}

fn rms_relative(a: &[f64], b: &[f64]) -> f64 {
    let num: f64 = a.iter().zip(b).map(|(x, y)| (x - y).powi(2)).sum();
    let den: f64 = b.iter().map(|y| y * y).sum();
    (num / den).sqrt()
}

/// Forward model then deconvolution on band-limited periodic input, and the
/// fixture round trip at the default regularization.
fn deconvolution_round_trip() -> Outcome {
    let start = Instant::now();
    // 40 MHz period on a 0.1 MHz grid; harmonics j/40 MHz⁻¹ avoid the kernel
    // zeros at t = (2k+1)/4 MHz⁻¹ by at least 0.075 MHz⁻¹.
    let grid = UniformGrid::new(0.0, 0.1, 400).unwrap();
    let cfg0 = DeconvolutionConfig { regularization_eps: 0.0, taper: Taper::None, pad_factor: 1, ..Default::default() };
    let mut rng = ChaCha8Rng::seed_from_u64(1);
    let mut worst: f64 = 0.0;
    for _ in 0..20 {
        let terms: Vec<(f64, f64, f64)> = (0..6)
            .map(|_| loop {
                let j = rng.gen_range(0..40) as f64;
                let t = j / 40.0;
                let zero = ((t - 0.25) / 0.5).round() * 0.5 + 0.25;
                if (t - zero).abs() > 0.05 {
                    break (j, rng.gen_range(-1.0..1.0), rng.gen_range(0.0..2.0 * PI));
                }
            })
            .collect();
        let f = Curve::from_fn(grid, |x| {
            terms.iter().map(|&(j, c, ph)| c * (2.0 * PI * j * x / 40.0 + ph).cos()).sum::<f64>()
        });
        let g = deconvolve(&f, &cfg0).map_err(|e| e.to_string())?.curve;
        let back = forward_model(&g, cfg0.shift_a).map_err(|e| e.to_string())?;
        // forward_model trims `a` from each end
        let offset = ((back.grid().start() - grid.start()) / grid.step()).round() as usize;
        let reference = &f.values()[offset..offset + back.values().len()];
        worst = worst.max(rms_relative(back.values(), reference));
    }
    let fixture = synthetic_trace();
    let cfg = DeconvolutionConfig::default();
    let res_min = roundtrip_residual(&fixture.min_channel().map(|v| 2.0 * v), &cfg).map_err(|e| e.to_string())?;
    let res_max = roundtrip_residual(&fixture.max_channel().map(|v| 2.0 * v), &cfg).map_err(|e| e.to_string())?;
    let elapsed = start.elapsed();
    within(elapsed, 1.0)?;
    check(
        worst < 1e-6 && res_min < 0.01 && res_max < 0.01,
        format!(
            "band-limited RMS relative {worst:.2e} (< 1e-6), fixture residual {res_min:.2e} / {res_max:.2e} (< 1e-2), {:.3} s",
            elapsed.as_secs_f64()
        ),
    )
}

fn snlf_pattern() -> Outcome {
    let start = Instant::now();
    let cfg = pipeline_config();
    let trace = squeeze_cli::commands::load_trace(&cfg).map_err(|e| format!("{e:#}"))?;
    let zf = zero_frequency(&cfg, &trace).map_err(|e| format!("{e:#}"))?;
    let rows = snlf_rows(&cfg, &zf.min).map_err(|e| format!("{e:#}"))?;
    let elapsed = start.elapsed();
    within(elapsed, 5.0)?;
    let sums: Vec<f64> = rows.iter().map(|r| r.1.snlf_plus_delta()).collect();
    if sums.iter().any(|s| !s.is_finite()) {
        return Err(format!("missing crossing: {sums:?}"));
    }
    let mean = sums.iter().sum::<f64>() / sums.len() as f64;
    let dev = sums.iter().map(|s| (s - mean).abs()).fold(0.0, f64::max);
    let in_band = sums.iter().all(|s| (4.8..=5.7).contains(s));
    let listed: Vec<String> = rows.iter().map(|r| format!("δ={}: {:.3}", r.1.delta_mhz, r.1.snlf_plus_delta())).collect();
    check(
        dev <= 1.0 && in_band,
        format!(
            "SNLF+δ [{}] MHz, max deviation from mean {dev:.3} MHz (≤ 1), all in [4.8, 5.7]: {in_band}, {:.3} s",
            listed.join(", "),
            elapsed.as_secs_f64()
        ),
    )
}

fn translation() -> Outcome {
    let g = single_sided();
    let omegas: Vec<f64> = (0..=160).map(|i| 0.25 * i as f64).collect();
    let base = synthesize_spectrum(&g, Frequency::mhz(0.0).unwrap(), &omegas).map_err(|e| e.to_string())?;
    let mut worst: f64 = 0.0;
    for delta in [-4.0, -8.0, -12.0, -20.0] {
        let s = synthesize_spectrum(&g, Frequency::mhz(delta).unwrap(), &omegas).map_err(|e| e.to_string())?;
        // δ=0 spectrum moved right by −δ, compared where both are defined
        let shift = (-delta / 0.25f64).round() as usize;
        for i in shift..omegas.len() {
            worst = worst.max((s.noise_db()[i] - base.noise_db()[i - shift]).abs());
        }
    }
    check(worst <= 0.2, format!("largest deviation from the translated δ=0 spectrum {worst:.4} dB (≤ 0.2)"))
}

/// 10⁴-point grid search, refined by golden section inside the best cell.
fn grid_search(lower: &SidebandNoise, upper: &SidebandNoise, dphi: f64) -> f64 {
    let f = |phi: f64| (lower.at_phase(LoPhase(phi)) + upper.at_phase(LoPhase(phi + dphi))) / 2.0;
    let n = 10_000;
    let h = 2.0 * PI / n as f64;
    let (best, _) = (0..n).map(|i| (i, f(i as f64 * h))).fold((0, f64::INFINITY), |acc, (i, v)| if v < acc.1 { (i, v) } else { acc });
    let (mut a, mut b) = ((best as f64 - 1.0) * h, (best as f64 + 1.0) * h);
    let r = 0.5 * (5f64.sqrt() - 1.0);
    for _ in 0..80 {
        let (c, d) = (b - r * (b - a), a + r * (b - a));
        if f(c) < f(d) {
            b = d;
        } else {
            a = c;
        }
    }
    f(best as f64 * h).min(f(0.5 * (a + b)))
}

/// Runtime covers the phase-model calls only, not the oracle.
fn phase_exactness() -> Outcome {
    let mut spent = Duration::ZERO;
    let mut rng = ChaCha8Rng::seed_from_u64(4);
    let side = |rng: &mut ChaCha8Rng| {
        let plus = rng.gen_range(0.05..10.0);
        SidebandNoise { plus, minus: plus * rng.gen_range(0.0..1.0) }
    };
    let mut worst_oracle: f64 = 0.0;
    for _ in 0..1000 {
        let (lower, upper) = (side(&mut rng), side(&mut rng));
        let dphi = rng.gen_range(-PI..PI);
        let t = Instant::now();
        let m = min_over_phase(&lower, &upper, SidebandPhaseShift(dphi)).map_err(|e| e.to_string())?;
        spent += t.elapsed();
        worst_oracle = worst_oracle.max((m.noise.to_linear() - grid_search(&lower, &upper, dphi)).abs());
    }

    // Random phase-resolved curves on a 1 MHz grid.
    let grid = UniformGrid::new(-30.0, 1.0, 61).unwrap();
    let lo: Vec<f64> = (0..grid.len()).map(|_| rng.gen_range(0.2..3.0)).collect();
    let min = Curve::new(grid, lo).unwrap();
    let max = Curve::new(grid, min.values().iter().map(|v| v + rng.gen_range(0.0..4.0)).collect()).unwrap();
    let p = PhaseResolvedNoise::from_channels(&min, &max).map_err(|e| e.to_string())?;
    let omegas: Vec<f64> = (0..=20).map(f64::from).collect();
    let lock = Frequency::analysis(3.0).unwrap();
    let (mut below, mut zero_dphi, mut at_lock) = (f64::NEG_INFINITY, 0.0f64, 0.0f64);
    let t = Instant::now();
    for delta in [-6.0, -2.0, 0.0, 4.0] {
        let d = Frequency::mhz(delta).unwrap();
        let dphi = rng.gen_range(-PI..PI);
        let c = compare_sweep(&p, d, &omegas, lock, |_| Ok(SidebandPhaseShift(dphi))).map_err(|e| e.to_string())?;
        for (m, l) in c.n_min.iter().zip(&c.n_locked) {
            below = below.max(m - l);
        }
        at_lock = at_lock.max((c.n_min[3] - c.n_locked[3]).abs());
        let z = compare_sweep(&p, d, &omegas, lock, |_| Ok(SidebandPhaseShift(0.0))).map_err(|e| e.to_string())?;
        for (m, l) in z.n_min.iter().zip(&z.n_locked) {
            zero_dphi = zero_dphi.max((m - l).abs());
        }
    }
    let elapsed = spent + t.elapsed();
    within(elapsed, 1.0)?;
    check(
        worst_oracle < 1e-8 && below <= 1e-12 && zero_dphi <= 1e-12 && at_lock <= 1e-12,
        format!(
            "oracle gap {worst_oracle:.1e} (< 1e-8), max(n_min − n_locked) {below:.1e}, Δφ=0 gap {zero_dphi:.1e}, \
             lock gap {at_lock:.1e} (≤ 1e-12), {:.3} s",
            elapsed.as_secs_f64()
        ),
    )
}

fn locked_versus_scanned() -> Outcome {
    let mut cfg = pipeline_config();
    cfg.phase.dphi_rad = 0.2 * PI;
    cfg.phase.delta_mhz = -4.0;
    let trace = squeeze_cli::commands::load_trace(&cfg).map_err(|e| format!("{e:#}"))?;
    let zf = zero_frequency(&cfg, &trace).map_err(|e| format!("{e:#}"))?;
    let c = phase_comparison(&cfg, &zf).map_err(|e| format!("{e:#}"))?;
    let gap = |w: f64| -> Result<f64, String> {
        let i = c.omega.iter().position(|&o| (o - w).abs() < 1e-9).ok_or(format!("ω_a = {w} not on grid"))?;
        Ok(linear_to_db(c.n_locked[i]).unwrap() - linear_to_db(c.n_min[i]).unwrap())
    };
    let never_below = c.n_min.iter().zip(&c.n_locked).all(|(m, l)| m <= &(l + 1e-12));
    let (g2, g20) = (gap(2.0)?, gap(20.0)?);
    check(
        never_below && g20 > g2,
        format!("locked ≥ scanned minimum everywhere: {never_below}, gap at 20 MHz {g20:.4} dB > gap at 2 MHz {g2:.2e} dB"),
    )
}

fn langevin_consistency() -> Outcome {
    let start = Instant::now();
    let cell = MediumParams::default().cell_length_m;
    let mut rng = ChaCha8Rng::seed_from_u64(6);
    let draw = |rng: &mut ChaCha8Rng| Complex64::from_polar(rng.gen_range(0.0..50.0), rng.gen_range(-PI..PI));
    let wrap = |x: f64| x - 2.0 * PI * (x / (2.0 * PI)).round();
    let (mut phase_gap, mut semigroup, mut doubling) = (0.0f64, 0.0f64, 0.0f64);
    for _ in 0..100 {
        let (a, b) = (draw(&mut rng), draw(&mut rng));
        let phi0 = rng.gen_range(-PI..PI);
        let alpha0 = FieldState(Complex64::from_polar(rng.gen_range(0.1..2.0), phi0));
        let field = propagate(a, b, alpha0, cell).map_err(|e| e.to_string())?;
        let p1 = phase_evolution(a, b, phi0, cell, DEFAULT_STEPS).map_err(|e| e.to_string())?;
        let p2 = phase_evolution(a, b, phi0, cell, 2 * DEFAULT_STEPS).map_err(|e| e.to_string())?;
        phase_gap = phase_gap.max(wrap(field.phase() - p1).abs());
        doubling = doubling.max((p1 - p2).abs());
        let l1 = rng.gen_range(0.0..cell);
        let split = propagate(a, b, propagate(a, b, alpha0, l1).unwrap(), cell - l1).unwrap();
        semigroup = semigroup.max((split.0 - field.0).norm() / field.0.norm());
    }
    let elapsed = start.elapsed();
    within(elapsed, 2.0)?;
    check(
        phase_gap < 1e-6 && semigroup < 1e-10 && doubling < 1e-8,
        format!(
            "phase gap {phase_gap:.1e} rad (< 1e-6), semigroup {semigroup:.1e} (< 1e-10), step doubling {doubling:.1e} rad (< 1e-8), {:.3} s",
            elapsed.as_secs_f64()
        ),
    )
}

fn rotation_window() -> Outcome {
    let start = Instant::now();
    let p = MediumParams::default();
    let grid: Vec<f64> = (0..=280).map(|i| -30.0 + 0.25 * i as f64).collect();
    let s = phase_shift_sweep(&p, DEFAULT_INITIAL_PHASE, p.cell_length_m, &grid, DEFAULT_STEPS).map_err(|e| e.to_string())?;
    let elapsed = start.elapsed();
    within(elapsed, 5.0)?;
    let (peak, at) = s.peak();
    let tail = grid
        .iter()
        .zip(s.shift())
        .filter(|(d, _)| **d < 0.0 || **d > 20.0)
        .map(|(_, v)| v.abs())
        .fold(0.0, f64::max);
    check(
        (0.25 * PI..=0.35 * PI).contains(&peak) && (5.0..=15.0).contains(&at) && tail < 0.02 * PI,
        format!(
            "peak {:.4}π (in [0.25π, 0.35π]) at δ = {at} MHz (in [5, 15]), tail {:.4}π (< 0.02π), {:.3} s",
            peak / PI,
            tail / PI,
            elapsed.as_secs_f64()
        ),
    )
}

fn unit_discipline() -> Outcome {
    // g = 1 (0 dB) at the upper sideband and 0.1 (−10 dB) at the lower one
    let g = Curve::new(UniformGrid::new(-1.0, 2.0, 2).unwrap(), vec![0.1, 1.0]).unwrap();
    let n = sideband_sum(&g, Frequency::analysis(1.0).unwrap(), Frequency::mhz(0.0).unwrap()).map_err(|e| e.to_string())?;
    let db = linear_to_db(n.to_linear()).unwrap();
    let db_domain = (0.0 + -10.0) / 2.0;
    check(
        (db - (-2.596_373_105_057_561)).abs() < 1e-12 && (db - db_domain).abs() > 1.0,
        format!("0 dB and −10 dB sidebands give {db:.6} dB (expected −2.596373; dB-domain averaging would give {db_domain})"),
    )
}

fn main() -> ExitCode {
    let criteria: [Criterion; 8] = [
        ("1 deconvolution round trip", deconvolution_round_trip),
        ("2 SNLF+δ constancy", snlf_pattern),
        ("3 translation property", translation),
        ("4 phase model exactness", phase_exactness),
        ("5 locked versus scanned minimum", locked_versus_scanned),
        ("6 Langevin consistency", langevin_consistency),
        ("7 rotation window", rotation_window),
        ("8 unit discipline", unit_discipline),
    ];
    let mut failed = 0;
    for (name, run) in criteria {
        match run() {
            Ok(msg) => println!("PASS criterion {name}: {msg}"),
            Err(msg) => {
                failed += 1;
                println!("FAIL criterion {name}: {msg}");
            }
        }
    }
    if failed == 0 {
        ExitCode::SUCCESS
    } else {
        println!("{failed} criteria failed");
        ExitCode::FAILURE
    }
}
