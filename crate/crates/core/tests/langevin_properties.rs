use std::f64::consts::PI;

use num_complex::Complex64;
use proptest::prelude::*;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use squeeze_core::langevin::{
    ab_phenomenological, dphi_for_phase_model, phase_evolution, phase_shift_sweep, propagate,
    CoefficientProfile, CoefficientSource, FieldState, MediumParams, DEFAULT_INITIAL_PHASE,
    DEFAULT_STEPS,
};

const CELL: f64 = 0.0125;

fn c(re: f64, im: f64) -> Complex64 {
    Complex64::new(re, im)
}

/// Classical RK4 on dα/dz = Aα + Bα* with many small steps.
fn rk4_field(a: Complex64, b: Complex64, alpha0: Complex64, length: f64, steps: usize) -> Complex64 {
    let rate = |x: Complex64| a * x + b * x.conj();
    let h = length / steps as f64;
    let mut x = alpha0;
    for _ in 0..steps {
        let k1 = rate(x);
        let k2 = rate(x + k1 * (h / 2.0));
        let k3 = rate(x + k2 * (h / 2.0));
        let k4 = rate(x + k3 * h);
        x += (k1 + k2 * 2.0 + k3 * 2.0 + k4) * (h / 6.0);
    }
    x
}

fn coefficient() -> impl Strategy<Value = Complex64> {
    (0.0..50.0f64, -PI..PI).prop_map(|(r, t)| Complex64::from_polar(r, t))
}

fn wrap(x: f64) -> f64 {
    x - 2.0 * PI * (x / (2.0 * PI)).round()
}

fn sweep_grid() -> Vec<f64> {
    (0..=280).map(|i| -30.0 + 0.25 * i as f64).collect()
}

proptest! {
    #[test]
    fn matrix_exponential_matches_fine_integration(
        a in coefficient(), b in coefficient(), alpha0 in coefficient(),
    ) {
        prop_assume!(alpha0.norm() > 1e-3);
        let exact = propagate(a, b, FieldState(alpha0), CELL).unwrap().0;
        let oracle = rk4_field(a, b, alpha0, CELL, 20_000);
        prop_assert!((exact - oracle).norm() <= 1e-8 * oracle.norm(), "{exact} vs {oracle}");
    }

    #[test]
    fn propagation_is_a_semigroup(
        a in coefficient(), b in coefficient(), alpha0 in coefficient(),
        l1 in 0.0..0.02f64, l2 in 0.0..0.02f64,
    ) {
        let split = propagate(a, b, propagate(a, b, FieldState(alpha0), l1).unwrap(), l2).unwrap().0;
        let whole = propagate(a, b, FieldState(alpha0), l1 + l2).unwrap().0;
        prop_assert!((split - whole).norm() <= 1e-10 * whole.norm().max(1e-300));
    }

    #[test]
    fn conjugation_negates_the_phase(a in coefficient(), b in coefficient(), phi0 in -PI..PI) {
        let p = phase_evolution(a, b, phi0, CELL, DEFAULT_STEPS).unwrap();
        let q = phase_evolution(a.conj(), b.conj(), -phi0, CELL, DEFAULT_STEPS).unwrap();
        prop_assert!((p + q).abs() < 1e-10);
    }

    #[test]
    fn step_doubling_converges(a in coefficient(), b in coefficient(), phi0 in -PI..PI) {
        let p1 = phase_evolution(a, b, phi0, CELL, DEFAULT_STEPS).unwrap();
        let p2 = phase_evolution(a, b, phi0, CELL, 2 * DEFAULT_STEPS).unwrap();
        prop_assert!((p1 - p2).abs() < 1e-8);
    }

    #[test]
    fn real_drive_leaves_phase_untouched(re_a in -50.0..50.0f64, phi0 in -PI..PI) {
        let p = phase_evolution(c(re_a, 0.0), c(0.0, 0.0), phi0, CELL, DEFAULT_STEPS).unwrap();
        prop_assert_eq!(p, phi0);
    }
}

#[test]
fn phase_equation_tracks_the_exact_field() {
    let mut rng = ChaCha8Rng::seed_from_u64(7);
    let draw = |rng: &mut ChaCha8Rng| Complex64::from_polar(rng.gen_range(0.0..50.0), rng.gen_range(-PI..PI));
    for _ in 0..100 {
        let (a, b) = (draw(&mut rng), draw(&mut rng));
        let phi0 = rng.gen_range(-PI..PI);
        let field = propagate(a, b, FieldState(Complex64::from_polar(1.0, phi0)), CELL).unwrap();
        let phi = phase_evolution(a, b, phi0, CELL, DEFAULT_STEPS).unwrap();
        assert!(wrap(field.phase() - phi).abs() < 1e-6, "{a} {b} {phi0}");
    }
}

#[test]
fn half_width_points_of_the_line() {
    let p = MediumParams::default();
    let (_, center) = ab_phenomenological(&p, p.raman_center_mhz).unwrap();
    assert!(center.im.abs() < 1e-12 * center.norm());
    for sign in [1.0, -1.0] {
        let (_, b) = ab_phenomenological(&p, p.raman_center_mhz + sign * p.raman_width_mhz / 2.0).unwrap();
        assert!((b.norm() - center.norm() / 2f64.sqrt()).abs() < 1e-9 * center.norm());
        assert!((b.arg() - sign * PI / 4.0).abs() < 1e-12);
    }
}

#[test]
fn null_coefficients_give_a_flat_sweep() {
    let profile = CoefficientProfile::new(vec![-40.0, 50.0], vec![c(0.0, 0.0); 2], vec![c(0.0, 0.0); 2]).unwrap();
    let sweep = phase_shift_sweep(&profile, 0.3, CELL, &sweep_grid(), DEFAULT_STEPS).unwrap();
    assert!(sweep.phase.iter().all(|&p| p == 0.3));
    assert_eq!(dphi_for_phase_model(&sweep, 0.0, 10.0).unwrap().0, 0.0);
}

#[test]
fn default_sweep_reproduces_the_rotation_window() {
    let p = MediumParams::default();
    let grid = sweep_grid();
    let sweep = phase_shift_sweep(&p, DEFAULT_INITIAL_PHASE, p.cell_length_m, &grid, DEFAULT_STEPS).unwrap();
    let (peak, at) = sweep.peak();
    assert!((0.25 * PI..=0.35 * PI).contains(&peak), "peak {}π", peak / PI);
    assert!((5.0..=15.0).contains(&at), "peak at {at}");
    for (d, s) in grid.iter().zip(sweep.shift()) {
        if *d < 0.0 || *d > 20.0 {
            assert!(s.abs() < 0.02 * PI, "shift {}π at {d}", s / PI);
        }
    }
    for w in sweep.phase.windows(2) {
        assert!((w[1] - w[0]).abs() < 0.05);
    }

    let dphi = dphi_for_phase_model(&sweep, -4.0, 14.0).unwrap().0;
    assert!((dphi - peak).abs() < 0.05 * PI, "Δφ {}π vs peak {}π", dphi / PI, peak / PI);
}

#[test]
fn tabulated_export_gives_the_same_sweep() {
    let p = MediumParams::default();
    let grid = sweep_grid();
    let mut csv = Vec::new();
    CoefficientProfile::tabulate(&p, &grid).unwrap().write_csv(&mut csv).unwrap();
    let table = CoefficientProfile::from_csv(csv.as_slice()).unwrap();
    for &d in &grid {
        let (a0, b0) = p.coefficients(d).unwrap();
        let (a1, b1) = table.coefficients(d).unwrap();
        assert!((a0 - a1).norm() <= 1e-9 * a0.norm().max(1.0));
        assert!((b0 - b1).norm() <= 1e-9 * b0.norm().max(1.0));
    }
    let s0 = phase_shift_sweep(&p, DEFAULT_INITIAL_PHASE, CELL, &grid, DEFAULT_STEPS).unwrap();
    let s1 = phase_shift_sweep(&table, DEFAULT_INITIAL_PHASE, CELL, &grid, DEFAULT_STEPS).unwrap();
    for (x, y) in s0.phase.iter().zip(&s1.phase) {
        assert!((x - y).abs() < 1e-9);
    }
}

#[test]
fn shipped_defaults_match_the_recorded_fit() {
    let record = include_str!("../../../data/fitted_medium.txt");
    let value = |key: &str| -> f64 {
        record
            .lines()
            .filter(|l| !l.starts_with('#'))
            .filter_map(|l| l.split_once('='))
            .find(|(k, _)| k.trim() == key)
            .map(|(_, v)| v.trim().parse().unwrap())
            .unwrap_or_else(|| panic!("{key} missing from fit record"))
    };
    let p = MediumParams::default();
    assert_eq!(p.raman_center_mhz, value("raman_center_mhz"));
    assert_eq!(p.raman_width_mhz, value("raman_width_mhz"));
    assert_eq!(p.gain_strength, value("gain_strength"));
    assert_eq!(p.lightshift_scale, value("lightshift_scale"));
    assert_eq!(DEFAULT_INITIAL_PHASE, value("initial_phase"));
}
