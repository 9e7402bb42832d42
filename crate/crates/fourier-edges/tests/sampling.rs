mod common;

use fourier_edges::concentration::ramp_coeff;
use fourier_edges::sampling::*;
use proptest::prelude::*;
use rand::Rng;

proptest! {
    #[test]
    fn jitter_stays_within_quarter(m in 1usize..80, seed in any::<u64>()) {
        let ms = jittered_modes(m, seed).unwrap();
        prop_assert_eq!(ms.len(), 2 * m + 1);
        for (i, &l) in ms.modes.iter().enumerate() {
            prop_assert!((l - (i as f64 - m as f64)).abs() <= 0.25);
        }
        prop_assert_eq!(ms.modes, jittered_modes(m, seed).unwrap().modes);
    }

    #[test]
    fn deterministic_patterns_are_symmetric(m in 2usize..300) {
        for ms in [quadratic_modes(m).unwrap(), logarithmic_modes(m, default_log_v(m)).unwrap()] {
            let n = ms.modes.len();
            for k in 0..n {
                prop_assert_eq!(ms.modes[k], -ms.modes[n - 1 - k]);
            }
            prop_assert!(ms.modes.windows(2).all(|w| w[0] < w[1]));
            prop_assert!((ms.max_abs() - m as f64).abs() < 1e-9);
        }
    }
}

#[test]
fn quadratic_values() {
    let ms = quadratic_modes(4).unwrap();
    assert_eq!(ms.modes, vec![-4.0, -2.25, -1.0, -0.25, 0.0, 0.25, 1.0, 2.25, 4.0]);
}

#[test]
fn logarithmic_default_range() {
    let ms = logarithmic_modes(64, default_log_v(64)).unwrap();
    assert_eq!(ms.len(), 129);
    assert!(ms.modes.contains(&0.0));
    let smallest = ms.modes.iter().copied().filter(|&l| l > 0.0).fold(f64::INFINITY, f64::min);
    assert!((smallest - 1.0 / 64.0).abs() < 1e-12);
}

#[test]
fn ramp_quadrature_matches_closed_form() {
    let mut rng = common::rng(11);
    let mut q = Quadrature::new();
    let r = ramp();
    for _ in 0..50 {
        let l: f64 = rng.random_range(-64.0..64.0);
        let (re, im) = common::ramp_hat(l);
        let got = q.transform(&r, l, QUAD_TOL).unwrap();
        assert!((got.re - re).abs() < 1e-10 && (got.im - im).abs() < 1e-10, "λ = {l}");
        let c = ramp_coeff(l);
        assert!((c.re - re).abs() < 1e-12 && (c.im - im).abs() < 1e-12, "λ = {l}");
    }
}

#[test]
fn ramp_coefficient_near_zero() {
    // (sin a − a)/(2a²) = −a/12 + a³/240 − …
    for l in [1e-9, 1e-6, 3e-5] {
        let a = std::f64::consts::PI * l;
        let want = -a / 12.0 + a.powi(3) / 240.0;
        assert!((ramp_coeff(l).im - want).abs() < 1e-15);
    }
    assert_eq!(ramp_coeff(0.0).norm(), 0.0);
}

#[test]
fn jump_values_of_test_functions() {
    let f1 = TestFunction::F1.piecewise();
    for &(x, h) in &f1.jumps {
        assert!((f1.limit_jump(x) - h).abs() < 1e-6);
    }
    let f2 = TestFunction::F2.piecewise();
    assert!((f2.limit_jump(-0.5) - 41.0 / 32.0).abs() < 1e-6);
    let f3 = TestFunction::F3.piecewise();
    assert_eq!(f3.jumps.len(), 2);
    for &(x, h) in &f3.jumps {
        assert!((f3.limit_jump(x) - h).abs() < 1e-6);
    }
}

#[test]
fn noise_statistics_and_determinism() {
    let ms = jittered_modes(2000, 3).unwrap();
    let clean = FourierData { values: vec![C64::new(0.0, 0.0); ms.len()], modes: ms, noise_std: 0.0, seed: None };
    assert_eq!(add_noise(&clean, 0.0, 1).unwrap().values, clean.values);
    let a = add_noise(&clean, 0.1, 5).unwrap();
    assert_eq!(a.values, add_noise(&clean, 0.1, 5).unwrap().values);
    assert_ne!(a.values, add_noise(&clean, 0.1, 6).unwrap().values);
    let n = a.values.len() as f64;
    let var_re = a.values.iter().map(|v| v.re * v.re).sum::<f64>() / n;
    let var_im = a.values.iter().map(|v| v.im * v.im).sum::<f64>() / n;
    // each part carries half of σ² = 0.01
    assert!((var_re - 0.005).abs() < 0.0008 && (var_im - 0.005).abs() < 0.0008, "{var_re} {var_im}");
    assert!(add_noise(&clean, -1.0, 1).is_err());
}
