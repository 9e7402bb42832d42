mod common;

use fourier_edges::frames::*;
use fourier_edges::sampling::{jittered_modes, logarithmic_modes, quadratic_modes, C64};
use nalgebra::DMatrix;
use proptest::prelude::*;

proptest! {
    #[test]
    fn reconstruction_is_linear(seed in any::<u64>(), al in -3.0f64..3.0, be in -3.0f64..3.0) {
        let ms = jittered_modes(8, seed).unwrap();
        let fs = FrameSystem::new(&ms.modes, 8, 8).unwrap();
        let u: Vec<C64> = (0..17).map(|k| C64::new((k as f64 * 0.7).sin(), (k as f64).cos())).collect();
        let v: Vec<C64> = (0..17).map(|k| C64::new(1.0 / (1.0 + k as f64), (k as f64 * 0.3).sin())).collect();
        let w: Vec<C64> = u.iter().zip(&v).map(|(a, b)| a * al + b * be).collect();
        let (ru, rv, rw) = (fs.reconstruct(&u).unwrap(), fs.reconstruct(&v).unwrap(), fs.reconstruct(&w).unwrap());
        for j in 0..ru.len() {
            prop_assert!((rw[j] - (ru[j] * al + rv[j] * be)).norm() < 1e-9);
        }
    }
}

#[test]
fn jittered_frame_reproduces_cosine() {
    // ½∫cos(πx)e^{−iπλx}dx = ½(sinc(1 − λ) + sinc(1 + λ))
    let ms = jittered_modes(12, 7).unwrap();
    let fs = FrameSystem::new(&ms.modes, 12, 16).unwrap();
    let vals: Vec<C64> = ms.modes.iter().map(|&l| C64::new(0.5 * (common::sinc(1.0 - l) + common::sinc(1.0 + l)), 0.0)).collect();
    let rec = fs.reconstruct(&vals).unwrap();
    for (j, r) in rec.iter().enumerate() {
        let x = fs.grid.points[j];
        assert!((r.re - (std::f64::consts::PI * x).cos()).abs() < 1e-8 && r.im.abs() < 1e-8);
    }
}

#[test]
fn pseudo_inverse_penrose_conditions() {
    let mut rng = common::rng(2);
    let a = common::gaussian_matrix(&mut rng, 9, 5);
    let b = pseudo_inverse(&a, PINV_RTOL).b;
    assert!((&a * &b * &a - &a).abs().max() < 1e-10);
    assert!((&b * &a * &b - &b).abs().max() < 1e-10);
    let ab = &a * &b;
    assert!((&ab - ab.transpose()).abs().max() < 1e-10);
    let rank1 = DMatrix::from_fn(4, 4, |i, j| (i + 1) as f64 * (j + 1) as f64);
    assert_eq!(pseudo_inverse(&rank1, PINV_RTOL).rank, 1);
}

#[test]
fn conditioning_by_pattern() {
    // diagnostic only: the in-band frames are compared, not ranked
    for ms in [jittered_modes(128, 0).unwrap(), quadratic_modes(256).unwrap(), logarithmic_modes(1024, 1024f64.ln()).unwrap()] {
        let n = default_bandwidth(&ms);
        let idx = in_band(&ms.modes, n);
        let modes: Vec<f64> = idx.iter().map(|&k| ms.modes[k]).collect();
        let fs = FrameSystem::new(&modes, n, 64).unwrap();
        println!("{:?}: N = {n}, modes {}, cond {:.3e}", ms.pattern, modes.len(), fs.cond);
        assert!(fs.cond.is_finite());
    }
}
