#![allow(dead_code)]

use nalgebra::{DMatrix, DVector};
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rand_distr::{Distribution, StandardNormal};

pub fn rng(seed: u64) -> ChaCha8Rng {
    ChaCha8Rng::seed_from_u64(seed)
}

pub fn gaussian_matrix(rng: &mut ChaCha8Rng, r: usize, c: usize) -> DMatrix<f64> {
    DMatrix::from_fn(r, c, |_, _| StandardNormal.sample(rng))
}

pub fn gaussian_vector(rng: &mut ChaCha8Rng, n: usize) -> DVector<f64> {
    DVector::from_fn(n, |_, _| StandardNormal.sample(rng))
}

/// Cyclic coordinate descent for `½‖Ag − b‖² + λ‖g‖₁`, run to a tiny sweep change.
pub fn cd_lasso(a: &DMatrix<f64>, b: &DVector<f64>, lambda: f64) -> DVector<f64> {
    let n = a.ncols();
    let norms: Vec<f64> = (0..n).map(|j| a.column(j).norm_squared()).collect();
    let mut g: DVector<f64> = DVector::zeros(n);
    let mut r = b.clone();
    for _ in 0..100_000 {
        let mut delta = 0.0f64;
        for j in 0..n {
            if norms[j] == 0.0 {
                continue;
            }
            let col = a.column(j);
            let rho: f64 = col.dot(&r) + norms[j] * g[j];
            let new = rho.signum() * (rho.abs() - lambda).max(0.0) / norms[j];
            let d = new - g[j];
            if d != 0.0 {
                r -= col * d;
                g[j] = new;
                delta = delta.max(d.abs());
            }
        }
        if delta < 1e-15 {
            break;
        }
    }
    g
}

/// `½∫_{−1}^{1} r(x) e^{−iπλx} dx` for the unit ramp, in closed form.
pub fn ramp_hat(lambda: f64) -> (f64, f64) {
    let a = std::f64::consts::PI * lambda;
    if lambda == 0.0 {
        return (0.0, 0.0);
    }
    (0.0, (a.sin() - a) / (2.0 * a * a))
}

/// `sin(πt)/(πt)`.
pub fn sinc(t: f64) -> f64 {
    if t == 0.0 {
        1.0
    } else {
        let a = std::f64::consts::PI * t;
        a.sin() / a
    }
}
