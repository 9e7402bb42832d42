//! Sparse linear model `Θg ≈ y` linking grid jumps to filtered frame data.

use std::f64::consts::PI;

use nalgebra::{DMatrix, DVector};

use crate::concentration::{ramp_coeff, ConcentrationFactor};
use crate::error::{Error, Result};
use crate::frames::FrameSystem;
use crate::sampling::C64;

#[derive(Debug, Clone)]
pub struct ForwardModel {
    /// `[B(σ⊙r̂)]_l`, one weight per integer mode.
    pub weights: Vec<C64>,
    pub theta_re: DMatrix<f64>,
    pub theta_im: DMatrix<f64>,
    pub y: Vec<C64>,
    pub gamma: C64,
    /// `[Re Θ; Im Θ]`
    pub a: DMatrix<f64>,
    /// `[Re y; Im y]`
    pub b: DVector<f64>,
}

fn apply_b(fs: &FrameSystem, v: &[C64]) -> Vec<C64> {
    let re = DVector::from_iterator(v.len(), v.iter().map(|c| c.re));
    let im = DVector::from_iterator(v.len(), v.iter().map(|c| c.im));
    let br = &fs.b * re;
    let bi = &fs.b * im;
    br.iter().zip(bi.iter()).map(|(&r, &i)| C64::new(r, i)).collect()
}

/// Kernel weights and normalization `γ = Σ_l Σ_k b_{l,k} σ_k r̂(λ_k)`.
pub fn waveform_weights(fs: &FrameSystem, sigma: &[C64]) -> Result<(Vec<C64>, C64)> {
    if sigma.len() != fs.modes.len() {
        return Err(Error::Dimension(format!("{} factors for {} modes", sigma.len(), fs.modes.len())));
    }
    let sr: Vec<C64> = fs.modes.iter().zip(sigma).map(|(&l, &s)| s * ramp_coeff(l)).collect();
    let w = apply_b(fs, &sr);
    let gamma: C64 = w.iter().sum();
    Ok((w, gamma))
}

/// Normalized waveform kernel `W(x) = (1/γ) Σ_l w_l e^{iπlx}`.
pub struct Waveform {
    pub weights: Vec<C64>,
    pub gamma: C64,
    pub n: usize,
}

impl Waveform {
    pub fn new(fs: &FrameSystem, sigma: &[C64]) -> Result<Self> {
        let (weights, gamma) = waveform_weights(fs, sigma)?;
        if gamma.norm() < 1e-12 {
            return Err(Error::DegenerateDesign(gamma.norm()));
        }
        Ok(Self { weights, gamma, n: fs.n })
    }

    pub fn eval(&self, x: f64) -> C64 {
        let s: C64 = self
            .weights
            .iter()
            .enumerate()
            .map(|(c, w)| w * C64::from_polar(1.0, PI * (c as f64 - self.n as f64) * x))
            .sum();
        s / self.gamma
    }
}

/// `y = B(σ⊙f̂)` and `Θ[l, j] = [B(σ⊙r̂)]_l e^{−iπ l x_j}`.
pub fn build_model(fs: &FrameSystem, cf: &ConcentrationFactor, values: &[C64]) -> Result<ForwardModel> {
    build_model_sigma(fs, &cf.sigma, values)
}

pub fn build_model_sigma(fs: &FrameSystem, sigma: &[C64], values: &[C64]) -> Result<ForwardModel> {
    if values.len() != fs.modes.len() {
        return Err(Error::Dimension(format!("{} samples for {} modes", values.len(), fs.modes.len())));
    }
    let (weights, gamma) = waveform_weights(fs, sigma)?;
    let sf: Vec<C64> = sigma.iter().zip(values).map(|(s, f)| s * f).collect();
    let y = apply_b(fs, &sf);
    let rows = 2 * fs.n + 1;
    let cols = fs.grid.len();
    let mut theta_re = DMatrix::zeros(rows, cols);
    let mut theta_im = DMatrix::zeros(rows, cols);
    for (r, w) in weights.iter().enumerate() {
        let l = r as f64 - fs.n as f64;
        for (j, &x) in fs.grid.points.iter().enumerate() {
            let v = w * C64::from_polar(1.0, -PI * l * x);
            theta_re[(r, j)] = v.re;
            theta_im[(r, j)] = v.im;
        }
    }
    let mut a = DMatrix::zeros(2 * rows, cols);
    a.rows_mut(0, rows).copy_from(&theta_re);
    a.rows_mut(rows, rows).copy_from(&theta_im);
    let b = DVector::from_iterator(2 * rows, y.iter().map(|c| c.re).chain(y.iter().map(|c| c.im)));
    Ok(ForwardModel { weights, theta_re, theta_im, y, gamma, a, b })
}

impl ForwardModel {
    pub fn rows(&self) -> usize {
        self.theta_re.nrows()
    }

    pub fn cols(&self) -> usize {
        self.theta_re.ncols()
    }

    /// Complex residual norm `‖Θg − y‖₂`.
    pub fn residual_norm(&self, g: &[f64]) -> f64 {
        let g = DVector::from_column_slice(g);
        let re = &self.theta_re * &g;
        let im = &self.theta_im * &g;
        re.iter()
            .zip(im.iter())
            .zip(&self.y)
            .map(|((r, i), y)| (C64::new(*r, *i) - y).norm_sqr())
            .sum::<f64>()
            .sqrt()
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::concentration::{build_design_matrices, design_sigma, DesignOptions, Template};
    use crate::sampling::{fourier_samples, ModeSet, Pattern, PiecewiseFunction, QUAD_TOL};

    fn uniform(m: usize) -> Vec<f64> {
        (-(m as i64)..=m as i64).map(|k| k as f64).collect()
    }

    fn designed(m: usize, j: usize) -> (FrameSystem, ConcentrationFactor) {
        let modes = uniform(m);
        let fs = FrameSystem::new(&modes, m, j).unwrap();
        let dm = build_design_matrices(&fs, Template::Hat).unwrap();
        let cf = design_sigma(&dm, &modes, m, &DesignOptions::default()).unwrap();
        (fs, cf)
    }

    #[test]
    fn shapes_and_columns() {
        let (fs, cf) = designed(8, 6);
        let vals = vec![C64::new(0.0, 0.0); 17];
        let fm = build_model(&fs, &cf, &vals).unwrap();
        assert_eq!((fm.rows(), fm.cols()), (17, 13));
        assert_eq!(fm.y.len(), 17);
        assert_eq!(fm.a.shape(), (34, 13));
        let mut e = vec![0.0; 13];
        e[4] = 1.0;
        let col = &fm.a * DVector::from_vec(e);
        assert!((col - fm.a.column(4)).norm() < 1e-15);
        assert!(build_model(&fs, &cf, &vals[..3]).is_err());
    }

    #[test]
    fn unit_peak_and_gamma_identity() {
        let (fs, cf) = designed(16, 16);
        let w = Waveform::new(&fs, &cf.sigma).unwrap();
        assert!((w.eval(0.0) - C64::new(1.0, 0.0)).norm() < 1e-12);
        // double-sum form of γ
        let mut g = C64::new(0.0, 0.0);
        for k in 0..fs.modes.len() {
            let s = cf.sigma[k] * ramp_coeff(fs.modes[k]);
            for l in 0..fs.b.nrows() {
                g += s * fs.b[(l, k)];
            }
        }
        assert!((g - w.gamma).norm() < 1e-12);
    }

    #[test]
    fn realification_preserves_residual() {
        let (fs, cf) = designed(8, 8);
        let vals: Vec<C64> = (0..17).map(|k| C64::new((k as f64).sin(), (k as f64 * 0.3).cos())).collect();
        let fm = build_model(&fs, &cf, &vals).unwrap();
        let g: Vec<f64> = (0..17).map(|j| (j as f64 * 0.7).cos()).collect();
        let real = (&fm.a * DVector::from_column_slice(&g) - &fm.b).norm();
        assert!((real - fm.residual_norm(&g)).abs() < 1e-12);
    }

    #[test]
    fn single_ramp_is_localized() {
        let m = 32;
        let (fs, cf) = designed(m, 32);
        let ms = ModeSet { pattern: Pattern::Jittered, m, seed: None, v: None, modes: uniform(m) };
        // ramp shifted to x = 0.25 with height 0.8
        fn shifted(x: f64) -> f64 {
            let t = x - 0.25;
            let t = if t < -1.0 { t + 2.0 } else { t };
            0.8 * if t < 0.0 { -(t + 1.0) / 2.0 } else { (1.0 - t) / 2.0 }
        }
        let f = PiecewiseFunction { name: "r".into(), breaks: vec![-1.0, 0.25, 1.0], eval: shifted, jumps: vec![(0.25, 0.8)] };
        let data = fourier_samples(&f, &ms, QUAD_TOL).unwrap();
        let fm = build_model(&fs, &cf, &data.values).unwrap();
        let g = fm.a.clone().svd(true, true).solve(&fm.b, 1e-12).unwrap();
        let jmax = (0..g.len()).max_by(|&a, &b| g[a].abs().total_cmp(&g[b].abs())).unwrap();
        assert_eq!(jmax, fs.grid.nearest(0.25));
        assert!((g[jmax] - 0.8).abs() < 0.08, "{}", g[jmax]);
    }
}
