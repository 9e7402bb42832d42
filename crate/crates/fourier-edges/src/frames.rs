//! Finite Fourier frames: sinc Gram matrix against integer exponentials,
//! its pseudoinverse, and dual-frame values on the reconstruction grid.

use std::f64::consts::PI;

use nalgebra::DMatrix;

use crate::error::{Error, Result};
use crate::sampling::{FourierData, ModeSet, Pattern, C64};

pub const PINV_RTOL: f64 = 1e-12;

/// Uniform grid `x_j = j/J`, `j = −J..J`.
#[derive(Debug, Clone, PartialEq)]
pub struct Grid {
    pub j: usize,
    pub points: Vec<f64>,
}

impl Grid {
    pub fn new(j: usize) -> Result<Self> {
        if j == 0 {
            return Err(Error::Invalid("J must be at least 1".into()));
        }
        let jf = j as f64;
        let points = (-(j as i64)..=j as i64).map(|i| i as f64 / jf).collect();
        Ok(Self { j, points })
    }

    pub fn len(&self) -> usize {
        self.points.len()
    }

    pub fn is_empty(&self) -> bool {
        self.points.is_empty()
    }

    pub fn spacing(&self) -> f64 {
        1.0 / self.j as f64
    }

    /// Index of the grid point closest to `x`.
    pub fn nearest(&self, x: f64) -> usize {
        let i = (x * self.j as f64).round() as i64 + self.j as i64;
        i.clamp(0, 2 * self.j as i64) as usize
    }
}

/// `2 sin(πt)/(πt)`, continuous at `t = 0`.
pub fn sinc2(t: f64) -> f64 {
    let a = PI * t;
    if a.abs() < 1e-8 {
        2.0 * (1.0 - a * a / 6.0)
    } else {
        2.0 * a.sin() / a
    }
}

/// `Ψ[k, l] = ⟨e^{iπλ_k x}, e^{iπlx}⟩` on [−1, 1] for `l = −N..N`.
pub fn gram_matrix(modes: &[f64], n: usize) -> DMatrix<f64> {
    let cols = 2 * n + 1;
    DMatrix::from_fn(modes.len(), cols, |k, c| sinc2(modes[k] - (c as f64 - n as f64)))
}

#[derive(Debug, Clone)]
pub struct Pinv {
    pub b: DMatrix<f64>,
    pub cond: f64,
    pub rank: usize,
}

/// Moore–Penrose pseudoinverse via SVD, dropping singular values below `rtol·σ_max`.
pub fn pseudo_inverse(a: &DMatrix<f64>, rtol: f64) -> Pinv {
    let (r, c) = a.shape();
    if r == 0 || c == 0 {
        return Pinv { b: DMatrix::zeros(c, r), cond: f64::INFINITY, rank: 0 };
    }
    let svd = a.clone().svd(true, true);
    let smax = svd.singular_values.max();
    if smax == 0.0 {
        return Pinv { b: DMatrix::zeros(c, r), cond: f64::INFINITY, rank: 0 };
    }
    let cut = rtol * smax;
    let u = svd.u.as_ref().unwrap();
    let vt = svd.v_t.as_ref().unwrap();
    let mut b = DMatrix::zeros(c, r);
    let mut rank = 0;
    let mut smin = smax;
    for (i, &s) in svd.singular_values.iter().enumerate() {
        if s > cut {
            rank += 1;
            smin = smin.min(s);
            // b += v_i u_iᵀ / s
            b.ger(1.0 / s, &vt.row(i).transpose(), &u.column(i), 1.0);
        }
    }
    Pinv { b, cond: smax / smin, rank }
}

/// Frame system on a set of modes, band `N` and grid `J`.
#[derive(Debug, Clone)]
pub struct FrameSystem {
    pub modes: Vec<f64>,
    pub n: usize,
    pub psi: DMatrix<f64>,
    pub b: DMatrix<f64>,
    pub grid: Grid,
    pub dual_re: DMatrix<f64>,
    pub dual_im: DMatrix<f64>,
    pub cond: f64,
    pub rank: usize,
}

impl FrameSystem {
    pub fn new(modes: &[f64], n: usize, j: usize) -> Result<Self> {
        if n == 0 {
            return Err(Error::Invalid("N must be at least 1".into()));
        }
        if modes.is_empty() {
            return Err(Error::Invalid("empty mode set".into()));
        }
        let grid = Grid::new(j)?;
        let psi = gram_matrix(modes, n);
        let Pinv { b, cond, rank } = pseudo_inverse(&psi, PINV_RTOL);
        let (dual_re, dual_im) = dual_eval(&b, n, &grid);
        Ok(Self { modes: modes.to_vec(), n, psi, b, grid, dual_re, dual_im, cond, rank })
    }

    pub fn integer_modes(&self) -> impl Iterator<Item = f64> + '_ {
        (0..2 * self.n + 1).map(move |c| c as f64 - self.n as f64)
    }

    /// Dual-frame value `φ̃_k(x_j) = Σ_l B[l,k] e^{iπ l x_j}`.
    pub fn dual_at(&self, j: usize, k: usize) -> C64 {
        C64::new(self.dual_re[(j, k)], self.dual_im[(j, k)])
    }

    /// True when fewer than `2N+1` singular values survived truncation.
    pub fn rank_deficient(&self) -> bool {
        self.rank < 2 * self.n + 1
    }

    /// `T f(x_j) = Σ_k φ̃_k(x_j) ⟨f, e^{iπλ_k·}⟩` with `⟨f, e^{iπλ·}⟩ = 2 f̂(λ)`.
    pub fn reconstruct(&self, values: &[C64]) -> Result<Vec<C64>> {
        if values.len() != self.modes.len() {
            return Err(Error::Dimension(format!(
                "{} samples for {} modes",
                values.len(),
                self.modes.len()
            )));
        }
        let out = (0..self.grid.len())
            .map(|j| (0..values.len()).map(|k| self.dual_at(j, k) * values[k] * 2.0).sum())
            .collect();
        Ok(out)
    }

    pub fn reconstruct_data(&self, data: &FourierData) -> Result<Vec<C64>> {
        self.reconstruct(&data.values)
    }
}

fn dual_eval(b: &DMatrix<f64>, n: usize, grid: &Grid) -> (DMatrix<f64>, DMatrix<f64>) {
    let cols = 2 * n + 1;
    let cos = DMatrix::from_fn(grid.len(), cols, |j, c| (PI * (c as f64 - n as f64) * grid.points[j]).cos());
    let sin = DMatrix::from_fn(grid.len(), cols, |j, c| (PI * (c as f64 - n as f64) * grid.points[j]).sin());
    (&cos * b, &sin * b)
}

/// Largest band `N` over which the modes leave no gap wider than one.
///
/// Jittered modes are a bounded perturbation of the integers and keep the
/// full band `M`.
pub fn default_bandwidth(ms: &ModeSet) -> usize {
    if ms.pattern == Pattern::Jittered {
        return ms.m;
    }
    let mut pos: Vec<f64> = ms.modes.iter().copied().filter(|&l| l >= 0.0).collect();
    pos.sort_by(|a, b| a.total_cmp(b));
    let mut edge = *pos.last().unwrap_or(&1.0);
    for w in pos.windows(2) {
        if w[1] - w[0] > 1.0 {
            edge = w[0];
            break;
        }
    }
    (edge.floor() as usize).clamp(1, ms.m)
}

/// Indices of the modes inside the band `|λ| ≤ N + ½`.
pub fn in_band(modes: &[f64], n: usize) -> Vec<usize> {
    let lim = n as f64 + 0.5;
    (0..modes.len()).filter(|&k| modes[k].abs() <= lim).collect()
}
