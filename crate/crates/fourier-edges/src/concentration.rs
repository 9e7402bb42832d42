//! Concentration-factor design.
//!
//! The kernel generator `ĥ` is chosen so that the dual-frame sum `Fĥ`
//! approximates a unit spike on the grid while the response `Sĥ` to a
//! smooth template stays small. Both fits are measured in ℓ1.

use std::f64::consts::PI;
use std::str::FromStr;

use nalgebra::{DMatrix, DVector};
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::frames::FrameSystem;
use crate::sampling::{PiecewiseFunction, Quadrature, C64, QUAD_TOL};

/// Fourier coefficient of the unit ramp (jump 1 at 0, slope −½).
pub fn ramp_coeff(lambda: f64) -> C64 {
    if lambda == 0.0 {
        return C64::new(0.0, 0.0);
    }
    let a = PI * lambda;
    let im = if a.abs() < 1e-4 {
        // (sin a − a)/(2a²) loses digits near zero
        -a / 12.0 + a * a * a / 240.0
    } else {
        (a.sin() - a) / (2.0 * a * a)
    };
    C64::new(0.0, im)
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Template {
    /// `s₁(x) = (|x| − 1)/2`
    Hat,
    /// `s₂`: cubic pieces meeting at 0
    Cubic,
}

impl FromStr for Template {
    type Err = Error;
    fn from_str(s: &str) -> Result<Self> {
        match s.to_ascii_lowercase().as_str() {
            "s1" | "hat" => Ok(Template::Hat),
            "s2" | "cubic" => Ok(Template::Cubic),
            other => Err(Error::Invalid(format!("unknown template '{other}'"))),
        }
    }
}

fn hat(x: f64) -> f64 {
    if x <= 0.0 {
        -(x + 1.0) / 2.0
    } else {
        (x - 1.0) / 2.0
    }
}

fn cubic(x: f64) -> f64 {
    if x <= 0.0 {
        -(x + 1.0).powi(3) / 12.0
    } else {
        (x - 1.0).powi(3) / 12.0 - 1.0 / 6.0
    }
}

impl Template {
    pub fn name(self) -> &'static str {
        match self {
            Template::Hat => "s1",
            Template::Cubic => "s2",
        }
    }

    pub fn function(self) -> PiecewiseFunction {
        let eval = match self {
            Template::Hat => hat,
            Template::Cubic => cubic,
        };
        PiecewiseFunction { name: self.name().into(), breaks: vec![-1.0, 0.0, 1.0], eval, jumps: vec![] }
    }

    pub fn value(self, x: f64) -> f64 {
        (self.function().eval)(x)
    }

    pub fn coeffs(self, modes: &[f64]) -> Result<Vec<C64>> {
        match self {
            Template::Hat => Ok(modes.iter().map(|&l| hat_coeff(l)).collect()),
            Template::Cubic => {
                let f = self.function();
                let mut q = Quadrature::new();
                modes
                    .iter()
                    .enumerate()
                    .map(|(k, &l)| q.transform(&f, l, QUAD_TOL).ok_or(Error::Quadrature { mode: k, lambda: l }))
                    .collect()
            }
        }
    }
}

fn hat_coeff(lambda: f64) -> C64 {
    let a = PI * lambda;
    let re = if a.abs() < 1e-4 { -0.25 + a * a / 48.0 } else { (a.cos() - 1.0) / (2.0 * a * a) };
    C64::new(re, 0.0)
}

/// Real-stacked design operators: rows `[Re; Im]` over the grid.
#[derive(Debug, Clone)]
pub struct DesignMatrices {
    pub f: DMatrix<f64>,
    pub s: DMatrix<f64>,
    pub d: DVector<f64>,
    pub center: usize,
}

pub fn build_design_matrices(fs: &FrameSystem, template: Template) -> Result<DesignMatrices> {
    let shat = template.coeffs(&fs.modes)?;
    let nx = fs.grid.len();
    let nk = fs.modes.len();
    let ratio: Vec<C64> = fs
        .modes
        .iter()
        .zip(&shat)
        .map(|(&l, &s)| {
            let r = ramp_coeff(l);
            if r.norm() > 0.0 {
                s / r
            } else {
                C64::new(0.0, 0.0)
            }
        })
        .collect();
    let mut f = DMatrix::zeros(2 * nx, nk);
    let mut s = DMatrix::zeros(2 * nx, nk);
    for k in 0..nk {
        for j in 0..nx {
            let v = fs.dual_at(j, k);
            f[(j, k)] = v.re;
            f[(nx + j, k)] = v.im;
            let w = v * ratio[k];
            s[(j, k)] = w.re;
            s[(nx + j, k)] = w.im;
        }
    }
    let center = fs.grid.nearest(0.0);
    let mut d = DVector::zeros(2 * nx);
    d[center] = 1.0;
    Ok(DesignMatrices { f, s, d, center })
}

/// Parameterization of `ĥ`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase", tag = "kind", content = "order")]
pub enum DesignBasis {
    /// Every entry of `ĥ` free.
    Free,
    /// `ĥ(λ) = Σ_{p=1..P} c_p u^p` with `u = |λ|/N`, zero outside the band.
    Powers(usize),
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct DesignOptions {
    pub mu: f64,
    pub basis: DesignBasis,
    /// Enforce `Re(Fĥ)` at the grid centre equal to `d` there.
    pub peak: bool,
    pub max_iter: usize,
    pub tol: f64,
}

impl Default for DesignOptions {
    fn default() -> Self {
        Self { mu: 1000.0, basis: DesignBasis::Powers(2), peak: true, max_iter: 500, tol: 1e-6 }
    }
}

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct ConcentrationFactor {
    pub sigma: Vec<C64>,
    pub h_hat: Vec<f64>,
    pub mu: f64,
    pub residual_delta: f64,
    pub residual_smooth: f64,
    pub iterations: usize,
    pub converged: bool,
}

impl ConcentrationFactor {
    pub fn from_h_hat(modes: &[f64], h_hat: Vec<f64>, mu: f64) -> Self {
        let sigma = sigma_from_h(modes, &h_hat);
        Self { sigma, h_hat, mu, residual_delta: f64::NAN, residual_smooth: f64::NAN, iterations: 0, converged: true }
    }
}

pub fn sigma_from_h(modes: &[f64], h: &[f64]) -> Vec<C64> {
    modes
        .iter()
        .zip(h)
        .map(|(&l, &hk)| {
            let r = ramp_coeff(l);
            if r.norm() > 0.0 {
                C64::new(hk, 0.0) / r
            } else {
                C64::new(0.0, 0.0)
            }
        })
        .collect()
}

pub fn basis_matrix(modes: &[f64], n: usize, basis: DesignBasis) -> DMatrix<f64> {
    match basis {
        DesignBasis::Free => DMatrix::identity(modes.len(), modes.len()),
        DesignBasis::Powers(p) => DMatrix::from_fn(modes.len(), p.max(1), |k, c| {
            let u = modes[k].abs() / n as f64;
            if u <= 1.0 {
                u.powi(c as i32 + 1)
            } else {
                0.0
            }
        }),
    }
}

fn l1(v: &DVector<f64>) -> f64 {
    v.iter().map(|x| x.abs()).sum()
}

/// Minimizes `‖Fĥ − d‖₁ + μ‖Sĥ‖₁` over `ĥ = Φc` by iteratively reweighted
/// least squares with a shrinking smoothing width.
pub fn design_sigma(dm: &DesignMatrices, modes: &[f64], n: usize, opts: &DesignOptions) -> Result<ConcentrationFactor> {
    if !(opts.mu > 0.0) {
        return Err(Error::Invalid(format!("mu must be positive, got {}", opts.mu)));
    }
    let phi = basis_matrix(modes, n, opts.basis);
    let fp = &dm.f * &phi;
    let sp = &dm.s * &phi;
    let rows_f = fp.nrows();
    let p = phi.ncols();
    let mut g = DMatrix::zeros(rows_f + sp.nrows(), p);
    g.rows_mut(0, rows_f).copy_from(&fp);
    g.rows_mut(rows_f, sp.nrows()).copy_from(&(&sp * opts.mu));
    let mut t = DVector::zeros(g.nrows());
    t.rows_mut(0, rows_f).copy_from(&dm.d);

    // affine parameterization c = c0 + Z z absorbing the peak constraint
    let (c0, z) = if opts.peak {
        let a = fp.row(dm.center).transpose();
        let an = a.norm_squared();
        if an == 0.0 {
            return Err(Error::DegenerateDesign(0.0));
        }
        let c0 = &a * (dm.d[dm.center] / an);
        (c0, null_space(&a))
    } else {
        (DVector::zeros(p), DMatrix::identity(p, p))
    };
    let h = &g * &z;
    let tp = &t - &g * &c0;

    let objective = |zz: &DVector<f64>| l1(&(&h * zz - &tp));
    let mut zc = DVector::zeros(z.ncols());
    let mut best = (objective(&zc), zc.clone());
    let mut eps = tp.amax().max(1e-12);
    let mut converged = z.ncols() == 0;
    let mut iterations = 0;
    let mut prev = best.0;
    while !converged && iterations < opts.max_iter {
        iterations += 1;
        let r = &h * &zc - &tp;
        let w = r.map(|ri| 1.0 / (ri * ri + eps * eps).sqrt());
        let hw = DMatrix::from_fn(h.nrows(), h.ncols(), |i, j| h[(i, j)] * w[i]);
        let normal = hw.transpose() * &h;
        let rhs = hw.transpose() * &tp;
        zc = solve_spd(normal, rhs)?;
        let obj = objective(&zc);
        if obj < best.0 {
            best = (obj, zc.clone());
        }
        let floor = eps <= 1e-8;
        if floor && (prev - obj).abs() <= opts.tol * obj.max(1e-300) {
            converged = true;
        }
        prev = obj;
        eps = (eps * 0.5).max(1e-8);
    }
    let c = &c0 + &z * &best.1;
    let hh = &phi * &c;
    let residual_delta = l1(&(&dm.f * &hh - &dm.d));
    let residual_smooth = l1(&(&dm.s * &hh));
    let h_hat: Vec<f64> = hh.iter().copied().collect();
    Ok(ConcentrationFactor {
        sigma: sigma_from_h(modes, &h_hat),
        h_hat,
        mu: opts.mu,
        residual_delta,
        residual_smooth,
        iterations,
        converged,
    })
}

fn null_space(a: &DVector<f64>) -> DMatrix<f64> {
    // columns orthogonal to a by Gram–Schmidt on the unit vectors
    let p = a.len();
    if p == 1 {
        return DMatrix::zeros(1, 0);
    }
    let v0 = a / a.norm();
    let mut basis: Vec<DVector<f64>> = vec![v0];
    for i in 0..p {
        let mut e = DVector::zeros(p);
        e[i] = 1.0;
        for b in &basis {
            let proj = b.dot(&e);
            e -= b * proj;
        }
        let nrm = e.norm();
        if nrm > 1e-10 {
            basis.push(e / nrm);
        }
        if basis.len() == p {
            break;
        }
    }
    DMatrix::from_columns(&basis[1..])
}

fn solve_spd(a: DMatrix<f64>, b: DVector<f64>) -> Result<DVector<f64>> {
    let scale = a.diagonal().amax().max(1e-300);
    let mut reg = a.clone();
    for i in 0..reg.nrows() {
        reg[(i, i)] += 1e-14 * scale;
    }
    if let Some(ch) = reg.cholesky() {
        return Ok(ch.solve(&b));
    }
    a.svd(true, true).solve(&b, 1e-14 * scale).map_err(|e| Error::Invalid(e.to_string()))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::sampling::{ramp, Quadrature};

    #[test]
    fn ramp_coeff_values() {
        assert_eq!(ramp_coeff(0.0), C64::new(0.0, 0.0));
        assert!((ramp_coeff(1.0) - C64::new(0.0, -1.0 / (2.0 * PI))).norm() < 1e-15);
        assert!((ramp_coeff(-1.0) - C64::new(0.0, 1.0 / (2.0 * PI))).norm() < 1e-15);
        // series branch agrees with the direct formula just above the switch
        let l = 2e-5;
        let a = PI * l;
        let direct = (a.sin() - a) / (2.0 * a * a);
        assert!((ramp_coeff(l).im - direct).abs() < 1e-9);
    }

    #[test]
    fn ramp_coeff_matches_quadrature() {
        let mut q = Quadrature::new();
        let r = ramp();
        for &l in &[0.3, 1.0, -2.7, 17.25, 63.9] {
            let v = q.transform(&r, l, QUAD_TOL).unwrap();
            assert!((v - ramp_coeff(l)).norm() < 1e-12, "{l}");
        }
    }

    #[test]
    fn hat_coeffs() {
        assert!((hat_coeff(0.0).re + 0.25).abs() < 1e-15);
        let mut q = Quadrature::new();
        let f = Template::Hat.function();
        for &l in &[0.0, 0.7, 5.0, -12.3] {
            let v = q.transform(&f, l, QUAD_TOL).unwrap();
            assert!((v - hat_coeff(l)).norm() < 1e-12);
        }
    }

    #[test]
    fn cubic_mean_matches_exact_integral() {
        // ½[∫₋₁⁰ −(x+1)³/12 + ∫₀¹ ((x−1)³/12 − 1/6)] = ½(−1/48 − 1/48 − 1/6)
        let want = 0.5 * (-1.0 / 48.0 - 1.0 / 48.0 - 1.0 / 6.0);
        let v = Template::Cubic.coeffs(&[0.0]).unwrap()[0];
        assert!((v.re - want).abs() < 1e-13 && v.im.abs() < 1e-15);
    }

    #[test]
    fn design_matrices_shapes_and_zero_column() {
        let modes: Vec<f64> = (-8..=8).map(|k| k as f64).collect();
        let fs = FrameSystem::new(&modes, 8, 8).unwrap();
        let dm = build_design_matrices(&fs, Template::Hat).unwrap();
        assert_eq!(dm.f.shape(), (34, 17));
        assert_eq!(dm.s.shape(), (34, 17));
        assert_eq!(dm.d.sum(), 1.0);
        assert!(dm.s.column(8).iter().all(|&v| v == 0.0));
    }

    #[test]
    fn zero_target_gives_zero_design() {
        let modes: Vec<f64> = (-8..=8).map(|k| k as f64).collect();
        let fs = FrameSystem::new(&modes, 8, 8).unwrap();
        let mut dm = build_design_matrices(&fs, Template::Hat).unwrap();
        dm.d.fill(0.0);
        for peak in [true, false] {
            let opts = DesignOptions { peak, ..Default::default() };
            let cf = design_sigma(&dm, &modes, 8, &opts).unwrap();
            assert!(cf.h_hat.iter().all(|h| h.abs() < 1e-12));
        }
    }

    #[test]
    fn design_reaches_unit_peak() {
        let modes: Vec<f64> = (-32..=32).map(|k| k as f64).collect();
        let fs = FrameSystem::new(&modes, 32, 32).unwrap();
        let dm = build_design_matrices(&fs, Template::Hat).unwrap();
        let cf = design_sigma(&dm, &modes, 32, &DesignOptions::default()).unwrap();
        let hh = DVector::from_vec(cf.h_hat.clone());
        let fh = &dm.f * &hh;
        assert!((fh[dm.center] - 1.0).abs() < 1e-10);
        // optimum of the same problem solved as a linear program
        assert!((cf.residual_delta - 32.0 / 11.0).abs() < 1e-6, "{}", cf.residual_delta);
        assert_eq!(cf.sigma[32], C64::new(0.0, 0.0));
        // residuals are recomputable from the returned ĥ
        let rd: f64 = (&fh - &dm.d).iter().map(|v| v.abs()).sum();
        assert!((rd - cf.residual_delta).abs() < 1e-10);
    }

    #[test]
    fn mu_must_be_positive() {
        let modes: Vec<f64> = (-4..=4).map(|k| k as f64).collect();
        let fs = FrameSystem::new(&modes, 4, 4).unwrap();
        let dm = build_design_matrices(&fs, Template::Hat).unwrap();
        let opts = DesignOptions { mu: 0.0, ..Default::default() };
        assert!(design_sigma(&dm, &modes, 4, &opts).is_err());
    }
}
