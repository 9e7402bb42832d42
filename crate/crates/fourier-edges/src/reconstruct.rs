//! Edge-adaptive ℓ2 reconstruction: a least-squares fit to the Fourier data
//! with a high-order difference penalty switched off near detected edges.

use std::f64::consts::PI;

use nalgebra::{DMatrix, DVector};

use crate::error::{Error, Result};
use crate::frames::Grid;
use crate::sampling::C64;

fn binomial(m: usize, q: usize) -> f64 {
    (0..q).fold(1.0, |acc, i| acc * (m - i) as f64 / (i + 1) as f64)
}

/// Undivided `m`-th order differences on the `2J+1` grid values.
pub fn pa_operator(m: usize, j: usize) -> Result<DMatrix<f64>> {
    if !(1..=6).contains(&m) {
        return Err(Error::Invalid(format!("order must be in 1..=6, got {m}")));
    }
    let n = 2 * j + 1;
    if n <= m {
        return Err(Error::Invalid(format!("grid of {n} points too small for order {m}")));
    }
    let mut l = DMatrix::zeros(n - m, n);
    for r in 0..n - m {
        for q in 0..=m {
            // sign chosen so the leading entry of an odd stencil is negative
            let s = if (m - q) % 2 == 0 { 1.0 } else { -1.0 };
            l[(r, r + q)] = s * binomial(m, q);
        }
    }
    Ok(l)
}

/// Zeros every grid point touched by a stencil row whose response to `g`
/// exceeds `tau`; ones elsewhere.
pub fn build_mask(g: &[f64], m: usize, tau: f64) -> Result<Vec<u8>> {
    if !(tau > 0.0) {
        return Err(Error::Invalid(format!("tau must be positive, got {tau}")));
    }
    let n = g.len();
    if n % 2 == 0 {
        return Err(Error::Dimension(format!("edge vector length {n} is not 2J+1")));
    }
    let l = pa_operator(m, n / 2)?;
    let resp = &l * DVector::from_column_slice(g);
    let mut mask = vec![1u8; n];
    for (r, v) in resp.iter().enumerate() {
        if v.abs() > tau {
            mask[r..=r + m].iter_mut().for_each(|x| *x = 0);
        }
    }
    Ok(mask)
}

/// Penalty rows kept by the mask: a row survives only if every point its
/// stencil touches is unmasked.
pub fn masked_operator(l: &DMatrix<f64>, mask: &[u8]) -> Result<DMatrix<f64>> {
    if mask.len() != l.ncols() {
        return Err(Error::Dimension(format!("mask has {} entries, operator {} columns", mask.len(), l.ncols())));
    }
    if mask.iter().any(|&v| v > 1) {
        return Err(Error::Invalid("mask entries must be 0 or 1".into()));
    }
    let m = l.ncols() - l.nrows();
    let mut out = l.clone();
    for r in 0..l.nrows() {
        if mask[r..=r + m].iter().any(|&v| v == 0) {
            out.row_mut(r).fill(0.0);
        }
    }
    Ok(out)
}

/// `F[k, j] = (Δx/2) e^{−iπλ_k x_j}` with `Δx = 1/J`, stacked as `[Re F; Im F]`.
pub fn measurement_matrix(modes: &[f64], grid: &Grid) -> DMatrix<f64> {
    let k = modes.len();
    let w = grid.spacing() / 2.0;
    DMatrix::from_fn(2 * k, grid.len(), |r, j| {
        let ph = -PI * modes[r % k] * grid.points[j];
        if r < k {
            w * ph.cos()
        } else {
            w * ph.sin()
        }
    })
}

/// Minimizes `‖Ff − f̂‖² + λ‖M Lf‖²` over real grid values `f`.
pub fn edge_adaptive_l2(modes: &[f64], values: &[C64], grid: &Grid, mask: &[u8], l: &DMatrix<f64>, lambda: f64) -> Result<Vec<f64>> {
    if !(lambda > 0.0) {
        return Err(Error::Invalid(format!("lambda must be positive, got {lambda}")));
    }
    if modes.len() != values.len() {
        return Err(Error::Dimension(format!("{} samples for {} modes", values.len(), modes.len())));
    }
    if l.ncols() != grid.len() {
        return Err(Error::Dimension(format!("operator has {} columns, grid {} points", l.ncols(), grid.len())));
    }
    let f = measurement_matrix(modes, grid);
    let b = DVector::from_iterator(2 * values.len(), values.iter().map(|c| c.re).chain(values.iter().map(|c| c.im)));
    let ml = masked_operator(l, mask)?;
    let normal = f.transpose() * &f + ml.transpose() * &ml * lambda;
    let rhs = f.transpose() * b;
    let ch = normal.cholesky().ok_or(Error::Singular)?;
    Ok(ch.solve(&rhs).iter().copied().collect())
}

/// `‖M L f‖²` for a given signal.
pub fn penalty(l: &DMatrix<f64>, mask: &[u8], f: &[f64]) -> Result<f64> {
    let ml = masked_operator(l, mask)?;
    Ok((ml * DVector::from_column_slice(f)).norm_squared())
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn stencils() {
        let l1 = pa_operator(1, 3).unwrap();
        assert_eq!(l1.shape(), (6, 7));
        assert_eq!((l1[(0, 0)], l1[(0, 1)]), (-1.0, 1.0));
        let l2 = pa_operator(2, 3).unwrap();
        assert_eq!((l2[(2, 2)], l2[(2, 3)], l2[(2, 4)]), (1.0, -2.0, 1.0));
        assert!(pa_operator(0, 3).is_err());
        assert!(pa_operator(7, 9).is_err());
    }

    #[test]
    fn spike_mask() {
        let j = 5;
        let mut g = vec![0.0; 11];
        g[4] = 1.0;
        let mask = build_mask(&g, 1, 1.0 / 11.0).unwrap();
        let zeros: Vec<usize> = (0..11).filter(|&i| mask[i] == 0).collect();
        assert_eq!(zeros, vec![3, 4, 5]);
        assert!(build_mask(&vec![0.0; 2 * j + 1], 2, 0.1).unwrap().iter().all(|&v| v == 1));
        assert!(build_mask(&g, 1, f64::INFINITY).unwrap().iter().all(|&v| v == 1));
    }

    #[test]
    fn masked_rows_carry_no_penalty() {
        let l = pa_operator(2, 4).unwrap();
        let mut mask = vec![1u8; 9];
        mask[4] = 0;
        let f: Vec<f64> = (0..9).map(|i| (i as f64).powi(2) * 0.1).collect();
        let mut bumped = f.clone();
        bumped[4] += 5.0;
        let a = penalty(&l, &mask, &f).unwrap();
        let b = penalty(&l, &mask, &bumped).unwrap();
        assert!((a - b).abs() < 1e-12);
    }

    #[test]
    fn vanishing_lambda_fits_data() {
        let grid = Grid::new(4).unwrap();
        let modes: Vec<f64> = (-8..=8).map(|k| k as f64 * 0.5).collect();
        let truth: Vec<f64> = grid.points.iter().map(|x| x * x - 0.3 * x).collect();
        let f = measurement_matrix(&modes, &grid);
        let stacked = &f * DVector::from_column_slice(&truth);
        let k = modes.len();
        let vals: Vec<C64> = (0..k).map(|i| C64::new(stacked[i], stacked[i + k])).collect();
        let l = pa_operator(2, 4).unwrap();
        let rec = edge_adaptive_l2(&modes, &vals, &grid, &[1; 9], &l, 1e-12).unwrap();
        for (r, t) in rec.iter().zip(&truth) {
            assert!((r - t).abs() < 1e-6);
        }
    }
}
