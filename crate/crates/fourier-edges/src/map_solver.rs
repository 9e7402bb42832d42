//! ℓ1-regularized (MAP under a Laplace prior) edge estimation.

use nalgebra::{DMatrix, DVector};

use crate::error::{Error, Result};
use crate::forward_model::ForwardModel;

pub fn soft_threshold(v: f64, t: f64) -> f64 {
    v.signum() * (v.abs() - t).max(0.0)
}

/// Regularization weight equivalent to a Laplace prior of rate `mu` under
/// Gaussian noise of variance `nu2`.
pub fn map_lambda(nu2: f64, mu: f64) -> f64 {
    2.0 * nu2 * mu
}

#[derive(Debug, Clone)]
pub struct LassoProblem {
    pub a: DMatrix<f64>,
    pub b: DVector<f64>,
    pub lambda: f64,
    pub tol: f64,
    pub max_iter: usize,
}

impl LassoProblem {
    pub fn new(a: DMatrix<f64>, b: DVector<f64>, lambda: f64) -> Self {
        Self { a, b, lambda, tol: 1e-10, max_iter: 200_000 }
    }

    fn validate(&self) -> Result<()> {
        if !(self.lambda > 0.0) {
            return Err(Error::Invalid(format!("lambda must be positive, got {}", self.lambda)));
        }
        if self.a.nrows() != self.b.len() {
            return Err(Error::Dimension(format!("A has {} rows, b has {}", self.a.nrows(), self.b.len())));
        }
        if self.a.iter().any(|v| !v.is_finite()) {
            return Err(Error::Invalid("A has non-finite entries".into()));
        }
        Ok(())
    }
}

#[derive(Debug, Clone)]
pub struct LassoResult {
    pub g: DVector<f64>,
    pub objective: f64,
    pub iterations: usize,
    pub converged: bool,
    /// Objective after each iteration.
    pub history: Vec<f64>,
}

pub fn lasso_objective(a: &DMatrix<f64>, b: &DVector<f64>, g: &DVector<f64>, lambda: f64) -> f64 {
    0.5 * (a * g - b).norm_squared() + lambda * g.lp_norm(1)
}

/// Largest violation of the ℓ1 optimality conditions at `g`.
pub fn kkt_violation(a: &DMatrix<f64>, b: &DVector<f64>, g: &DVector<f64>, lambda: f64) -> f64 {
    let grad = a.transpose() * (a * g - b);
    grad.iter()
        .zip(g.iter())
        .map(|(&gr, &gi)| if gi == 0.0 { (gr.abs() - lambda).max(0.0) } else { (gr + lambda * gi.signum()).abs() })
        .fold(0.0, f64::max)
}

/// Largest eigenvalue of `AᵀA` from 30 power iterations.
pub fn lipschitz(a: &DMatrix<f64>) -> f64 {
    let n = a.ncols();
    if n == 0 {
        return 0.0;
    }
    let mut v = DVector::from_fn(n, |i, _| 1.0 + (i as f64 * 0.618).fract());
    v /= v.norm();
    let mut est = 0.0;
    for _ in 0..30 {
        let w = a.transpose() * (a * &v);
        est = w.norm();
        if est == 0.0 {
            return 0.0;
        }
        v = w / est;
    }
    est
}

pub fn lasso_solve(p: &LassoProblem) -> Result<LassoResult> {
    lasso_solve_from(p, None)
}

/// Monotone accelerated proximal gradient for `½‖Ag − b‖² + λ‖g‖₁`.
pub fn lasso_solve_from(p: &LassoProblem, start: Option<&DVector<f64>>) -> Result<LassoResult> {
    p.validate()?;
    let n = p.a.ncols();
    let at = p.a.transpose();
    let atb = &at * &p.b;
    let ata = &at * &p.a;
    // the power estimate approaches L from below; a small margin keeps the step safe
    let lip = lipschitz(&p.a) * 1.02;
    let mut x = start.cloned().unwrap_or_else(|| DVector::zeros(n));
    if lip == 0.0 {
        let g = DVector::zeros(n);
        let objective = lasso_objective(&p.a, &p.b, &g, p.lambda);
        return Ok(LassoResult { g, objective, iterations: 0, converged: true, history: vec![objective] });
    }
    let step = 1.0 / lip;
    let obj = |g: &DVector<f64>| lasso_objective(&p.a, &p.b, g, p.lambda);
    let mut fx = obj(&x);
    let mut y = x.clone();
    let mut t = 1.0f64;
    let mut history = Vec::new();
    let mut converged = false;
    let mut iterations = 0;
    let scale = atb.amax().max(1.0);
    while iterations < p.max_iter {
        iterations += 1;
        let grad = &ata * &y - &atb;
        let z = (&y - grad * step).map(|v| soft_threshold(v, step * p.lambda));
        let fz = obj(&z);
        let t_next = 0.5 * (1.0 + (1.0 + 4.0 * t * t).sqrt());
        let x_prev = x.clone();
        if fz <= fx {
            x = z.clone();
            fx = fz;
        }
        y = &x + (&z - &x) * (t / t_next) + (&x - &x_prev) * ((t - 1.0) / t_next);
        t = t_next;
        history.push(fx);
        // gradient-mapping norm at x bounds the optimality violation
        let gx = &ata * &x - &atb;
        let px = (&x - &gx * step).map(|v| soft_threshold(v, step * p.lambda));
        if (&x - px).amax() * lip < p.tol * scale {
            converged = true;
            break;
        }
    }
    Ok(LassoResult { g: x, objective: fx, iterations, converged, history })
}

#[derive(Debug, Clone)]
pub struct L1Detection {
    pub g: Vec<f64>,
    /// Weight on `‖g‖₁` in the squared problem at the fixed point.
    pub effective_lambda: f64,
    pub outer_iterations: usize,
    pub converged: bool,
}

/// Minimizes `‖Θg − y‖₂ + λ‖g‖₁`.
///
/// At a minimizer the squared problem with weight `λ‖Θg − y‖₂` has the same
/// optimality conditions, so the solution is the fixed point of a sequence
/// of warm-started LASSO solves.
pub fn detect_edges_l1(model: &ForwardModel, lambda: f64) -> Result<L1Detection> {
    if !(lambda > 0.0) {
        return Err(Error::Invalid(format!("lambda must be positive, got {lambda}")));
    }
    let n = model.a.ncols();
    let mut g = DVector::zeros(n);
    let mut lam_eff = lambda * model.b.norm();
    if lam_eff == 0.0 {
        return Ok(L1Detection { g: vec![0.0; n], effective_lambda: 0.0, outer_iterations: 0, converged: true });
    }
    let mut converged = false;
    let mut outer = 0;
    let mut inner_ok = true;
    while outer < 200 {
        outer += 1;
        let p = LassoProblem::new(model.a.clone(), model.b.clone(), lam_eff);
        let r = lasso_solve_from(&p, Some(&g))?;
        inner_ok &= r.converged;
        g = r.g;
        let res = (&model.a * &g - &model.b).norm();
        let next = lambda * res.max(1e-300);
        let change = (next - lam_eff).abs() / lam_eff;
        lam_eff = next;
        if change < 1e-9 {
            converged = true;
            break;
        }
    }
    Ok(L1Detection { g: g.iter().copied().collect(), effective_lambda: lam_eff, outer_iterations: outer, converged: converged && inner_ok })
}
