//! Sparse Bayesian learning: Gaussian likelihood, per-coefficient Gaussian
//! priors with precisions `a`, and evidence maximization over `(a, β)`.

use std::f64::consts::PI;

use nalgebra::{DMatrix, DVector};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::frames::{pseudo_inverse, PINV_RTOL};
use crate::forward_model::ForwardModel;

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum AInit {
    Value(f64),
    /// Uniform on (0.5, 1.5), seeded.
    Random(u64),
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(default)]
pub struct SblConfig {
    pub a_init: AInit,
    pub beta_init: f64,
    pub estimate_beta: bool,
    pub a_max: f64,
    pub a_floor: f64,
    pub beta_cap: f64,
    pub tol: f64,
    pub max_iter: usize,
}

impl Default for SblConfig {
    fn default() -> Self {
        Self {
            a_init: AInit::Value(1.0),
            beta_init: 1.0,
            estimate_beta: true,
            a_max: 1e12,
            a_floor: 1e-12,
            beta_cap: 1e12,
            tol: 1e-6,
            max_iter: 2000,
        }
    }
}

impl SblConfig {
    pub fn fixed_beta(beta: f64) -> Self {
        Self { beta_init: beta, estimate_beta: false, ..Self::default() }
    }

    fn validate(&self) -> Result<()> {
        if !(self.a_max > 0.0 && self.tol > 0.0 && self.beta_init > 0.0) {
            return Err(Error::Invalid("a_max, tol and beta_init must be positive".into()));
        }
        if let AInit::Value(v) = self.a_init {
            if !(v > 0.0) {
                return Err(Error::Invalid(format!("a_init must be positive, got {v}")));
            }
        }
        Ok(())
    }
}

#[derive(Debug, Clone)]
pub struct Posterior {
    pub m: DVector<f64>,
    pub sigma: DMatrix<f64>,
}

fn check_inputs(phi: &DMatrix<f64>, y: &DVector<f64>, a: &DVector<f64>) -> Result<()> {
    if phi.nrows() != y.len() || phi.ncols() != a.len() {
        return Err(Error::Dimension(format!(
            "Θ is {}×{}, y has {}, a has {}",
            phi.nrows(),
            phi.ncols(),
            y.len(),
            a.len()
        )));
    }
    if a.iter().any(|&v| !(v > 0.0)) {
        return Err(Error::Invalid("precisions must be positive".into()));
    }
    Ok(())
}

fn diag_ratio(m: &DMatrix<f64>) -> f64 {
    let d = m.diagonal();
    let hi = d.iter().fold(0.0f64, |a, &v| a.max(v.abs()));
    let lo = d.iter().fold(f64::INFINITY, |a, &v| a.min(v.abs()));
    hi / lo.max(1e-300)
}

/// `Σ = (βΘᵀΘ + A)⁻¹`, `m = βΣΘᵀy` by Cholesky.
pub fn posterior_direct(phi: &DMatrix<f64>, y: &DVector<f64>, a: &DVector<f64>, beta: f64) -> Result<Posterior> {
    check_inputs(phi, y, a)?;
    let mut p = phi.transpose() * phi * beta;
    for i in 0..a.len() {
        p[(i, i)] += a[i];
    }
    let cond = diag_ratio(&p);
    let ch = p.cholesky().ok_or(Error::IllConditioned(cond))?;
    let sigma = ch.inverse();
    let m = ch.solve(&(phi.transpose() * y * beta));
    Ok(Posterior { m, sigma })
}

/// Same posterior through `C = β⁻¹I + ΘA⁻¹Θᵀ`, cheaper when columns outnumber rows.
pub fn posterior_woodbury(phi: &DMatrix<f64>, y: &DVector<f64>, a: &DVector<f64>, beta: f64) -> Result<Posterior> {
    check_inputs(phi, y, a)?;
    let ainv = a.map(|v| 1.0 / v);
    let pd = DMatrix::from_fn(phi.nrows(), phi.ncols(), |i, j| phi[(i, j)] * ainv[j]);
    let mut c = &pd * phi.transpose();
    for i in 0..c.nrows() {
        c[(i, i)] += 1.0 / beta;
    }
    let cond = diag_ratio(&c);
    let ch = c.cholesky().ok_or(Error::IllConditioned(cond))?;
    // Σ = D − (ΘD)ᵀ C⁻¹ (ΘD)
    let cinv_pd = ch.solve(&pd);
    let mut sigma = -(pd.transpose() * cinv_pd);
    for i in 0..a.len() {
        sigma[(i, i)] += ainv[i];
    }
    let m = pd.transpose() * ch.solve(y);
    Ok(Posterior { m, sigma })
}

pub fn posterior(phi: &DMatrix<f64>, y: &DVector<f64>, a: &DVector<f64>, beta: f64) -> Result<Posterior> {
    if phi.ncols() <= phi.nrows() {
        posterior_direct(phi, y, a, beta)
    } else {
        posterior_woodbury(phi, y, a, beta)
    }
}

/// The `β → ∞` limit: `m = A^{−½}(ΘA^{−½})†y`, `Σ = (I − A^{−½}(ΘA^{−½})†Θ)A⁻¹`.
pub fn posterior_noiseless(phi: &DMatrix<f64>, y: &DVector<f64>, a: &DVector<f64>) -> Result<Posterior> {
    check_inputs(phi, y, a)?;
    let s = a.map(|v| 1.0 / v.sqrt());
    let scaled = DMatrix::from_fn(phi.nrows(), phi.ncols(), |i, j| phi[(i, j)] * s[j]);
    let pinv = pseudo_inverse(&scaled, PINV_RTOL).b;
    let left = DMatrix::from_fn(pinv.nrows(), pinv.ncols(), |i, j| pinv[(i, j)] * s[i]);
    let m = &left * y;
    let mut proj = -(&left * phi);
    for i in 0..a.len() {
        proj[(i, i)] += 1.0;
    }
    let sigma = DMatrix::from_fn(a.len(), a.len(), |i, j| proj[(i, j)] / a[j]);
    Ok(Posterior { m, sigma })
}

/// `−½(n log 2π + log|C| + yᵀC⁻¹y)` with `C = β⁻¹I + ΘA⁻¹Θᵀ`, by Cholesky of `C`.
pub fn marginal_loglik(phi: &DMatrix<f64>, y: &DVector<f64>, a: &DVector<f64>, beta: f64) -> Result<f64> {
    check_inputs(phi, y, a)?;
    let n = y.len();
    let pd = DMatrix::from_fn(phi.nrows(), phi.ncols(), |i, j| phi[(i, j)] / a[j]);
    let mut c = &pd * phi.transpose();
    for i in 0..n {
        c[(i, i)] += 1.0 / beta;
    }
    let ch = c.cholesky().ok_or(Error::NotPositiveDefinite)?;
    let logdet = 2.0 * ch.l().diagonal().iter().map(|v| v.ln()).sum::<f64>();
    let quad = y.dot(&ch.solve(y));
    Ok(-0.5 * (n as f64 * (2.0 * PI).ln() + logdet + quad))
}

/// The same likelihood from a posterior already at hand:
/// `log|C| = −n log β − Σ log aᵢ − log|Σ|`, `yᵀC⁻¹y = β‖y − Θm‖² + mᵀAm`.
fn loglik_from_posterior(phi: &DMatrix<f64>, y: &DVector<f64>, a: &DVector<f64>, beta: f64, post: &Posterior) -> f64 {
    let n = y.len() as f64;
    let logdet_sigma = match post.sigma.clone().cholesky() {
        Some(ch) => 2.0 * ch.l().diagonal().iter().map(|v| v.ln()).sum::<f64>(),
        None => post.sigma.determinant().abs().ln(),
    };
    let logdet_c = -n * beta.ln() - a.iter().map(|v| v.ln()).sum::<f64>() - logdet_sigma;
    let res = (y - phi * &post.m).norm_squared();
    let quad = beta * res + post.m.iter().zip(a.iter()).map(|(m, a)| a * m * m).sum::<f64>();
    -0.5 * (n * (2.0 * PI).ln() + logdet_c + quad)
}

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct TraceRow {
    pub iter: usize,
    pub loglik: f64,
    pub active_count: usize,
    pub max_dloga: f64,
}

#[derive(Debug, Clone)]
pub struct SblState {
    /// Precisions; pruned entries are `+∞`.
    pub a: DVector<f64>,
    pub beta: f64,
    pub m: DVector<f64>,
    pub sigma: DMatrix<f64>,
    pub gamma: DVector<f64>,
    pub loglik: f64,
    pub active: Vec<usize>,
}

fn select_cols(phi: &DMatrix<f64>, idx: &[usize]) -> DMatrix<f64> {
    DMatrix::from_fn(phi.nrows(), idx.len(), |i, j| phi[(i, idx[j])])
}

impl SblState {
    pub fn init(phi: &DMatrix<f64>, y: &DVector<f64>, cfg: &SblConfig) -> Result<Self> {
        cfg.validate()?;
        let p = phi.ncols();
        let a = match cfg.a_init {
            AInit::Value(v) => DVector::from_element(p, v),
            AInit::Random(seed) => {
                let mut rng = ChaCha8Rng::seed_from_u64(seed);
                DVector::from_fn(p, |_, _| 0.5 + rng.random::<f64>())
            }
        };
        let mut st = Self {
            a,
            beta: cfg.beta_init,
            m: DVector::zeros(p),
            sigma: DMatrix::zeros(p, p),
            gamma: DVector::zeros(p),
            loglik: f64::NAN,
            active: (0..p).collect(),
        };
        st.refresh(phi, y)?;
        Ok(st)
    }

    /// Posterior, `γ` and likelihood at the current hyper-parameters.
    pub fn refresh(&mut self, phi: &DMatrix<f64>, y: &DVector<f64>) -> Result<()> {
        let p = phi.ncols();
        self.m = DVector::zeros(p);
        self.gamma = DVector::zeros(p);
        if self.active.is_empty() {
            self.sigma = DMatrix::zeros(0, 0);
            let n = y.len() as f64;
            self.loglik = -0.5 * (n * (2.0 * PI).ln() - n * self.beta.ln() + self.beta * y.norm_squared());
            return Ok(());
        }
        let sub = select_cols(phi, &self.active);
        let aa = DVector::from_iterator(self.active.len(), self.active.iter().map(|&i| self.a[i]));
        let post = posterior(&sub, y, &aa, self.beta)?;
        self.loglik = loglik_from_posterior(&sub, y, &aa, self.beta, &post);
        for (k, &i) in self.active.iter().enumerate() {
            self.m[i] = post.m[k];
            self.gamma[i] = 1.0 - aa[k] * post.sigma[(k, k)];
        }
        self.sigma = post.sigma;
        Ok(())
    }

    /// Posterior standard deviation per grid index (0 for pruned entries).
    pub fn std(&self) -> Vec<f64> {
        let mut out = vec![0.0; self.a.len()];
        for (k, &i) in self.active.iter().enumerate() {
            out[i] = self.sigma[(k, k)].max(0.0).sqrt();
        }
        out
    }
}

/// One fixed-point step: `aᵢ ← γᵢ/mᵢ²`, `β ← (n − Σγ)/‖y − Θm‖²`, then prune
/// and recompute the posterior. Returns the largest `|Δ log aᵢ|` over the
/// indices that stay active.
pub fn em_update(st: &mut SblState, phi: &DMatrix<f64>, y: &DVector<f64>, cfg: &SblConfig) -> Result<f64> {
    let mut max_d = 0.0f64;
    let mut keep = Vec::with_capacity(st.active.len());
    let mut new_a = st.a.clone();
    for &i in &st.active {
        let mi = st.m[i];
        let gi = st.gamma[i];
        if mi == 0.0 {
            new_a[i] = f64::INFINITY;
            continue;
        }
        let cand = (gi / (mi * mi)).max(cfg.a_floor);
        if cand > cfg.a_max {
            new_a[i] = f64::INFINITY;
            continue;
        }
        max_d = max_d.max((cand.ln() - st.a[i].ln()).abs());
        new_a[i] = cand;
        keep.push(i);
    }
    if cfg.estimate_beta {
        let res = (y - phi * &st.m).norm_squared();
        let dof = y.len() as f64 - st.active.iter().map(|&i| st.gamma[i]).sum::<f64>();
        st.beta = if res > 0.0 { (dof / res).clamp(f64::MIN_POSITIVE, cfg.beta_cap) } else { cfg.beta_cap };
    }
    st.a = new_a;
    st.active = keep;
    st.refresh(phi, y)?;
    Ok(max_d)
}

#[derive(Debug, Clone)]
pub struct SblResult {
    pub m: Vec<f64>,
    pub std: Vec<f64>,
    pub trace: Vec<TraceRow>,
    pub beta: f64,
    pub converged: bool,
    pub state: SblState,
}

pub fn sbl_solve(phi: &DMatrix<f64>, y: &DVector<f64>, cfg: &SblConfig) -> Result<SblResult> {
    let mut st = SblState::init(phi, y, cfg)?;
    let mut trace = vec![TraceRow { iter: 0, loglik: st.loglik, active_count: st.active.len(), max_dloga: f64::NAN }];
    let mut converged = false;
    for it in 1..=cfg.max_iter {
        let d = em_update(&mut st, phi, y, cfg)?;
        trace.push(TraceRow { iter: it, loglik: st.loglik, active_count: st.active.len(), max_dloga: d });
        if d < cfg.tol || st.active.is_empty() {
            converged = true;
            break;
        }
    }
    Ok(SblResult { m: st.m.iter().copied().collect(), std: st.std(), trace, beta: st.beta, converged, state: st })
}

pub fn sbl_detect(model: &ForwardModel, cfg: &SblConfig) -> Result<SblResult> {
    sbl_solve(&model.a, &model.b, cfg)
}

/// Keeps entries where both estimates agree in sign, zero elsewhere.
pub fn sign_consistency_filter(e1: &[f64], e2: &[f64]) -> Result<Vec<f64>> {
    if e1.len() != e2.len() {
        return Err(Error::Dimension(format!("lengths {} and {}", e1.len(), e2.len())));
    }
    Ok(e1
        .iter()
        .zip(e2)
        .map(|(&a, &b)| if a != 0.0 && a.signum() == b.signum() && b != 0.0 { a } else { 0.0 })
        .collect())
}
