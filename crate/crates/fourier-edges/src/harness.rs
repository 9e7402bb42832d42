//! Experiment configuration, the end-to-end pipeline, aggregate experiments
//! and their CSV/JSON reports.

use std::collections::HashMap;
use std::fmt;
use std::io::Write;
use std::path::Path;
use std::str::FromStr;
use std::sync::Arc;

use serde::{Deserialize, Serialize};
use sha2::{Digest, Sha256};

use crate::concentration::{build_design_matrices, design_sigma, ConcentrationFactor, DesignOptions, Template};
use crate::error::{Error, Result};
use crate::forward_model::{build_model, ForwardModel};
use crate::frames::{default_bandwidth, in_band, FrameSystem, Grid};
use crate::map_solver::{detect_edges_l1, L1Detection};
use crate::reconstruct::{build_mask, edge_adaptive_l2, pa_operator};
use crate::sampling::{add_noise, fourier_samples, make_modes, FourierData, ModeSet, Pattern, PiecewiseFunction, TestFunction, C64, QUAD_TOL};
use crate::sbl::{sbl_detect, SblConfig, SblResult};

pub const VERSION: &str = env!("CARGO_PKG_VERSION");

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Method {
    L1,
    Sbl,
    Both,
}

impl Method {
    pub fn runs_l1(self) -> bool {
        matches!(self, Method::L1 | Method::Both)
    }

    pub fn runs_sbl(self) -> bool {
        matches!(self, Method::Sbl | Method::Both)
    }

    pub fn name(self) -> &'static str {
        match self {
            Method::L1 => "l1",
            Method::Sbl => "sbl",
            Method::Both => "both",
        }
    }
}

impl fmt::Display for Method {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl FromStr for Method {
    type Err = Error;
    fn from_str(s: &str) -> Result<Self> {
        match s.to_ascii_lowercase().as_str() {
            "l1" => Ok(Method::L1),
            "sbl" => Ok(Method::Sbl),
            "both" => Ok(Method::Both),
            _ => Err(Error::Invalid(format!("unknown method {s:?}"))),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default)]
pub struct ReconConfig {
    pub enabled: bool,
    pub m_order: usize,
    /// `None` means `1/(2J+1)`.
    pub tau: Option<f64>,
    pub lambda: f64,
}

impl Default for ReconConfig {
    fn default() -> Self {
        Self { enabled: false, m_order: 2, tau: None, lambda: 0.1 }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default)]
pub struct ExperimentConfig {
    /// `None` picks a per-pattern default.
    #[serde(rename = "M")]
    pub m: Option<usize>,
    /// `None` picks the band from the mode coverage.
    #[serde(rename = "N")]
    pub n: Option<usize>,
    #[serde(rename = "J")]
    pub j: usize,
    pub pattern: Pattern,
    pub function: TestFunction,
    pub template: Template,
    pub mu: f64,
    pub lambda_l1: f64,
    pub noise_std: f64,
    pub seed: u64,
    pub method: Method,
    pub sbl: SblConfig,
    pub recon: ReconConfig,
    /// Lower exponent for logarithmic modes; `None` gives smallest mode `1/M`.
    pub log_v: Option<f64>,
    pub trials: usize,
}

impl Default for ExperimentConfig {
    fn default() -> Self {
        Self {
            m: None,
            n: None,
            j: 64,
            pattern: Pattern::Jittered,
            function: TestFunction::F1,
            template: Template::Hat,
            mu: 1000.0,
            lambda_l1: 0.01,
            noise_std: 0.0,
            seed: 0,
            method: Method::Both,
            sbl: SblConfig::default(),
            recon: ReconConfig::default(),
            log_v: None,
            trials: 5,
        }
    }
}

/// Mode count per pattern; the deterministic patterns need more modes to
/// cover the same band without gaps.
pub fn default_m(pattern: Pattern) -> usize {
    match pattern {
        Pattern::Jittered => 128,
        Pattern::Quadratic => 256,
        Pattern::Logarithmic => 1024,
    }
}

impl ExperimentConfig {
    pub fn m_value(&self) -> usize {
        self.m.unwrap_or_else(|| default_m(self.pattern))
    }

    pub fn tau(&self) -> f64 {
        self.recon.tau.unwrap_or(1.0 / (2 * self.j + 1) as f64)
    }

    pub fn validate(&self) -> Result<()> {
        if self.j == 0 || self.m_value() == 0 || self.n == Some(0) {
            return Err(Error::Invalid("M, N and J must be positive".into()));
        }
        if !(self.mu > 0.0 && self.lambda_l1 > 0.0 && self.recon.lambda > 0.0) {
            return Err(Error::Invalid("mu, lambda_l1 and recon.lambda must be positive".into()));
        }
        if !(self.noise_std >= 0.0) {
            return Err(Error::Invalid(format!("noise_std must be nonnegative, got {}", self.noise_std)));
        }
        if self.trials == 0 {
            return Err(Error::Invalid("trials must be at least 1".into()));
        }
        Ok(())
    }

    /// First 16 hex digits of the SHA-256 of the JSON form.
    pub fn hash(&self) -> String {
        let bytes = serde_json::to_vec(self).expect("config serializes");
        Sha256::digest(&bytes).iter().take(8).map(|b| format!("{b:02x}")).collect()
    }

    pub fn with_seed(&self, seed: u64) -> Self {
        Self { seed, ..self.clone() }
    }
}

/// Grid sampling of the jump function: each jump placed at its nearest grid point.
pub fn truth_vector(f: &PiecewiseFunction, grid: &Grid) -> Vec<f64> {
    let mut t = vec![0.0; grid.len()];
    for &(x, h) in &f.jumps {
        t[grid.nearest(x)] += h;
    }
    t
}

pub fn relative_error(estimate: &[f64], truth: &[f64]) -> Result<f64> {
    if estimate.len() != truth.len() {
        return Err(Error::Dimension(format!("estimate has {}, truth {}", estimate.len(), truth.len())));
    }
    let tn = truth.iter().map(|v| v * v).sum::<f64>().sqrt();
    if tn == 0.0 {
        return Err(Error::ZeroTruth);
    }
    let d = estimate.iter().zip(truth).map(|(e, t)| (e - t) * (e - t)).sum::<f64>().sqrt();
    Ok(d / tn)
}

/// Modes, frame system and concentration factor for one configuration.
#[derive(Debug, Clone)]
pub struct Setup {
    pub modes: ModeSet,
    pub n: usize,
    /// Indices into `modes` used by the frame system.
    pub band: Vec<usize>,
    pub fs: FrameSystem,
    pub cf: ConcentrationFactor,
}

pub fn prepare(cfg: &ExperimentConfig) -> Result<Setup> {
    cfg.validate()?;
    let modes = make_modes(cfg.pattern, cfg.m_value(), cfg.seed, cfg.log_v)?;
    let n = cfg.n.unwrap_or_else(|| default_bandwidth(&modes));
    let band = in_band(&modes.modes, n);
    let band_modes: Vec<f64> = band.iter().map(|&k| modes.modes[k]).collect();
    let fs = FrameSystem::new(&band_modes, n, cfg.j)?;
    let dm = build_design_matrices(&fs, cfg.template)?;
    let opts = DesignOptions { mu: cfg.mu, ..DesignOptions::default() };
    let cf = design_sigma(&dm, &band_modes, n, &opts)?;
    Ok(Setup { modes, n, band, fs, cf })
}

#[derive(Debug, Clone)]
pub struct Detection {
    pub x: Vec<f64>,
    pub truth: Vec<f64>,
    pub l1: Option<L1Detection>,
    pub sbl: Option<SblResult>,
    pub l1_error: Option<f64>,
    pub sbl_error: Option<f64>,
}

impl Detection {
    pub fn converged(&self) -> bool {
        self.l1.as_ref().is_none_or(|d| d.converged) && self.sbl.as_ref().is_none_or(|d| d.converged)
    }
}

pub fn band_values(setup: &Setup, data: &FourierData) -> Vec<C64> {
    setup.band.iter().map(|&k| data.values[k]).collect()
}

pub fn model_for(setup: &Setup, data: &FourierData) -> Result<ForwardModel> {
    build_model(&setup.fs, &setup.cf, &band_values(setup, data))
}

pub fn detect(cfg: &ExperimentConfig, setup: &Setup, data: &FourierData) -> Result<Detection> {
    let model = model_for(setup, data)?;
    let truth = truth_vector(&cfg.function.piecewise(), &setup.fs.grid);
    let l1 = if cfg.method.runs_l1() { Some(detect_edges_l1(&model, cfg.lambda_l1)?) } else { None };
    let sbl = if cfg.method.runs_sbl() { Some(sbl_detect(&model, &cfg.sbl)?) } else { None };
    let l1_error = l1.as_ref().map(|d| relative_error(&d.g, &truth)).transpose()?;
    let sbl_error = sbl.as_ref().map(|d| relative_error(&d.m, &truth)).transpose()?;
    Ok(Detection { x: setup.fs.grid.points.clone(), truth, l1, sbl, l1_error, sbl_error })
}

/// True function values on the grid, taking the midpoint of the one-sided
/// limits at interior breakpoints.
pub fn signal_truth(f: &PiecewiseFunction, grid: &Grid) -> Vec<f64> {
    let n = f.breaks.len();
    grid.points
        .iter()
        .map(|&x| match f.breaks[1..n.saturating_sub(1)].iter().find(|&&b| (b - x).abs() < 1e-12) {
            Some(&b) => 0.5 * (f.value(b - 1e-9) + f.value(b + 1e-9)),
            None => f.value(x),
        })
        .collect()
}

/// Edge-adaptive reconstruction from the modes with `|λ| ≤ J`, masked by `g`.
pub fn reconstruct_signal(cfg: &ExperimentConfig, data: &FourierData, grid: &Grid, g: &[f64]) -> Result<Vec<f64>> {
    let lim = cfg.j as f64;
    let idx: Vec<usize> = (0..data.modes.modes.len()).filter(|&k| data.modes.modes[k].abs() <= lim).collect();
    let modes: Vec<f64> = idx.iter().map(|&k| data.modes.modes[k]).collect();
    let values: Vec<C64> = idx.iter().map(|&k| data.values[k]).collect();
    let mask = build_mask(g, cfg.recon.m_order, cfg.tau())?;
    let l = pa_operator(cfg.recon.m_order, cfg.j)?;
    edge_adaptive_l2(&modes, &values, grid, &mask, &l, cfg.recon.lambda)
}

#[derive(Debug, Clone)]
pub struct Reconstruction {
    pub x: Vec<f64>,
    pub truth: Vec<f64>,
    pub l1: Option<Vec<f64>>,
    pub sbl: Option<Vec<f64>>,
    pub l1_error: Option<f64>,
    pub sbl_error: Option<f64>,
}

pub fn reconstruct(cfg: &ExperimentConfig, data: &FourierData, det: &Detection, grid: &Grid) -> Result<Reconstruction> {
    let truth = signal_truth(&cfg.function.piecewise(), grid);
    let l1 = det.l1.as_ref().map(|d| reconstruct_signal(cfg, data, grid, &d.g)).transpose()?;
    let sbl = det.sbl.as_ref().map(|d| reconstruct_signal(cfg, data, grid, &d.m)).transpose()?;
    let l1_error = l1.as_ref().map(|f| relative_error(f, &truth)).transpose()?;
    let sbl_error = sbl.as_ref().map(|f| relative_error(f, &truth)).transpose()?;
    Ok(Reconstruction { x: grid.points.clone(), truth, l1, sbl, l1_error, sbl_error })
}

/// Runs configurations while reusing designs and clean samples.
#[derive(Default)]
pub struct Runner {
    setups: HashMap<String, Arc<Setup>>,
    clean: HashMap<String, Arc<FourierData>>,
}

#[derive(Debug, Clone)]
pub struct Outcome {
    pub setup: Arc<Setup>,
    pub data: FourierData,
    pub detection: Detection,
    pub reconstruction: Option<Reconstruction>,
}

impl Runner {
    pub fn new() -> Self {
        Self::default()
    }

    fn setup_key(cfg: &ExperimentConfig) -> String {
        let seed = if cfg.pattern == Pattern::Jittered { cfg.seed } else { 0 };
        format!(
            "{:?}|{}|{:?}|{}|{}|{:?}|{:?}|{}",
            cfg.pattern,
            cfg.m_value(),
            cfg.n,
            cfg.j,
            seed,
            cfg.log_v.map(f64::to_bits),
            cfg.template,
            cfg.mu.to_bits()
        )
    }

    pub fn setup(&mut self, cfg: &ExperimentConfig) -> Result<Arc<Setup>> {
        let key = Self::setup_key(cfg);
        if let Some(s) = self.setups.get(&key) {
            return Ok(s.clone());
        }
        let s = Arc::new(prepare(cfg)?);
        self.setups.insert(key, s.clone());
        Ok(s)
    }

    pub fn data(&mut self, cfg: &ExperimentConfig, setup: &Setup) -> Result<FourierData> {
        let key = format!("{}|{:?}", Self::setup_key(cfg), cfg.function);
        let clean = match self.clean.get(&key) {
            Some(d) => d.clone(),
            None => {
                let d = Arc::new(fourier_samples(&cfg.function.piecewise(), &setup.modes, QUAD_TOL)?);
                self.clean.insert(key, d.clone());
                d
            }
        };
        add_noise(&clean, cfg.noise_std, cfg.seed)
    }

    pub fn run(&mut self, cfg: &ExperimentConfig) -> Result<Outcome> {
        let setup = self.setup(cfg)?;
        let data = self.data(cfg, &setup)?;
        let detection = detect(cfg, &setup, &data)?;
        let reconstruction =
            if cfg.recon.enabled { Some(reconstruct(cfg, &data, &detection, &setup.fs.grid)?) } else { None };
        Ok(Outcome { setup, data, detection, reconstruction })
    }
}

/// Mean, min and max of a sample; NaN for an empty one.
pub fn summarize(v: &[f64]) -> (f64, f64, f64) {
    if v.is_empty() {
        return (f64::NAN, f64::NAN, f64::NAN);
    }
    let mean = v.iter().sum::<f64>() / v.len() as f64;
    let min = v.iter().copied().fold(f64::INFINITY, f64::min);
    let max = v.iter().copied().fold(f64::NEG_INFINITY, f64::max);
    (mean, min, max)
}

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct CellRow {
    pub function: TestFunction,
    pub pattern: Pattern,
    pub method: Method,
    pub sigma: f64,
    pub trials: usize,
    pub mean: f64,
    pub min: f64,
    pub max: f64,
    pub failures: usize,
    pub nonconverged: usize,
}

/// Per-seed errors for one (function, pattern) cell, for both methods.
struct CellErrors {
    l1: Vec<f64>,
    sbl: Vec<f64>,
    failures_l1: usize,
    failures_sbl: usize,
    nonconv_l1: usize,
    nonconv_sbl: usize,
}

fn run_cell(runner: &mut Runner, cfg: &ExperimentConfig, trials: usize) -> CellErrors {
    let mut out = CellErrors { l1: vec![], sbl: vec![], failures_l1: 0, failures_sbl: 0, nonconv_l1: 0, nonconv_sbl: 0 };
    // a deterministic pattern without noise gives the same answer every trial
    let distinct = if cfg.pattern != Pattern::Jittered && cfg.noise_std == 0.0 { 1 } else { trials };
    for t in 0..distinct {
        let c = cfg.with_seed(cfg.seed + t as u64);
        match runner.run(&c) {
            Ok(o) => {
                let d = &o.detection;
                if let Some(e) = d.l1_error {
                    out.l1.push(e);
                    out.nonconv_l1 += usize::from(!d.l1.as_ref().is_some_and(|r| r.converged));
                }
                if let Some(e) = d.sbl_error {
                    out.sbl.push(e);
                    out.nonconv_sbl += usize::from(!d.sbl.as_ref().is_some_and(|r| r.converged));
                }
            }
            Err(_) => {
                out.failures_l1 += usize::from(cfg.method.runs_l1());
                out.failures_sbl += usize::from(cfg.method.runs_sbl());
            }
        }
    }
    let rep = trials / distinct;
    if rep > 1 {
        for v in [&mut out.l1, &mut out.sbl] {
            *v = v.iter().flat_map(|&e| std::iter::repeat_n(e, rep)).collect();
        }
        out.nonconv_l1 *= rep;
        out.nonconv_sbl *= rep;
        out.failures_l1 *= rep;
        out.failures_sbl *= rep;
    }
    out
}

fn cell_rows(cfg: &ExperimentConfig, trials: usize, e: &CellErrors) -> Vec<CellRow> {
    let mut rows = vec![];
    let mut push = |method, v: &[f64], failures, nonconverged| {
        let (mean, min, max) = summarize(v);
        rows.push(CellRow {
            function: cfg.function,
            pattern: cfg.pattern,
            method,
            sigma: cfg.noise_std,
            trials,
            mean,
            min,
            max,
            failures,
            nonconverged,
        });
    };
    if cfg.method.runs_l1() {
        push(Method::L1, &e.l1, e.failures_l1, e.nonconv_l1);
    }
    if cfg.method.runs_sbl() {
        push(Method::Sbl, &e.sbl, e.failures_sbl, e.nonconv_sbl);
    }
    rows
}

/// Every (function, pattern) cell with `trials` seeds per cell.
pub fn run_table1(base: &ExperimentConfig, trials: usize) -> Vec<CellRow> {
    let mut runner = Runner::new();
    let mut rows = vec![];
    for f in TestFunction::ALL {
        for p in Pattern::ALL {
            let cfg = ExperimentConfig { function: f, pattern: p, ..base.clone() };
            let e = run_cell(&mut runner, &cfg, trials);
            rows.extend(cell_rows(&cfg, trials, &e));
        }
    }
    rows
}

/// The three noisy figure scenarios with their reconstruction orders.
pub const NOISY_SCENARIOS: [(TestFunction, Pattern, usize); 3] = [
    (TestFunction::F1, Pattern::Logarithmic, 2),
    (TestFunction::F2, Pattern::Quadratic, 3),
    (TestFunction::F3, Pattern::Jittered, 1),
];

pub fn run_noisy_comparison(base: &ExperimentConfig, scenarios: &[(TestFunction, Pattern)], trials: usize) -> Result<Vec<CellRow>> {
    if !(base.noise_std > 0.0) {
        return Err(Error::Invalid("noisy comparison needs noise_std > 0".into()));
    }
    let mut runner = Runner::new();
    let mut rows = vec![];
    for &(f, p) in scenarios {
        let cfg = ExperimentConfig { function: f, pattern: p, method: Method::Both, ..base.clone() };
        let e = run_cell(&mut runner, &cfg, trials);
        rows.extend(cell_rows(&cfg, trials, &e));
    }
    Ok(rows)
}

pub fn count_above(g: &[f64], t: f64) -> usize {
    g.iter().filter(|v| v.abs() > t).count()
}

/// Length of the threshold interval on which exactly two entries exceed it.
pub fn plateau_length(g: &[f64]) -> f64 {
    let mut a: Vec<f64> = g.iter().map(|v| v.abs()).collect();
    a.sort_by(|x, y| y.total_cmp(x));
    match a.len() {
        0 | 1 => 0.0,
        2 => a[1],
        _ => a[1] - a[2],
    }
}

/// `n` thresholds log-spaced on `[lo, hi]`.
pub fn log_thresholds(lo: f64, hi: f64, n: usize) -> Vec<f64> {
    if n == 1 {
        return vec![lo];
    }
    let (a, b) = (lo.ln(), hi.ln());
    (0..n).map(|i| (a + (b - a) * i as f64 / (n - 1) as f64).exp()).collect()
}

#[derive(Debug, Clone, Serialize)]
pub struct ThresholdRow {
    pub threshold: f64,
    pub count_l1: usize,
    pub count_sbl: usize,
}

pub fn sweep_threshold(g_l1: &[f64], g_sbl: &[f64], thresholds: &[f64]) -> Vec<ThresholdRow> {
    thresholds
        .iter()
        .map(|&t| ThresholdRow { threshold: t, count_l1: count_above(g_l1, t), count_sbl: count_above(g_sbl, t) })
        .collect()
}

#[derive(Debug, Clone, Serialize)]
pub struct ResolutionRow {
    #[serde(rename = "J")]
    pub j: usize,
    pub trials: usize,
    pub rel_error: f64,
    pub min: f64,
    pub max: f64,
}

/// Mean SBL error per grid size over `trials` seeds.
pub fn sweep_resolution(base: &ExperimentConfig, js: &[usize], trials: usize) -> Vec<ResolutionRow> {
    let mut runner = Runner::new();
    js.iter()
        .map(|&j| {
            let cfg = ExperimentConfig { j, method: Method::Sbl, ..base.clone() };
            let e = run_cell(&mut runner, &cfg, trials);
            let (rel_error, min, max) = summarize(&e.sbl);
            ResolutionRow { j, trials, rel_error, min, max }
        })
        .collect()
}

/// Least-squares slope of `y` against `x`.
pub fn fitted_slope(x: &[f64], y: &[f64]) -> f64 {
    let n = x.len() as f64;
    let mx = x.iter().sum::<f64>() / n;
    let my = y.iter().sum::<f64>() / n;
    let sxy: f64 = x.iter().zip(y).map(|(a, b)| (a - mx) * (b - my)).sum();
    let sxx: f64 = x.iter().map(|a| (a - mx) * (a - mx)).sum();
    sxy / sxx
}

#[derive(Debug, Clone, Serialize)]
pub struct ReconRow {
    pub function: TestFunction,
    pub pattern: Pattern,
    pub m_order: usize,
    pub sigma: f64,
    pub trials: usize,
    pub l1_mask_mean: f64,
    pub sbl_mask_mean: f64,
}

/// Mean reconstruction errors with ℓ1 and SBL masks on the noisy scenarios.
pub fn run_recon_comparison(base: &ExperimentConfig, trials: usize) -> Result<Vec<ReconRow>> {
    let mut runner = Runner::new();
    let mut rows = vec![];
    for &(f, p, order) in &NOISY_SCENARIOS {
        let cfg = ExperimentConfig {
            function: f,
            pattern: p,
            method: Method::Both,
            recon: ReconConfig { enabled: true, m_order: order, ..base.recon.clone() },
            ..base.clone()
        };
        let (mut a, mut b) = (vec![], vec![]);
        for t in 0..trials {
            let o = runner.run(&cfg.with_seed(cfg.seed + t as u64))?;
            let r = o.reconstruction.expect("reconstruction enabled");
            a.extend(r.l1_error);
            b.extend(r.sbl_error);
        }
        rows.push(ReconRow {
            function: f,
            pattern: p,
            m_order: order,
            sigma: cfg.noise_std,
            trials,
            l1_mask_mean: summarize(&a).0,
            sbl_mask_mean: summarize(&b).0,
        });
    }
    Ok(rows)
}

/// Provenance line written at the top of every CSV.
pub fn csv_header_line(cfg: &ExperimentConfig) -> String {
    format!(
        "# config_hash={} seed={} fourier-edges={} nalgebra=0.34",
        cfg.hash(),
        cfg.seed,
        VERSION
    )
}

/// Writes a provenance comment followed by serialized records.
pub fn write_csv<T: Serialize>(path: &Path, cfg: &ExperimentConfig, records: &[T]) -> Result<()> {
    let mut buf = Vec::new();
    writeln!(buf, "{}", csv_header_line(cfg)).map_err(io_err)?;
    {
        let mut w = csv::Writer::from_writer(&mut buf);
        for r in records {
            w.serialize(r).map_err(|e| Error::Invalid(e.to_string()))?;
        }
        w.flush().map_err(io_err)?;
    }
    std::fs::write(path, buf).map_err(io_err)
}

/// Writes raw rows under a provenance comment and a column header.
pub fn write_table(path: &Path, cfg: &ExperimentConfig, columns: &[&str], rows: &[Vec<String>]) -> Result<()> {
    let mut buf = Vec::new();
    writeln!(buf, "{}", csv_header_line(cfg)).map_err(io_err)?;
    {
        let mut w = csv::Writer::from_writer(&mut buf);
        w.write_record(columns).map_err(|e| Error::Invalid(e.to_string()))?;
        for r in rows {
            w.write_record(r).map_err(|e| Error::Invalid(e.to_string()))?;
        }
        w.flush().map_err(io_err)?;
    }
    std::fs::write(path, buf).map_err(io_err)
}

pub fn write_json<T: Serialize>(path: &Path, value: &T) -> Result<()> {
    let s = serde_json::to_string_pretty(value).map_err(|e| Error::Invalid(e.to_string()))?;
    std::fs::write(path, s + "\n").map_err(io_err)
}

fn io_err(e: std::io::Error) -> Error {
    Error::Invalid(format!("i/o: {e}"))
}

/// Rows `x, g_estimate, g_truth, posterior_std` for one method.
pub fn detection_rows(det: &Detection, method: Method) -> Vec<Vec<String>> {
    let (g, std): (&[f64], Option<&[f64]>) = match method {
        Method::Sbl => match &det.sbl {
            Some(s) => (&s.m, Some(&s.std)),
            None => return vec![],
        },
        _ => match &det.l1 {
            Some(s) => (&s.g, None),
            None => return vec![],
        },
    };
    (0..det.x.len())
        .map(|j| {
            vec![
                det.x[j].to_string(),
                g[j].to_string(),
                det.truth[j].to_string(),
                std.map(|s| s[j].to_string()).unwrap_or_default(),
            ]
        })
        .collect()
}
