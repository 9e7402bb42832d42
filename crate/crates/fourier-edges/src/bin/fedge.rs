use std::path::{Path, PathBuf};
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand};
use serde_json::json;

use fourier_edges::concentration::Template;
use fourier_edges::error::{Error, Result};
use fourier_edges::forward_model::Waveform;
use fourier_edges::harness::{
    detection_rows, fitted_slope, log_thresholds, plateau_length, run_noisy_comparison, run_table1, sweep_resolution,
    sweep_threshold, write_csv, write_json, write_table, ExperimentConfig, Method, Runner, NOISY_SCENARIOS,
};
use fourier_edges::sampling::{Pattern, TestFunction};
use fourier_edges::sbl::AInit;

#[derive(Parser)]
#[command(name = "fedge", version, about = "Edge detection from non-uniform Fourier data")]
struct Cli {
    #[command(subcommand)]
    cmd: Cmd,
}

#[derive(Subcommand)]
enum Cmd {
    /// Write the sampling modes
    Modes(Common),
    /// Write Fourier samples of the test function
    Data(Common),
    /// Design and write the concentration factor
    Sigma(Common),
    /// Detect edges with l1 and/or SBL
    Detect(Common),
    /// Edge-adaptive reconstruction masked by the detected edges
    Recon(Common),
    /// Error table over every function and sampling pattern
    Table1(Common),
    /// Detection counts against a threshold (defaults: f1, logarithmic, noise 0.02)
    SweepThreshold {
        #[command(flatten)]
        common: Common,
        #[arg(long, default_value_t = 1e-4)]
        t_min: f64,
        #[arg(long, default_value_t = 10.0)]
        t_max: f64,
        #[arg(long, default_value_t = 201)]
        t_count: usize,
    },
    /// SBL error against grid size (defaults: f3, jittered, noise 0.02)
    SweepResolution {
        #[command(flatten)]
        common: Common,
        #[arg(long, value_delimiter = ',', default_value = "16,32,64,128")]
        js: Vec<usize>,
    },
    /// Both methods on the three noisy scenarios (default noise 0.02)
    Noisy(Common),
}

#[derive(Args, Clone)]
struct Common {
    /// JSON file with ExperimentConfig fields; flags override it
    #[arg(long)]
    config: Option<PathBuf>,
    #[arg(long, default_value = "out")]
    out: PathBuf,
    #[arg(long = "M")]
    m: Option<usize>,
    #[arg(long = "N")]
    n: Option<usize>,
    #[arg(long = "J")]
    j: Option<usize>,
    #[arg(long)]
    pattern: Option<Pattern>,
    #[arg(long)]
    function: Option<TestFunction>,
    #[arg(long)]
    template: Option<Template>,
    #[arg(long)]
    mu: Option<f64>,
    #[arg(long)]
    lambda_l1: Option<f64>,
    #[arg(long)]
    noise_std: Option<f64>,
    #[arg(long)]
    seed: Option<u64>,
    #[arg(long)]
    method: Option<Method>,
    #[arg(long)]
    trials: Option<usize>,
    #[arg(long)]
    log_v: Option<f64>,
    /// Initial SBL precision, or "random" for seeded draws
    #[arg(long)]
    a_init: Option<String>,
    #[arg(long)]
    beta_init: Option<f64>,
    /// Hold β at --beta-init instead of estimating it
    #[arg(long)]
    fixed_beta: bool,
    #[arg(long)]
    sbl_tol: Option<f64>,
    #[arg(long)]
    sbl_max_iter: Option<usize>,
    #[arg(long)]
    recon_order: Option<usize>,
    #[arg(long)]
    tau: Option<f64>,
    #[arg(long)]
    recon_lambda: Option<f64>,
}

impl Common {
    fn config(&self, preset: ExperimentConfig) -> Result<ExperimentConfig> {
        let mut c = match &self.config {
            Some(p) => {
                let s = std::fs::read_to_string(p).map_err(|e| Error::Invalid(format!("{}: {e}", p.display())))?;
                let mut v = serde_json::to_value(&preset).map_err(|e| Error::Invalid(e.to_string()))?;
                let over: serde_json::Value = serde_json::from_str(&s).map_err(|e| Error::Invalid(e.to_string()))?;
                merge(&mut v, over);
                serde_json::from_value(v).map_err(|e| Error::Invalid(e.to_string()))?
            }
            None => preset,
        };
        macro_rules! set {
            ($flag:expr, $field:expr) => {
                if let Some(v) = $flag.clone() {
                    $field = v;
                }
            };
        }
        if self.m.is_some() {
            c.m = self.m;
        }
        if self.n.is_some() {
            c.n = self.n;
        }
        if self.log_v.is_some() {
            c.log_v = self.log_v;
        }
        set!(self.j, c.j);
        set!(self.pattern, c.pattern);
        set!(self.function, c.function);
        set!(self.template, c.template);
        set!(self.mu, c.mu);
        set!(self.lambda_l1, c.lambda_l1);
        set!(self.noise_std, c.noise_std);
        set!(self.seed, c.seed);
        set!(self.method, c.method);
        set!(self.trials, c.trials);
        set!(self.beta_init, c.sbl.beta_init);
        set!(self.sbl_tol, c.sbl.tol);
        set!(self.sbl_max_iter, c.sbl.max_iter);
        set!(self.recon_order, c.recon.m_order);
        set!(self.recon_lambda, c.recon.lambda);
        if self.tau.is_some() {
            c.recon.tau = self.tau;
        }
        if self.fixed_beta {
            c.sbl.estimate_beta = false;
        }
        if let Some(a) = &self.a_init {
            c.sbl.a_init = if a == "random" {
                AInit::Random(c.seed)
            } else {
                AInit::Value(a.parse().map_err(|_| Error::Invalid(format!("bad --a-init {a:?}")))?)
            };
        }
        c.validate()?;
        Ok(c)
    }
}

fn merge(base: &mut serde_json::Value, over: serde_json::Value) {
    match (base, over) {
        (serde_json::Value::Object(b), serde_json::Value::Object(o)) => {
            for (k, v) in o {
                merge(b.entry(k).or_insert(serde_json::Value::Null), v);
            }
        }
        (b, o) => *b = o,
    }
}

enum Status {
    Ok,
    NotConverged,
}

fn out_dir(p: &Path) -> Result<&Path> {
    std::fs::create_dir_all(p).map_err(|e| Error::Invalid(format!("{}: {e}", p.display())))?;
    Ok(p)
}

fn f(v: f64) -> String {
    v.to_string()
}

fn run(cli: Cli) -> Result<Status> {
    let base = ExperimentConfig::default();
    match cli.cmd {
        Cmd::Modes(c) => {
            let cfg = c.config(base)?;
            let dir = out_dir(&c.out)?;
            let mut runner = Runner::new();
            let s = runner.setup(&cfg)?;
            let rows: Vec<Vec<String>> = s.modes.modes.iter().enumerate().map(|(k, &l)| vec![k.to_string(), f(l)]).collect();
            write_table(&dir.join("modes.csv"), &cfg, &["k", "lambda"], &rows)?;
            let summary = json!({
                "config_hash": cfg.hash(), "pattern": cfg.pattern, "M": cfg.m_value(), "count": s.modes.len(),
                "N": s.n, "in_band": s.band.len(), "frame_cond": s.fs.cond, "frame_rank": s.fs.rank,
            });
            write_json(&dir.join("modes.json"), &summary)?;
        }
        Cmd::Data(c) => {
            let cfg = c.config(base)?;
            let dir = out_dir(&c.out)?;
            let mut runner = Runner::new();
            let s = runner.setup(&cfg)?;
            let d = runner.data(&cfg, &s)?;
            let rows: Vec<Vec<String>> = d
                .values
                .iter()
                .enumerate()
                .map(|(k, v)| vec![k.to_string(), f(d.modes.modes[k]), f(v.re), f(v.im)])
                .collect();
            write_table(&dir.join("data.csv"), &cfg, &["k", "lambda", "re", "im"], &rows)?;
        }
        Cmd::Sigma(c) => {
            let cfg = c.config(base)?;
            let dir = out_dir(&c.out)?;
            let mut runner = Runner::new();
            let s = runner.setup(&cfg)?;
            let rows: Vec<Vec<String>> = (0..s.fs.modes.len())
                .map(|k| vec![k.to_string(), f(s.fs.modes[k]), f(s.cf.h_hat[k]), f(s.cf.sigma[k].re), f(s.cf.sigma[k].im)])
                .collect();
            write_table(&dir.join("sigma.csv"), &cfg, &["k", "lambda", "h_hat", "sigma_re", "sigma_im"], &rows)?;
            let w = Waveform::new(&s.fs, &s.cf.sigma)?;
            let summary = json!({
                "config_hash": cfg.hash(), "N": s.n, "mu": s.cf.mu, "residual_delta": s.cf.residual_delta,
                "residual_smooth": s.cf.residual_smooth, "iterations": s.cf.iterations, "converged": s.cf.converged,
                "gamma_re": w.gamma.re, "gamma_im": w.gamma.im,
            });
            write_json(&dir.join("sigma.json"), &summary)?;
            if !s.cf.converged {
                return Ok(Status::NotConverged);
            }
        }
        Cmd::Detect(c) => return detect_cmd(&c, base, false),
        Cmd::Recon(c) => return detect_cmd(&c, base, true),
        Cmd::Table1(c) => {
            let cfg = c.config(base)?;
            let dir = out_dir(&c.out)?;
            let rows = run_table1(&cfg, cfg.trials);
            write_csv(&dir.join("table1.csv"), &cfg, &rows)?;
        }
        Cmd::SweepThreshold { common, t_min, t_max, t_count } => {
            let preset = ExperimentConfig { function: TestFunction::F1, pattern: Pattern::Logarithmic, noise_std: 0.02, ..base };
            let cfg = common.config(preset)?;
            if !(t_min > 0.0 && t_max > t_min && t_count > 0) {
                return Err(Error::Invalid("need 0 < t_min < t_max and t_count > 0".into()));
            }
            let dir = out_dir(&common.out)?;
            let cfg = ExperimentConfig { method: Method::Both, ..cfg };
            let o = Runner::new().run(&cfg)?;
            let g1 = &o.detection.l1.as_ref().expect("l1 ran").g;
            let g2 = &o.detection.sbl.as_ref().expect("sbl ran").m;
            let rows = sweep_threshold(g1, g2, &log_thresholds(t_min, t_max, t_count));
            write_csv(&dir.join("sweep_threshold.csv"), &cfg, &rows)?;
            let (p1, p2) = (plateau_length(g1), plateau_length(g2));
            let summary = json!({
                "config_hash": cfg.hash(), "plateau_l1": p1, "plateau_sbl": p2, "ratio": p2 / p1,
                "l1_error": o.detection.l1_error, "sbl_error": o.detection.sbl_error,
            });
            write_json(&dir.join("sweep_threshold.json"), &summary)?;
        }
        Cmd::SweepResolution { common, js } => {
            let preset = ExperimentConfig { function: TestFunction::F3, pattern: Pattern::Jittered, noise_std: 0.02, ..base };
            let cfg = common.config(preset)?;
            if js.is_empty() || js.contains(&0) {
                return Err(Error::Invalid("--js needs positive grid sizes".into()));
            }
            let dir = out_dir(&common.out)?;
            let rows = sweep_resolution(&cfg, &js, cfg.trials);
            write_csv(&dir.join("sweep_resolution.csv"), &cfg, &rows)?;
            let x: Vec<f64> = rows.iter().map(|r| r.j as f64).collect();
            let y: Vec<f64> = rows.iter().map(|r| r.rel_error).collect();
            let slope = if rows.len() > 1 { fitted_slope(&x, &y) } else { f64::NAN };
            write_json(&dir.join("sweep_resolution.json"), &json!({ "config_hash": cfg.hash(), "slope": slope }))?;
        }
        Cmd::Noisy(c) => {
            let cfg = c.config(ExperimentConfig { noise_std: 0.02, ..base })?;
            let dir = out_dir(&c.out)?;
            let scen: Vec<(TestFunction, Pattern)> = NOISY_SCENARIOS.iter().map(|&(f, p, _)| (f, p)).collect();
            let rows = run_noisy_comparison(&cfg, &scen, cfg.trials)?;
            write_csv(&dir.join("noisy.csv"), &cfg, &rows)?;
        }
    }
    Ok(Status::Ok)
}

fn detect_cmd(c: &Common, base: ExperimentConfig, recon: bool) -> Result<Status> {
    let mut cfg = c.config(base)?;
    cfg.recon.enabled = recon;
    let dir = out_dir(&c.out)?;
    let o = Runner::new().run(&cfg)?;
    let det = &o.detection;
    let cols = ["x", "g_estimate", "g_truth", "posterior_std"];
    if det.l1.is_some() {
        write_table(&dir.join("detect_l1.csv"), &cfg, &cols, &detection_rows(det, Method::L1))?;
    }
    if let Some(s) = &det.sbl {
        write_table(&dir.join("detect_sbl.csv"), &cfg, &cols, &detection_rows(det, Method::Sbl))?;
        write_csv(&dir.join("sbl_trace.csv"), &cfg, &s.trace)?;
    }
    let mut summary = json!({
        "config_hash": cfg.hash(), "seed": cfg.seed, "N": o.setup.n,
        "l1_error": det.l1_error, "sbl_error": det.sbl_error,
        "l1_converged": det.l1.as_ref().map(|d| d.converged),
        "sbl_converged": det.sbl.as_ref().map(|d| d.converged),
        "sbl_iterations": det.sbl.as_ref().map(|d| d.trace.len() - 1),
        "sbl_beta": det.sbl.as_ref().map(|d| d.beta),
    });
    if let Some(r) = &o.reconstruction {
        let cols = ["x", "f_reconstructed", "f_true", "abs_error"];
        for (name, est) in [("l1", &r.l1), ("sbl", &r.sbl)] {
            if let Some(v) = est {
                let rows: Vec<Vec<String>> =
                    (0..r.x.len()).map(|j| vec![f(r.x[j]), f(v[j]), f(r.truth[j]), f((v[j] - r.truth[j]).abs())]).collect();
                write_table(&dir.join(format!("recon_{name}.csv")), &cfg, &cols, &rows)?;
            }
        }
        summary["recon_l1_error"] = json!(r.l1_error);
        summary["recon_sbl_error"] = json!(r.sbl_error);
    }
    write_json(&dir.join(if recon { "recon.json" } else { "detect.json" }), &summary)?;
    Ok(if det.converged() { Status::Ok } else { Status::NotConverged })
}

fn main() -> ExitCode {
    // usage errors are contract errors; clap's own code 2 is reserved for non-convergence
    let cli = match Cli::try_parse() {
        Ok(c) => c,
        Err(e) => {
            let _ = e.print();
            return if e.use_stderr() { ExitCode::from(1) } else { ExitCode::SUCCESS };
        }
    };
    match run(cli) {
        Ok(Status::Ok) => ExitCode::SUCCESS,
        Ok(Status::NotConverged) => {
            eprintln!("fedge: solver did not converge; results were written");
            ExitCode::from(2)
        }
        Err(e) => {
            eprintln!("fedge: {e}");
            ExitCode::from(1)
        }
    }
}
