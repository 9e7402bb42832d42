//! Non-uniform Fourier modes, test signals and their Fourier samples.
//!
//! Samples follow `f̂(λ) = ½∫₋₁¹ f(x) e^{−iπλx} dx`, evaluated by piecewise
//! Gauss–Legendre quadrature so the data never come from the discrete model.

use std::collections::HashMap;
use std::f64::consts::PI;
use std::fmt;
use std::str::FromStr;

use gauss_quad::GaussLegendre;
use num_complex::Complex;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rand_distr::StandardNormal;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

pub type C64 = Complex<f64>;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Pattern {
    Jittered,
    Quadratic,
    Logarithmic,
}

impl Pattern {
    pub const ALL: [Pattern; 3] = [Pattern::Jittered, Pattern::Quadratic, Pattern::Logarithmic];

    pub fn name(self) -> &'static str {
        match self {
            Pattern::Jittered => "jittered",
            Pattern::Quadratic => "quadratic",
            Pattern::Logarithmic => "logarithmic",
        }
    }
}

impl fmt::Display for Pattern {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl FromStr for Pattern {
    type Err = Error;
    fn from_str(s: &str) -> Result<Self> {
        match s.to_ascii_lowercase().as_str() {
            "jittered" | "jit" => Ok(Pattern::Jittered),
            "quadratic" | "quad" => Ok(Pattern::Quadratic),
            "logarithmic" | "log" => Ok(Pattern::Logarithmic),
            other => Err(Error::Invalid(format!("unknown sampling pattern '{other}'"))),
        }
    }
}

/// The 2M+1 sampled frequencies together with how they were generated.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ModeSet {
    pub pattern: Pattern,
    #[serde(rename = "M")]
    pub m: usize,
    pub seed: Option<u64>,
    pub v: Option<f64>,
    pub modes: Vec<f64>,
}

impl ModeSet {
    pub fn len(&self) -> usize {
        self.modes.len()
    }

    pub fn is_empty(&self) -> bool {
        self.modes.is_empty()
    }

    pub fn max_abs(&self) -> f64 {
        self.modes.iter().fold(0.0, |a, &l| a.max(l.abs()))
    }
}

/// Mode `i` (0-based) is `i − M + (1 − 2ξᵢ)/4` with `ξᵢ ~ U[0,1)`.
pub fn jittered_modes(m: usize, seed: u64) -> Result<ModeSet> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let xi: Vec<f64> = (0..2 * m + 1).map(|_| rng.random::<f64>()).collect();
    jittered_from_offsets(m, &xi, Some(seed))
}

/// Jittered modes from explicit uniform draws, one per mode.
pub fn jittered_from_offsets(m: usize, xi: &[f64], seed: Option<u64>) -> Result<ModeSet> {
    check_m(m)?;
    if xi.len() != 2 * m + 1 {
        return Err(Error::Dimension(format!("need {} jitter draws, got {}", 2 * m + 1, xi.len())));
    }
    let modes = xi
        .iter()
        .enumerate()
        .map(|(i, &x)| i as f64 - m as f64 + (1.0 - 2.0 * x) / 4.0)
        .collect();
    Ok(ModeSet { pattern: Pattern::Jittered, m, seed, v: None, modes })
}

pub fn quadratic_modes(m: usize) -> Result<ModeSet> {
    check_m(m)?;
    let mf = m as f64;
    let modes = (-(m as i64)..=m as i64)
        .map(|k| {
            let k = k as f64;
            k.signum() * k * k / mf
        })
        .map(|l| if l == 0.0 { 0.0 } else { l })
        .collect();
    Ok(ModeSet { pattern: Pattern::Quadratic, m, seed: None, v: None, modes })
}

/// Zero plus `±exp(tᵢ)` with `t` evenly spaced on `[−v, log M]`.
pub fn logarithmic_modes(m: usize, v: f64) -> Result<ModeSet> {
    check_m(m)?;
    if !(v > 0.0) {
        return Err(Error::Invalid(format!("v must be positive, got {v}")));
    }
    let hi = (m as f64).ln();
    let t: Vec<f64> = if m == 1 {
        vec![hi]
    } else {
        (0..m).map(|i| -v + (hi + v) * i as f64 / (m - 1) as f64).collect()
    };
    let mut pos: Vec<f64> = t.iter().map(|&x| x.exp()).collect();
    // pin the endpoints so the symmetric set is exact
    pos[0] = (-v).exp();
    *pos.last_mut().unwrap() = m as f64;
    if m == 1 {
        pos[0] = 1.0;
    }
    let mut modes: Vec<f64> = pos.iter().rev().map(|&p| -p).collect();
    modes.push(0.0);
    modes.extend(pos.iter().copied());
    Ok(ModeSet { pattern: Pattern::Logarithmic, m, seed: None, v: Some(v), modes })
}

/// Default logarithmic lower exponent: smallest positive mode is 1/M.
pub fn default_log_v(m: usize) -> f64 {
    (m as f64).ln().max(f64::MIN_POSITIVE)
}

pub fn make_modes(pattern: Pattern, m: usize, seed: u64, v: Option<f64>) -> Result<ModeSet> {
    match pattern {
        Pattern::Jittered => jittered_modes(m, seed),
        Pattern::Quadratic => quadratic_modes(m),
        Pattern::Logarithmic => logarithmic_modes(m, v.unwrap_or_else(|| default_log_v(m))),
    }
}

fn check_m(m: usize) -> Result<()> {
    if m == 0 {
        return Err(Error::Invalid("M must be at least 1".into()));
    }
    Ok(())
}

/// A function on [−1, 1] that is smooth between consecutive breakpoints.
///
/// `eval` is only called strictly inside a piece, so its value at a
/// breakpoint is irrelevant for the Fourier samples.
#[derive(Clone)]
pub struct PiecewiseFunction {
    pub name: String,
    pub breaks: Vec<f64>,
    pub eval: fn(f64) -> f64,
    pub jumps: Vec<(f64, f64)>,
}

impl fmt::Debug for PiecewiseFunction {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_struct("PiecewiseFunction")
            .field("name", &self.name)
            .field("breaks", &self.breaks)
            .field("jumps", &self.jumps)
            .finish()
    }
}

impl PiecewiseFunction {
    pub fn value(&self, x: f64) -> f64 {
        (self.eval)(x)
    }

    /// Right limit minus left limit at an interior breakpoint.
    pub fn limit_jump(&self, xi: f64) -> f64 {
        let h = 1e-9;
        (self.eval)(xi + h) - (self.eval)(xi - h)
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum TestFunction {
    F1,
    F2,
    F3,
}

impl TestFunction {
    pub const ALL: [TestFunction; 3] = [TestFunction::F1, TestFunction::F2, TestFunction::F3];

    pub fn name(self) -> &'static str {
        match self {
            TestFunction::F1 => "f1",
            TestFunction::F2 => "f2",
            TestFunction::F3 => "f3",
        }
    }

    pub fn piecewise(self) -> PiecewiseFunction {
        let s2 = std::f64::consts::SQRT_2;
        match self {
            TestFunction::F1 => PiecewiseFunction {
                name: "f1".into(),
                breaks: vec![-1.0, -0.5, 0.0, 0.5, 1.0],
                eval: f1,
                jumps: vec![(-0.5, -s2), (0.5, s2)],
            },
            TestFunction::F2 => PiecewiseFunction {
                name: "f2".into(),
                breaks: vec![-1.0, -0.5, 0.5, 1.0],
                eval: f2,
                jumps: vec![(-0.5, 41.0 / 32.0), (0.5, -175.0 / 256.0)],
            },
            TestFunction::F3 => PiecewiseFunction {
                name: "f3".into(),
                breaks: vec![-1.0, -0.5, 0.5, 1.0],
                eval: f3,
                jumps: vec![(-0.5, -9.0 * PI / 16.0), (0.5, 9.0 * PI / 16.0)],
            },
        }
    }
}

impl fmt::Display for TestFunction {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl FromStr for TestFunction {
    type Err = Error;
    fn from_str(s: &str) -> Result<Self> {
        match s.to_ascii_lowercase().as_str() {
            "f1" => Ok(TestFunction::F1),
            "f2" => Ok(TestFunction::F2),
            "f3" => Ok(TestFunction::F3),
            other => Err(Error::Invalid(format!("unknown test function '{other}'"))),
        }
    }
}

fn sign(x: f64) -> f64 {
    if x > 0.0 {
        1.0
    } else if x < 0.0 {
        -1.0
    } else {
        0.0
    }
}

fn f1(x: f64) -> f64 {
    if x <= 0.0 {
        (PI * x - PI * x / 2.0 * sign(-x - 0.5)).cos()
    } else {
        (5.0 * PI * x / 2.0 + PI * x * sign(x - 0.5)).cos()
    }
}

fn f2(x: f64) -> f64 {
    if x <= -0.5 {
        -0.5 * (1.0 - x * x).powi(2)
    } else if x < 0.5 {
        (4.0 * PI * x).cos()
    } else {
        (1.0 - x * x).powi(4)
    }
}

fn f3(x: f64) -> f64 {
    if x.abs() >= 0.5 {
        PI * (1.0 - x * x).powi(2)
    } else {
        -(6.0 * PI * x).sin() / 6.0
    }
}

fn ramp_eval(x: f64) -> f64 {
    if x < 0.0 {
        -(x + 1.0) / 2.0
    } else {
        (1.0 - x) / 2.0
    }
}

/// Periodic sawtooth with a unit jump at 0 and slope −½.
pub fn ramp() -> PiecewiseFunction {
    PiecewiseFunction { name: "ramp".into(), breaks: vec![-1.0, 0.0, 1.0], eval: ramp_eval, jumps: vec![(0.0, 1.0)] }
}

/// Complex samples tied to a mode set.
#[derive(Debug, Clone, PartialEq)]
pub struct FourierData {
    pub values: Vec<C64>,
    pub modes: ModeSet,
    pub noise_std: f64,
    pub seed: Option<u64>,
}

pub const QUAD_TOL: f64 = 1e-12;
const MAX_NODES: usize = 1 << 20;

/// Caches Gauss–Legendre rules by node count.
#[derive(Default)]
pub struct Quadrature {
    rules: HashMap<usize, Vec<(f64, f64)>>,
}

impl Quadrature {
    pub fn new() -> Self {
        Self::default()
    }

    fn rule(&mut self, n: usize) -> &[(f64, f64)] {
        self.rules.entry(n).or_insert_with(|| {
            GaussLegendre::new(n).expect("n >= 2").as_node_weight_pairs().to_vec()
        })
    }

    fn piece(&mut self, f: fn(f64) -> f64, a: f64, b: f64, lambda: f64, n: usize) -> C64 {
        let half = (b - a) / 2.0;
        let mid = (a + b) / 2.0;
        let mut acc = C64::new(0.0, 0.0);
        for &(t, w) in self.rule(n) {
            let x = mid + half * t;
            let (s, c) = (PI * lambda * x).sin_cos();
            let fx = w * f(x);
            acc.re += fx * c;
            acc.im -= fx * s;
        }
        acc * half
    }

    /// `½∫ f e^{−iπλx}` with node doubling until successive estimates agree to `tol`.
    pub fn transform(&mut self, f: &PiecewiseFunction, lambda: f64, tol: f64) -> Option<C64> {
        let mut total = C64::new(0.0, 0.0);
        for w in f.breaks.windows(2) {
            let (a, b) = (w[0], w[1]);
            let osc = (lambda.abs() * (b - a) / 2.0).ceil().max(1.0) as usize;
            let mut n = (32 * osc).next_power_of_two();
            let mut prev = self.piece(f.eval, a, b, lambda, n);
            loop {
                if 2 * n > MAX_NODES {
                    return None;
                }
                n *= 2;
                let cur = self.piece(f.eval, a, b, lambda, n);
                let done = (cur - prev).norm() < tol;
                prev = cur;
                if done {
                    break;
                }
            }
            total += prev;
        }
        Some(total * 0.5)
    }
}

pub fn fourier_samples(f: &PiecewiseFunction, modes: &ModeSet, tol: f64) -> Result<FourierData> {
    let mut q = Quadrature::new();
    let values = modes
        .modes
        .iter()
        .enumerate()
        .map(|(k, &l)| q.transform(f, l, tol).ok_or(Error::Quadrature { mode: k, lambda: l }))
        .collect::<Result<Vec<_>>>()?;
    Ok(FourierData { values, modes: modes.clone(), noise_std: 0.0, seed: None })
}

/// Adds `CN(0, σ²)` noise: real and imaginary parts each `N(0, σ²/2)`.
pub fn add_noise(data: &FourierData, sigma: f64, seed: u64) -> Result<FourierData> {
    if !(sigma >= 0.0) {
        return Err(Error::Invalid(format!("noise std must be nonnegative, got {sigma}")));
    }
    if sigma == 0.0 {
        return Ok(data.clone());
    }
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    rng.set_stream(1);
    let s = sigma / 2f64.sqrt();
    let values = data
        .values
        .iter()
        .map(|v| {
            let re: f64 = rng.sample(StandardNormal);
            let im: f64 = rng.sample(StandardNormal);
            v + C64::new(s * re, s * im)
        })
        .collect();
    Ok(FourierData { values, modes: data.modes.clone(), noise_std: sigma, seed: Some(seed) })
}
