//! Varying-coefficient AR(1) model: `y_k = S(x_k) y_{k-1} + ξ_k` on the
//! uniform design `x_k = a + k(b - a)/n`.
//!
//! This module owns the coefficient catalog, the shipped noise densities and
//! the stability-set membership test.

use std::fmt;
use std::str::FromStr;
use std::sync::Arc;

use rand::Rng;
use rand_distr::StandardNormal;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::rng::seeded_rng;

type RealFn = Arc<dyn Fn(f64) -> f64 + Send + Sync>;

/// Coefficient function `S : [a, b] → ℝ`.
///
/// Catalog names: `zero`, `const:c`, `sine:amp,freq` (the latter is
/// `amp · sin(2π · freq · x)`).
#[derive(Clone)]
pub enum Coefficient {
    Zero,
    Const(f64),
    Sine {
        amp: f64,
        freq: f64,
    },
    Custom {
        name: String,
        f: RealFn,
        derivative: Option<RealFn>,
    },
}

impl Coefficient {
    pub fn custom<F>(name: impl Into<String>, f: F) -> Self
    where
        F: Fn(f64) -> f64 + Send + Sync + 'static,
    {
        Coefficient::Custom {
            name: name.into(),
            f: Arc::new(f),
            derivative: None,
        }
    }

    /// Attach an analytic derivative to a custom function.
    pub fn with_derivative<F>(self, df: F) -> Self
    where
        F: Fn(f64) -> f64 + Send + Sync + 'static,
    {
        match self {
            Coefficient::Custom { name, f, .. } => Coefficient::Custom {
                name,
                f,
                derivative: Some(Arc::new(df)),
            },
            other => other,
        }
    }

    #[inline]
    pub fn eval(&self, x: f64) -> f64 {
        match self {
            Coefficient::Zero => 0.0,
            Coefficient::Const(c) => *c,
            Coefficient::Sine { amp, freq } => amp * (2.0 * std::f64::consts::PI * freq * x).sin(),
            Coefficient::Custom { f, .. } => f(x),
        }
    }

    /// Analytic derivative when known.
    pub fn derivative(&self, x: f64) -> Option<f64> {
        match self {
            Coefficient::Zero | Coefficient::Const(_) => Some(0.0),
            Coefficient::Sine { amp, freq } => {
                let w = 2.0 * std::f64::consts::PI * freq;
                Some(amp * w * (w * x).cos())
            }
            Coefficient::Custom { derivative, .. } => derivative.as_ref().map(|df| df(x)),
        }
    }

    /// Catalog name, round-trips through [`FromStr`] for catalog entries.
    pub fn name(&self) -> String {
        match self {
            Coefficient::Zero => "zero".to_string(),
            Coefficient::Const(c) => format!("const:{c}"),
            Coefficient::Sine { amp, freq } => format!("sine:{amp},{freq}"),
            Coefficient::Custom { name, .. } => name.clone(),
        }
    }
}

impl fmt::Debug for Coefficient {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "Coefficient({})", self.name())
    }
}

impl FromStr for Coefficient {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        let s = s.trim();
        let unknown = || Error::UnknownCoefficient(s.to_string());
        let num = |v: &str| v.trim().parse::<f64>().map_err(|_| unknown());
        match s.split_once(':') {
            None if s == "zero" => Ok(Coefficient::Zero),
            Some(("const", c)) => Ok(Coefficient::Const(num(c)?)),
            Some(("sine", args)) => {
                let (amp, freq) = args.split_once(',').ok_or_else(unknown)?;
                Ok(Coefficient::Sine {
                    amp: num(amp)?,
                    freq: num(freq)?,
                })
            }
            _ => Err(unknown()),
        }
    }
}

/// Noise families shipped with the crate. All have mean 0 and variance 1.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum NoiseKind {
    Gaussian,
    /// Uniform on `[-√3, √3]`.
    #[serde(rename = "uniform")]
    UniformScaled,
    Rademacher,
}

impl NoiseKind {
    pub const ALL: [NoiseKind; 3] = [
        NoiseKind::Gaussian,
        NoiseKind::UniformScaled,
        NoiseKind::Rademacher,
    ];

    pub fn name(self) -> &'static str {
        match self {
            NoiseKind::Gaussian => "gaussian",
            NoiseKind::UniformScaled => "uniform",
            NoiseKind::Rademacher => "rademacher",
        }
    }
}

impl FromStr for NoiseKind {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s.trim().to_ascii_lowercase().as_str() {
            "gaussian" | "normal" => Ok(NoiseKind::Gaussian),
            "uniform" | "uniformscaled" => Ok(NoiseKind::UniformScaled),
            "rademacher" => Ok(NoiseKind::Rademacher),
            other => Err(Error::UnknownNoise(other.to_string())),
        }
    }
}

impl fmt::Display for NoiseKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

/// A member of the noise-density class with moment parameter `varsigma ≥ 1`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct NoiseDensity {
    pub kind: NoiseKind,
    pub varsigma: f64,
}

const SQRT3: f64 = 1.732_050_807_568_877_2;

impl NoiseDensity {
    pub fn new(kind: NoiseKind, varsigma: f64) -> Result<Self> {
        if !(varsigma >= 1.0) || !varsigma.is_finite() {
            return Err(Error::InvalidParameter {
                name: "varsigma",
                reason: format!("must be a finite value >= 1, got {varsigma}"),
            });
        }
        Ok(Self { kind, varsigma })
    }

    pub fn gaussian() -> Self {
        Self {
            kind: NoiseKind::Gaussian,
            varsigma: 1.0,
        }
    }

    #[inline]
    pub fn sample<R: Rng + ?Sized>(&self, rng: &mut R) -> f64 {
        match self.kind {
            NoiseKind::Gaussian => rng.sample(StandardNormal),
            NoiseKind::UniformScaled => rng.random_range(-SQRT3..SQRT3),
            NoiseKind::Rademacher => {
                if rng.random::<bool>() {
                    1.0
                } else {
                    -1.0
                }
            }
        }
    }

    /// Upper bound `ς^k (2k-1)!!` on `E|ξ|^{2k}` required of class members.
    pub fn class_moment_bound(&self, k: u32) -> f64 {
        self.varsigma.powi(k as i32) * double_factorial_odd(k)
    }

    /// Class-wide fourth-moment bound `m*_4 = 3ς²`.
    pub fn class_fourth_moment(&self) -> f64 {
        self.class_moment_bound(2)
    }
}

/// `(2k-1)!!`, with `(-1)!! = 1`.
pub(crate) fn double_factorial_odd(k: u32) -> f64 {
    (1..=k).map(|i| (2 * i - 1) as f64).product()
}

/// Analytic `E|ξ|^order` for a shipped density.
pub fn noise_moment(noise: &NoiseDensity, order: u32) -> Result<f64> {
    if !matches!(order, 2 | 4 | 6 | 8 | 10 | 12) {
        return Err(Error::UnsupportedMomentOrder(order));
    }
    let k = order / 2;
    Ok(match noise.kind {
        NoiseKind::Gaussian => double_factorial_odd(k),
        NoiseKind::UniformScaled => 3f64.powi(k as i32) / (order as f64 + 1.0),
        NoiseKind::Rademacher => 1.0,
    })
}

/// Stability set parameters: `sup|S| ≤ 1 - eps` and `sup|S'| ≤ lipschitz`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct StabilityParams {
    pub eps: f64,
    #[serde(rename = "L", alias = "lipschitz")]
    pub lipschitz: f64,
}

impl StabilityParams {
    pub fn new(eps: f64, lipschitz: f64) -> Result<Self> {
        if !(eps > 0.0 && eps < 1.0) {
            return Err(Error::InvalidParameter {
                name: "eps",
                reason: format!("must lie in (0, 1), got {eps}"),
            });
        }
        if !(lipschitz > 0.0) || !lipschitz.is_finite() {
            return Err(Error::InvalidParameter {
                name: "L",
                reason: format!("must be positive, got {lipschitz}"),
            });
        }
        Ok(Self { eps, lipschitz })
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct StabilityReport {
    pub in_theta: bool,
    pub sup_s: f64,
    pub sup_ds: f64,
}

/// Grid test of membership in the stability set on `[a, b]`.
///
/// The derivative is the analytic one when the coefficient carries it and a
/// second-order finite difference otherwise (central inside, one-sided at the
/// endpoints).
pub fn check_stability(
    s: &Coefficient,
    a: f64,
    b: f64,
    params: &StabilityParams,
    grid_size: usize,
) -> StabilityReport {
    let m = grid_size.max(3);
    let step = (b - a) / (m - 1) as f64;
    let xs: Vec<f64> = (0..m).map(|i| a + i as f64 * step).collect();
    let vals: Vec<f64> = xs.iter().map(|&x| s.eval(x)).collect();
    let sup_s = vals.iter().fold(0.0f64, |acc, v| acc.max(v.abs()));
    let sup_ds = (0..m)
        .map(|i| {
            s.derivative(xs[i]).unwrap_or_else(|| {
                if i == 0 {
                    (-3.0 * vals[0] + 4.0 * vals[1] - vals[2]) / (2.0 * step)
                } else if i == m - 1 {
                    (3.0 * vals[m - 1] - 4.0 * vals[m - 2] + vals[m - 3]) / (2.0 * step)
                } else {
                    (vals[i + 1] - vals[i - 1]) / (2.0 * step)
                }
            })
        })
        .fold(0.0f64, |acc, v| acc.max(v.abs()));
    StabilityReport {
        in_theta: sup_s <= 1.0 - params.eps && sup_ds <= params.lipschitz,
        sup_s,
        sup_ds,
    }
}

/// One experiment instance.
#[derive(Debug, Clone)]
pub struct ModelSpec {
    pub a: f64,
    pub b: f64,
    pub n: usize,
    pub coefficient: Coefficient,
    pub noise: NoiseDensity,
    pub y0: f64,
}

impl ModelSpec {
    pub fn new(
        a: f64,
        b: f64,
        n: usize,
        coefficient: Coefficient,
        noise: NoiseDensity,
    ) -> Result<Self> {
        let spec = Self {
            a,
            b,
            n,
            coefficient,
            noise,
            y0: 0.0,
        };
        spec.validate()?;
        Ok(spec)
    }

    pub fn with_y0(mut self, y0: f64) -> Self {
        self.y0 = y0;
        self
    }

    pub fn with_n(&self, n: usize) -> Result<Self> {
        let mut spec = self.clone();
        spec.n = n;
        spec.validate()?;
        Ok(spec)
    }

    pub fn with_noise(&self, noise: NoiseDensity) -> Self {
        let mut spec = self.clone();
        spec.noise = noise;
        spec
    }

    pub fn validate(&self) -> Result<()> {
        if !(self.a < self.b) || !self.a.is_finite() || !self.b.is_finite() {
            return Err(Error::InvalidModel(format!(
                "interval [{}, {}] must satisfy a < b",
                self.a, self.b
            )));
        }
        if self.n < 3 {
            return Err(Error::SampleTooSmall {
                n: self.n,
                reason: "the model needs n >= 3".into(),
            });
        }
        Ok(())
    }

    /// Design point `x_k = a + k(b - a)/n`.
    #[inline]
    pub fn design_point(&self, k: usize) -> f64 {
        self.a + k as f64 * (self.b - self.a) / self.n as f64
    }

    pub fn check_stability(&self, params: &StabilityParams, grid_size: usize) -> StabilityReport {
        check_stability(&self.coefficient, self.a, self.b, params, grid_size)
    }
}

/// Realized observations `y_0, …, y_n`.
///
/// `noise` holds `ξ_0 = 0, ξ_1, …, ξ_n` when the path was simulated; paths
/// built from raw observations carry none.
#[derive(Debug, Clone)]
pub struct Path {
    pub y: Vec<f64>,
    pub seed: u64,
    pub noise: Option<Vec<f64>>,
    pub spec: ModelSpec,
}

impl Path {
    pub fn n(&self) -> usize {
        self.y.len() - 1
    }

    /// Wrap externally observed values. No innovation record is kept.
    pub fn from_observations(spec: &ModelSpec, y: Vec<f64>) -> Result<Self> {
        if y.len() != spec.n + 1 {
            return Err(Error::LengthMismatch {
                expected: spec.n + 1,
                actual: y.len(),
            });
        }
        Ok(Self {
            y,
            seed: 0,
            noise: None,
            spec: spec.clone(),
        })
    }

    pub fn noise(&self) -> Result<&[f64]> {
        self.noise.as_deref().ok_or(Error::MissingNoise)
    }
}

/// Simulate the model with innovations drawn from `spec.noise`.
pub fn simulate_path(spec: &ModelSpec, seed: u64) -> Result<Path> {
    spec.validate()?;
    let mut rng = seeded_rng(seed);
    let mut xi = Vec::with_capacity(spec.n + 1);
    xi.push(0.0);
    for _ in 0..spec.n {
        xi.push(spec.noise.sample(&mut rng));
    }
    let mut path = run_recursion(spec, xi);
    path.seed = seed;
    Ok(path)
}

/// Simulate with an explicit innovation sequence `ξ_1, …, ξ_n`.
pub fn simulate_with_noise(spec: &ModelSpec, innovations: &[f64]) -> Result<Path> {
    spec.validate()?;
    if innovations.len() != spec.n {
        return Err(Error::LengthMismatch {
            expected: spec.n,
            actual: innovations.len(),
        });
    }
    let mut xi = Vec::with_capacity(spec.n + 1);
    xi.push(0.0);
    xi.extend_from_slice(innovations);
    Ok(run_recursion(spec, xi))
}

fn run_recursion(spec: &ModelSpec, xi: Vec<f64>) -> Path {
    let mut y = Vec::with_capacity(spec.n + 1);
    y.push(spec.y0);
    for k in 1..=spec.n {
        let prev = y[k - 1];
        y.push(spec.coefficient.eval(spec.design_point(k)) * prev + xi[k]);
    }
    Path {
        y,
        seed: 0,
        noise: Some(xi),
        spec: spec.clone(),
    }
}

/// Monte Carlo estimate of `E max_{1≤j≤n} y_j^power`, one path per seed.
pub fn max_path_moment(spec: &ModelSpec, power: u32, seeds: &[u64]) -> Result<f64> {
    if power != 2 && power != 4 {
        return Err(Error::InvalidParameter {
            name: "power",
            reason: format!("must be 2 or 4, got {power}"),
        });
    }
    if seeds.is_empty() {
        return Err(Error::InvalidParameter {
            name: "replications",
            reason: "at least one seed is required".into(),
        });
    }
    let mut total = 0.0;
    for &seed in seeds {
        let path = simulate_path(spec, seed)?;
        let max = path.y[1..]
            .iter()
            .map(|v| v.powi(power as i32))
            .fold(f64::NEG_INFINITY, f64::max);
        total += max;
    }
    Ok(total / seeds.len() as f64)
}
