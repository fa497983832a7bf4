//! Experiment configuration file.
//!
//! ```toml
//! sizes = [500, 2000]
//!
//! [model]
//! coefficient = "sine:0.3,1"
//! noise = "gaussian"
//!
//! [stability]
//! eps = 0.1
//! L = 2.0
//!
//! [run]
//! replications = 200
//! seed = 1
//! ```
//!
//! Only `model.coefficient` is required.

use std::path::PathBuf;
use std::str::FromStr;

use serde::{Deserialize, Serialize};

use seqar_core::{
    Coefficient, ModelSpec, NoiseDensity, NoiseKind, PipelineConfig, StabilityParams,
    DEFAULT_DELTA, DEFAULT_MU0, MAX_DELTA,
};

use crate::error::CliError;

/// Smallest sample size accepted by the estimation modes.
pub const MIN_N: usize = 25;
/// Smallest sample size accepted by `simulate`.
pub const MIN_N_SIMULATE: usize = 3;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Mode {
    Simulate,
    Estimate,
    Select,
    Risk,
    OracleCheck,
    Diagnostics,
}

impl Mode {
    pub fn name(self) -> &'static str {
        match self {
            Mode::Simulate => "simulate",
            Mode::Estimate => "estimate",
            Mode::Select => "select",
            Mode::Risk => "risk",
            Mode::OracleCheck => "oracle-check",
            Mode::Diagnostics => "diagnostics",
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ModelSection {
    pub coefficient: String,
    #[serde(default = "default_noise")]
    pub noise: String,
    #[serde(default = "one")]
    pub varsigma: f64,
    #[serde(default)]
    pub a: f64,
    #[serde(default = "one")]
    pub b: f64,
    #[serde(default)]
    pub y0: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct StabilitySection {
    #[serde(default = "default_eps")]
    pub eps: f64,
    #[serde(rename = "L", default = "default_lipschitz")]
    pub lipschitz: f64,
}

impl Default for StabilitySection {
    fn default() -> Self {
        Self {
            eps: default_eps(),
            lipschitz: default_lipschitz(),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ProcedureSection {
    #[serde(default = "default_mu0")]
    pub mu0: f64,
    #[serde(default = "default_delta")]
    pub delta: f64,
    #[serde(default)]
    pub k_star0: f64,
}

impl Default for ProcedureSection {
    fn default() -> Self {
        Self {
            mu0: DEFAULT_MU0,
            delta: DEFAULT_DELTA,
            k_star0: 0.0,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct RunSection {
    #[serde(default = "default_replications")]
    pub replications: usize,
    #[serde(default = "one_u64")]
    pub seed: u64,
    /// Density set of the robust risk.
    #[serde(default = "default_densities")]
    pub densities: Vec<String>,
    #[serde(default)]
    pub robust: bool,
    #[serde(default = "default_output_dir")]
    pub output_dir: PathBuf,
    /// Worker threads; 0 lets the pool decide.
    #[serde(default)]
    pub workers: usize,
}

impl Default for RunSection {
    fn default() -> Self {
        Self {
            replications: default_replications(),
            seed: 1,
            densities: default_densities(),
            robust: false,
            output_dir: default_output_dir(),
            workers: 0,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ExperimentConfig {
    #[serde(default = "default_sizes")]
    pub sizes: Vec<usize>,
    pub model: ModelSection,
    #[serde(default)]
    pub stability: StabilitySection,
    #[serde(default)]
    pub procedure: ProcedureSection,
    #[serde(default)]
    pub run: RunSection,
}

/// Same shape with every section optional, so that a missing model is
/// reported by name rather than as a serde field error.
#[derive(Deserialize)]
#[serde(deny_unknown_fields)]
struct RawConfig {
    #[serde(default = "default_sizes")]
    sizes: Vec<usize>,
    model: Option<ModelSection>,
    #[serde(default)]
    stability: StabilitySection,
    #[serde(default)]
    procedure: ProcedureSection,
    #[serde(default)]
    run: RunSection,
}

fn one() -> f64 {
    1.0
}
fn one_u64() -> u64 {
    1
}
fn default_noise() -> String {
    "gaussian".into()
}
fn default_eps() -> f64 {
    0.1
}
fn default_lipschitz() -> f64 {
    10.0
}
fn default_mu0() -> f64 {
    DEFAULT_MU0
}
fn default_delta() -> f64 {
    DEFAULT_DELTA
}
fn default_replications() -> usize {
    200
}
fn default_sizes() -> Vec<usize> {
    vec![1000]
}
fn default_densities() -> Vec<String> {
    NoiseKind::ALL
        .iter()
        .map(|k| k.name().to_string())
        .collect()
}
fn default_output_dir() -> PathBuf {
    PathBuf::from("out")
}

fn invalid(key: &str, reason: impl Into<String>) -> CliError {
    CliError::Config(format!("{key}: {}", reason.into()))
}

impl ExperimentConfig {
    pub fn from_toml_str(text: &str) -> Result<Self, CliError> {
        let raw: RawConfig = toml::from_str(text).map_err(|e| CliError::Config(e.to_string()))?;
        let model = raw
            .model
            .ok_or_else(|| CliError::Config("missing model".into()))?;
        Ok(Self {
            sizes: raw.sizes,
            model,
            stability: raw.stability,
            procedure: raw.procedure,
            run: raw.run,
        })
    }

    pub fn load(path: &std::path::Path) -> Result<Self, CliError> {
        let text = std::fs::read_to_string(path)
            .map_err(|e| CliError::Config(format!("cannot read {}: {e}", path.display())))?;
        Self::from_toml_str(&text)
    }

    pub fn to_toml(&self) -> String {
        toml::to_string(self).expect("config serializes")
    }

    /// Check every key without running anything.
    pub fn validate(&self, mode: Mode) -> Result<(), CliError> {
        self.coefficient()?;
        self.noise()?;
        if !(self.model.a < self.model.b) {
            return Err(invalid(
                "model.a",
                format!(
                    "must be below model.b ({} >= {})",
                    self.model.a, self.model.b
                ),
            ));
        }
        if self.sizes.is_empty() {
            return Err(invalid("sizes", "at least one sample size is required"));
        }
        let min_n = if mode == Mode::Simulate {
            MIN_N_SIMULATE
        } else {
            MIN_N
        };
        if let Some(&n) = self.sizes.iter().find(|&&n| n < min_n) {
            return Err(invalid(
                "sizes",
                format!("every n must be >= {min_n}, got {n}"),
            ));
        }
        StabilityParams::new(self.stability.eps, self.stability.lipschitz)
            .map_err(|e| invalid("stability", e.to_string()))?;
        let delta = self.procedure.delta;
        if !(delta > 0.0 && delta <= MAX_DELTA) {
            return Err(invalid(
                "procedure.delta",
                format!("must lie in the admissible interval (0, 1/12], got {delta}"),
            ));
        }
        if !(self.procedure.mu0 > 0.0 && self.procedure.mu0 < 1.0) {
            return Err(invalid(
                "procedure.mu0",
                format!("must lie in (0, 1), got {}", self.procedure.mu0),
            ));
        }
        if !(self.procedure.k_star0 >= 0.0) {
            return Err(invalid(
                "procedure.k_star0",
                format!("must be >= 0, got {}", self.procedure.k_star0),
            ));
        }
        if self.run.replications == 0 {
            return Err(invalid("run.replications", "must be positive"));
        }
        if self.run.densities.is_empty() {
            return Err(invalid("run.densities", "the density set is empty"));
        }
        self.densities()?;
        Ok(())
    }

    pub fn coefficient(&self) -> Result<Coefficient, CliError> {
        Coefficient::from_str(&self.model.coefficient)
            .map_err(|e| invalid("model.coefficient", e.to_string()))
    }

    fn density(&self, key: &str, name: &str) -> Result<NoiseDensity, CliError> {
        let kind = NoiseKind::from_str(name).map_err(|e| invalid(key, e.to_string()))?;
        NoiseDensity::new(kind, self.model.varsigma)
            .map_err(|e| invalid("model.varsigma", e.to_string()))
    }

    pub fn noise(&self) -> Result<NoiseDensity, CliError> {
        self.density("model.noise", &self.model.noise)
    }

    pub fn densities(&self) -> Result<Vec<NoiseDensity>, CliError> {
        self.run
            .densities
            .iter()
            .map(|d| self.density("run.densities", d))
            .collect()
    }

    pub fn model_spec(&self, n: usize) -> Result<ModelSpec, CliError> {
        let spec = ModelSpec::new(
            self.model.a,
            self.model.b,
            n,
            self.coefficient()?,
            self.noise()?,
        )
        .map_err(|e| invalid("model", e.to_string()))?;
        Ok(spec.with_y0(self.model.y0))
    }

    pub fn pipeline_config(&self) -> PipelineConfig {
        PipelineConfig {
            mu0: self.procedure.mu0,
            delta: self.procedure.delta,
            k_star0: self.procedure.k_star0,
            stability: StabilityParams {
                eps: self.stability.eps,
                lipschitz: self.stability.lipschitz,
            },
        }
    }
}
