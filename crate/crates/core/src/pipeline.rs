//! End-to-end estimator: path → regression → Fourier coefficients → selection.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::process::{ModelSpec, Path, StabilityParams};
use crate::selection::{
    check_delta, fourier_estimates, select, Basis, FourierEstimates, SelectionResult, DEFAULT_DELTA,
};
use crate::seqkernel::{
    build_regression, grid_layout, GridLayout, RegressionData, SigmaBounds, DEFAULT_MU0,
};
use crate::weights::{build_weight_family, WeightGridParams, WeightVector, DEFAULT_K_STAR0};

/// Tuning of the procedure. `stability` is the assumed stability set of the
/// coefficient; its `eps` enters the lower variance bound.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct PipelineConfig {
    pub mu0: f64,
    pub delta: f64,
    pub k_star0: f64,
    pub stability: StabilityParams,
}

impl PipelineConfig {
    pub fn new(stability: StabilityParams) -> Self {
        Self {
            mu0: DEFAULT_MU0,
            delta: DEFAULT_DELTA,
            k_star0: DEFAULT_K_STAR0,
            stability,
        }
    }

    pub fn validate(&self) -> Result<()> {
        check_delta(self.delta)?;
        if !(self.mu0 > 0.0 && self.mu0 < 1.0) {
            return Err(Error::InvalidParameter {
                name: "mu0",
                reason: format!("must lie in (0, 1), got {}", self.mu0),
            });
        }
        StabilityParams::new(self.stability.eps, self.stability.lipschitz)?;
        Ok(())
    }
}

/// Everything that depends on `(a, b, n)` only, built once per sample size.
#[derive(Debug, Clone)]
pub struct Pipeline {
    pub config: PipelineConfig,
    pub layout: GridLayout,
    pub basis: Basis,
    pub family: Vec<WeightVector>,
}

#[derive(Debug, Clone, Serialize)]
pub struct Estimate {
    pub regression: RegressionData,
    pub fourier: FourierEstimates,
    pub selection: SelectionResult,
}

impl Pipeline {
    pub fn new(spec: &ModelSpec, config: PipelineConfig) -> Result<Self> {
        config.validate()?;
        let layout = grid_layout(spec, config.mu0)?;
        let basis = Basis::trigonometric(layout.d, spec.a, spec.b)?;
        let family = build_weight_family(&WeightGridParams::new(config.k_star0, spec.n, layout.d)?);
        Ok(Self {
            config,
            layout,
            basis,
            family,
        })
    }

    pub fn d(&self) -> usize {
        self.layout.d
    }

    pub fn sigma_bounds(&self) -> SigmaBounds {
        crate::seqkernel::sigma_bounds(&self.layout, self.config.stability.eps)
    }

    pub fn regression(&self, path: &Path) -> RegressionData {
        build_regression(path, &self.layout, self.config.stability.eps)
    }

    pub fn estimate(&self, path: &Path) -> Result<Estimate> {
        let regression = self.regression(path);
        let fourier = fourier_estimates(&regression, &self.basis)?;
        let selection = select(&fourier, &self.family, &self.basis, self.config.delta)?;
        Ok(Estimate {
            regression,
            fourier,
            selection,
        })
    }
}
