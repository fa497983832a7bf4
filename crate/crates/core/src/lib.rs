//! Sequential model selection for a varying-coefficient autoregression.
//!
//! The observed process is `y_k = S(x_k) y_{k-1} + ξ_k` on the design
//! `x_k = a + k(b-a)/n`. The crate simulates such paths, turns them into a
//! heteroscedastic regression on a `d`-point grid through sequential kernel
//! estimation, and picks a Pinsker-weighted Fourier estimator by penalized
//! least squares. The [`risk`] module runs the Monte Carlo experiments.

// `!(x > 0.0)` is used on purpose: it also rejects NaN.
#![allow(clippy::neg_cmp_op_on_partial_ord, clippy::needless_range_loop)]

/// Version of this crate, recorded in run manifests.
pub const VERSION: &str = env!("CARGO_PKG_VERSION");

pub mod error;
pub mod numeric;
pub mod pipeline;
pub mod process;
pub mod risk;
pub mod rng;
pub mod selection;
pub mod seqkernel;
pub mod weights;

pub use error::{Error, Result};
pub use pipeline::{Estimate, Pipeline, PipelineConfig};
pub use process::{
    check_stability, max_path_moment, noise_moment, simulate_path, simulate_with_noise,
    Coefficient, ModelSpec, NoiseDensity, NoiseKind, Path, StabilityParams, StabilityReport,
};
pub use risk::{
    check_norm_comparison, check_projection_bound, check_quadratic_form_bound, decompose_noise,
    diagnostic_replication, diagnostic_replications, empirical_norm_sq, l2_norm_sq,
    monte_carlo_risk, oracle_bound_factor, robust_risk, DiagnosticReplication, MomentCheck,
    NoiseDecomposition, NormComparisonReport, ReplicationRecord, RiskReport, RiskRun,
    RobustRiskRun,
};
pub use rng::{replication_seed, replication_seeds, seeded_rng};
pub use selection::{
    cost, fourier_estimates, penalty, select, weighted_estimate, Basis, FourierEstimates,
    GridEstimator, SelectionResult, DEFAULT_DELTA, MAX_DELTA,
};
pub use seqkernel::{
    build_regression, eta_variables, grid_layout, run_point_procedure, sigma_bounds,
    upsilon_statistic, GridLayout, PointProcedureResult, RegressionData, SigmaBounds, Window,
    DEFAULT_MU0,
};
pub use weights::{
    build_weight_family, family_metadata, FamilyMetadata, WeightGridParams, WeightVector,
};
