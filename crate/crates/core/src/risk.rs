//! Monte Carlo risks, oracle ratios and moment diagnostics.
//!
//! Risks are measured in the continuous `L²[a, b]` norm against the true
//! coefficient, using per-cell quadrature of `S` and `S²` so that the error of
//! any piecewise-constant estimator is exact up to quadrature. The empirical
//! grid norm is reported alongside.

use rayon::prelude::*;
use serde::Serialize;

use crate::error::{Error, Result};
use crate::numeric::{mean_and_se, simpson, CompensatedSum};
use crate::pipeline::{Pipeline, PipelineConfig};
use crate::process::{simulate_path, Coefficient, ModelSpec, NoiseDensity, Path};
use crate::selection::{weighted_estimate, Basis};
use crate::seqkernel::{GridLayout, RegressionData};

/// `‖f‖²_d = ((b-a)/d) Σ_l f(z_l)²`.
pub fn empirical_norm_sq(f_on_grid: &[f64], a: f64, b: f64) -> f64 {
    let d = f_on_grid.len();
    (b - a) / d as f64 * f_on_grid.iter().map(|v| v * v).sum::<f64>()
}

pub const DEFAULT_QUAD_POINTS: usize = 100_000;

/// `∫_a^b f²` by composite Simpson with `quad_points` subintervals.
pub fn l2_norm_sq<F: Fn(f64) -> f64>(f: F, a: f64, b: f64, quad_points: usize) -> f64 {
    simpson(|x| f(x).powi(2), a, b, quad_points)
}

/// Constant factor `(1+4δ)(1+δ)²/(1-6δ)` of the oracle inequality.
pub fn oracle_bound_factor(delta: f64) -> f64 {
    (1.0 + 4.0 * delta) * (1.0 + delta).powi(2) / (1.0 - 6.0 * delta)
}

/// `m̌ = 4 (144/√3)⁴ m*_4`.
pub fn m_check(fourth_moment: f64) -> f64 {
    4.0 * (144.0 / 3f64.sqrt()).powi(4) * fourth_moment
}

/// Per-cell integrals of `S` and `S²` over `[a, z_1], (z_1, z_2], …`.
#[derive(Debug, Clone)]
pub struct CellIntegrals {
    lengths: Vec<f64>,
    int_s: Vec<f64>,
    int_s2: Vec<f64>,
}

impl CellIntegrals {
    pub fn new(s: &Coefficient, a: f64, z: &[f64], total_points: usize) -> Self {
        let per_cell = (total_points / z.len().max(1)).max(16);
        let mut lengths = Vec::with_capacity(z.len());
        let mut int_s = Vec::with_capacity(z.len());
        let mut int_s2 = Vec::with_capacity(z.len());
        let mut lo = a;
        for &hi in z {
            lengths.push(hi - lo);
            int_s.push(simpson(|x| s.eval(x), lo, hi, per_cell));
            int_s2.push(simpson(|x| s.eval(x).powi(2), lo, hi, per_cell));
            lo = hi;
        }
        Self {
            lengths,
            int_s,
            int_s2,
        }
    }

    /// `‖S‖²`.
    pub fn norm_sq(&self) -> f64 {
        self.int_s2.iter().sum()
    }

    /// `‖g - S‖²` for the step function taking `values[l]` on cell `l`.
    pub fn error_sq(&self, values: &[f64]) -> f64 {
        let mut acc = CompensatedSum::new();
        for (l, &c) in values.iter().enumerate() {
            acc.add(c * c * self.lengths[l] - 2.0 * c * self.int_s[l] + self.int_s2[l]);
        }
        acc.value().max(0.0)
    }
}

/// One Monte Carlo replication of the risk experiment.
#[derive(Debug, Clone, Serialize)]
pub struct ReplicationRecord {
    pub seed: u64,
    pub gamma: bool,
    pub per_lambda_risk: Vec<f64>,
    pub selected_index: usize,
    pub selected_risk: f64,
    pub selected_empirical_risk: f64,
}

#[derive(Debug, Clone, Serialize)]
pub struct RiskReport {
    pub n: usize,
    pub noise: String,
    pub replications: usize,
    pub per_lambda_risk: Vec<f64>,
    pub std_errors: Vec<f64>,
    pub selected_risk: f64,
    pub selected_std_error: f64,
    pub selected_empirical_risk: f64,
    pub oracle_index: usize,
    pub oracle_risk: f64,
    pub oracle_ratio: f64,
    /// `sqrt(se_selected² + se_oracle²)`.
    pub combined_std_error: f64,
    pub gamma_c_frequency: f64,
    pub coefficient_norm_sq: f64,
}

impl RiskReport {
    fn from_records(n: usize, noise: &str, records: &[ReplicationRecord], norm_sq: f64) -> Self {
        let nu = records.first().map_or(0, |r| r.per_lambda_risk.len());
        let (per_lambda_risk, std_errors): (Vec<f64>, Vec<f64>) = (0..nu)
            .map(|i| {
                let col: Vec<f64> = records.iter().map(|r| r.per_lambda_risk[i]).collect();
                mean_and_se(&col)
            })
            .unzip();
        let sel: Vec<f64> = records.iter().map(|r| r.selected_risk).collect();
        let (selected_risk, selected_std_error) = mean_and_se(&sel);
        let emp: Vec<f64> = records.iter().map(|r| r.selected_empirical_risk).collect();
        let (selected_empirical_risk, _) = mean_and_se(&emp);
        let gamma_c = records.iter().filter(|r| !r.gamma).count();
        let mut report = Self {
            n,
            noise: noise.to_string(),
            replications: records.len(),
            per_lambda_risk,
            std_errors,
            selected_risk,
            selected_std_error,
            selected_empirical_risk,
            oracle_index: 0,
            oracle_risk: f64::NAN,
            oracle_ratio: f64::NAN,
            combined_std_error: f64::NAN,
            gamma_c_frequency: gamma_c as f64 / records.len().max(1) as f64,
            coefficient_norm_sq: norm_sq,
        };
        report.refresh_oracle();
        report
    }

    /// Recompute the oracle fields from `per_lambda_risk`.
    fn refresh_oracle(&mut self) {
        let idx = crate::selection::first_argmin(&self.per_lambda_risk).unwrap_or(0);
        self.oracle_index = idx;
        self.oracle_risk = self.per_lambda_risk.get(idx).copied().unwrap_or(f64::NAN);
        self.oracle_ratio = ratio(self.selected_risk, self.oracle_risk);
        let se_oracle = self.std_errors.get(idx).copied().unwrap_or(f64::NAN);
        self.combined_std_error = self.selected_std_error.hypot(se_oracle);
    }

    /// Selected risk may not undercut the in-family oracle by more than
    /// `k` combined standard errors (zero when undefined).
    pub fn oracle_dominance_holds(&self, k: f64) -> bool {
        let se = if self.combined_std_error.is_nan() {
            0.0
        } else {
            self.combined_std_error
        };
        self.selected_risk >= self.oracle_risk - k * se
    }
}

fn ratio(selected: f64, oracle: f64) -> f64 {
    if oracle > 0.0 {
        selected / oracle
    } else if selected == 0.0 {
        1.0
    } else {
        f64::INFINITY
    }
}

#[derive(Debug, Clone, Serialize)]
pub struct RiskRun {
    pub report: RiskReport,
    pub records: Vec<ReplicationRecord>,
}

impl RiskRun {
    pub const CSV_HEADER: &'static str =
        "seed,gamma,lambda_index,lambda_risk,selected_index,selected_risk";

    /// Long-form table, one row per replication and weight vector.
    pub fn write_csv<W: std::io::Write>(&self, mut out: W) -> std::io::Result<()> {
        writeln!(out, "{}", Self::CSV_HEADER)?;
        for r in &self.records {
            for (i, risk) in r.per_lambda_risk.iter().enumerate() {
                writeln!(
                    out,
                    "{},{},{},{},{},{}",
                    r.seed, r.gamma, i, risk, r.selected_index, r.selected_risk
                )?;
            }
        }
        Ok(())
    }
}

fn ensure_stable(spec: &ModelSpec, config: &PipelineConfig) -> Result<()> {
    let report = spec.check_stability(&config.stability, 10_000);
    if report.in_theta {
        Ok(())
    } else {
        Err(Error::InvalidModel(format!(
            "coefficient {} is outside the stability set (sup|S| = {}, sup|S'| = {}, eps = {}, L = {})",
            spec.coefficient.name(),
            report.sup_s,
            report.sup_ds,
            config.stability.eps,
            config.stability.lipschitz
        )))
    }
}

fn replicate(
    spec: &ModelSpec,
    pipeline: &Pipeline,
    family: &[Vec<f64>],
    cells: &CellIntegrals,
    seed: u64,
) -> Result<ReplicationRecord> {
    let path = simulate_path(spec, seed)?;
    let est = pipeline.estimate(&path)?;
    let per_lambda_risk = family
        .iter()
        .map(|lam| {
            weighted_estimate(lam, &est.fourier, &pipeline.basis).map(|v| cells.error_sq(&v))
        })
        .collect::<Result<Vec<_>>>()?;
    let values = est.selection.estimates_on_grid();
    let truth: Vec<f64> = pipeline
        .layout
        .z
        .iter()
        .zip(values)
        .map(|(&z, v)| v - spec.coefficient.eval(z))
        .collect();
    Ok(ReplicationRecord {
        seed,
        gamma: est.regression.gamma_all,
        per_lambda_risk,
        selected_index: est.selection.lambda_index,
        selected_risk: cells.error_sq(values),
        selected_empirical_risk: empirical_norm_sq(&truth, spec.a, spec.b),
    })
}

/// Quadratic risk of every family member and of the selected estimator,
/// one replication per seed. Replications run in parallel; results are
/// reduced in seed order.
pub fn monte_carlo_risk(
    spec: &ModelSpec,
    config: &PipelineConfig,
    seeds: &[u64],
) -> Result<RiskRun> {
    if seeds.is_empty() {
        return Err(Error::InvalidParameter {
            name: "replications",
            reason: "at least one replication is required".into(),
        });
    }
    ensure_stable(spec, config)?;
    let pipeline = Pipeline::new(spec, *config)?;
    let family: Vec<Vec<f64>> = pipeline.family.iter().map(|w| w.values.clone()).collect();
    let cells = CellIntegrals::new(
        &spec.coefficient,
        spec.a,
        &pipeline.layout.z,
        DEFAULT_QUAD_POINTS,
    );
    let records = seeds
        .par_iter()
        .map(|&seed| replicate(spec, &pipeline, &family, &cells, seed))
        .collect::<Result<Vec<_>>>()?;
    let report =
        RiskReport::from_records(spec.n, spec.noise.kind.name(), &records, cells.norm_sq());
    Ok(RiskRun { report, records })
}

#[derive(Debug, Clone, Serialize)]
pub struct RobustRiskRun {
    /// Componentwise maximum over the density set.
    pub report: RiskReport,
    pub per_density: Vec<RiskRun>,
}

/// Risks maximized over a finite density set, sharing seeds across members.
pub fn robust_risk(
    spec: &ModelSpec,
    densities: &[NoiseDensity],
    config: &PipelineConfig,
    seeds: &[u64],
) -> Result<RobustRiskRun> {
    if densities.is_empty() {
        return Err(Error::InvalidParameter {
            name: "densities",
            reason: "the density set is empty".into(),
        });
    }
    let per_density = densities
        .iter()
        .map(|p| monte_carlo_risk(&spec.with_noise(*p), config, seeds))
        .collect::<Result<Vec<_>>>()?;
    let mut report = per_density[0].report.clone();
    report.noise = densities
        .iter()
        .map(|p| p.kind.name())
        .collect::<Vec<_>>()
        .join("|");
    for run in &per_density[1..] {
        let r = &run.report;
        for i in 0..report.per_lambda_risk.len() {
            if r.per_lambda_risk[i] > report.per_lambda_risk[i] {
                report.per_lambda_risk[i] = r.per_lambda_risk[i];
                report.std_errors[i] = r.std_errors[i];
            }
        }
        if r.selected_risk > report.selected_risk {
            report.selected_risk = r.selected_risk;
            report.selected_std_error = r.selected_std_error;
        }
        report.selected_empirical_risk = report
            .selected_empirical_risk
            .max(r.selected_empirical_risk);
        report.gamma_c_frequency = report.gamma_c_frequency.max(r.gamma_c_frequency);
    }
    report.refresh_oracle();
    Ok(RobustRiskRun {
        report,
        per_density,
    })
}

/// Split of the regression noise `Y_l - S(z_l) = ξ*_l + ϖ_{1,l} + ϖ_{2,l}`.
#[derive(Debug, Clone, Serialize)]
pub struct NoiseDecomposition {
    pub xi_star: Vec<f64>,
    pub varpi1: Vec<f64>,
    pub varpi2: Vec<f64>,
    pub gamma_l: Vec<bool>,
    /// `S*_l - S(z_l) - ξ*_l - ϖ_l` on `Γ_l`, zero elsewhere.
    pub residual: Vec<f64>,
    /// `1_Γ ‖ϖ‖²_d`.
    pub u_d: f64,
}

impl NoiseDecomposition {
    pub fn max_abs_residual(&self) -> f64 {
        self.residual.iter().fold(0.0, |m, r| m.max(r.abs()))
    }

    /// `max |ϖ_{1,l}|` over points where `Γ_l` holds.
    pub fn max_abs_varpi1_on_gamma(&self) -> f64 {
        self.varpi1
            .iter()
            .zip(&self.gamma_l)
            .filter(|(_, &g)| g)
            .fold(0.0, |m, (v, _)| m.max(v.abs()))
    }
}

/// Evaluate the main noise and the two approximation terms from the stopping
/// times and corrections recorded in `data`. Needs the simulated innovations.
pub fn decompose_noise(
    path: &Path,
    layout: &GridLayout,
    data: &RegressionData,
) -> Result<NoiseDecomposition> {
    let xi = path.noise()?;
    let y = &path.y;
    let spec = &path.spec;
    let s = &spec.coefficient;
    let d = layout.d;
    let mut out = NoiseDecomposition {
        xi_star: vec![0.0; d],
        varpi1: vec![0.0; d],
        varpi2: vec![0.0; d],
        gamma_l: vec![false; d],
        residual: vec![0.0; d],
        u_d: 0.0,
    };
    for p in &data.point_results {
        let i = p.l - 1;
        let (tau, kappa, h) = (p.tau, p.kappa, p.threshold);
        let s_z = s.eval(layout.z[i]);
        let mut main = 0.0;
        let mut approx = 0.0;
        for j in (p.iota + 1)..tau {
            main += y[j - 1] * xi[j];
            approx += y[j - 1] * y[j - 1] * (s.eval(spec.design_point(j)) - s_z);
        }
        let last = y[tau - 1] * y[tau - 1];
        let s_tau = s.eval(spec.design_point(tau));
        main += kappa * y[tau - 1] * xi[tau];
        approx += kappa * kappa * last * (s_tau - s_z);
        out.xi_star[i] = main / h;
        out.varpi1[i] = approx / h;
        out.varpi2[i] = (kappa - kappa * kappa) * last * s_tau / h;
        out.gamma_l[i] = p.gamma_ok;
        if p.gamma_ok {
            out.residual[i] = p.estimate - s_z - out.xi_star[i] - out.varpi1[i] - out.varpi2[i];
        }
    }
    if data.gamma_all {
        let varpi: Vec<f64> = out
            .varpi1
            .iter()
            .zip(&out.varpi2)
            .map(|(a, b)| a + b)
            .collect();
        out.u_d = empirical_norm_sq(&varpi, layout.a, layout.b);
    }
    Ok(out)
}

/// Noise quantities of one replication projected onto the basis.
#[derive(Debug, Clone, Serialize)]
pub struct DiagnosticReplication {
    pub seed: u64,
    pub gamma_all: bool,
    pub eta: Vec<f64>,
    pub sigma2: Vec<f64>,
    /// `η_{j,d} = √((b-a)/d) Σ_l η_l φ_j(z_l)`.
    pub eta_jd: Vec<f64>,
    /// `s_{j,d}`.
    pub s: Vec<f64>,
    pub a: f64,
    pub b: f64,
}

impl DiagnosticReplication {
    pub fn d(&self) -> usize {
        self.eta.len()
    }

    /// `P_d(λ)` of this replication.
    pub fn penalty(&self, lambda: &[f64]) -> f64 {
        let step = (self.b - self.a) / self.d() as f64;
        step * lambda
            .iter()
            .zip(&self.s)
            .map(|(l, s)| l * l * s)
            .sum::<f64>()
    }

    /// `B(λ) = ((b-a)/√d) Σ_j λ_j (η²_{j,d} - s_{j,d})`.
    pub fn b_lambda(&self, lambda: &[f64]) -> f64 {
        let d = self.d() as f64;
        (self.b - self.a) / d.sqrt()
            * lambda
                .iter()
                .zip(self.eta_jd.iter().zip(&self.s))
                .map(|(l, (e, s))| l * (e * e - s))
                .sum::<f64>()
    }
}

pub fn diagnostic_replication(
    path: &Path,
    layout: &GridLayout,
    basis: &Basis,
) -> Result<DiagnosticReplication> {
    let etas = crate::seqkernel::eta_variables(path, layout)?;
    let eta: Vec<f64> = etas.iter().map(|e| e.eta).collect();
    let sigma2: Vec<f64> = etas.iter().map(|e| e.sigma2).collect();
    let step = basis.step();
    let eta_jd = (1..=basis.d)
        .map(|j| {
            step.sqrt()
                * basis
                    .row(j)
                    .iter()
                    .zip(&eta)
                    .map(|(p, e)| p * e)
                    .sum::<f64>()
        })
        .collect();
    let s = (1..=basis.d)
        .map(|j| {
            step * basis
                .row(j)
                .iter()
                .zip(&sigma2)
                .map(|(p, s)| s * p * p)
                .sum::<f64>()
        })
        .collect();
    Ok(DiagnosticReplication {
        seed: path.seed,
        gamma_all: etas.iter().all(|e| e.gamma_ok),
        eta,
        sigma2,
        eta_jd,
        s,
        a: layout.a,
        b: layout.b,
    })
}

/// Diagnostic replications for a list of seeds (parallel, seed-ordered).
pub fn diagnostic_replications(
    spec: &ModelSpec,
    pipeline: &Pipeline,
    seeds: &[u64],
) -> Result<Vec<DiagnosticReplication>> {
    seeds
        .par_iter()
        .map(|&seed| {
            let path = simulate_path(spec, seed)?;
            diagnostic_replication(&path, &pipeline.layout, &pipeline.basis)
        })
        .collect()
}

#[derive(Debug, Clone, Copy, Serialize)]
pub struct MomentCheck {
    pub lhs: f64,
    pub lhs_std_error: f64,
    pub rhs: f64,
    pub holds: bool,
}

fn moment_check(samples: &[f64], rhs: f64) -> MomentCheck {
    let (lhs, se) = mean_and_se(samples);
    let allowance = if se.is_nan() { 0.0 } else { 3.0 * se };
    MomentCheck {
        lhs,
        lhs_std_error: se,
        rhs,
        holds: lhs - allowance <= rhs,
    }
}

/// `E 1_Γ B²(λ) ≤ 10 (b-a) σ_{1,*} m̌ E P_d(λ)`, with a three standard
/// error allowance on the left-hand side.
pub fn check_quadratic_form_bound(
    reps: &[DiagnosticReplication],
    lambda: &[f64],
    sigma1: f64,
    m_check: f64,
) -> Result<MomentCheck> {
    let first = reps.first().ok_or(Error::InvalidParameter {
        name: "replications",
        reason: "no diagnostic replications".into(),
    })?;
    if lambda.len() != first.d() {
        return Err(Error::LengthMismatch {
            expected: first.d(),
            actual: lambda.len(),
        });
    }
    let lhs: Vec<f64> = reps
        .iter()
        .map(|r| {
            if r.gamma_all {
                r.b_lambda(lambda).powi(2)
            } else {
                0.0
            }
        })
        .collect();
    let pen: Vec<f64> = reps.iter().map(|r| r.penalty(lambda)).collect();
    let (mean_pen, _) = mean_and_se(&pen);
    let rhs = 10.0 * (first.b - first.a) * sigma1 * m_check * mean_pen;
    Ok(moment_check(&lhs, rhs))
}

/// `E(Σ_j v_j η_{j,d})² ≤ σ_{1,*} Σ v_j²`, three standard error allowance.
pub fn check_projection_bound(
    v: &[f64],
    reps: &[DiagnosticReplication],
    sigma1: f64,
) -> Result<MomentCheck> {
    let first = reps.first().ok_or(Error::InvalidParameter {
        name: "replications",
        reason: "no diagnostic replications".into(),
    })?;
    if v.len() != first.d() {
        return Err(Error::LengthMismatch {
            expected: first.d(),
            actual: v.len(),
        });
    }
    let lhs: Vec<f64> = reps
        .iter()
        .map(|r| {
            v.iter()
                .zip(&r.eta_jd)
                .map(|(a, b)| a * b)
                .sum::<f64>()
                .powi(2)
        })
        .collect();
    Ok(moment_check(
        &lhs,
        sigma1 * v.iter().map(|x| x * x).sum::<f64>(),
    ))
}

#[derive(Debug, Clone, Copy, Serialize)]
pub struct NormComparisonReport {
    pub continuous_sq: f64,
    pub empirical_sq: f64,
    pub derivative_sq: f64,
    pub continuous_bound: f64,
    pub empirical_bound: f64,
    pub holds_both: bool,
}

/// Compare `‖f - g‖²` and `‖f - g‖²_d` for a step function `g` on the grid
/// cells, using both norm-comparison inequalities with parameter `eps_tilde`.
pub fn check_norm_comparison<F, DF>(
    f: F,
    df: DF,
    g_on_grid: &[f64],
    eps_tilde: f64,
    a: f64,
    b: f64,
) -> NormComparisonReport
where
    F: Fn(f64) -> f64,
    DF: Fn(f64) -> f64,
{
    let d = g_on_grid.len();
    let step = (b - a) / d as f64;
    let per_cell = (DEFAULT_QUAD_POINTS / d).max(16);
    let mut continuous = CompensatedSum::new();
    let mut empirical = CompensatedSum::new();
    for (i, &g) in g_on_grid.iter().enumerate() {
        let lo = a + i as f64 * step;
        let hi = a + (i + 1) as f64 * step;
        continuous.add(simpson(|x| (f(x) - g).powi(2), lo, hi, per_cell));
        empirical.add((f(hi) - g).powi(2));
    }
    let continuous_sq = continuous.value();
    let empirical_sq = step * empirical.value();
    let derivative_sq = l2_norm_sq(df, a, b, DEFAULT_QUAD_POINTS);
    let extra = (1.0 + 1.0 / eps_tilde) * derivative_sq / (d * d) as f64 * (b - a).powi(2);
    let continuous_bound = (1.0 + eps_tilde) * empirical_sq + extra;
    let empirical_bound = (1.0 + eps_tilde) * continuous_sq + extra;
    NormComparisonReport {
        continuous_sq,
        empirical_sq,
        derivative_sq,
        continuous_bound,
        empirical_bound,
        holds_both: continuous_sq <= continuous_bound && empirical_sq <= empirical_bound,
    }
}
