//! Replication-level checks of the sequential procedure and the moment
//! bounds, aggregated into one report per sample size.

use rayon::prelude::*;
use serde::Serialize;

use seqar_core::numeric::mean_and_se;
use seqar_core::risk::m_check;
use seqar_core::{
    check_norm_comparison, check_projection_bound, check_quadratic_form_bound, decompose_noise,
    diagnostic_replication, eta_variables, seeded_rng, simulate_path, DiagnosticReplication,
    ModelSpec, MomentCheck, NoiseDensity, NormComparisonReport, Pipeline, SigmaBounds,
};

use crate::error::CliError;

#[derive(Debug, Clone, Serialize)]
pub struct EtaSummary {
    pub l: usize,
    pub mean: f64,
    pub mean_se: f64,
    /// Sample mean of `η²/σ²`.
    pub scaled_second: f64,
    pub scaled_second_se: f64,
    pub fourth: f64,
    /// `m̌ · mean(σ⁴)`.
    pub fourth_bound: f64,
}

impl EtaSummary {
    pub fn mean_within(&self, k: f64) -> bool {
        self.mean.abs() <= k * self.mean_se
    }

    pub fn scaled_within(&self, k: f64) -> bool {
        (self.scaled_second - 1.0).abs() <= k * self.scaled_second_se
    }

    pub fn fourth_ok(&self) -> bool {
        self.fourth <= self.fourth_bound
    }
}

#[derive(Debug, Clone, Serialize)]
pub struct QuadraticFormSummary {
    pub checked: usize,
    pub all_hold: bool,
    /// Largest `lhs / rhs` over the family (0 when every `rhs` is 0).
    pub worst_ratio: f64,
    pub gamma_replications: usize,
}

#[derive(Debug, Clone, Serialize)]
pub struct DiagnosticsReport {
    pub n: usize,
    pub d: usize,
    pub replications: usize,
    pub sigma_bounds: SigmaBounds,
    pub gamma_c_frequency: f64,
    pub point_gamma_c_frequency: f64,
    /// Largest relative residual of `A_{ι,τ-1} + ϰ² y²_{τ-1} = H` on `Γ_l`.
    pub stopping_identity_max_rel: f64,
    pub points_on_gamma: usize,
    /// Replications on `Γ` whose variances leave `[σ_{0,*}, σ_{1,*}]`.
    pub sigma_band_violations: usize,
    pub decomposition_max_residual: f64,
    pub varpi1_max: f64,
    pub varpi1_bound: f64,
    pub eta: Vec<EtaSummary>,
    pub quadratic_form: QuadraticFormSummary,
    pub projection_unit: MomentCheck,
    pub projection_random: MomentCheck,
    pub norm_comparison: NormComparisonReport,
}

struct Replication {
    gamma_all: bool,
    point_failures: usize,
    identity_rel: f64,
    points_on_gamma: usize,
    band_ok: bool,
    residual: f64,
    varpi1: f64,
    eta: Vec<(f64, f64)>,
    diag: DiagnosticReplication,
    selected: Vec<f64>,
}

fn replicate(spec: &ModelSpec, pipeline: &Pipeline, seed: u64) -> Result<Replication, CliError> {
    let path = simulate_path(spec, seed)?;
    let est = pipeline.estimate(&path)?;
    let data = &est.regression;
    let mut identity_rel = 0.0f64;
    let mut points_on_gamma = 0;
    for p in data.point_results.iter().filter(|p| p.gamma_ok) {
        let last = path.y[p.tau - 1].powi(2);
        identity_rel = identity_rel
            .max((p.info_before_tau + p.kappa * p.kappa * last - p.threshold).abs() / p.threshold);
        points_on_gamma += 1;
    }
    let bounds = data.sigma_bounds;
    let band_ok = !data.gamma_all
        || data
            .sigma2
            .iter()
            .all(|&s| bounds.lower <= s && s <= bounds.upper);
    let dec = decompose_noise(&path, &pipeline.layout, data)?;
    let eta = eta_variables(&path, &pipeline.layout)?
        .into_iter()
        .map(|e| (e.eta, e.sigma2))
        .collect();
    Ok(Replication {
        gamma_all: data.gamma_all,
        point_failures: data.point_results.iter().filter(|p| !p.gamma_ok).count(),
        identity_rel,
        points_on_gamma,
        band_ok,
        residual: dec.max_abs_residual(),
        varpi1: dec.max_abs_varpi1_on_gamma(),
        eta,
        diag: diagnostic_replication(&path, &pipeline.layout, &pipeline.basis)?,
        selected: est.selection.estimates_on_grid().to_vec(),
    })
}

fn eta_summaries(reps: &[Replication], m4: f64) -> Vec<EtaSummary> {
    let d = reps[0].eta.len();
    (0..d)
        .map(|l| {
            let col = |f: &dyn Fn(f64, f64) -> f64| -> Vec<f64> {
                reps.iter().map(|r| f(r.eta[l].0, r.eta[l].1)).collect()
            };
            let (mean, mean_se) = mean_and_se(&col(&|e, _| e));
            let (scaled_second, scaled_second_se) = mean_and_se(&col(&|e, s| e * e / s));
            let (fourth, _) = mean_and_se(&col(&|e, _| e.powi(4)));
            let (sigma4, _) = mean_and_se(&col(&|_, s| s * s));
            EtaSummary {
                l: l + 1,
                mean,
                mean_se,
                scaled_second,
                scaled_second_se,
                fourth,
                fourth_bound: m4 * sigma4,
            }
        })
        .collect()
}

fn derivative(spec: &ModelSpec, x: f64) -> f64 {
    let s = &spec.coefficient;
    s.derivative(x).unwrap_or_else(|| {
        let h = 1e-6 * (spec.b - spec.a);
        let lo = (x - h).max(spec.a);
        let hi = (x + h).min(spec.b);
        (s.eval(hi) - s.eval(lo)) / (hi - lo)
    })
}

pub fn run_diagnostics(
    spec: &ModelSpec,
    pipeline: &Pipeline,
    seeds: &[u64],
) -> Result<DiagnosticsReport, CliError> {
    if seeds.is_empty() {
        return Err(CliError::Config(
            "run.replications: must be positive".into(),
        ));
    }
    let reps = seeds
        .par_iter()
        .map(|&seed| replicate(spec, pipeline, seed))
        .collect::<Result<Vec<_>, _>>()?;
    let count = reps.len();
    let d = pipeline.d();
    let sigma1 = pipeline.sigma_bounds().upper;
    let m4 = m_check(spec.noise.class_fourth_moment());
    let diags: Vec<DiagnosticReplication> = reps.iter().map(|r| r.diag.clone()).collect();

    let mut quadratic_form = QuadraticFormSummary {
        checked: 0,
        all_hold: true,
        worst_ratio: 0.0,
        gamma_replications: reps.iter().filter(|r| r.gamma_all).count(),
    };
    for w in &pipeline.family {
        let c = check_quadratic_form_bound(&diags, &w.values, sigma1, m4)?;
        quadratic_form.checked += 1;
        quadratic_form.all_hold &= c.holds;
        if c.rhs > 0.0 {
            quadratic_form.worst_ratio = quadratic_form.worst_ratio.max(c.lhs / c.rhs);
        }
    }

    let mut unit = vec![0.0; d];
    unit[0] = 1.0;
    let projection_unit = check_projection_bound(&unit, &diags, sigma1)?;
    let mut rng = seeded_rng(seeds[0] ^ 0x5eed_cafe);
    let gaussian = NoiseDensity::gaussian();
    let mut v: Vec<f64> = (0..d).map(|_| gaussian.sample(&mut rng)).collect();
    let norm = v.iter().map(|x| x * x).sum::<f64>().sqrt();
    v.iter_mut().for_each(|x| *x /= norm);
    let projection_random = check_projection_bound(&v, &diags, sigma1)?;

    let norm_comparison = check_norm_comparison(
        |x| spec.coefficient.eval(x),
        |x| derivative(spec, x),
        &reps[0].selected,
        pipeline.layout.eps_tilde,
        spec.a,
        spec.b,
    );

    let fold_max = |f: &dyn Fn(&Replication) -> f64| reps.iter().map(f).fold(0.0f64, f64::max);
    Ok(DiagnosticsReport {
        n: spec.n,
        d,
        replications: count,
        sigma_bounds: pipeline.sigma_bounds(),
        gamma_c_frequency: reps.iter().filter(|r| !r.gamma_all).count() as f64 / count as f64,
        point_gamma_c_frequency: reps.iter().map(|r| r.point_failures).sum::<usize>() as f64
            / (count * d) as f64,
        stopping_identity_max_rel: fold_max(&|r| r.identity_rel),
        points_on_gamma: reps.iter().map(|r| r.points_on_gamma).sum(),
        sigma_band_violations: reps.iter().filter(|r| !r.band_ok).count(),
        decomposition_max_residual: fold_max(&|r| r.residual),
        varpi1_max: fold_max(&|r| r.varpi1),
        varpi1_bound: pipeline.config.stability.lipschitz * pipeline.layout.h,
        eta: eta_summaries(&reps, m4),
        quadratic_form,
        projection_unit,
        projection_random,
        norm_comparison,
    })
}
