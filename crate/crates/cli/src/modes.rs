//! One function per CLI verb. Each writes its artifacts for every configured
//! sample size; [`run`] adds the manifest.

use std::io::Write;
use std::path::Path;

use serde::Serialize;

use seqar_core::weights::write_family_csv;
use seqar_core::{
    monte_carlo_risk, oracle_bound_factor, replication_seeds, robust_risk,
    seqkernel::write_points_csv, simulate_path, Pipeline, RiskReport, RiskRun,
};

use crate::artifacts::{now_unix, sha256_hex, Artifacts, Manifest, MANIFEST};
use crate::config::{ExperimentConfig, Mode};
use crate::diagnostics::run_diagnostics;
use crate::error::CliError;

/// Points at which the selected estimator is tabulated.
const ESTIMATOR_POINTS: usize = 1000;

/// Run `mode` and write its artifacts plus `manifest.json` into `out_dir`.
/// `config_bytes` is the raw configuration file, hashed into the manifest.
pub fn run(
    mode: Mode,
    cfg: &ExperimentConfig,
    config_bytes: &[u8],
    out_dir: &Path,
) -> Result<Vec<String>, CliError> {
    cfg.validate(mode)?;
    let mut out = Artifacts::create(out_dir)?;
    match mode {
        Mode::Simulate => simulate(cfg, &mut out)?,
        Mode::Estimate => estimate(cfg, &mut out)?,
        Mode::Select => select(cfg, &mut out)?,
        Mode::Risk => risk(cfg, &mut out)?,
        Mode::OracleCheck => oracle_check(cfg, &mut out)?,
        Mode::Diagnostics => diagnostics(cfg, &mut out)?,
    }
    let artifacts = out.written().to_vec();
    let manifest = Manifest {
        tool: "seqar",
        version: env!("CARGO_PKG_VERSION"),
        core_version: seqar_core::VERSION,
        mode: mode.name(),
        config_sha256: sha256_hex(config_bytes),
        seed: cfg.run.seed,
        sizes: &cfg.sizes,
        replications: cfg.run.replications,
        artifacts: &artifacts,
        timestamp: now_unix(),
    };
    out.write_json(MANIFEST, &manifest)?;
    Ok(artifacts)
}

fn simulate(cfg: &ExperimentConfig, out: &mut Artifacts) -> Result<(), CliError> {
    for &n in &cfg.sizes {
        let spec = cfg.model_spec(n)?;
        let path = simulate_path(&spec, cfg.run.seed)?;
        let xi = path.noise()?;
        out.write_with(&format!("path_n{n}.csv"), |w| {
            writeln!(w, "k,x,y,xi")?;
            for k in 0..=n {
                writeln!(w, "{k},{},{},{}", spec.design_point(k), path.y[k], xi[k])?;
            }
            Ok(())
        })?;
    }
    Ok(())
}

fn estimate(cfg: &ExperimentConfig, out: &mut Artifacts) -> Result<(), CliError> {
    for &n in &cfg.sizes {
        let spec = cfg.model_spec(n)?;
        let pipeline = Pipeline::new(&spec, cfg.pipeline_config())?;
        let data = pipeline.regression(&simulate_path(&spec, cfg.run.seed)?);
        out.write_with(&format!("points_n{n}.csv"), |w| {
            write_points_csv(w, &data.point_results)
        })?;
        out.write_with(&format!("regression_n{n}.csv"), |w| data.write_csv(w))?;
    }
    Ok(())
}

#[derive(Serialize)]
struct SelectionArtifact<'a> {
    n: usize,
    d: usize,
    seed: u64,
    gamma: bool,
    delta: f64,
    lambda_index: usize,
    beta: u32,
    l: f64,
    omega: f64,
    cost: f64,
    family_size: usize,
    theta_hat: &'a [f64],
    theta_tilde: &'a [f64],
    s: &'a [f64],
    estimates_on_grid: &'a [f64],
}

fn select(cfg: &ExperimentConfig, out: &mut Artifacts) -> Result<(), CliError> {
    for &n in &cfg.sizes {
        let spec = cfg.model_spec(n)?;
        let pipeline = Pipeline::new(&spec, cfg.pipeline_config())?;
        let est = pipeline.estimate(&simulate_path(&spec, cfg.run.seed)?)?;
        let sel = &est.selection;
        let chosen = &pipeline.family[sel.lambda_index];
        out.write_json(
            &format!("selection_n{n}.json"),
            &SelectionArtifact {
                n,
                d: pipeline.d(),
                seed: cfg.run.seed,
                gamma: est.regression.gamma_all,
                delta: sel.delta,
                lambda_index: sel.lambda_index,
                beta: chosen.beta,
                l: chosen.l,
                omega: chosen.omega,
                cost: sel.costs[sel.lambda_index],
                family_size: pipeline.family.len(),
                theta_hat: &est.fourier.theta_hat,
                theta_tilde: &est.fourier.theta_tilde,
                s: &est.fourier.s,
                estimates_on_grid: sel.estimates_on_grid(),
            },
        )?;
        out.write_with(&format!("estimator_n{n}.csv"), |w| {
            writeln!(w, "t,estimate,truth")?;
            for i in 0..=ESTIMATOR_POINTS {
                let t = spec.a + (spec.b - spec.a) * i as f64 / ESTIMATOR_POINTS as f64;
                let t = t.min(spec.b);
                let value = sel.evaluate(t).map_err(std::io::Error::other)?;
                writeln!(w, "{t},{value},{}", spec.coefficient.eval(t))?;
            }
            Ok(())
        })?;
        out.write_with(&format!("weights_n{n}.csv"), |w| {
            write_family_csv(w, &pipeline.family)
        })?;
    }
    Ok(())
}

/// Non-robust or robust risk at one sample size, with the CSVs written.
fn risk_at(cfg: &ExperimentConfig, n: usize, out: &mut Artifacts) -> Result<RiskReport, CliError> {
    let spec = cfg.model_spec(n)?;
    let seeds = replication_seeds(cfg.run.seed, cfg.run.replications);
    let config = cfg.pipeline_config();
    let write_runs = |out: &mut Artifacts, runs: &[(String, &RiskRun)]| -> Result<(), CliError> {
        for (name, run) in runs {
            out.write_with(name, |w| run.write_csv(w))?;
        }
        Ok(())
    };
    if cfg.run.robust {
        let robust = robust_risk(&spec, &cfg.densities()?, &config, &seeds)?;
        #[derive(Serialize)]
        struct Robust<'a> {
            report: &'a RiskReport,
            per_density: Vec<&'a RiskReport>,
        }
        out.write_json(
            &format!("risk_n{n}.json"),
            &Robust {
                report: &robust.report,
                per_density: robust.per_density.iter().map(|r| &r.report).collect(),
            },
        )?;
        let runs: Vec<(String, &RiskRun)> = robust
            .per_density
            .iter()
            .map(|r| (format!("replications_n{n}_{}.csv", r.report.noise), r))
            .collect();
        write_runs(out, &runs)?;
        Ok(robust.report)
    } else {
        let run = monte_carlo_risk(&spec, &config, &seeds)?;
        out.write_json(&format!("risk_n{n}.json"), &run.report)?;
        write_runs(out, &[(format!("replications_n{n}.csv"), &run)])?;
        Ok(run.report)
    }
}

fn risk(cfg: &ExperimentConfig, out: &mut Artifacts) -> Result<(), CliError> {
    for &n in &cfg.sizes {
        risk_at(cfg, n, out)?;
    }
    Ok(())
}

#[derive(Debug, Serialize)]
pub struct OracleEntry {
    pub n: usize,
    pub selected_risk: f64,
    pub selected_std_error: f64,
    pub oracle_risk: f64,
    pub oracle_index: usize,
    pub oracle_ratio: f64,
    pub combined_std_error: f64,
    pub gamma_c_frequency: f64,
    /// `selected ≥ oracle − 2·se`.
    pub dominance_holds: bool,
    /// `max(0, ratio − bound_factor)`.
    pub excess: f64,
}

#[derive(Debug, Serialize)]
pub struct OracleCheck {
    pub delta: f64,
    pub bound_factor: f64,
    pub entries: Vec<OracleEntry>,
    pub excess_nonincreasing: bool,
    pub selected_risk_decreasing: bool,
}

fn oracle_check(cfg: &ExperimentConfig, out: &mut Artifacts) -> Result<(), CliError> {
    let factor = oracle_bound_factor(cfg.procedure.delta);
    let mut sizes = cfg.sizes.clone();
    sizes.sort_unstable();
    let mut entries = Vec::with_capacity(sizes.len());
    for n in sizes {
        let r = risk_at(cfg, n, out)?;
        entries.push(OracleEntry {
            n,
            selected_risk: r.selected_risk,
            selected_std_error: r.selected_std_error,
            oracle_risk: r.oracle_risk,
            oracle_index: r.oracle_index,
            oracle_ratio: r.oracle_ratio,
            combined_std_error: r.combined_std_error,
            gamma_c_frequency: r.gamma_c_frequency,
            dominance_holds: r.oracle_dominance_holds(2.0),
            excess: (r.oracle_ratio - factor).max(0.0),
        });
    }
    let check = OracleCheck {
        delta: cfg.procedure.delta,
        bound_factor: factor,
        excess_nonincreasing: entries.windows(2).all(|w| w[1].excess <= w[0].excess),
        selected_risk_decreasing: entries
            .windows(2)
            .all(|w| w[1].selected_risk < w[0].selected_risk),
        entries,
    };
    out.write_json("oracle_check.json", &check)
}

fn diagnostics(cfg: &ExperimentConfig, out: &mut Artifacts) -> Result<(), CliError> {
    for &n in &cfg.sizes {
        let spec = cfg.model_spec(n)?;
        let pipeline = Pipeline::new(&spec, cfg.pipeline_config())?;
        let seeds = replication_seeds(cfg.run.seed, cfg.run.replications);
        let report = run_diagnostics(&spec, &pipeline, &seeds)?;
        out.write_json(&format!("diagnostics_n{n}.json"), &report)?;
    }
    Ok(())
}
