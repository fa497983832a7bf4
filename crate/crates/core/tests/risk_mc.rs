mod common;

use common::{config, sine_spec, spec};
use rand_distr::{Distribution, StandardNormal};
use seqar_core::risk::m_check;
use seqar_core::{
    check_projection_bound, check_quadratic_form_bound, decompose_noise, diagnostic_replications,
    monte_carlo_risk, replication_seeds, robust_risk, seeded_rng, simulate_path, Coefficient,
    NoiseDensity, NoiseKind, Pipeline,
};

#[test]
fn zero_coefficient_zero_estimator_has_zero_risk() {
    let s = spec(500, Coefficient::Zero);
    let run = monte_carlo_risk(&s, &config(), &replication_seeds(1, 5)).unwrap();
    // Off Γ every member of the family returns the zero function.
    assert_eq!(run.report.gamma_c_frequency, 1.0);
    assert_eq!(run.report.selected_risk, 0.0);
    assert_eq!(run.report.oracle_ratio, 1.0);
}

#[test]
fn single_replication_is_a_single_path() {
    let s = sine_spec(500);
    let run = monte_carlo_risk(&s, &config(), &[42]).unwrap();
    assert_eq!(run.report.replications, 1);
    assert!(run.report.selected_std_error.is_nan());
    assert_eq!(run.records[0].seed, 42);
    assert_eq!(run.report.selected_risk, run.records[0].selected_risk);
}

#[test]
fn risk_of_zero_estimator_is_squared_norm() {
    let s = sine_spec(500);
    let run = monte_carlo_risk(&s, &config(), &replication_seeds(2, 10)).unwrap();
    for r in run.records.iter().filter(|r| !r.gamma) {
        assert!((r.selected_risk - 0.045).abs() < 1e-6);
    }
    assert!(run.report.oracle_dominance_holds(2.0));
}

#[test]
fn rejects_coefficient_outside_stability_set() {
    let s = spec(500, Coefficient::Const(0.95));
    assert!(monte_carlo_risk(&s, &config(), &[1]).is_err());
    assert!(monte_carlo_risk(&sine_spec(500), &config(), &[]).is_err());
}

#[test]
fn robust_risk_dominates_members() {
    let s = sine_spec(500);
    let seeds = replication_seeds(3, 20);
    let densities: Vec<NoiseDensity> = NoiseKind::ALL
        .iter()
        .map(|&k| NoiseDensity::new(k, 1.0).unwrap())
        .collect();
    let robust = robust_risk(&s, &densities, &config(), &seeds).unwrap();
    for member in &robust.per_density {
        for (r, m) in robust
            .report
            .per_lambda_risk
            .iter()
            .zip(&member.report.per_lambda_risk)
        {
            assert!(r >= m);
        }
        assert!(robust.report.selected_risk >= member.report.selected_risk);
    }
    let single = robust_risk(&s, &densities[..1], &config(), &seeds).unwrap();
    let direct = monte_carlo_risk(&s, &config(), &seeds).unwrap();
    assert_eq!(single.report.per_lambda_risk, direct.report.per_lambda_risk);
    assert_eq!(single.report.selected_risk, direct.report.selected_risk);
}

#[test]
fn risk_is_reproducible_across_thread_counts() {
    let s = sine_spec(500);
    let seeds = replication_seeds(4, 16);
    let serial = rayon::ThreadPoolBuilder::new()
        .num_threads(1)
        .build()
        .unwrap();
    let a = serial.install(|| monte_carlo_risk(&s, &config(), &seeds).unwrap());
    let b = monte_carlo_risk(&s, &config(), &seeds).unwrap();
    assert_eq!(a.report.per_lambda_risk, b.report.per_lambda_risk);
    assert_eq!(
        a.report.selected_risk.to_bits(),
        b.report.selected_risk.to_bits()
    );
}

#[test]
fn decomposition_identity_on_successful_points() {
    let s = sine_spec(2000);
    let pipeline = Pipeline::new(&s, config()).unwrap();
    let lh = 2.0 * pipeline.layout.h;
    let mut checked = 0;
    for seed in replication_seeds(6, 50) {
        let path = simulate_path(&s, seed).unwrap();
        let data = pipeline.regression(&path);
        let dec = decompose_noise(&path, &pipeline.layout, &data).unwrap();
        assert!(
            dec.max_abs_residual() <= 1e-9,
            "seed {seed}: {}",
            dec.max_abs_residual()
        );
        assert!(dec.max_abs_varpi1_on_gamma() <= lh);
        checked += dec.gamma_l.iter().filter(|&&g| g).count();
    }
    assert!(checked > 0);
}

#[test]
fn decomposition_special_cases() {
    let s = spec(2000, Coefficient::Const(0.4));
    let pipeline = Pipeline::new(&s, config()).unwrap();
    let path = simulate_path(&s, 8).unwrap();
    let data = pipeline.regression(&path);
    let dec = decompose_noise(&path, &pipeline.layout, &data).unwrap();
    assert!(dec.varpi1.iter().all(|&v| v == 0.0));
    for (p, v2) in data.point_results.iter().zip(&dec.varpi2) {
        if p.kappa == 1.0 {
            assert_eq!(*v2, 0.0);
        }
    }
    let observed = seqar_core::Path::from_observations(&s, path.y.clone()).unwrap();
    assert!(decompose_noise(&observed, &pipeline.layout, &data).is_err());
}

#[test]
fn moment_bounds_on_small_fixture() {
    let s = sine_spec(2000);
    let pipeline = Pipeline::new(&s, config()).unwrap();
    let sigma1 = pipeline.sigma_bounds().upper;
    let reps = diagnostic_replications(&s, &pipeline, &replication_seeds(10, 300)).unwrap();
    let d = pipeline.d();

    let zero = vec![0.0; d];
    let qf = check_quadratic_form_bound(&reps, &zero, sigma1, m_check(3.0)).unwrap();
    assert_eq!((qf.lhs, qf.rhs), (0.0, 0.0));
    assert!(qf.holds);
    let pr = check_projection_bound(&zero, &reps, sigma1).unwrap();
    assert_eq!(pr.lhs, 0.0);
    assert!(pr.holds);

    let mut e1 = zero.clone();
    e1[0] = 1.0;
    assert!(
        check_quadratic_form_bound(&reps, &e1, sigma1, m_check(3.0))
            .unwrap()
            .holds
    );
    assert!(check_projection_bound(&e1, &reps, sigma1).unwrap().holds);

    let mut rng = seeded_rng(12);
    let mut v: Vec<f64> = (0..d).map(|_| StandardNormal.sample(&mut rng)).collect();
    let norm = v.iter().map(|x| x * x).sum::<f64>().sqrt();
    v.iter_mut().for_each(|x| *x /= norm);
    assert!(check_projection_bound(&v, &reps, sigma1).unwrap().holds);
    for w in pipeline.family.iter().step_by(17) {
        assert!(
            check_quadratic_form_bound(&reps, &w.values, sigma1, m_check(3.0))
                .unwrap()
                .holds
        );
    }
}
