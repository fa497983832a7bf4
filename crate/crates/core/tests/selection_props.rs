mod common;

use common::{config, sine, sine_spec};
use proptest::prelude::*;
use rand_distr::{Distribution, StandardNormal};
use seqar_core::{
    fourier_estimates, penalty, replication_seeds, seeded_rng, select, simulate_path, Basis,
    FourierEstimates, Pipeline, RegressionData, SigmaBounds, WeightVector, DEFAULT_DELTA,
};

#[test]
fn gram_matrix_is_identity_for_every_size() {
    for d in 3..=200 {
        let basis = Basis::trigonometric(d, 0.0, 1.0).unwrap();
        assert!(basis.gram_deviation() <= 1e-10, "d = {d}");
    }
    for d in [4, 17, 64] {
        let basis = Basis::trigonometric(d, -1.0, 2.5).unwrap();
        assert!(basis.gram_deviation() <= 1e-10, "d = {d} on [-1, 2.5]");
    }
}

#[test]
fn projection_then_synthesis_is_identity() {
    let mut rng = seeded_rng(1);
    for d in [3, 10, 31, 64] {
        let basis = Basis::trigonometric(d, 0.0, 2.0).unwrap();
        let y: Vec<f64> = (0..d).map(|_| StandardNormal.sample(&mut rng)).collect();
        let theta = basis.project(&y);
        let back = basis.synthesize(&theta);
        for (a, b) in y.iter().zip(&back) {
            assert!((a - b).abs() <= 1e-9);
        }
        let norm_grid = basis.inner(&y, &y);
        let norm_coef: f64 = theta.iter().map(|t| t * t).sum();
        assert!((norm_grid - norm_coef).abs() <= 1e-9);
    }
}

fn synthetic_regression(d: usize, sigma2: f64, seed: u64) -> RegressionData {
    let mut rng = seeded_rng(seed);
    let z: Vec<f64> = (1..=d).map(|l| l as f64 / d as f64).collect();
    let s = sine(0.3);
    let y = z
        .iter()
        .map(|&x| {
            s.eval(x) + sigma2.sqrt() * Distribution::<f64>::sample(&StandardNormal, &mut rng)
        })
        .collect();
    RegressionData {
        a: 0.0,
        b: 1.0,
        z,
        y,
        sigma2: vec![sigma2; d],
        gamma_all: true,
        sigma_bounds: SigmaBounds {
            lower: sigma2,
            upper: sigma2,
        },
        point_results: Vec::new(),
    }
}

#[test]
fn third_coefficient_recovers_sine_amplitude() {
    let d = 100;
    let sigma2 = 0.012;
    let basis = Basis::trigonometric(d, 0.0, 1.0).unwrap();
    // Grid oracle: (S, φ₃)_d for S = 0.3 sin(2πx).
    let truth: f64 = (1..=d)
        .map(|l| 0.3 * (2.0 * std::f64::consts::PI * l as f64 / d as f64).sin() * basis.value(3, l))
        .sum::<f64>()
        / d as f64;
    assert!((truth - 0.3 / 2f64.sqrt()).abs() < 1e-12);
    let fe = fourier_estimates(&synthetic_regression(d, sigma2, 17), &basis).unwrap();
    // sd of θ̂₃ is sqrt(s₃/d) ≈ 0.011.
    let sd = (sigma2 / d as f64).sqrt();
    assert!(
        (fe.theta_hat[2] - truth).abs() <= 4.0 * sd,
        "θ̂₃ = {}",
        fe.theta_hat[2]
    );
}

#[test]
fn full_pipeline_is_deterministic() {
    let s = sine_spec(2000);
    let pipeline = Pipeline::new(&s, config()).unwrap();
    let run = || {
        let est = pipeline.estimate(&simulate_path(&s, 77).unwrap()).unwrap();
        (
            est.selection.lambda_index,
            est.selection.costs.clone(),
            est.regression.y.clone(),
        )
    };
    assert_eq!(run(), run());
}

#[test]
fn selection_on_real_paths_agrees_with_explicit_argmin() {
    let s = sine_spec(2000);
    let pipeline = Pipeline::new(&s, config()).unwrap();
    for seed in replication_seeds(5, 10) {
        let est = pipeline
            .estimate(&simulate_path(&s, seed).unwrap())
            .unwrap();
        let min = est
            .selection
            .costs
            .iter()
            .cloned()
            .fold(f64::INFINITY, f64::min);
        assert_eq!(est.selection.costs[est.selection.lambda_index], min);
        assert!(est.selection.costs[..est.selection.lambda_index]
            .iter()
            .all(|&c| c > min));
    }
}

fn weight(values: Vec<f64>) -> WeightVector {
    WeightVector {
        beta: 1,
        l: 1.0,
        omega: values.len() as f64,
        values,
    }
}

fn estimates(theta: Vec<f64>, s: Vec<f64>) -> FourierEstimates {
    FourierEstimates::from_parts(0.0, 1.0, theta, s, true).unwrap()
}

proptest! {
    #[test]
    fn minimal_cost_is_order_independent(
        theta in prop::collection::vec(-2.0f64..2.0, 6),
        s in prop::collection::vec(0.001f64..0.1, 6),
        family in prop::collection::vec(prop::collection::vec(0.0f64..=1.0, 6), 1..12),
        rotate in 0usize..12,
    ) {
        let fe = estimates(theta, s);
        let basis = Basis::trigonometric(6, 0.0, 1.0).unwrap();
        let fam: Vec<WeightVector> = family.iter().cloned().map(weight).collect();
        let mut rotated = fam.clone();
        rotated.rotate_left(rotate % fam.len());
        let a = select(&fe, &fam, &basis, DEFAULT_DELTA).unwrap();
        let b = select(&fe, &rotated, &basis, DEFAULT_DELTA).unwrap();
        prop_assert_eq!(a.costs[a.lambda_index], b.costs[b.lambda_index]);
    }

    #[test]
    fn penalty_is_monotone_in_each_weight(
        s in prop::collection::vec(0.001f64..0.1, 5),
        lambda in prop::collection::vec(-1.0f64..=1.0, 5),
        coord in 0usize..5,
        grow in 0.0f64..1.0,
    ) {
        let fe = estimates(vec![0.0; 5], s);
        let mut bigger = lambda.clone();
        bigger[coord] = lambda[coord].signum() * (lambda[coord].abs() + grow);
        prop_assert!(penalty(&bigger, &fe).unwrap() >= penalty(&lambda, &fe).unwrap());
    }
}
