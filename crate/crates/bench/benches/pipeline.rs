use std::hint::black_box;

use criterion::{criterion_group, criterion_main, BenchmarkId, Criterion};

use seqar_core::{
    fourier_estimates, monte_carlo_risk, replication_seeds, select, simulate_path, Coefficient,
    ModelSpec, NoiseDensity, Pipeline, PipelineConfig, StabilityParams,
};

const SIZES: [usize; 3] = [500, 2000, 8000];

fn spec(n: usize) -> ModelSpec {
    ModelSpec::new(
        0.0,
        1.0,
        n,
        Coefficient::Sine {
            amp: 0.3,
            freq: 1.0,
        },
        NoiseDensity::gaussian(),
    )
    .unwrap()
}

fn config() -> PipelineConfig {
    PipelineConfig::new(StabilityParams::new(0.1, 2.0).unwrap())
}

fn bench_simulate(c: &mut Criterion) {
    let mut group = c.benchmark_group("simulate");
    for n in SIZES {
        let s = spec(n);
        group.bench_with_input(BenchmarkId::from_parameter(n), &s, |b, s| {
            b.iter(|| simulate_path(black_box(s), 7).unwrap())
        });
    }
    group.finish();
}

fn bench_regression(c: &mut Criterion) {
    let mut group = c.benchmark_group("build_regression");
    for n in SIZES {
        let s = spec(n);
        let pipeline = Pipeline::new(&s, config()).unwrap();
        let path = simulate_path(&s, 7).unwrap();
        group.bench_function(BenchmarkId::from_parameter(n), |b| {
            b.iter(|| pipeline.regression(black_box(&path)))
        });
    }
    group.finish();
}

fn bench_select(c: &mut Criterion) {
    let mut group = c.benchmark_group("select");
    for n in SIZES {
        let s = spec(n);
        let pipeline = Pipeline::new(&s, config()).unwrap();
        let mut data = pipeline.regression(&simulate_path(&s, 7).unwrap());
        // Force the Γ branch so the full weighted estimator is built.
        data.gamma_all = true;
        data.y = data.z.iter().map(|&z| s.coefficient.eval(z)).collect();
        let fe = fourier_estimates(&data, &pipeline.basis).unwrap();
        group.bench_function(BenchmarkId::from_parameter(n), |b| {
            b.iter(|| {
                select(
                    black_box(&fe),
                    &pipeline.family,
                    &pipeline.basis,
                    pipeline.config.delta,
                )
                .unwrap()
            })
        });
    }
    group.finish();
}

fn bench_risk(c: &mut Criterion) {
    let s = spec(2000);
    let seeds = replication_seeds(1, 32);
    c.bench_function("monte_carlo_risk/2000x32", |b| {
        b.iter(|| monte_carlo_risk(black_box(&s), &config(), &seeds).unwrap())
    });
}

criterion_group!(
    benches,
    bench_simulate,
    bench_regression,
    bench_select,
    bench_risk
);
criterion_main!(benches);
