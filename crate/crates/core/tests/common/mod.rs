#![allow(dead_code)]

use seqar_core::{Coefficient, ModelSpec, NoiseDensity, PipelineConfig, StabilityParams};

pub fn sine(amp: f64) -> Coefficient {
    Coefficient::Sine { amp, freq: 1.0 }
}

pub fn spec(n: usize, s: Coefficient) -> ModelSpec {
    ModelSpec::new(0.0, 1.0, n, s, NoiseDensity::gaussian()).unwrap()
}

pub fn sine_spec(n: usize) -> ModelSpec {
    spec(n, sine(0.3))
}

pub fn config() -> PipelineConfig {
    PipelineConfig::new(StabilityParams::new(0.1, 2.0).unwrap())
}

pub fn mean(xs: &[f64]) -> f64 {
    xs.iter().sum::<f64>() / xs.len() as f64
}
