//! Pinsker-type weight family.
//!
//! The family is indexed by `α = (β, l)` on the grid
//! `{1, …, k*} × {ε, 2ε, …, mε}` with `ε = 1/ln n`, `m = ⌊1/ε²⌋` and
//! `k* = ⌈k₀* + √(ln n)⌉`. Each member is
//! `λ_α(j) = 1` for `j < j*` and `1 - (j/ω_α)^β` for `j* ≤ j ≤ ω_α`,
//! with `j* = 1 + ⌊ln n⌋` and `ω_α = (d_β l n)^{1/(2β+1)}`.

use std::f64::consts::PI;
use std::io::{self, Write};

use serde::Serialize;

use crate::error::{Error, Result};

pub const DEFAULT_K_STAR0: f64 = 0.0;

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct WeightGridParams {
    pub k_star0: f64,
    pub n: usize,
    /// Length of every weight vector.
    pub d: usize,
}

impl WeightGridParams {
    pub fn new(k_star0: f64, n: usize, d: usize) -> Result<Self> {
        if n < 3 {
            return Err(Error::SampleTooSmall {
                n,
                reason: "the weight grid needs n >= 3".into(),
            });
        }
        if !(k_star0 >= 0.0) || !k_star0.is_finite() {
            return Err(Error::InvalidParameter {
                name: "k_star0",
                reason: format!("must be finite and >= 0, got {k_star0}"),
            });
        }
        if d == 0 {
            return Err(Error::InvalidParameter {
                name: "d",
                reason: "must be positive".into(),
            });
        }
        Ok(Self { k_star0, n, d })
    }

    fn ln_n(&self) -> f64 {
        (self.n as f64).ln()
    }

    /// `k* = ⌈k₀* + √(ln n)⌉`.
    pub fn k_star(&self) -> usize {
        (self.k_star0 + self.ln_n().sqrt()).ceil().max(1.0) as usize
    }

    /// Grid step `ε = 1/ln n`.
    pub fn grid_step(&self) -> f64 {
        1.0 / self.ln_n()
    }

    /// `m = ⌊1/ε²⌋`.
    pub fn m(&self) -> usize {
        let eps = self.grid_step();
        ((1.0 / (eps * eps)).floor() as usize).max(1)
    }

    /// `j* = 1 + ⌊ln n⌋`.
    pub fn j_star(&self) -> usize {
        1 + self.ln_n().floor() as usize
    }

    /// `ν = k* · m`.
    pub fn family_size(&self) -> usize {
        self.k_star() * self.m()
    }
}

/// `d_β = (β+1)(2β+1) / (π^{2β} β)`.
pub fn d_beta(beta: u32) -> f64 {
    let b = beta as f64;
    (b + 1.0) * (2.0 * b + 1.0) / (PI.powi(2 * beta as i32) * b)
}

/// `ω_α = (d_β l n)^{1/(2β+1)}`.
pub fn omega(beta: u32, l: f64, n: usize) -> f64 {
    (d_beta(beta) * l * n as f64).powf(1.0 / (2.0 * beta as f64 + 1.0))
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct WeightVector {
    pub beta: u32,
    pub l: f64,
    pub omega: f64,
    pub values: Vec<f64>,
}

impl WeightVector {
    pub fn pinsker(beta: u32, l: f64, n: usize, j_star: usize, d: usize) -> Self {
        let omega = omega(beta, l, n);
        let values = (1..=d)
            .map(|j| {
                let jf = j as f64;
                if j < j_star {
                    1.0
                } else if jf <= omega {
                    1.0 - (jf / omega).powi(beta as i32)
                } else {
                    0.0
                }
            })
            .collect();
        Self {
            beta,
            l,
            omega,
            values,
        }
    }

    /// Number of strictly positive weights.
    pub fn support(&self) -> usize {
        self.values.iter().filter(|&&v| v > 0.0).count()
    }
}

/// Family ordered lexicographically in `(β, l)`.
pub fn build_weight_family(params: &WeightGridParams) -> Vec<WeightVector> {
    let step = params.grid_step();
    let j_star = params.j_star();
    let mut family = Vec::with_capacity(params.family_size());
    for beta in 1..=params.k_star() as u32 {
        for i in 1..=params.m() {
            family.push(WeightVector::pinsker(
                beta,
                i as f64 * step,
                params.n,
                j_star,
                params.d,
            ));
        }
    }
    family
}

#[derive(Debug, Clone, Serialize)]
pub struct FamilyMetadata {
    pub nu: usize,
    pub nu_star: usize,
    /// Squared weights `{λ²}`.
    pub lambda1: Vec<Vec<f64>>,
    /// `Λ ∪ Λ₁`, duplicates removed, `Λ` first.
    pub lambda2: Vec<Vec<f64>>,
}

pub fn family_metadata(family: &[WeightVector]) -> FamilyMetadata {
    let nu = family.len();
    let nu_star = family.iter().map(WeightVector::support).max().unwrap_or(0);
    let lambda1: Vec<Vec<f64>> = family
        .iter()
        .map(|w| w.values.iter().map(|v| v * v).collect())
        .collect();
    let mut lambda2: Vec<Vec<f64>> = Vec::with_capacity(2 * nu);
    for v in family.iter().map(|w| &w.values).chain(lambda1.iter()) {
        if !lambda2.iter().any(|u| u == v) {
            lambda2.push(v.clone());
        }
    }
    FamilyMetadata {
        nu,
        nu_star,
        lambda1,
        lambda2,
    }
}

/// Dump as CSV: `beta,l,omega,support,w1..w5`.
pub fn write_family_csv<W: Write>(mut out: W, family: &[WeightVector]) -> io::Result<()> {
    writeln!(out, "beta,l,omega,support,w1,w2,w3,w4,w5")?;
    for w in family {
        let head: Vec<String> = (0..5)
            .map(|i| w.values.get(i).map(|v| v.to_string()).unwrap_or_default())
            .collect();
        writeln!(
            out,
            "{},{},{},{},{}",
            w.beta,
            w.l,
            w.omega,
            w.support(),
            head.join(",")
        )?;
    }
    Ok(())
}
