//! Weighted least-squares estimation on the grid and penalized selection of
//! the weight vector.
//!
//! Fourier coefficients are taken in a trigonometric basis that is
//! orthonormal for the empirical inner product
//! `(f, g)_d = ((b-a)/d) Σ_l f(z_l) g(z_l)`.

use std::f64::consts::PI;

use serde::Serialize;

use crate::error::{Error, Result};
use crate::seqkernel::RegressionData;
use crate::weights::WeightVector;

/// Largest penalty multiplier admitted by the oracle inequalities.
pub const MAX_DELTA: f64 = 1.0 / 12.0;
pub const DEFAULT_DELTA: f64 = MAX_DELTA;

/// Orthonormality tolerance on the empirical Gram matrix.
pub const GRAM_TOLERANCE: f64 = 1e-10;

pub fn check_delta(delta: f64) -> Result<()> {
    if delta > 0.0 && delta <= MAX_DELTA {
        Ok(())
    } else {
        Err(Error::InvalidParameter {
            name: "delta",
            reason: format!("must lie in the admissible interval (0, 1/12], got {delta}"),
        })
    }
}

/// Trigonometric basis evaluated on the grid `z_l = a + l(b-a)/d`.
#[derive(Debug, Clone, Serialize)]
pub struct Basis {
    pub d: usize,
    pub a: f64,
    pub b: f64,
    /// Row-major `d × d`: `values[(j-1)*d + (l-1)] = φ_j(z_l)`.
    values: Vec<f64>,
}

impl Basis {
    /// `φ_1 = 1/√(b-a)`; for `j ≥ 2`, `φ_j = √(2/(b-a)) · trg_j(2π⌊j/2⌋ l₀(x))`
    /// with `cos` for even `j` and `sin` for odd `j`. For even `d` the last
    /// (Nyquist) cosine equals `√2 (-1)^l` on the grid and is rescaled by
    /// `1/√2`.
    ///
    /// Fails if the empirical Gram matrix deviates from the identity by more
    /// than [`GRAM_TOLERANCE`].
    pub fn trigonometric(d: usize, a: f64, b: f64) -> Result<Self> {
        if d < 2 {
            return Err(Error::InvalidParameter {
                name: "d",
                reason: format!("basis needs d >= 2, got {d}"),
            });
        }
        if !(a < b) {
            return Err(Error::InvalidModel(format!(
                "interval [{a}, {b}] must satisfy a < b"
            )));
        }
        let len = b - a;
        let mut values = vec![0.0; d * d];
        for j in 1..=d {
            let row = &mut values[(j - 1) * d..j * d];
            for (li, v) in row.iter_mut().enumerate() {
                let l = li + 1;
                *v = if j == 1 {
                    1.0 / len.sqrt()
                } else if j == d && d % 2 == 0 {
                    // cos(π l) on the grid; its empirical norm is √2 before rescaling.
                    let sign = if l % 2 == 0 { 1.0 } else { -1.0 };
                    sign / len.sqrt()
                } else {
                    let freq = (j / 2) as f64;
                    // l₀(z_l) = l/d; reduce the phase modulo the period first.
                    let phase = 2.0 * PI * ((freq as usize * l) % d) as f64 / d as f64;
                    let trg = if j % 2 == 0 { phase.cos() } else { phase.sin() };
                    (2.0 / len).sqrt() * trg
                };
            }
        }
        let basis = Self { d, a, b, values };
        let deviation = basis.gram_deviation();
        if deviation > GRAM_TOLERANCE {
            return Err(Error::NotOrthonormal { d, deviation });
        }
        Ok(basis)
    }

    /// `φ_j(z_l)`, both indices 1-based.
    #[inline]
    pub fn value(&self, j: usize, l: usize) -> f64 {
        self.values[(j - 1) * self.d + (l - 1)]
    }

    /// Row `φ_j(z_1), …, φ_j(z_d)`.
    pub fn row(&self, j: usize) -> &[f64] {
        &self.values[(j - 1) * self.d..j * self.d]
    }

    /// Grid step `(b-a)/d`.
    pub fn step(&self) -> f64 {
        (self.b - self.a) / self.d as f64
    }

    /// Empirical inner product `((b-a)/d) Σ_l f_l g_l`.
    pub fn inner(&self, f: &[f64], g: &[f64]) -> f64 {
        self.step() * f.iter().zip(g).map(|(x, y)| x * y).sum::<f64>()
    }

    /// `max_{i,j} |(φ_i, φ_j)_d - 1{i=j}|`.
    pub fn gram_deviation(&self) -> f64 {
        let mut worst = 0.0f64;
        for i in 1..=self.d {
            for j in i..=self.d {
                let g = self.inner(self.row(i), self.row(j));
                let target = if i == j { 1.0 } else { 0.0 };
                worst = worst.max((g - target).abs());
            }
        }
        worst
    }

    /// Coefficients `((b-a)/d) Σ_l f_l φ_j(z_l)` for all `j`.
    pub fn project(&self, f: &[f64]) -> Vec<f64> {
        (1..=self.d).map(|j| self.inner(f, self.row(j))).collect()
    }

    /// `Σ_j c_j φ_j(z_l)` for all `l`.
    pub fn synthesize(&self, coefficients: &[f64]) -> Vec<f64> {
        let mut out = vec![0.0; self.d];
        for (j, &c) in coefficients.iter().enumerate() {
            if c == 0.0 {
                continue;
            }
            for (o, &phi) in out.iter_mut().zip(self.row(j + 1)) {
                *o += c * phi;
            }
        }
        out
    }
}

/// Estimated Fourier coefficients and their variance proxies.
#[derive(Debug, Clone, Serialize)]
pub struct FourierEstimates {
    pub d: usize,
    pub a: f64,
    pub b: f64,
    pub theta_hat: Vec<f64>,
    pub theta_tilde: Vec<f64>,
    pub s: Vec<f64>,
    pub gamma_all: bool,
}

impl FourierEstimates {
    /// Assemble from raw `θ̂` and `s`, deriving `θ̃ = θ̂² - ((b-a)/d) s`.
    pub fn from_parts(
        a: f64,
        b: f64,
        theta_hat: Vec<f64>,
        s: Vec<f64>,
        gamma_all: bool,
    ) -> Result<Self> {
        if theta_hat.len() != s.len() {
            return Err(Error::LengthMismatch {
                expected: theta_hat.len(),
                actual: s.len(),
            });
        }
        let d = theta_hat.len();
        let step = (b - a) / d as f64;
        let theta_tilde = theta_hat
            .iter()
            .zip(&s)
            .map(|(t, sj)| t * t - step * sj)
            .collect();
        Ok(Self {
            d,
            a,
            b,
            theta_hat,
            theta_tilde,
            s,
            gamma_all,
        })
    }

    fn step(&self) -> f64 {
        (self.b - self.a) / self.d as f64
    }
}

/// `θ̂_j = ((b-a)/d) Σ_l Y_l φ_j(z_l)` and `s_j = ((b-a)/d) Σ_l σ_l² φ_j²(z_l)`.
pub fn fourier_estimates(data: &RegressionData, basis: &Basis) -> Result<FourierEstimates> {
    if data.d() != basis.d {
        return Err(Error::LengthMismatch {
            expected: basis.d,
            actual: data.d(),
        });
    }
    if data.a != basis.a || data.b != basis.b {
        return Err(Error::InvalidModel(format!(
            "regression on [{}, {}] but basis on [{}, {}]",
            data.a, data.b, basis.a, basis.b
        )));
    }
    let theta_hat = basis.project(&data.y);
    let step = basis.step();
    let s = (1..=basis.d)
        .map(|j| {
            step * basis
                .row(j)
                .iter()
                .zip(&data.sigma2)
                .map(|(phi, s2)| s2 * phi * phi)
                .sum::<f64>()
        })
        .collect();
    FourierEstimates::from_parts(data.a, data.b, theta_hat, s, data.gamma_all)
}

fn check_len(lambda: &[f64], d: usize) -> Result<()> {
    if lambda.len() == d {
        Ok(())
    } else {
        Err(Error::LengthMismatch {
            expected: d,
            actual: lambda.len(),
        })
    }
}

/// `P_d(λ) = ((b-a)/d) Σ_j λ_j² s_j`.
pub fn penalty(lambda: &[f64], fe: &FourierEstimates) -> Result<f64> {
    check_len(lambda, fe.d)?;
    Ok(fe.step()
        * lambda
            .iter()
            .zip(&fe.s)
            .map(|(l, s)| l * l * s)
            .sum::<f64>())
}

/// `J_d(λ) = Σ λ_j² θ̂_j² - 2 Σ λ_j θ̃_j + δ P_d(λ)`.
pub fn cost(lambda: &[f64], fe: &FourierEstimates, delta: f64) -> Result<f64> {
    check_len(lambda, fe.d)?;
    let fit: f64 = lambda
        .iter()
        .zip(&fe.theta_hat)
        .zip(&fe.theta_tilde)
        .map(|((l, th), tt)| l * l * th * th - 2.0 * l * tt)
        .sum();
    Ok(fit + delta * penalty(lambda, fe)?)
}

/// Index of the first minimum; NaN costs never win.
pub fn first_argmin(costs: &[f64]) -> Option<usize> {
    let mut best: Option<(usize, f64)> = None;
    for (i, &c) in costs.iter().enumerate() {
        if c.is_nan() {
            continue;
        }
        match best {
            Some((_, b)) if c >= b => {}
            _ => best = Some((i, c)),
        }
    }
    best.map(|(i, _)| i)
}

/// Piecewise-constant estimator on the grid cells `[a, z_1], (z_{l-1}, z_l]`.
#[derive(Debug, Clone, Serialize)]
pub struct GridEstimator {
    pub a: f64,
    pub b: f64,
    pub z: Vec<f64>,
    pub values: Vec<f64>,
}

impl GridEstimator {
    pub fn evaluate(&self, t: f64) -> Result<f64> {
        if !(t >= self.a && t <= self.b) {
            return Err(Error::OutOfDomain {
                t,
                a: self.a,
                b: self.b,
            });
        }
        let idx = self.z.partition_point(|&z| z < t).min(self.z.len() - 1);
        Ok(self.values[idx])
    }
}

/// `Ŝ_λ(z_l) = Σ_j λ_j θ̂_j φ_j(z_l) · 1_Γ`.
pub fn weighted_estimate(lambda: &[f64], fe: &FourierEstimates, basis: &Basis) -> Result<Vec<f64>> {
    check_len(lambda, fe.d)?;
    if !fe.gamma_all {
        return Ok(vec![0.0; fe.d]);
    }
    let coeffs: Vec<f64> = lambda
        .iter()
        .zip(&fe.theta_hat)
        .map(|(l, t)| l * t)
        .collect();
    Ok(basis.synthesize(&coeffs))
}

#[derive(Debug, Clone, Serialize)]
pub struct SelectionResult {
    pub lambda_index: usize,
    pub lambda_hat: Vec<f64>,
    pub costs: Vec<f64>,
    pub delta: f64,
    pub estimator: GridEstimator,
}

impl SelectionResult {
    pub fn estimates_on_grid(&self) -> &[f64] {
        &self.estimator.values
    }

    /// Piecewise-constant extension `Ŝ*(t)` for `a ≤ t ≤ b`.
    pub fn evaluate(&self, t: f64) -> Result<f64> {
        self.estimator.evaluate(t)
    }
}

/// Minimize `J_d` over the family; ties go to the earliest member.
pub fn select(
    fe: &FourierEstimates,
    family: &[WeightVector],
    basis: &Basis,
    delta: f64,
) -> Result<SelectionResult> {
    check_delta(delta)?;
    if family.is_empty() {
        return Err(Error::EmptyFamily);
    }
    let costs = family
        .iter()
        .map(|w| cost(&w.values, fe, delta))
        .collect::<Result<Vec<_>>>()?;
    let lambda_index = first_argmin(&costs).ok_or(Error::EmptyFamily)?;
    let lambda_hat = family[lambda_index].values.clone();
    let values = weighted_estimate(&lambda_hat, fe, basis)?;
    let step = (fe.b - fe.a) / fe.d as f64;
    Ok(SelectionResult {
        lambda_index,
        lambda_hat,
        costs,
        delta,
        estimator: GridEstimator {
            a: fe.a,
            b: fe.b,
            z: (1..=fe.d).map(|l| fe.a + l as f64 * step).collect(),
            values,
        },
    })
}
