//! Truncated sequential kernel procedure at the grid points `z_l`.
//!
//! Each grid point owns a disjoint window of design indices `k1..=k2`. The
//! first `q` observations of the window give a pilot estimate of `S(z_l)`,
//! which fixes the threshold `H_l`. Observations are then accumulated until
//! the observed information `A_{ι,k} = Σ y²_{j-1}` reaches `H_l`; the last
//! term is down-weighted by `ϰ_l` so that the information equals `H_l`
//! exactly. The resulting estimates form a heteroscedastic regression
//! `Y_l = S(z_l) + ζ_l` with known variances `σ_l² = 1/H_l`.

use std::io::{self, Write};

use serde::Serialize;

use crate::error::{Error, Result};
use crate::numeric::Accumulator;
use crate::process::{ModelSpec, Path};

pub const DEFAULT_MU0: f64 = 0.5;

/// `ε̃ = 1/(2 + ln n)`, the projection margin of the pilot estimate.
pub fn eps_tilde(n: usize) -> f64 {
    1.0 / (2.0 + (n as f64).ln())
}

/// Index window of one grid point (1-based design indices).
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
pub struct Window {
    pub k1: usize,
    pub k2: usize,
    /// End of the pilot stretch, `k1 + q`.
    pub iota: usize,
}

impl Window {
    #[inline]
    pub fn contains(&self, j: usize) -> bool {
        self.k1 <= j && j <= self.k2
    }

    /// Number of observations available to the sequential stage, `k2 - ι - 1`.
    pub fn main_stage_len(&self) -> usize {
        self.k2 - self.iota - 1
    }
}

#[derive(Debug, Clone, Serialize)]
pub struct GridLayout {
    pub a: f64,
    pub b: f64,
    pub n: usize,
    pub d: usize,
    pub h: f64,
    pub mu0: f64,
    pub q: usize,
    pub eps_tilde: f64,
    pub z: Vec<f64>,
    pub windows: Vec<Window>,
}

impl GridLayout {
    /// Window of grid point `l` (1-based).
    pub fn window(&self, l: usize) -> Window {
        self.windows[l - 1]
    }

    /// `h̃ = h/(b - a) = 1/(2d)`.
    pub fn h_tilde(&self) -> f64 {
        1.0 / (2 * self.d) as f64
    }

    /// Indicator kernel `Q_{l,j}`.
    #[inline]
    pub fn kernel(&self, l: usize, j: usize) -> bool {
        self.window(l).contains(j)
    }

    /// Grid point owning design index `j`, if any.
    pub fn owner(&self, j: usize) -> Option<usize> {
        let idx = self.windows.partition_point(|w| w.k2 < j);
        self.windows
            .get(idx)
            .filter(|w| w.contains(j))
            .map(|_| idx + 1)
    }
}

/// Grid `z_l = a + l(b-a)/d`, `d = ⌊√n⌋`, bandwidth `h = (b-a)/(2d)` and the
/// window bounds `k1 = ⌊n z̃ - n h̃⌋ + 1`, `k2 = ⌊n z̃ + n h̃⌋ ∧ n` computed in
/// integer arithmetic (`k2 = n` at `l = d`).
pub fn grid_layout(spec: &ModelSpec, mu0: f64) -> Result<GridLayout> {
    spec.validate()?;
    if !(mu0 > 0.0 && mu0 < 1.0) {
        return Err(Error::InvalidParameter {
            name: "mu0",
            reason: format!("must lie in (0, 1), got {mu0}"),
        });
    }
    let n = spec.n;
    if n < 9 {
        return Err(Error::SampleTooSmall {
            n,
            reason: "the grid needs n >= 9".into(),
        });
    }
    let d = n.isqrt();
    let (a, b) = (spec.a, spec.b);
    let h = (b - a) / (2 * d) as f64;
    let q = (n as f64 / (2 * d) as f64).powf(mu0).floor() as usize;
    if q < 1 {
        return Err(Error::SampleTooSmall {
            n,
            reason: "pilot length q is zero".into(),
        });
    }
    let mut windows = Vec::with_capacity(d);
    for l in 1..=d {
        let k1 = n * (2 * l - 1) / (2 * d) + 1;
        let k2 = if l == d {
            n
        } else {
            (n * (2 * l + 1) / (2 * d)).min(n)
        };
        let iota = k1 + q;
        if iota + 2 > k2 {
            return Err(Error::SampleTooSmall {
                n,
                reason: format!(
                    "window {l} ({k1}..={k2}) leaves no observations after the pilot (q = {q})"
                ),
            });
        }
        windows.push(Window { k1, k2, iota });
    }
    let z = (1..=d).map(|l| a + l as f64 * (b - a) / d as f64).collect();
    Ok(GridLayout {
        a,
        b,
        n,
        d,
        h,
        mu0,
        q,
        eps_tilde: eps_tilde(n),
        z,
        windows,
    })
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct Pilot {
    pub pilot: f64,
    pub pilot_proj: f64,
    /// The pilot denominator vanished; `pilot` was set to 0.
    pub degenerate: bool,
}

/// Clip into `[-1 + ε̃, 1 - ε̃]`.
pub fn project(value: f64, eps_tilde: f64) -> f64 {
    value.max(-1.0 + eps_tilde).min(1.0 - eps_tilde)
}

/// Least-squares ratio over the pilot stretch `j ∈ [k1, ι]` and its projection.
pub fn pilot_estimate(path: &Path, layout: &GridLayout, l: usize) -> Pilot {
    let w = layout.window(l);
    let y = &path.y;
    let (mut num, mut den) = (0.0, 0.0);
    for j in w.k1..=w.iota {
        num += y[j - 1] * y[j];
        den += y[j - 1] * y[j - 1];
    }
    let (pilot, degenerate) = if den > 0.0 {
        (num / den, false)
    } else {
        (0.0, true)
    };
    Pilot {
        pilot,
        pilot_proj: project(pilot, layout.eps_tilde),
        degenerate,
    }
}

/// `H = (1 - ε̃) · count / (1 - pilot_proj²)`.
pub fn threshold_value(count: usize, pilot_proj: f64, eps_tilde: f64) -> f64 {
    (1.0 - eps_tilde) * count as f64 / (1.0 - pilot_proj * pilot_proj)
}

/// Threshold `H_l` of grid point `l`.
pub fn threshold(layout: &GridLayout, l: usize, pilot_proj: f64) -> f64 {
    threshold_value(
        layout.window(l).main_stage_len(),
        pilot_proj,
        layout.eps_tilde,
    )
}

/// Outcome of the stopping rule on one window.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct SequentialStage {
    pub tau: usize,
    pub kappa: f64,
    pub gamma_ok: bool,
    /// `S*` on `Γ_l`, zero otherwise.
    pub estimate: f64,
    /// `A_{ι,τ-1}`.
    pub info_before_tau: f64,
}

/// Stopping rule with correction for an explicit threshold.
///
/// `y` is the full path `y_0..y_n`. Information is accumulated over
/// `j = ι+1..=k2`; `τ` is the first `k` with `A_{ι,k} ≥ H` (or `k2` if none)
/// and `Γ = {A_{ι,k2-1} ≥ H}`.
pub fn sequential_stage(y: &[f64], iota: usize, k2: usize, h: f64) -> SequentialStage {
    let mut info = Accumulator::for_length(k2 - iota);
    let mut cross = Accumulator::for_length(k2 - iota);
    let mut crossed: Option<(usize, f64, f64)> = None;
    let mut info_at_k2_minus_1 = 0.0;
    for j in (iota + 1)..=k2 {
        let before = info.value();
        let cross_before = cross.value();
        let x2 = y[j - 1] * y[j - 1];
        info.add(x2);
        if crossed.is_none() && info.value() >= h {
            crossed = Some((j, before, cross_before));
        }
        cross.add(y[j - 1] * y[j]);
        if j == k2 - 1 {
            info_at_k2_minus_1 = info.value();
        }
    }
    let gamma_ok = info_at_k2_minus_1 >= h;
    match crossed {
        Some((tau, before, cross_before)) => {
            let last = y[tau - 1] * y[tau - 1];
            let kappa2 = (h - before) / last;
            if !(last > 0.0 && kappa2 > 0.0) {
                return SequentialStage {
                    tau,
                    kappa: 1.0,
                    gamma_ok: false,
                    estimate: 0.0,
                    info_before_tau: before,
                };
            }
            let kappa = kappa2.min(1.0).sqrt();
            let estimate = if gamma_ok {
                (cross_before + kappa * y[tau - 1] * y[tau]) / h
            } else {
                0.0
            };
            SequentialStage {
                tau,
                kappa,
                gamma_ok,
                estimate,
                info_before_tau: before,
            }
        }
        None => SequentialStage {
            tau: k2,
            kappa: 1.0,
            gamma_ok: false,
            estimate: 0.0,
            info_before_tau: info.value() - y[k2 - 1] * y[k2 - 1],
        },
    }
}

/// Per-grid-point output of the two-stage procedure.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct PointProcedureResult {
    pub l: usize,
    pub k1: usize,
    pub k2: usize,
    pub iota: usize,
    pub pilot: f64,
    pub pilot_proj: f64,
    pub gamma_tilde: f64,
    #[serde(rename = "H")]
    pub threshold: f64,
    pub tau: usize,
    pub kappa: f64,
    pub estimate: f64,
    pub gamma_ok: bool,
    pub sigma2: f64,
    pub pilot_degenerate: bool,
    pub info_before_tau: f64,
}

impl PointProcedureResult {
    pub const CSV_HEADER: &'static str =
        "l,k1,k2,iota,pilot,pilot_proj,H,tau,kappa,estimate,gamma_ok,sigma2";

    pub fn csv_row(&self) -> String {
        format!(
            "{},{},{},{},{},{},{},{},{},{},{},{}",
            self.l,
            self.k1,
            self.k2,
            self.iota,
            self.pilot,
            self.pilot_proj,
            self.threshold,
            self.tau,
            self.kappa,
            self.estimate,
            self.gamma_ok,
            self.sigma2
        )
    }
}

pub fn write_points_csv<W: Write>(mut out: W, points: &[PointProcedureResult]) -> io::Result<()> {
    writeln!(out, "{}", PointProcedureResult::CSV_HEADER)?;
    for p in points {
        writeln!(out, "{}", p.csv_row())?;
    }
    Ok(())
}

pub fn run_point_procedure(path: &Path, layout: &GridLayout, l: usize) -> PointProcedureResult {
    let w = layout.window(l);
    let pilot = pilot_estimate(path, layout, l);
    let h = threshold(layout, l, pilot.pilot_proj);
    let stage = sequential_stage(&path.y, w.iota, w.k2, h);
    PointProcedureResult {
        l,
        k1: w.k1,
        k2: w.k2,
        iota: w.iota,
        pilot: pilot.pilot,
        pilot_proj: pilot.pilot_proj,
        gamma_tilde: 1.0 - pilot.pilot_proj * pilot.pilot_proj,
        threshold: h,
        tau: stage.tau,
        kappa: stage.kappa,
        estimate: stage.estimate,
        gamma_ok: stage.gamma_ok,
        sigma2: 1.0 / h,
        pilot_degenerate: pilot.degenerate,
        info_before_tau: stage.info_before_tau,
    }
}

/// Deterministic band `σ_{0,*} ≤ σ_l² ≤ σ_{1,*}`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct SigmaBounds {
    pub lower: f64,
    pub upper: f64,
}

/// `σ_{0,*} = (1-ε²)/(2(1-ε̃) n h̃)`, `σ_{1,*} = 1/((1-ε̃)(2 n h̃ - q - 3))`.
pub fn sigma_bounds(layout: &GridLayout, eps: f64) -> SigmaBounds {
    let nh = layout.n as f64 * layout.h_tilde();
    let et = layout.eps_tilde;
    SigmaBounds {
        lower: (1.0 - eps * eps) / (2.0 * (1.0 - et) * nh),
        upper: 1.0 / ((1.0 - et) * (2.0 * nh - layout.q as f64 - 3.0)),
    }
}

/// The regression `Y_l = S(z_l) + ζ_l` produced by the sequential procedures.
#[derive(Debug, Clone, Serialize)]
pub struct RegressionData {
    pub a: f64,
    pub b: f64,
    pub z: Vec<f64>,
    #[serde(rename = "Y")]
    pub y: Vec<f64>,
    pub sigma2: Vec<f64>,
    /// `Γ = ∩ Γ_l`.
    pub gamma_all: bool,
    pub sigma_bounds: SigmaBounds,
    pub point_results: Vec<PointProcedureResult>,
}

impl RegressionData {
    pub fn d(&self) -> usize {
        self.z.len()
    }

    pub const CSV_HEADER: &'static str = "l,z,Y,sigma2,gamma";

    pub fn write_csv<W: Write>(&self, mut out: W) -> io::Result<()> {
        writeln!(out, "{}", Self::CSV_HEADER)?;
        for l in 0..self.d() {
            writeln!(
                out,
                "{},{},{},{},{}",
                l + 1,
                self.z[l],
                self.y[l],
                self.sigma2[l],
                self.gamma_all
            )?;
        }
        Ok(())
    }
}

/// Run every grid point and apply the global indicator `1_Γ`.
///
/// `eps` is the stability margin entering `σ_{0,*}`.
pub fn build_regression(path: &Path, layout: &GridLayout, eps: f64) -> RegressionData {
    let point_results: Vec<PointProcedureResult> = (1..=layout.d)
        .map(|l| run_point_procedure(path, layout, l))
        .collect();
    let gamma_all = point_results.iter().all(|p| p.gamma_ok);
    let y = point_results
        .iter()
        .map(|p| if gamma_all { p.estimate } else { 0.0 })
        .collect();
    RegressionData {
        a: layout.a,
        b: layout.b,
        z: layout.z.clone(),
        y,
        sigma2: point_results.iter().map(|p| p.sigma2).collect(),
        gamma_all,
        sigma_bounds: sigma_bounds(layout, eps),
        point_results,
    }
}

/// Modified weight `Q̌_{l,j}`: `y_{j-1}` inside the window before `k2`,
/// `√H_l` at `j = k2`, zero outside.
pub fn modified_weight(y: &[f64], window: Window, threshold: f64, j: usize) -> f64 {
    if !window.contains(j) {
        0.0
    } else if j < window.k2 {
        y[j - 1]
    } else {
        threshold.sqrt()
    }
}

/// Always-defined noise variable of one grid point.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct EtaVariable {
    pub eta: f64,
    pub sigma2: f64,
    pub tau_check: usize,
    pub kappa_check: f64,
    pub gamma_ok: bool,
}

/// `η_l` built from the modified weights, stopping time `τ̌_l` and
/// correction `ϰ̌_l`. Needs the innovation record of the path.
///
/// Fails if `τ̌_l ≠ τ_l` or `ϰ̌_l ≠ ϰ_l` at a point where `Γ_l` holds.
pub fn eta_variables(path: &Path, layout: &GridLayout) -> Result<Vec<EtaVariable>> {
    let xi = path.noise()?;
    let y = &path.y;
    (1..=layout.d)
        .map(|l| {
            let point = run_point_procedure(path, layout, l);
            let w = layout.window(l);
            let h = point.threshold;
            let mut info = Accumulator::for_length(w.k2 - w.iota);
            let mut noise_sum = Accumulator::for_length(w.k2 - w.iota);
            let mut out = None;
            for j in (w.iota + 1)..=w.k2 {
                let qj = modified_weight(y, w, h, j);
                let before = info.value();
                info.add(qj * qj);
                if info.value() >= h {
                    let kappa = ((h - before) / (qj * qj)).min(1.0).sqrt();
                    let eta = (noise_sum.value() + kappa * qj * xi[j]) / h;
                    out = Some((j, kappa, eta));
                    break;
                }
                noise_sum.add(qj * xi[j]);
            }
            let (tau_check, kappa_check, eta) = out.ok_or_else(|| {
                Error::Consistency(format!("modified information never reached H at l = {l}"))
            })?;
            if point.gamma_ok && (tau_check != point.tau || kappa_check != point.kappa) {
                return Err(Error::Consistency(format!(
                    "modified stopping rule disagrees on Γ_{l}: τ̌={tau_check} τ={}, ϰ̌={kappa_check} ϰ={}",
                    point.tau, point.kappa
                )));
            }
            Ok(EtaVariable {
                eta,
                sigma2: point.sigma2,
                tau_check,
                kappa_check,
                gamma_ok: point.gamma_ok,
            })
        })
        .collect()
}

/// `Υ = (1/(m1-m0)) Σ_{j=m0+1}^{m1} y_j² - 1/γ`.
pub fn upsilon_statistic(path: &Path, m0: usize, m1: usize, gamma: f64) -> Result<f64> {
    if m0 >= m1 || m1 > path.n() {
        return Err(Error::EmptyRange { m0, m1 });
    }
    if !(gamma > 0.0 && gamma <= 1.0) {
        return Err(Error::InvalidParameter {
            name: "gamma",
            reason: format!("must lie in (0, 1], got {gamma}"),
        });
    }
    let mean = path.y[(m0 + 1)..=m1].iter().map(|v| v * v).sum::<f64>() / (m1 - m0) as f64;
    Ok(mean - 1.0 / gamma)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::process::{simulate_with_noise, Coefficient, NoiseDensity};

    fn spec(n: usize) -> ModelSpec {
        ModelSpec::new(0.0, 1.0, n, Coefficient::Zero, NoiseDensity::gaussian()).unwrap()
    }

    #[test]
    fn layout_for_n_100() {
        let g = grid_layout(&spec(100), 0.5).unwrap();
        assert_eq!(g.d, 10);
        assert_eq!(g.h, 0.05);
        assert!((g.z[0] - 0.1).abs() < 1e-15);
        assert_eq!(g.window(1).k1, 6);
        assert_eq!(g.window(1).k2, 15);
        assert_eq!(g.q, 2);
        assert_eq!(g.window(1).iota, 8);
        assert_eq!(g.window(10).k2, 100);
    }

    #[test]
    fn windows_tile_without_overlap() {
        for n in [25usize, 99, 100, 500, 2000, 8001] {
            let Ok(g) = grid_layout(&spec(n), 0.5) else {
                continue;
            };
            for pair in g.windows.windows(2) {
                assert_eq!(pair[0].k2 + 1, pair[1].k1, "n = {n}");
            }
            assert_eq!(g.windows.last().unwrap().k2, n);
        }
    }

    #[test]
    fn layout_rejects_small_or_bad_input() {
        assert!(grid_layout(&spec(8), 0.5).is_err());
        assert!(grid_layout(&spec(100), 1.0).is_err());
        assert!(grid_layout(&spec(100), 0.0).is_err());
        // Last half-window is exhausted by the pilot at n = 25.
        assert!(matches!(
            grid_layout(&spec(25), 0.5),
            Err(Error::SampleTooSmall { .. })
        ));
    }

    #[test]
    fn owner_matches_windows() {
        let g = grid_layout(&spec(100), 0.5).unwrap();
        assert_eq!(g.owner(5), None);
        assert_eq!(g.owner(6), Some(1));
        assert_eq!(g.owner(15), Some(1));
        assert_eq!(g.owner(16), Some(2));
        assert_eq!(g.owner(100), Some(10));
    }

    #[test]
    fn pilot_on_constant_path() {
        let sp = spec(55);
        let path = Path::from_observations(&sp, vec![1.0; 56]).unwrap();
        let g = grid_layout(&sp, 0.5).unwrap();
        let p = pilot_estimate(&path, &g, 2);
        assert_eq!(p.pilot, 1.0);
        assert!((p.pilot_proj - 0.833537).abs() < 1e-6);
        assert!(!p.degenerate);
    }

    #[test]
    fn pilot_projection_clips() {
        assert_eq!(project(0.5, 0.1), 0.5);
        assert!((project(-2.0, 0.1) + 0.9).abs() < 1e-15);
        assert!((project(2.0, 0.1) - 0.9).abs() < 1e-15);
    }

    #[test]
    fn degenerate_pilot_on_zero_path() {
        let sp = spec(100);
        let path = Path::from_observations(&sp, vec![0.0; 101]).unwrap();
        let g = grid_layout(&sp, 0.5).unwrap();
        let p = pilot_estimate(&path, &g, 3);
        assert!(p.degenerate);
        assert_eq!(p.pilot, 0.0);
        let r = run_point_procedure(&path, &g, 3);
        assert!(!r.gamma_ok);
        assert_eq!(r.estimate, 0.0);
    }

    #[test]
    fn threshold_examples() {
        assert!((threshold_value(20, 0.0, 0.1) - 18.0).abs() < 1e-12);
        assert!((threshold_value(20, 0.6, 0.1) - 28.125).abs() < 1e-12);
        assert!((threshold_value(10, 0.9, 0.1) - 47.368_421_052_631_58).abs() < 1e-9);
    }

    #[test]
    fn stage_with_unit_increments() {
        let y = vec![1.0; 40];
        let s = sequential_stage(&y, 10, 30, 5.0);
        assert_eq!(s.tau, 15);
        assert_eq!(s.info_before_tau, 4.0);
        assert_eq!(s.kappa, 1.0);
        assert!(s.gamma_ok);

        let s = sequential_stage(&y, 10, 30, 4.5);
        assert_eq!(s.tau, 15);
        assert!((s.kappa - 0.5f64.sqrt()).abs() < 1e-15);
        assert!((s.estimate - (4.0 + 0.5f64.sqrt()) / 4.5).abs() < 1e-12);
        assert!((s.estimate - 1.046024).abs() < 1e-6);
    }

    #[test]
    fn stage_on_zero_window_never_stops() {
        let mut y = vec![1.0; 40];
        for v in y.iter_mut().skip(10) {
            *v = 0.0;
        }
        let s = sequential_stage(&y, 10, 30, 1.5);
        assert!(!s.gamma_ok);
        assert_eq!(s.tau, 30);
        assert_eq!(s.estimate, 0.0);
    }

    #[test]
    fn gamma_requires_crossing_before_k2() {
        // Crossing exactly at k2 does not count.
        let y = vec![1.0; 40];
        let s = sequential_stage(&y, 10, 15, 5.0);
        assert_eq!(s.tau, 15);
        assert!(!s.gamma_ok);
        let s = sequential_stage(&y, 10, 16, 5.0);
        assert!(s.gamma_ok);
    }

    #[test]
    fn regression_indicator_zeroes_everything_when_one_point_fails() {
        let sp = spec(100);
        let mut y = vec![1.0; 101];
        for v in y.iter_mut().skip(40).take(10) {
            *v = 0.0;
        }
        let path = Path::from_observations(&sp, y).unwrap();
        let g = grid_layout(&sp, 0.5).unwrap();
        let data = build_regression(&path, &g, 0.1);
        assert!(data.point_results.iter().any(|p| !p.gamma_ok));
        assert!(!data.gamma_all);
        assert!(data.y.iter().all(|&v| v == 0.0));
    }

    #[test]
    fn regression_keeps_estimates_when_all_points_succeed() {
        // Alternating ±3: pilot projects to -1 + ε̃, so H is about three times the
        // window count and each step adds 9 to the information.
        let sp = spec(100);
        let y: Vec<f64> = (0..=100)
            .map(|k| if k % 2 == 0 { 3.0 } else { -3.0 })
            .collect();
        let path = Path::from_observations(&sp, y).unwrap();
        let g = grid_layout(&sp, 0.5).unwrap();
        let data = build_regression(&path, &g, 0.1);
        assert!(data.gamma_all, "{:?}", data.point_results);
        for (yl, p) in data.y.iter().zip(&data.point_results) {
            assert_eq!(*yl, p.estimate);
        }
    }

    #[test]
    fn sigma_bounds_at_n_10000() {
        let g = grid_layout(&spec(10_000), 0.5).unwrap();
        let s = sigma_bounds(&g, 0.1);
        let et = 1.0 / (2.0 + 10_000f64.ln());
        // n h̃ = 50, q = ⌊√50⌋ = 7.
        assert_eq!(g.q, 7);
        assert!((s.lower - 0.99 / (2.0 * (1.0 - et) * 50.0)).abs() < 1e-15);
        assert!((s.upper - 1.0 / ((1.0 - et) * 90.0)).abs() < 1e-15);
        assert!(s.lower < s.upper);
    }

    #[test]
    fn eta_requires_noise_and_vanishes_without_it() {
        let sp = spec(400);
        let path = Path::from_observations(&sp, vec![1.0; 401]).unwrap();
        let g = grid_layout(&sp, 0.5).unwrap();
        assert!(matches!(eta_variables(&path, &g), Err(Error::MissingNoise)));

        let sp = ModelSpec::new(
            0.0,
            1.0,
            400,
            Coefficient::Const(0.5),
            NoiseDensity::gaussian(),
        )
        .unwrap()
        .with_y0(1.0);
        let path = simulate_with_noise(&sp, &vec![0.0; 400]).unwrap();
        let etas = eta_variables(&path, &g).unwrap();
        assert!(etas.iter().all(|e| e.eta == 0.0));
    }

    #[test]
    fn upsilon_examples() {
        let sp = spec(20);
        let path = Path::from_observations(&sp, vec![1.0; 21]).unwrap();
        assert_eq!(upsilon_statistic(&path, 2, 10, 1.0).unwrap(), 0.0);
        let path = Path::from_observations(&sp, vec![2.0; 21]).unwrap();
        assert_eq!(upsilon_statistic(&path, 2, 10, 1.0).unwrap(), 3.0);
        assert!(matches!(
            upsilon_statistic(&path, 5, 5, 1.0),
            Err(Error::EmptyRange { .. })
        ));
    }

    #[test]
    fn csv_header_and_row_have_matching_arity() {
        let sp = spec(100);
        let path = Path::from_observations(&sp, vec![1.0; 101]).unwrap();
        let g = grid_layout(&sp, 0.5).unwrap();
        let r = run_point_procedure(&path, &g, 1);
        assert_eq!(
            r.csv_row().split(',').count(),
            PointProcedureResult::CSV_HEADER.split(',').count()
        );
    }
}
