//! Asymptotic variance `σ² = (σ₁² + σ₂²) / (∫w)²` of the simple estimator,
//! from model curves (oracle) or from data (plug-in, bootstrap), and the
//! normal-approximation confidence interval built on it.
//!
//! `σ₁² = ∫ v²(t) w²(t) dt` and
//! `σ₂² = ∫∫ w(s) w(t) (min{s,t} − st) dg(s) dg(t)`, where `g` and `v²` are
//! the quantile-regression and conditional-variance curves.

use std::collections::BTreeMap;

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::distributions::ModelSpec;
use crate::empirical::{
    concomitant_order, estimate_simple, ConfidenceInterval, EstimateReport, PairedSample, Variant,
};
use crate::error::{Error, Result};
use crate::normal;
use crate::rng::{derive_seed, UniformStream};
use crate::sum::ExactSum;
use crate::weights::WeightSpec;

pub const DEFAULT_GRID_SIZE: usize = 4096;
pub const DEFAULT_TRUNCATION: f64 = 1e-7;
/// Relative change under grid doubling above which a quadrature is rejected.
const REFINEMENT_LIMIT: f64 = 1e-2;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum VarianceMethod {
    Oracle,
    #[serde(rename = "plugin")]
    PlugIn,
    Bootstrap,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct VarianceReport {
    /// `None` for the bootstrap, which does not split the variance.
    pub sigma1_sq: Option<f64>,
    pub sigma2_sq: Option<f64>,
    pub sigma_sq: f64,
    pub w_integral: f64,
    pub method: VarianceMethod,
    pub grid_size: usize,
    pub truncation: f64,
    pub diagnostics: BTreeMap<String, f64>,
}

/// `Σ_i Σ_j a_i a_j (min{s_i, s_j} − s_i s_j)` for increasing `s` in (0, 1).
///
/// Evaluated in O(n) as `∫₀¹ (A(u) − S)² du` with `A(u) = Σ_{s_i ≥ u} a_i`
/// and `S = Σ a_i s_i`, which is a sum of nonnegative terms.
pub fn bridge_quadratic_form(points: &[f64], coefs: &[f64]) -> f64 {
    assert_eq!(points.len(), coefs.len());
    debug_assert!(points.windows(2).all(|w| w[0] <= w[1]));
    let weighted: ExactSum = points.iter().zip(coefs).map(|(s, a)| s * a).collect();
    let total_moment = weighted.value();
    let mut suffix = ExactSum::new();
    let mut suffix_values = vec![0.0; coefs.len()];
    for (i, a) in coefs.iter().enumerate().rev() {
        suffix.add(*a);
        suffix_values[i] = suffix.value();
    }
    let mut acc = ExactSum::new();
    let mut prev = 0.0;
    for (s, a_suffix) in points.iter().zip(&suffix_values) {
        let d = a_suffix - total_moment;
        acc.add((s - prev) * d * d);
        prev = *s;
    }
    acc.add((1.0 - prev) * total_moment * total_moment);
    acc.value()
}

/// Nodes on `[truncation, 1 − truncation]`, uniform in `logit(t)` so cells
/// shrink in proportion to the distance from the nearer endpoint, with the
/// weight's breakpoints added as nodes.
fn graded_nodes(grid_size: usize, truncation: f64, breakpoints: &[f64]) -> Vec<f64> {
    let hi = (1.0 - truncation).ln() - truncation.ln();
    let lo = -hi;
    let mut nodes: Vec<f64> = (0..=grid_size)
        .map(|i| {
            let x = lo + (hi - lo) * i as f64 / grid_size as f64;
            if x <= 0.0 {
                let e = x.exp();
                e / (1.0 + e)
            } else {
                1.0 / (1.0 + (-x).exp())
            }
        })
        .collect();
    nodes[0] = truncation;
    nodes[grid_size] = 1.0 - truncation;
    nodes.extend(
        breakpoints
            .iter()
            .copied()
            .filter(|&b| b > truncation && b < 1.0 - truncation),
    );
    nodes.sort_by(f64::total_cmp);
    nodes.dedup();
    nodes
}

fn check_grid(grid_size: usize, truncation: f64) -> Result<()> {
    if grid_size < 100 {
        return Err(Error::domain("grid_size", grid_size as f64, "[100, ∞)"));
    }
    if !(truncation > 0.0 && truncation <= 0.01) {
        return Err(Error::domain("truncation", truncation, "(0, 0.01]"));
    }
    Ok(())
}

fn sigma1_on_grid<V: Fn(f64) -> f64>(v2: &V, w: &WeightSpec, nodes: &[f64]) -> Result<f64> {
    let mut acc = ExactSum::new();
    for cell in nodes.windows(2) {
        let m = 0.5 * (cell[0] + cell[1]);
        let wt = w.eval_unchecked(m);
        if wt == 0.0 {
            continue;
        }
        let v = v2(m);
        if !v.is_finite() {
            return Err(Error::Divergent(format!(
                "conditional variance not finite at t = {m}"
            )));
        }
        acc.add(v * wt * wt * (cell[1] - cell[0]));
    }
    Ok(acc.value().max(0.0))
}

fn sigma2_on_grid<G: Fn(f64) -> f64>(g: &G, w: &WeightSpec, nodes: &[f64]) -> Result<f64> {
    let values: Vec<f64> = nodes.iter().map(|&t| g(t)).collect();
    if let Some(i) = values.iter().position(|v| !v.is_finite()) {
        return Err(Error::Divergent(format!(
            "regression curve not finite at t = {}",
            nodes[i]
        )));
    }
    let mids: Vec<f64> = nodes.windows(2).map(|c| 0.5 * (c[0] + c[1])).collect();
    let coefs: Vec<f64> = values
        .windows(2)
        .zip(&mids)
        .map(|(gv, &m)| w.eval_unchecked(m) * (gv[1] - gv[0]))
        .collect();
    Ok(bridge_quadratic_form(&mids, &coefs))
}

fn relative_change(a: f64, b: f64) -> f64 {
    let scale = a.abs().max(b.abs());
    if scale == 0.0 {
        0.0
    } else {
        (a - b).abs() / scale
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Refined {
    pub value: f64,
    /// Same quadrature on a grid twice as fine.
    pub refined: f64,
}

impl Refined {
    pub fn relative_change(&self) -> f64 {
        relative_change(self.value, self.refined)
    }
}

/// `σ₁²` by the midpoint rule on a graded grid, with a doubled-grid check.
pub fn sigma1_sq_detailed<V: Fn(f64) -> f64>(
    v2: V,
    w: &WeightSpec,
    grid_size: usize,
    truncation: f64,
) -> Result<Refined> {
    check_grid(grid_size, truncation)?;
    let bps = w.quadrature_breakpoints();
    let value = sigma1_on_grid(&v2, w, &graded_nodes(grid_size, truncation, &bps))?;
    let refined = sigma1_on_grid(&v2, w, &graded_nodes(2 * grid_size, truncation, &bps))?;
    let r = Refined { value, refined };
    if r.relative_change() > REFINEMENT_LIMIT {
        return Err(Error::Divergent(format!(
            "sigma1² unstable under grid refinement ({value} vs {refined})"
        )));
    }
    Ok(r)
}

pub fn sigma1_sq<V: Fn(f64) -> f64>(
    v2: V,
    w: &WeightSpec,
    grid_size: usize,
    truncation: f64,
) -> Result<f64> {
    Ok(sigma1_sq_detailed(v2, w, grid_size, truncation)?.value)
}

/// `σ₂²` as a discrete Stieltjes double sum on a graded grid.
pub fn sigma2_sq_detailed<G: Fn(f64) -> f64>(
    g: G,
    w: &WeightSpec,
    grid_size: usize,
    truncation: f64,
) -> Result<Refined> {
    check_grid(grid_size, truncation)?;
    let bps = w.quadrature_breakpoints();
    let value = sigma2_on_grid(&g, w, &graded_nodes(grid_size, truncation, &bps))?;
    let refined = sigma2_on_grid(&g, w, &graded_nodes(2 * grid_size, truncation, &bps))?;
    let r = Refined { value, refined };
    if r.relative_change() > REFINEMENT_LIMIT {
        return Err(Error::Divergent(format!(
            "sigma2² unstable under grid refinement ({value} vs {refined})"
        )));
    }
    Ok(r)
}

pub fn sigma2_sq<G: Fn(f64) -> f64>(
    g: G,
    w: &WeightSpec,
    grid_size: usize,
    truncation: f64,
) -> Result<f64> {
    Ok(sigma2_sq_detailed(g, w, grid_size, truncation)?.value)
}

fn nonzero_integral(w: &WeightSpec) -> Result<f64> {
    let integral = w.integral()?;
    if integral == 0.0 {
        return Err(Error::ZeroDenominator("weight integrates to zero".into()));
    }
    Ok(integral)
}

/// `σ²` from the model's own curves.
pub fn sigma_sq_oracle(
    model: &ModelSpec,
    w: &WeightSpec,
    grid_size: usize,
    truncation: f64,
) -> Result<VarianceReport> {
    model.curves_available()?;
    let w_integral = nonzero_integral(w)?;
    let s1 = if model.is_self_risk() {
        Refined {
            value: 0.0,
            refined: 0.0,
        }
    } else {
        sigma1_sq_detailed(
            |t| model.conditional_variance_unchecked(t),
            w,
            grid_size,
            truncation,
        )?
    };
    let s2 = sigma2_sq_detailed(|t| model.regression_unchecked(t), w, grid_size, truncation)?;
    let mut diagnostics = BTreeMap::new();
    diagnostics.insert("sigma1_sq_refined".into(), s1.refined);
    diagnostics.insert("sigma2_sq_refined".into(), s2.refined);
    diagnostics.insert(
        "refinement_rel_change".into(),
        relative_change(s1.value + s2.value, s1.refined + s2.refined),
    );
    if !model.inference_safe() {
        diagnostics.insert("inference_unsafe".into(), 1.0);
    }
    Ok(VarianceReport {
        sigma1_sq: Some(s1.value),
        sigma2_sq: Some(s2.value),
        sigma_sq: (s1.value + s2.value) / (w_integral * w_integral),
        w_integral,
        method: VarianceMethod::Oracle,
        grid_size,
        truncation,
        diagnostics,
    })
}

/// Local rank-window estimates of the regression and conditional-variance
/// curves at `t_k = k/(n+1)`.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct CurveEstimate {
    pub grid: Vec<f64>,
    pub g_hat: Vec<f64>,
    pub v2_hat: Vec<f64>,
    /// Half-width `m` of the window, in ranks.
    pub window: usize,
}

pub fn default_window(n: usize) -> usize {
    (n as f64).sqrt().ceil() as usize
}

/// Ranks dropped at each end by [`sigma_sq_plugin`].
pub fn plugin_edge(n: usize) -> usize {
    (n as f64).powf(0.25).ceil() as usize
}

/// Sorts by `y` and averages the concomitants over the rank window
/// `[k − h, k + h]`, `h = min(m, k − 1, n − k)`: the window narrows
/// symmetrically at the ends so every estimate stays centred on its rank.
pub fn plugin_curves(s: &PairedSample, window: Option<usize>) -> Result<CurveEstimate> {
    let n = s.len();
    if n < 5 {
        return Err(Error::SampleTooSmall {
            required: 5,
            actual: n,
        });
    }
    let m = window.unwrap_or_else(|| default_window(n)).max(1);
    let xs = concomitant_order(s).x_concomitant;
    // centred prefix sums keep the local variance free of cancellation
    let centre = crate::sum::exact_mean(&xs);
    let mut prefix = Vec::with_capacity(n + 1);
    let mut prefix_sq = Vec::with_capacity(n + 1);
    let (mut acc, mut acc_sq) = (0.0, 0.0);
    prefix.push(0.0);
    prefix_sq.push(0.0);
    for x in &xs {
        let d = x - centre;
        acc += d;
        acc_sq += d * d;
        prefix.push(acc);
        prefix_sq.push(acc_sq);
    }
    let denom = (n + 1) as f64;
    let mut grid = Vec::with_capacity(n);
    let mut g_hat = Vec::with_capacity(n);
    let mut v2_hat = Vec::with_capacity(n);
    for k in 0..n {
        let h = m.min(k).min(n - 1 - k);
        let (lo, hi) = (k - h, k + h + 1);
        let count = (hi - lo) as f64;
        let sum = prefix[hi] - prefix[lo];
        let sum_sq = prefix_sq[hi] - prefix_sq[lo];
        let mean = sum / count;
        let var = (sum_sq - sum * mean) / (count - 1.0).max(1.0);
        grid.push((k + 1) as f64 / denom);
        g_hat.push(centre + mean);
        v2_hat.push(var.max(0.0));
    }
    Ok(CurveEstimate {
        grid,
        g_hat,
        v2_hat,
        window: m,
    })
}

/// `σ²` with the plug-in curves on the interior rank grid.
pub fn sigma_sq_plugin(s: &PairedSample, w: &WeightSpec) -> Result<VarianceReport> {
    let w_integral = nonzero_integral(w)?;
    let curves = plugin_curves(s, None)?;
    let n = s.len();
    let edge = plugin_edge(n);
    if n <= 2 * edge + 1 {
        return Err(Error::SampleTooSmall {
            required: 2 * edge + 2,
            actual: n,
        });
    }
    let range = edge..(n - edge);
    let cell = 1.0 / (n + 1) as f64;

    let mut s1 = ExactSum::new();
    for k in range.clone() {
        let wt = w.eval_unchecked(curves.grid[k]);
        s1.add(curves.v2_hat[k] * wt * wt * cell);
    }
    let sigma1 = s1.value().max(0.0);

    let mids: Vec<f64> = range
        .clone()
        .skip(1)
        .map(|k| 0.5 * (curves.grid[k - 1] + curves.grid[k]))
        .collect();
    let coefs: Vec<f64> = range
        .skip(1)
        .zip(&mids)
        .map(|(k, &m)| w.eval_unchecked(m) * (curves.g_hat[k] - curves.g_hat[k - 1]))
        .collect();
    let sigma2 = bridge_quadratic_form(&mids, &coefs);

    let mut diagnostics = BTreeMap::new();
    diagnostics.insert("window".into(), curves.window as f64);
    diagnostics.insert("edge_ranks".into(), edge as f64);
    Ok(VarianceReport {
        sigma1_sq: Some(sigma1),
        sigma2_sq: Some(sigma2),
        sigma_sq: (sigma1 + sigma2) / (w_integral * w_integral),
        w_integral,
        method: VarianceMethod::PlugIn,
        grid_size: n - 2 * edge,
        truncation: edge as f64 / (n + 1) as f64,
        diagnostics,
    })
}

/// Variance of `√n · Π̂_w` over pair-resamples, run in parallel and folded
/// in replicate order.
pub fn bootstrap_variance(
    s: &PairedSample,
    w: &WeightSpec,
    replicates: usize,
    seed: u64,
) -> Result<VarianceReport> {
    if replicates == 0 {
        return Err(Error::domain("replicates", 0.0, "[1, ∞)"));
    }
    let w_integral = nonzero_integral(w)?;
    let n = s.len();
    let estimates: Vec<f64> = (0..replicates)
        .into_par_iter()
        .map(|b| {
            let mut stream = UniformStream::new(derive_seed(seed, b as u64));
            let idx: Vec<usize> = (0..n).map(|_| stream.next_index(n)).collect();
            let resample = s.resample(&idx)?;
            Variant::Simple.estimate(&resample, w)
        })
        .collect::<Result<_>>()?;
    let mean = crate::sum::exact_mean(&estimates);
    let ss: ExactSum = estimates.iter().map(|e| (e - mean) * (e - mean)).collect();
    let mut diagnostics = BTreeMap::new();
    diagnostics.insert("replicates".into(), replicates as f64);
    diagnostics.insert("bootstrap_mean".into(), mean);
    let sigma_sq = if replicates < 2 {
        diagnostics.insert("degenerate".into(), 1.0);
        0.0
    } else {
        n as f64 * ss.value() / (replicates - 1) as f64
    };
    if replicates < 100 {
        diagnostics.insert("below_recommended_replicates".into(), 1.0);
    }
    Ok(VarianceReport {
        sigma1_sq: None,
        sigma2_sq: None,
        sigma_sq,
        w_integral,
        method: VarianceMethod::Bootstrap,
        grid_size: 0,
        truncation: 0.0,
        diagnostics,
    })
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum IntervalMethod {
    PlugIn,
    Bootstrap { replicates: usize },
}

/// Minimum sample size for a normal-approximation interval.
pub const MIN_CI_SAMPLE: usize = 30;

/// `Π̂_w ± z_{(1+level)/2} σ̂ / √n`.
pub fn confidence_interval(
    s: &PairedSample,
    w: &WeightSpec,
    level: f64,
    method: IntervalMethod,
    seed: u64,
) -> Result<EstimateReport> {
    if !(level > 0.0 && level < 1.0) {
        return Err(Error::domain("level", level, "(0, 1)"));
    }
    if s.len() < MIN_CI_SAMPLE {
        return Err(Error::SampleTooSmall {
            required: MIN_CI_SAMPLE,
            actual: s.len(),
        });
    }
    let mut report = estimate_simple(s, w)?;
    let variance = match method {
        IntervalMethod::PlugIn => sigma_sq_plugin(s, w)?,
        IntervalMethod::Bootstrap { replicates } => bootstrap_variance(s, w, replicates, seed)?,
    };
    let half = normal::critical_value(level) * (variance.sigma_sq / s.len() as f64).sqrt();
    report.variance_estimate = Some(variance.sigma_sq);
    report.ci = Some(ConfidenceInterval {
        lower: report.estimate - half,
        upper: report.estimate + half,
        level,
    });
    Ok(report)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::distributions::MarginalSpec;

    const EXP1: MarginalSpec = MarginalSpec::Exponential { rate: 1.0 };

    fn brute_force(points: &[f64], coefs: &[f64]) -> f64 {
        let mut total = 0.0;
        for (s, a) in points.iter().zip(coefs) {
            for (t, b) in points.iter().zip(coefs) {
                total += a * b * (s.min(*t) - s * t);
            }
        }
        total
    }

    #[test]
    fn quadratic_form_matches_double_sum() {
        let points = [0.05, 0.2, 0.2, 0.5, 0.77, 0.99];
        let coefs = [1.0, -0.5, 2.0, 0.0, 3.5, -1.25];
        let fast = bridge_quadratic_form(&points, &coefs);
        assert!((fast - brute_force(&points, &coefs)).abs() < 1e-13);
    }

    #[test]
    fn graded_nodes_cover_range_and_breakpoints() {
        let nodes = graded_nodes(100, 1e-6, &[0.9, 0.3]);
        assert_eq!(nodes[0], 1e-6);
        assert_eq!(*nodes.last().unwrap(), 1.0 - 1e-6);
        assert!(nodes.contains(&0.9) && nodes.contains(&0.3));
        assert!(nodes.windows(2).all(|w| w[0] < w[1]));
    }

    #[test]
    fn sigma1_examples() {
        let c1 = WeightSpec::constant(1.0).unwrap();
        let i95 = WeightSpec::indicator(0.95).unwrap();
        assert_eq!(sigma1_sq(|_| 0.0, &i95, 4096, 1e-4).unwrap(), 0.0);
        let v = sigma1_sq(|_| 0.75, &c1, 4096, 1e-7).unwrap();
        assert!((v - 0.75).abs() < 1e-6);
        let v = sigma1_sq(|_| 0.75, &i95, 4096, 1e-7).unwrap();
        assert!((v - 0.0375).abs() < 1e-6, "{v}");
    }

    #[test]
    fn sigma2_examples() {
        let c1 = WeightSpec::constant(1.0).unwrap();
        let i90 = WeightSpec::indicator(0.9).unwrap();
        assert_eq!(sigma2_sq(|_| 3.0, &i90, 4096, 1e-4).unwrap(), 0.0);
        let v = sigma2_sq(|t| EXP1.quantile_unchecked(t), &i90, 4096, 1e-7).unwrap();
        assert!((v - 0.19).abs() / 0.19 < 1e-3, "{v}");
        let v = sigma2_sq(|t| t, &c1, 4096, 1e-7).unwrap();
        assert!((v - 1.0 / 12.0).abs() * 12.0 < 1e-3, "{v}");
    }

    #[test]
    fn grid_arguments_are_checked() {
        let c1 = WeightSpec::constant(1.0).unwrap();
        assert!(sigma2_sq(|t| t, &c1, 50, 1e-4).is_err());
        assert!(sigma2_sq(|t| t, &c1, 200, 0.02).is_err());
        assert!(sigma2_sq(|_| f64::NAN, &c1, 200, 1e-3).is_err());
    }

    #[test]
    fn oracle_examples() {
        let i90 = WeightSpec::indicator(0.9).unwrap();
        let r = sigma_sq_oracle(
            &ModelSpec::SelfRisk { marginal: EXP1 },
            &i90,
            DEFAULT_GRID_SIZE,
            DEFAULT_TRUNCATION,
        )
        .unwrap();
        assert_eq!(r.sigma1_sq, Some(0.0));
        assert!((r.sigma_sq - 19.0).abs() / 19.0 < 1e-3, "{r:?}");

        let c1 = WeightSpec::constant(1.0).unwrap();
        let ind = ModelSpec::Independent {
            marginal_x: MarginalSpec::Exponential { rate: 2.0 },
            marginal_y: MarginalSpec::Normal {
                mu: 0.0,
                sigma: 3.0,
            },
        };
        let r = sigma_sq_oracle(&ind, &c1, DEFAULT_GRID_SIZE, DEFAULT_TRUNCATION).unwrap();
        assert_eq!(r.sigma2_sq, Some(0.0));
        assert!((r.sigma_sq - 0.25).abs() < 1e-6, "{r:?}");

        let bvn = ModelSpec::BivariateGaussian {
            mu_x: 0.0,
            mu_y: 0.0,
            sigma_x: 1.0,
            sigma_y: 1.0,
            rho: 0.0,
        };
        let r = sigma_sq_oracle(&bvn, &c1, DEFAULT_GRID_SIZE, DEFAULT_TRUNCATION).unwrap();
        assert!((r.sigma_sq - 1.0).abs() < 1e-6, "{r:?}");
    }

    #[test]
    fn plugin_curves_need_five_points() {
        let s = PairedSample::self_paired(vec![1.0, 2.0, 3.0, 4.0]).unwrap();
        assert!(matches!(
            plugin_curves(&s, None),
            Err(Error::SampleTooSmall { .. })
        ));
    }

    #[test]
    fn plugin_curve_window_shrinks_at_ends() {
        let xs: Vec<f64> = (1..=9).map(f64::from).collect();
        let s = PairedSample::self_paired(xs).unwrap();
        let c = plugin_curves(&s, Some(2)).unwrap();
        assert_eq!(c.g_hat[0], 1.0);
        assert_eq!(c.g_hat[1], 2.0);
        assert_eq!(c.g_hat[4], 5.0);
        assert_eq!(c.v2_hat[0], 0.0);
        // ranks 3..7 → var of {3,4,5,6,7} = 2.5
        assert!((c.v2_hat[4] - 2.5).abs() < 1e-12);
        assert_eq!(c.window, 2);
    }

    #[test]
    fn constant_sample_has_zero_variance() {
        let s = PairedSample::new(vec![2.0; 200], (0..200).map(f64::from).collect()).unwrap();
        let w = WeightSpec::indicator(0.5).unwrap();
        assert_eq!(sigma_sq_plugin(&s, &w).unwrap().sigma_sq, 0.0);
        assert_eq!(bootstrap_variance(&s, &w, 100, 1).unwrap().sigma_sq, 0.0);
        let r = confidence_interval(&s, &w, 0.95, IntervalMethod::PlugIn, 0).unwrap();
        let ci = r.ci.unwrap();
        assert_eq!((ci.lower, ci.upper), (2.0, 2.0));
    }

    #[test]
    fn single_bootstrap_replicate_is_flagged() {
        let s = PairedSample::self_paired((0..50).map(f64::from).collect()).unwrap();
        let r = bootstrap_variance(&s, &WeightSpec::constant(1.0).unwrap(), 1, 9).unwrap();
        assert_eq!(r.sigma_sq, 0.0);
        assert_eq!(r.diagnostics.get("degenerate"), Some(&1.0));
        assert!(bootstrap_variance(&s, &WeightSpec::constant(1.0).unwrap(), 0, 9).is_err());
    }

    #[test]
    fn bootstrap_is_deterministic() {
        let s = ModelSpec::SelfRisk { marginal: EXP1 }
            .sample_pairs(500, 3)
            .unwrap();
        let w = WeightSpec::indicator(0.8).unwrap();
        assert_eq!(
            bootstrap_variance(&s, &w, 200, 5).unwrap(),
            bootstrap_variance(&s, &w, 200, 5).unwrap()
        );
    }

    #[test]
    fn interval_preconditions() {
        let s = PairedSample::self_paired((0..20).map(f64::from).collect()).unwrap();
        let w = WeightSpec::constant(1.0).unwrap();
        assert!(matches!(
            confidence_interval(&s, &w, 0.95, IntervalMethod::PlugIn, 0),
            Err(Error::SampleTooSmall { .. })
        ));
        let s = PairedSample::self_paired((0..40).map(f64::from).collect()).unwrap();
        assert!(confidence_interval(&s, &w, 1.0, IntervalMethod::PlugIn, 0).is_err());
    }

    #[test]
    fn intervals_nest_across_levels() {
        let s = ModelSpec::SelfRisk { marginal: EXP1 }
            .sample_pairs(2000, 8)
            .unwrap();
        let w = WeightSpec::indicator(0.9).unwrap();
        for method in [
            IntervalMethod::PlugIn,
            IntervalMethod::Bootstrap { replicates: 200 },
        ] {
            let narrow = confidence_interval(&s, &w, 0.5, method, 4)
                .unwrap()
                .ci
                .unwrap();
            let wide = confidence_interval(&s, &w, 0.99, method, 4)
                .unwrap()
                .ci
                .unwrap();
            assert!(wide.lower < narrow.lower && narrow.upper < wide.upper);
        }
    }
}
