//! Empirical estimators of the weighted allocation and premium.
//!
//! Three variants share the same ingredients:
//!
//! * `Ratio`: `Σ X_k w(F̂_Y(Y_k)) / Σ w(F̂_Y(Y_k))`, with the modified
//!   empirical CDF `F̂_Y(y) = #{Y_j ≤ y} / (n + 1)`;
//! * `Simple`: `Δ̂_w / ∫w`, where `Δ̂_w = n⁻¹ Σ X_{[k:n]} w(k/(n+1))` runs
//!   over the concomitants of the order statistics of `Y`;
//! * `Premium`: the L-statistic obtained from `Simple` when `Y = X`.
//!
//! All weighted sums are accumulated exactly and rounded once.

use std::collections::BTreeMap;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::sum::ExactSum;
use crate::weights::WeightSpec;

#[derive(Debug, Clone, PartialEq)]
pub struct PairedSample {
    xs: Vec<f64>,
    ys: Vec<f64>,
}

impl PairedSample {
    pub fn new(xs: Vec<f64>, ys: Vec<f64>) -> Result<Self> {
        if xs.len() != ys.len() {
            return Err(Error::InvalidSpec(format!(
                "x and y columns differ in length ({} vs {})",
                xs.len(),
                ys.len()
            )));
        }
        if xs.is_empty() {
            return Err(Error::EmptySample);
        }
        if let Some(v) = xs.iter().chain(&ys).find(|v| !v.is_finite()) {
            return Err(Error::InvalidSpec(format!("non-finite observation {v}")));
        }
        Ok(Self { xs, ys })
    }

    /// The pairing `(x_k, x_k)` used for premiums.
    pub fn self_paired(xs: Vec<f64>) -> Result<Self> {
        let ys = xs.clone();
        Self::new(xs, ys)
    }

    pub fn len(&self) -> usize {
        self.xs.len()
    }

    pub fn is_empty(&self) -> bool {
        self.xs.is_empty()
    }

    pub fn xs(&self) -> &[f64] {
        &self.xs
    }

    pub fn ys(&self) -> &[f64] {
        &self.ys
    }

    /// Pairs drawn at the given indices (with repetition allowed).
    pub fn resample(&self, indices: &[usize]) -> Result<Self> {
        Self::new(
            indices.iter().map(|&i| self.xs[i]).collect(),
            indices.iter().map(|&i| self.ys[i]).collect(),
        )
    }
}

/// Sample sorted by `y`, each `x` kept with its own `y`.
#[derive(Debug, Clone, PartialEq)]
pub struct ConcomitantView {
    pub y_sorted: Vec<f64>,
    pub x_concomitant: Vec<f64>,
    /// `permutation[k]` is the original index of the k-th smallest `y`.
    pub permutation: Vec<usize>,
}

/// Total order for ranking: `-0.0` and `0.0` are the same value.
fn rank_cmp(a: f64, b: f64) -> std::cmp::Ordering {
    (a + 0.0).total_cmp(&(b + 0.0))
}

/// Stable sort by `y`; ties keep their original order.
pub fn concomitant_order(s: &PairedSample) -> ConcomitantView {
    let mut permutation: Vec<usize> = (0..s.len()).collect();
    permutation.sort_by(|&a, &b| rank_cmp(s.ys[a], s.ys[b]));
    ConcomitantView {
        y_sorted: permutation.iter().map(|&i| s.ys[i]).collect(),
        x_concomitant: permutation.iter().map(|&i| s.xs[i]).collect(),
        permutation,
    }
}

/// `F̂_Y(y_k) = #{j : y_j ≤ y_k} / (n + 1)` for each input point, in input
/// order. Tied points share the largest rank of their group.
pub fn empirical_cdf_values(ys: &[f64]) -> Vec<f64> {
    let n = ys.len();
    let mut sorted = ys.to_vec();
    sorted.sort_by(|a, b| rank_cmp(*a, *b));
    let denom = (n + 1) as f64;
    ys.iter()
        .map(|y| {
            let count = sorted.partition_point(|v| rank_cmp(*v, *y).is_le());
            count as f64 / denom
        })
        .collect()
}

/// Max-rank `F̂_Y` values aligned with the sorted order of a view.
fn sorted_cdf_values(y_sorted: &[f64]) -> Vec<f64> {
    let n = y_sorted.len();
    let denom = (n + 1) as f64;
    let mut out = vec![0.0; n];
    let mut start = 0;
    while start < n {
        let mut end = start + 1;
        while end < n && y_sorted[end] == y_sorted[start] {
            end += 1;
        }
        out[start..end].fill(end as f64 / denom);
        start = end;
    }
    out
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Variant {
    Ratio,
    Simple,
    Premium,
}

impl Variant {
    /// Point estimate for this variant. `Premium` uses only the `x` column.
    pub fn estimate(self, s: &PairedSample, w: &WeightSpec) -> Result<f64> {
        match self {
            Variant::Ratio => ratio_value(s, w),
            Variant::Simple => simple_value(s, w, w.integral()?),
            Variant::Premium => premium_value(s.xs(), w, w.integral()?),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ConfidenceInterval {
    pub lower: f64,
    pub upper: f64,
    pub level: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct EstimateReport {
    pub estimate: f64,
    pub variant: Variant,
    pub n: usize,
    pub weight: WeightSpec,
    pub variance_estimate: Option<f64>,
    pub ci: Option<ConfidenceInterval>,
    pub diagnostics: BTreeMap<String, f64>,
}

impl EstimateReport {
    fn new(estimate: f64, variant: Variant, n: usize, weight: &WeightSpec) -> Self {
        Self {
            estimate,
            variant,
            n,
            weight: weight.clone(),
            variance_estimate: None,
            ci: None,
            diagnostics: BTreeMap::new(),
        }
    }
}

fn ratio_sums(s: &PairedSample, w: &WeightSpec) -> (f64, f64) {
    let view = concomitant_order(s);
    let cdf = sorted_cdf_values(&view.y_sorted);
    let mut numerator = ExactSum::new();
    let mut denominator = ExactSum::new();
    for (x, t) in view.x_concomitant.iter().zip(&cdf) {
        let wt = w.eval_unchecked(*t);
        numerator.add(x * wt);
        denominator.add(wt);
    }
    (numerator.value(), denominator.value())
}

fn ratio_value(s: &PairedSample, w: &WeightSpec) -> Result<f64> {
    let (num, den) = ratio_sums(s, w);
    if den == 0.0 {
        return Err(Error::ZeroDenominator(
            "weights vanish at every empirical CDF value".into(),
        ));
    }
    Ok(num / den)
}

/// Ratio estimator `Π̃_w` (the premium version when `xs == ys`).
pub fn estimate_ratio(s: &PairedSample, w: &WeightSpec) -> Result<EstimateReport> {
    let (num, den) = ratio_sums(s, w);
    if den == 0.0 {
        return Err(Error::ZeroDenominator(
            "weights vanish at every empirical CDF value".into(),
        ));
    }
    let mut report = EstimateReport::new(num / den, Variant::Ratio, s.len(), w);
    report.diagnostics.insert("weight_sum".into(), den);
    Ok(report)
}

/// `n⁻¹ Σ_k c_k w(k/(n+1))` for values `c` already in rank order.
fn rank_weighted_mean(ranked: &[f64], w: &WeightSpec) -> f64 {
    let n = ranked.len();
    let denom = (n + 1) as f64;
    let mut acc = ExactSum::new();
    for (k, x) in ranked.iter().enumerate() {
        acc.add(x * w.eval_unchecked((k + 1) as f64 / denom));
    }
    acc.value() / n as f64
}

/// `Δ̂_w` through the concomitants.
pub fn delta_hat(s: &PairedSample, w: &WeightSpec) -> f64 {
    rank_weighted_mean(&concomitant_order(s).x_concomitant, w)
}

/// `Δ̂_w = n⁻¹ Σ X_k w(F̂_Y(Y_k))` summed in input order. Agrees with
/// [`delta_hat`] when the `y` values are distinct.
pub fn delta_hat_direct(s: &PairedSample, w: &WeightSpec) -> f64 {
    let cdf = empirical_cdf_values(s.ys());
    let acc: ExactSum = s
        .xs()
        .iter()
        .zip(&cdf)
        .map(|(x, t)| x * w.eval_unchecked(*t))
        .collect();
    acc.value() / s.len() as f64
}

fn nonzero_integral(w: &WeightSpec) -> Result<f64> {
    let integral = w.integral()?;
    if integral == 0.0 {
        return Err(Error::ZeroDenominator("weight integrates to zero".into()));
    }
    Ok(integral)
}

fn simple_value(s: &PairedSample, w: &WeightSpec, integral: f64) -> Result<f64> {
    if integral == 0.0 {
        return Err(Error::ZeroDenominator("weight integrates to zero".into()));
    }
    Ok(delta_hat(s, w) / integral)
}

fn premium_value(xs: &[f64], w: &WeightSpec, integral: f64) -> Result<f64> {
    if xs.is_empty() {
        return Err(Error::EmptySample);
    }
    if integral == 0.0 {
        return Err(Error::ZeroDenominator("weight integrates to zero".into()));
    }
    let mut sorted = xs.to_vec();
    sorted.sort_by(f64::total_cmp);
    Ok(rank_weighted_mean(&sorted, w) / integral)
}

/// Simple estimator `Π̂_w = Δ̂_w / ∫w`.
pub fn estimate_simple(s: &PairedSample, w: &WeightSpec) -> Result<EstimateReport> {
    let integral = nonzero_integral(w)?;
    let delta = delta_hat(s, w);
    let mut report = EstimateReport::new(delta / integral, Variant::Simple, s.len(), w);
    report.diagnostics.insert("delta_hat".into(), delta);
    report.diagnostics.insert("w_integral".into(), integral);
    Ok(report)
}

/// L-statistic estimator `π̂_w` of the premium of `X`.
pub fn estimate_premium(xs: &[f64], w: &WeightSpec) -> Result<EstimateReport> {
    let integral = nonzero_integral(w)?;
    let estimate = premium_value(xs, w, integral)?;
    let mut report = EstimateReport::new(estimate, Variant::Premium, xs.len(), w);
    report.diagnostics.insert("w_integral".into(), integral);
    Ok(report)
}
