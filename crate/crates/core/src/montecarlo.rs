//! Seeded Monte Carlo experiments: consistency (bias and RMSE against the
//! oracle), asymptotic normality (KS distance of standardized estimates) and
//! confidence-interval coverage.
//!
//! Replication `r` at sample size `n` draws from its own stream
//! `replication_seed(master_seed, n, r)`, so results do not depend on
//! scheduling. Replications run in parallel and are folded in index order.

use serde::{Deserialize, Serialize};

use crate::asymptotics::{
    bootstrap_variance, sigma_sq_oracle, sigma_sq_plugin, VarianceMethod, DEFAULT_GRID_SIZE,
    DEFAULT_TRUNCATION,
};
use crate::distributions::{true_premium, ModelSpec};
use crate::empirical::{PairedSample, Variant};
use crate::error::{Error, Result};
use crate::normal;
use crate::rng::{derive_seed, replication_seed};
use crate::sum::{exact_mean, ExactSum};
use crate::weights::WeightSpec;
use rayon::prelude::*;

/// Fraction of failed replications above which an experiment is abandoned.
pub const MAX_FAILURE_FRACTION: f64 = 0.01;

const CONVERGENCE_NOTE: &str = "Monte Carlo checks convergence in probability and in law only; \
     almost-sure statements cannot be distinguished from these.";

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum ExperimentKind {
    #[default]
    Consistency,
    Normality,
    Coverage,
}

fn default_ci_level() -> f64 {
    0.95
}
fn default_variance_method() -> VarianceMethod {
    VarianceMethod::Oracle
}
fn default_grid_size() -> usize {
    DEFAULT_GRID_SIZE
}
fn default_truncation() -> f64 {
    DEFAULT_TRUNCATION
}
fn default_bootstrap_replicates() -> usize {
    200
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ExperimentConfig {
    #[serde(default)]
    pub experiment: ExperimentKind,
    pub model: ModelSpec,
    pub weight: WeightSpec,
    pub estimator: Variant,
    pub sample_sizes: Vec<usize>,
    pub replications: usize,
    pub master_seed: u64,
    #[serde(default = "default_ci_level")]
    pub ci_level: f64,
    #[serde(default = "default_variance_method")]
    pub variance_method: VarianceMethod,
    #[serde(default)]
    pub output_path: String,
    #[serde(default = "default_grid_size")]
    pub grid_size: usize,
    #[serde(default = "default_truncation")]
    pub truncation: f64,
    #[serde(default = "default_bootstrap_replicates")]
    pub bootstrap_replicates: usize,
}

impl ExperimentConfig {
    /// A config with the defaults for every optional field.
    pub fn new(
        experiment: ExperimentKind,
        model: ModelSpec,
        weight: WeightSpec,
        estimator: Variant,
        sample_sizes: Vec<usize>,
        replications: usize,
        master_seed: u64,
    ) -> Self {
        Self {
            experiment,
            model,
            weight,
            estimator,
            sample_sizes,
            replications,
            master_seed,
            ci_level: default_ci_level(),
            variance_method: default_variance_method(),
            output_path: String::new(),
            grid_size: default_grid_size(),
            truncation: default_truncation(),
            bootstrap_replicates: default_bootstrap_replicates(),
        }
    }

    pub fn validate(&self) -> Result<()> {
        self.model.validate()?;
        if self.replications == 0 {
            return Err(Error::InvalidSpec("replications must be at least 1".into()));
        }
        if self.sample_sizes.is_empty() {
            return Err(Error::InvalidSpec("sample_sizes is empty".into()));
        }
        if self.sample_sizes[0] == 0 {
            return Err(Error::InvalidSpec("sample sizes must be positive".into()));
        }
        if !self.sample_sizes.windows(2).all(|p| p[0] < p[1]) {
            return Err(Error::InvalidSpec(
                "sample_sizes must be strictly increasing".into(),
            ));
        }
        if !(self.ci_level > 0.0 && self.ci_level < 1.0) {
            return Err(Error::domain("ci_level", self.ci_level, "(0, 1)"));
        }
        Ok(())
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ExperimentRow {
    pub n: usize,
    /// Replications that produced an estimate.
    pub completed: usize,
    pub failures: usize,
    pub mean_estimate: f64,
    pub bias: f64,
    pub rmse: f64,
    /// `n` times the population variance of the estimates.
    pub scaled_variance: f64,
    pub ks_statistic: Option<f64>,
    pub coverage: Option<f64>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ExperimentResult {
    pub experiment: ExperimentKind,
    pub estimator: Variant,
    pub master_seed: u64,
    pub replications: usize,
    pub true_value: f64,
    pub oracle_sigma_sq: Option<f64>,
    pub variance_method: Option<VarianceMethod>,
    pub ci_level: Option<f64>,
    pub rows: Vec<ExperimentRow>,
    pub note: String,
}

impl ExperimentResult {
    /// Flat CSV with header `n,mean,bias,rmse,scaled_var,ks,coverage`;
    /// missing statistics are empty fields.
    pub fn to_csv(&self) -> String {
        let opt = |v: Option<f64>| v.map(|x| x.to_string()).unwrap_or_default();
        let mut out = String::from("n,mean,bias,rmse,scaled_var,ks,coverage\n");
        for r in &self.rows {
            out.push_str(&format!(
                "{},{},{},{},{},{},{}\n",
                r.n,
                r.mean_estimate,
                r.bias,
                r.rmse,
                r.scaled_variance,
                opt(r.ks_statistic),
                opt(r.coverage)
            ));
        }
        out
    }
}

/// Exact Kolmogorov–Smirnov distance between the empirical CDF of `zs` and Φ.
pub fn ks_statistic(zs: &[f64]) -> Result<f64> {
    if zs.is_empty() {
        return Err(Error::EmptySample);
    }
    if let Some(&z) = zs.iter().find(|z| z.is_nan()) {
        return Err(Error::domain("z", z, "not NaN"));
    }
    let mut sorted = zs.to_vec();
    sorted.sort_by(f64::total_cmp);
    let n = sorted.len() as f64;
    let mut d: f64 = 0.0;
    for (i, z) in sorted.iter().enumerate() {
        let phi = normal::cdf(*z);
        d = d.max((i + 1) as f64 / n - phi).max(phi - i as f64 / n);
    }
    Ok(d)
}

/// Oracle value of the estimated functional: `π_w` of the `x` marginal for
/// the premium, `Π_w` of the model otherwise.
pub fn target_value(model: &ModelSpec, w: &WeightSpec, estimator: Variant) -> Result<f64> {
    match estimator {
        Variant::Premium => true_premium(&model.marginal_x(), w),
        Variant::Ratio | Variant::Simple => model.true_allocation(w),
    }
}

/// Oracle `σ²` of the estimator. The premium is the allocation of a risk to
/// itself, so it uses the self-risk model of the `x` marginal.
pub fn target_sigma_sq(cfg: &ExperimentConfig) -> Result<f64> {
    let model = match cfg.estimator {
        Variant::Premium => ModelSpec::SelfRisk {
            marginal: cfg.model.marginal_x(),
        },
        _ => cfg.model,
    };
    Ok(sigma_sq_oracle(&model, &cfg.weight, cfg.grid_size, cfg.truncation)?.sigma_sq)
}

struct Replicate {
    estimate: f64,
    covered: Option<bool>,
}

fn replicate_sample(cfg: &ExperimentConfig, n: usize, seed: u64) -> Result<PairedSample> {
    let s = cfg.model.sample_pairs(n, seed)?;
    match cfg.estimator {
        Variant::Premium => PairedSample::self_paired(s.xs().to_vec()),
        _ => Ok(s),
    }
}

fn run_replicate(
    cfg: &ExperimentConfig,
    n: usize,
    r: usize,
    truth: f64,
    oracle_sigma_sq: Option<f64>,
) -> Result<Replicate> {
    let seed = replication_seed(cfg.master_seed, n, r);
    let sample = replicate_sample(cfg, n, seed)?;
    let estimate = cfg.estimator.estimate(&sample, &cfg.weight)?;
    let covered = if cfg.experiment == ExperimentKind::Coverage {
        let sigma_sq = match cfg.variance_method {
            VarianceMethod::Oracle => oracle_sigma_sq.expect("oracle variance computed up front"),
            VarianceMethod::PlugIn => sigma_sq_plugin(&sample, &cfg.weight)?.sigma_sq,
            VarianceMethod::Bootstrap => {
                bootstrap_variance(
                    &sample,
                    &cfg.weight,
                    cfg.bootstrap_replicates,
                    derive_seed(seed, 1),
                )?
                .sigma_sq
            }
        };
        let half = normal::critical_value(cfg.ci_level) * (sigma_sq / n as f64).sqrt();
        Some((estimate - truth).abs() <= half)
    } else {
        None
    };
    Ok(Replicate { estimate, covered })
}

fn summarize(
    cfg: &ExperimentConfig,
    n: usize,
    truth: f64,
    oracle_sigma_sq: Option<f64>,
) -> Result<ExperimentRow> {
    let outcomes: Vec<Result<Replicate>> = (0..cfg.replications)
        .into_par_iter()
        .map(|r| run_replicate(cfg, n, r, truth, oracle_sigma_sq))
        .collect();
    let mut reps = Vec::with_capacity(outcomes.len());
    let mut failures = 0usize;
    for outcome in outcomes {
        match outcome {
            Ok(rep) => reps.push(rep),
            // Input errors are the same for every replication; only
            // sample-dependent failures are counted.
            Err(e @ (Error::InvalidSpec(_) | Error::Domain { .. } | Error::Unsupported(_))) => {
                return Err(e)
            }
            Err(_) => failures += 1,
        }
    }
    if failures as f64 > MAX_FAILURE_FRACTION * cfg.replications as f64 {
        return Err(Error::ExperimentAborted {
            n,
            failures,
            replications: cfg.replications,
        });
    }

    let estimates: Vec<f64> = reps.iter().map(|r| r.estimate).collect();
    let m = estimates.len() as f64;
    let mean = exact_mean(&estimates);
    let ss: ExactSum = estimates.iter().map(|e| (e - mean) * (e - mean)).collect();
    let se: ExactSum = estimates
        .iter()
        .map(|e| (e - truth) * (e - truth))
        .collect();
    let variance = ss.value() / m;

    let ks_statistic = if cfg.experiment == ExperimentKind::Normality {
        let sigma = oracle_sigma_sq
            .expect("oracle variance computed up front")
            .sqrt();
        let root_n = (n as f64).sqrt();
        let zs: Vec<f64> = estimates
            .iter()
            .map(|e| root_n * (e - truth) / sigma)
            .collect();
        Some(ks_statistic(&zs)?)
    } else {
        None
    };
    let coverage = (cfg.experiment == ExperimentKind::Coverage)
        .then(|| reps.iter().filter(|r| r.covered == Some(true)).count() as f64 / m);

    Ok(ExperimentRow {
        n,
        completed: reps.len(),
        failures,
        mean_estimate: mean,
        bias: mean - truth,
        rmse: (se.value() / m).sqrt(),
        scaled_variance: n as f64 * variance,
        ks_statistic,
        coverage,
    })
}

fn run(cfg: &ExperimentConfig, kind: ExperimentKind) -> Result<ExperimentResult> {
    cfg.validate()?;
    let cfg = ExperimentConfig {
        experiment: kind,
        ..cfg.clone()
    };
    let truth = target_value(&cfg.model, &cfg.weight, cfg.estimator)?;
    let oracle_sigma_sq = match kind {
        ExperimentKind::Normality => {
            let s2 = target_sigma_sq(&cfg)?;
            if s2 <= 0.0 {
                return Err(Error::ZeroVariance(
                    "oracle σ² is zero, standardized estimates are undefined".into(),
                ));
            }
            Some(s2)
        }
        ExperimentKind::Coverage if cfg.variance_method == VarianceMethod::Oracle => {
            Some(target_sigma_sq(&cfg)?)
        }
        // Reported when available, not required.
        _ => target_sigma_sq(&cfg).ok(),
    };
    let rows = cfg
        .sample_sizes
        .iter()
        .map(|&n| summarize(&cfg, n, truth, oracle_sigma_sq))
        .collect::<Result<Vec<_>>>()?;
    let coverage = kind == ExperimentKind::Coverage;
    Ok(ExperimentResult {
        experiment: kind,
        estimator: cfg.estimator,
        master_seed: cfg.master_seed,
        replications: cfg.replications,
        true_value: truth,
        oracle_sigma_sq,
        variance_method: coverage.then_some(cfg.variance_method),
        ci_level: coverage.then_some(cfg.ci_level),
        rows,
        note: CONVERGENCE_NOTE.into(),
    })
}

/// Bias and RMSE of the estimator against the oracle value at each `n`.
pub fn run_consistency(cfg: &ExperimentConfig) -> Result<ExperimentResult> {
    run(cfg, ExperimentKind::Consistency)
}

/// KS distance of `√n (estimate − truth) / σ` from the standard normal.
pub fn run_normality(cfg: &ExperimentConfig) -> Result<ExperimentResult> {
    run(cfg, ExperimentKind::Normality)
}

/// Fraction of intervals `estimate ± z σ̂/√n` containing the oracle value.
pub fn run_coverage(cfg: &ExperimentConfig) -> Result<ExperimentResult> {
    run(cfg, ExperimentKind::Coverage)
}

/// Runs the experiment named in `cfg.experiment`.
pub fn run_experiment(cfg: &ExperimentConfig) -> Result<ExperimentResult> {
    run(cfg, cfg.experiment)
}
