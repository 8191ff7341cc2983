//! Seeded checks of the plug-in and bootstrap variance estimators against
//! model oracles.

use walloc::asymptotics::{
    bootstrap_variance, default_window, plugin_curves, sigma_sq_oracle, sigma_sq_plugin,
    DEFAULT_GRID_SIZE, DEFAULT_TRUNCATION,
};
use walloc::{MarginalSpec, ModelSpec, WeightSpec};

const EXP1: MarginalSpec = MarginalSpec::Exponential { rate: 1.0 };

fn sample_variance(xs: &[f64]) -> f64 {
    let n = xs.len() as f64;
    let mean = xs.iter().sum::<f64>() / n;
    xs.iter().map(|x| (x - mean).powi(2)).sum::<f64>() / (n - 1.0)
}

#[test]
fn oracle_matches_closed_form_across_levels() {
    for p in [0.5, 0.75, 0.9, 0.95] {
        let r = sigma_sq_oracle(
            &ModelSpec::SelfRisk { marginal: EXP1 },
            &WeightSpec::indicator(p).unwrap(),
            DEFAULT_GRID_SIZE,
            DEFAULT_TRUNCATION,
        )
        .unwrap();
        let exact = (1.0 + p) / (1.0 - p);
        assert!(
            (r.sigma_sq - exact).abs() / exact < 1e-3,
            "p = {p}: {}",
            r.sigma_sq
        );
    }
}

#[test]
fn plugin_self_risk_near_oracle() {
    let s = ModelSpec::SelfRisk { marginal: EXP1 }
        .sample_pairs(100_000, 11)
        .unwrap();
    let r = sigma_sq_plugin(&s, &WeightSpec::indicator(0.9).unwrap()).unwrap();
    assert!((r.sigma_sq - 19.0).abs() <= 2.0, "{}", r.sigma_sq);
}

#[test]
fn plugin_independent_constant_is_sample_variance() {
    let model = ModelSpec::Independent {
        marginal_x: EXP1,
        marginal_y: MarginalSpec::Uniform01,
    };
    let s = model.sample_pairs(20_000, 12).unwrap();
    let r = sigma_sq_plugin(&s, &WeightSpec::constant(1.0).unwrap()).unwrap();
    let v = sample_variance(s.xs());
    assert!((r.sigma_sq - v).abs() <= 0.1 * v, "{} vs {v}", r.sigma_sq);
}

#[test]
fn plugin_regression_flat_for_independent_data() {
    let n = 100_000;
    let model = ModelSpec::Independent {
        marginal_x: EXP1,
        marginal_y: MarginalSpec::Uniform01,
    };
    let s = model.sample_pairs(n, 13).unwrap();
    let c = plugin_curves(&s, None).unwrap();
    let m = c.window;
    let mean = s.xs().iter().sum::<f64>() / n as f64;
    let sd = sample_variance(s.xs()).sqrt();
    let limit = 4.0 * sd / ((2 * m) as f64).sqrt();
    // interior: ranks with the full window on both sides
    let worst = c.g_hat[m..n - m]
        .iter()
        .map(|g| (g - mean).abs())
        .fold(0.0, f64::max);
    assert!(worst < limit, "{worst} vs {limit}");
}

#[test]
fn plugin_regression_tracks_bivariate_gaussian() {
    let n = 100_000;
    let model = ModelSpec::BivariateGaussian {
        mu_x: 0.0,
        mu_y: 0.0,
        sigma_x: 1.0,
        sigma_y: 1.0,
        rho: 0.5,
    };
    let s = model.sample_pairs(n, 14).unwrap();
    let c = plugin_curves(&s, None).unwrap();
    let k = c.grid.partition_point(|t| *t < 0.975);
    let oracle = model.regression_curve(0.975).unwrap();
    assert!((oracle - 0.98).abs() < 1e-3);
    assert!((c.g_hat[k] - 0.98).abs() < 0.1, "{}", c.g_hat[k]);
}

#[test]
fn plugin_conditional_variance_vanishes_for_self_risk() {
    let mut means = Vec::new();
    for n in [1_000, 10_000, 100_000] {
        let s = ModelSpec::SelfRisk { marginal: EXP1 }
            .sample_pairs(n, 15)
            .unwrap();
        let c = plugin_curves(&s, None).unwrap();
        let m = default_window(n);
        let interior = &c.v2_hat[m..n - m];
        means.push(interior.iter().sum::<f64>() / interior.len() as f64);
    }
    assert!(means[0] > means[1] && means[1] > means[2], "{means:?}");
}

#[test]
fn bootstrap_near_oracle() {
    let s = ModelSpec::SelfRisk { marginal: EXP1 }
        .sample_pairs(10_000, 16)
        .unwrap();
    let r = bootstrap_variance(&s, &WeightSpec::indicator(0.9).unwrap(), 1000, 17).unwrap();
    assert!((r.sigma_sq - 19.0).abs() <= 3.0, "{}", r.sigma_sq);
}
