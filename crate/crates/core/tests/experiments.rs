use walloc::asymptotics::VarianceMethod;
use walloc::montecarlo::{run_consistency, run_coverage, run_normality};
use walloc::{ExperimentConfig, ExperimentKind, MarginalSpec, ModelSpec, Variant, WeightSpec};

const EXP1: MarginalSpec = MarginalSpec::Exponential { rate: 1.0 };

fn config(
    kind: ExperimentKind,
    model: ModelSpec,
    w: WeightSpec,
    sizes: Vec<usize>,
    reps: usize,
    seed: u64,
) -> ExperimentConfig {
    ExperimentConfig::new(kind, model, w, Variant::Simple, sizes, reps, seed)
}

#[test]
fn bivariate_gaussian_normality() {
    let model = ModelSpec::BivariateGaussian {
        mu_x: 0.0,
        mu_y: 0.0,
        sigma_x: 1.0,
        sigma_y: 1.0,
        rho: 0.5,
    };
    let cfg = config(
        ExperimentKind::Normality,
        model,
        WeightSpec::indicator(0.95).unwrap(),
        vec![10_000],
        1000,
        31,
    );
    let ks = run_normality(&cfg).unwrap().rows[0].ks_statistic.unwrap();
    assert!(ks < 0.06, "{ks}");
}

#[test]
fn normality_conclusion_survives_seed_changes() {
    let passes = (0..5u64)
        .filter(|&seed| {
            let cfg = config(
                ExperimentKind::Normality,
                ModelSpec::SelfRisk { marginal: EXP1 },
                WeightSpec::indicator(0.9).unwrap(),
                vec![10_000],
                1000,
                1000 + seed,
            );
            run_normality(&cfg).unwrap().rows[0].ks_statistic.unwrap() < 0.055
        })
        .count();
    assert!(passes >= 4, "{passes} of 5");
}

#[test]
fn premium_is_asymptotically_normal() {
    let marginal = MarginalSpec::LogNormal {
        mu: 0.0,
        sigma: 0.5,
    };
    let passes = (41..46u64)
        .filter(|&seed| {
            let mut cfg = config(
                ExperimentKind::Normality,
                ModelSpec::Independent {
                    marginal_x: marginal,
                    marginal_y: MarginalSpec::Uniform01,
                },
                WeightSpec::indicator(0.8).unwrap(),
                vec![5_000],
                1000,
                seed,
            );
            cfg.estimator = Variant::Premium;
            run_normality(&cfg).unwrap().rows[0].ks_statistic.unwrap() < 0.055
        })
        .count();
    assert!(passes >= 4, "{passes} of 5");
}

#[test]
fn unbounded_weight_bias_fades_on_root_n_scale() {
    // Point-evaluated PH(0.8) weights miss part of the mass near t = 1, so
    // the premium's bias is visible at moderate n but shrinks relative to
    // its standard error as n grows.
    let cfg = ExperimentConfig::new(
        ExperimentKind::Consistency,
        ModelSpec::SelfRisk { marginal: EXP1 },
        WeightSpec::proportional_hazards(0.8).unwrap(),
        Variant::Premium,
        vec![1_000, 64_000],
        200,
        42,
    );
    let r = run_consistency(&cfg).unwrap();
    let z: Vec<f64> = r
        .rows
        .iter()
        .map(|row| row.bias / (row.scaled_variance / row.n as f64).sqrt())
        .collect();
    assert!(z[1].abs() < z[0].abs(), "{z:?}");
}

#[test]
fn bootstrap_coverage() {
    let mut cfg = config(
        ExperimentKind::Coverage,
        ModelSpec::SelfRisk { marginal: EXP1 },
        WeightSpec::indicator(0.9).unwrap(),
        vec![2_000],
        300,
        51,
    );
    cfg.variance_method = VarianceMethod::Bootstrap;
    cfg.bootstrap_replicates = 200;
    let c = run_coverage(&cfg).unwrap().rows[0].coverage.unwrap();
    // binomial 3σ band around 0.95 for 300 trials, plus bootstrap noise
    assert!((0.89..=0.99).contains(&c), "{c}");
}

#[test]
fn copula_allocation_is_consistent() {
    let model = ModelSpec::GaussianCopula {
        marginal_x: EXP1,
        marginal_y: MarginalSpec::LogNormal {
            mu: 0.0,
            sigma: 1.0,
        },
        rho: 0.7,
    };
    let cfg = config(
        ExperimentKind::Consistency,
        model,
        WeightSpec::indicator(0.9).unwrap(),
        vec![1000, 16_000],
        300,
        61,
    );
    let r = run_consistency(&cfg).unwrap();
    let (a, b) = (&r.rows[0], &r.rows[1]);
    assert!(b.bias.abs() < 0.02 * r.true_value, "{b:?}");
    // √n rate: 16× the sample, a quarter of the error
    let ratio = a.rmse / b.rmse;
    assert!((3.2..=4.8).contains(&ratio), "{ratio}");
}
