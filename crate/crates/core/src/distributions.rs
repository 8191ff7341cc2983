//! Parametric joint models for the pair (X, Y): samplers, quantiles,
//! quantile-regression and conditional-variance curves, and quadrature
//! oracles for the weighted premium and the weighted allocation.

use std::sync::OnceLock;

use serde::{Deserialize, Serialize};

use crate::empirical::PairedSample;
use crate::error::{check_unit, Error, Result};
use crate::normal;
use crate::quadrature::{integrate_unit, QuadratureConfig};
use crate::rng::UniformStream;
use crate::weights::WeightSpec;

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "lowercase", deny_unknown_fields)]
pub enum MarginalSpec {
    Exponential {
        rate: f64,
    },
    Pareto {
        shape: f64,
        scale: f64,
    },
    #[serde(rename = "lognormal")]
    LogNormal {
        mu: f64,
        sigma: f64,
    },
    Uniform01,
    Normal {
        mu: f64,
        sigma: f64,
    },
}

impl MarginalSpec {
    pub fn validate(&self) -> Result<()> {
        let ok = match *self {
            MarginalSpec::Exponential { rate } => rate > 0.0 && rate.is_finite(),
            MarginalSpec::Pareto { shape, scale } => {
                shape > 0.0 && scale > 0.0 && shape.is_finite() && scale.is_finite()
            }
            MarginalSpec::LogNormal { mu, sigma } => {
                mu.is_finite() && sigma > 0.0 && sigma.is_finite()
            }
            // σ = 0 is the point mass at μ.
            MarginalSpec::Normal { mu, sigma } => {
                mu.is_finite() && sigma >= 0.0 && sigma.is_finite()
            }
            MarginalSpec::Uniform01 => true,
        };
        if ok {
            Ok(())
        } else {
            Err(Error::InvalidSpec(format!(
                "invalid marginal parameters: {self:?}"
            )))
        }
    }

    /// `F⁻¹(t)` for `t` in (0, 1).
    pub fn quantile(&self, t: f64) -> Result<f64> {
        check_unit("t", t)?;
        Ok(self.quantile_unchecked(t))
    }

    pub(crate) fn quantile_unchecked(&self, t: f64) -> f64 {
        match *self {
            MarginalSpec::Exponential { rate } => -(-t).ln_1p() / rate,
            MarginalSpec::Pareto { shape, scale } => scale * (1.0 - t).powf(-1.0 / shape),
            MarginalSpec::LogNormal { mu, sigma } => (mu + sigma * normal::quantile(t)).exp(),
            MarginalSpec::Uniform01 => t,
            MarginalSpec::Normal { mu, sigma } => mu + sigma * normal::quantile(t),
        }
    }

    pub fn mean(&self) -> Option<f64> {
        match *self {
            MarginalSpec::Exponential { rate } => Some(1.0 / rate),
            MarginalSpec::Pareto { shape, scale } => {
                (shape > 1.0).then(|| shape * scale / (shape - 1.0))
            }
            MarginalSpec::LogNormal { mu, sigma } => Some((mu + 0.5 * sigma * sigma).exp()),
            MarginalSpec::Uniform01 => Some(0.5),
            MarginalSpec::Normal { mu, .. } => Some(mu),
        }
    }

    pub fn variance(&self) -> Option<f64> {
        match *self {
            MarginalSpec::Exponential { rate } => Some(1.0 / (rate * rate)),
            MarginalSpec::Pareto { shape, scale } => (shape > 2.0)
                .then(|| scale * scale * shape / ((shape - 1.0).powi(2) * (shape - 2.0))),
            MarginalSpec::LogNormal { mu, sigma } => {
                let s2 = sigma * sigma;
                Some(s2.exp_m1() * (2.0 * mu + s2).exp())
            }
            MarginalSpec::Uniform01 => Some(1.0 / 12.0),
            MarginalSpec::Normal { sigma, .. } => Some(sigma * sigma),
        }
    }

    /// False for Pareto with shape ≤ 2 (infinite second moment): consistency
    /// results still apply, asymptotic normality does not.
    pub fn inference_safe(&self) -> bool {
        self.variance().is_some()
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", deny_unknown_fields)]
pub enum ModelSpec {
    /// `Y = X`.
    #[serde(rename = "self")]
    SelfRisk { marginal: MarginalSpec },
    #[serde(rename = "bvn", rename_all = "camelCase")]
    BivariateGaussian {
        mu_x: f64,
        mu_y: f64,
        sigma_x: f64,
        sigma_y: f64,
        rho: f64,
    },
    #[serde(rename = "copula", rename_all = "camelCase")]
    GaussianCopula {
        marginal_x: MarginalSpec,
        marginal_y: MarginalSpec,
        rho: f64,
    },
    #[serde(rename = "independent", rename_all = "camelCase")]
    Independent {
        marginal_x: MarginalSpec,
        marginal_y: MarginalSpec,
    },
}

fn check_rho(rho: f64) -> Result<()> {
    if rho > -1.0 && rho < 1.0 {
        Ok(())
    } else {
        Err(Error::InvalidSpec(format!(
            "correlation rho = {rho} outside (-1, 1)"
        )))
    }
}

impl ModelSpec {
    pub fn validate(&self) -> Result<()> {
        match *self {
            ModelSpec::SelfRisk { marginal } => marginal.validate(),
            ModelSpec::BivariateGaussian {
                mu_x,
                mu_y,
                sigma_x,
                sigma_y,
                rho,
            } => {
                MarginalSpec::Normal {
                    mu: mu_x,
                    sigma: sigma_x,
                }
                .validate()?;
                MarginalSpec::Normal {
                    mu: mu_y,
                    sigma: sigma_y,
                }
                .validate()?;
                check_rho(rho)
            }
            ModelSpec::GaussianCopula {
                marginal_x,
                marginal_y,
                rho,
            } => {
                marginal_x.validate()?;
                marginal_y.validate()?;
                check_rho(rho)
            }
            ModelSpec::Independent {
                marginal_x,
                marginal_y,
            } => {
                marginal_x.validate()?;
                marginal_y.validate()
            }
        }
    }

    pub fn marginal_x(&self) -> MarginalSpec {
        match *self {
            ModelSpec::SelfRisk { marginal } => marginal,
            ModelSpec::BivariateGaussian { mu_x, sigma_x, .. } => MarginalSpec::Normal {
                mu: mu_x,
                sigma: sigma_x,
            },
            ModelSpec::GaussianCopula { marginal_x, .. }
            | ModelSpec::Independent { marginal_x, .. } => marginal_x,
        }
    }

    pub fn marginal_y(&self) -> MarginalSpec {
        match *self {
            ModelSpec::SelfRisk { marginal } => marginal,
            ModelSpec::BivariateGaussian { mu_y, sigma_y, .. } => MarginalSpec::Normal {
                mu: mu_y,
                sigma: sigma_y,
            },
            ModelSpec::GaussianCopula { marginal_y, .. }
            | ModelSpec::Independent { marginal_y, .. } => marginal_y,
        }
    }

    pub fn is_self_risk(&self) -> bool {
        matches!(self, ModelSpec::SelfRisk { .. })
    }

    /// Whether E[X²] is finite, as asymptotic normality requires.
    pub fn inference_safe(&self) -> bool {
        self.marginal_x().inference_safe()
    }

    /// `n` i.i.d. pairs, deterministic in `(self, n, seed)`.
    pub fn sample_pairs(&self, n: usize, seed: u64) -> Result<PairedSample> {
        self.validate()?;
        if n == 0 {
            return Err(Error::EmptySample);
        }
        let mut stream = UniformStream::new(seed);
        let mut xs = Vec::with_capacity(n);
        let mut ys = Vec::with_capacity(n);
        match *self {
            ModelSpec::SelfRisk { marginal } => {
                for _ in 0..n {
                    let x = marginal.quantile_unchecked(stream.next_open());
                    xs.push(x);
                    ys.push(x);
                }
            }
            ModelSpec::Independent {
                marginal_x,
                marginal_y,
            } => {
                for _ in 0..n {
                    let u1 = stream.next_open();
                    let u2 = stream.next_open();
                    xs.push(marginal_x.quantile_unchecked(u1));
                    ys.push(marginal_y.quantile_unchecked(u2));
                }
            }
            ModelSpec::BivariateGaussian {
                mu_x,
                mu_y,
                sigma_x,
                sigma_y,
                rho,
            } => {
                let s = (1.0 - rho * rho).sqrt();
                for _ in 0..n {
                    let xi = normal::quantile(stream.next_open());
                    let z2 = normal::quantile(stream.next_open());
                    xs.push(mu_x + sigma_x * (rho * z2 + s * xi));
                    ys.push(mu_y + sigma_y * z2);
                }
            }
            ModelSpec::GaussianCopula {
                marginal_x,
                marginal_y,
                rho,
            } => {
                let s = (1.0 - rho * rho).sqrt();
                for _ in 0..n {
                    let xi = normal::quantile(stream.next_open());
                    let u2 = stream.next_open();
                    let z1 = rho * normal::quantile(u2) + s * xi;
                    xs.push(marginal_x.quantile_unchecked(open_clamp(normal::cdf(z1))));
                    // y straight from u2: no Φ∘Φ⁻¹ round trip, so ranks of y
                    // are the ranks of u2 for every marginal
                    ys.push(marginal_y.quantile_unchecked(u2));
                }
            }
        }
        PairedSample::new(xs, ys)
    }

    /// Quantile-regression curve `t ↦ E[X | Y = F_Y⁻¹(t)]`.
    pub fn regression_curve(&self, t: f64) -> Result<f64> {
        check_unit("t", t)?;
        self.curves_available()?;
        Ok(self.regression_unchecked(t))
    }

    /// Conditional-variance curve `t ↦ Var[X | Y = F_Y⁻¹(t)]`.
    pub fn conditional_variance_curve(&self, t: f64) -> Result<f64> {
        check_unit("t", t)?;
        self.curves_available()?;
        Ok(self.conditional_variance_unchecked(t))
    }

    /// Fails when a curve would need a moment of X that does not exist.
    pub fn curves_available(&self) -> Result<()> {
        self.validate()?;
        match *self {
            ModelSpec::Independent { marginal_x, .. }
            | ModelSpec::GaussianCopula { marginal_x, .. } => {
                if marginal_x.variance().is_none() {
                    return Err(Error::Unsupported(format!(
                        "conditional moments need finite Var[X]; {marginal_x:?} has none"
                    )));
                }
                Ok(())
            }
            _ => Ok(()),
        }
    }

    pub(crate) fn regression_unchecked(&self, t: f64) -> f64 {
        match *self {
            ModelSpec::SelfRisk { marginal } => marginal.quantile_unchecked(t),
            ModelSpec::BivariateGaussian {
                mu_x, sigma_x, rho, ..
            } => mu_x + rho * sigma_x * normal::quantile(t),
            ModelSpec::Independent { marginal_x, .. } => marginal_x.mean().unwrap_or(f64::NAN),
            ModelSpec::GaussianCopula {
                marginal_x, rho, ..
            } => copula_conditional_moments(marginal_x, rho, t).0,
        }
    }

    pub(crate) fn conditional_variance_unchecked(&self, t: f64) -> f64 {
        match *self {
            ModelSpec::SelfRisk { .. } => 0.0,
            ModelSpec::BivariateGaussian { sigma_x, rho, .. } => {
                sigma_x * sigma_x * (1.0 - rho * rho)
            }
            ModelSpec::Independent { marginal_x, .. } => marginal_x.variance().unwrap_or(f64::NAN),
            ModelSpec::GaussianCopula {
                marginal_x, rho, ..
            } => copula_conditional_moments(marginal_x, rho, t).1,
        }
    }

    /// `Π_w = ∫ g∘F_Y⁻¹(t) w(t) dt / ∫ w(t) dt`.
    pub fn true_allocation(&self, w: &WeightSpec) -> Result<f64> {
        self.true_allocation_with(w, &QuadratureConfig::default())
    }

    pub fn true_allocation_with(&self, w: &WeightSpec, cfg: &QuadratureConfig) -> Result<f64> {
        self.validate()?;
        let denominator = w.integral_with(cfg)?;
        if denominator == 0.0 {
            return Err(Error::ZeroDenominator("weight integrates to zero".into()));
        }
        match *self {
            ModelSpec::SelfRisk { marginal } => true_premium_with(&marginal, w, cfg),
            ModelSpec::Independent { marginal_x, .. } => marginal_x
                .mean()
                .ok_or_else(|| Error::Divergent(format!("E[X] is infinite for {marginal_x:?}"))),
            ModelSpec::BivariateGaussian { .. } => {
                let numerator = integrate_unit(
                    |t| self.regression_unchecked(t) * w.eval_unchecked(t),
                    &w.quadrature_breakpoints(),
                    cfg,
                )?;
                Ok(numerator / denominator)
            }
            ModelSpec::GaussianCopula { marginal_x, .. } => {
                if marginal_x.mean().is_none() {
                    return Err(Error::Divergent(format!(
                        "E[X] is infinite for {marginal_x:?}"
                    )));
                }
                let numerator = integrate_unit(
                    |t| self.regression_unchecked(t) * w.eval_unchecked(t),
                    &w.quadrature_breakpoints(),
                    cfg,
                )?;
                Ok(numerator / denominator)
            }
        }
    }
}

/// `π_w = ∫ F⁻¹(t) w*(t) dt`.
pub fn true_premium(marginal: &MarginalSpec, w: &WeightSpec) -> Result<f64> {
    true_premium_with(marginal, w, &QuadratureConfig::default())
}

pub fn true_premium_with(
    marginal: &MarginalSpec,
    w: &WeightSpec,
    cfg: &QuadratureConfig,
) -> Result<f64> {
    marginal.validate()?;
    let denominator = w.integral_with(cfg)?;
    if denominator == 0.0 {
        return Err(Error::ZeroDenominator("weight integrates to zero".into()));
    }
    let numerator = integrate_unit(
        |t| marginal.quantile_unchecked(t) * w.eval_unchecked(t),
        &w.quadrature_breakpoints(),
        cfg,
    )?;
    Ok(numerator / denominator)
}

fn open_clamp(t: f64) -> f64 {
    const TOP: f64 = 1.0 - f64::EPSILON / 2.0;
    t.clamp(f64::MIN_POSITIVE, TOP)
}

/// Physicists' Gauss–Hermite rule with 64 nodes (weight `e^{−x²}`).
fn gauss_hermite_64() -> &'static [(f64, f64)] {
    static RULE: OnceLock<Vec<(f64, f64)>> = OnceLock::new();
    RULE.get_or_init(|| gauss_hermite(64))
}

/// Nodes and weights by Newton iteration on the orthonormal Hermite
/// recurrence, using the asymptotic initial guesses of Numerical Recipes.
pub(crate) fn gauss_hermite(n: usize) -> Vec<(f64, f64)> {
    let pim4 = std::f64::consts::PI.powf(-0.25);
    let m = n.div_ceil(2);
    let mut nodes = vec![(0.0, 0.0); n];
    let mut z = 0.0f64;
    for i in 0..m {
        z = match i {
            0 => (2.0 * n as f64 + 1.0).sqrt() - 1.85575 * (2.0 * n as f64 + 1.0).powf(-1.0 / 6.0),
            1 => z - 1.14 * (n as f64).powf(0.426) / z,
            2 => 1.86 * z - 0.86 * nodes[0].0,
            3 => 1.91 * z - 0.91 * nodes[1].0,
            _ => 2.0 * z - nodes[i - 2].0,
        };
        let mut pp = 0.0;
        for _ in 0..100 {
            let mut p1 = pim4;
            let mut p2 = 0.0;
            for j in 0..n {
                let p3 = p2;
                p2 = p1;
                let jf = j as f64;
                p1 = z * (2.0 / (jf + 1.0)).sqrt() * p2 - (jf / (jf + 1.0)).sqrt() * p3;
            }
            pp = (2.0 * n as f64).sqrt() * p2;
            let dz = p1 / pp;
            z -= dz;
            if dz.abs() <= 3e-15 * z.abs().max(1.0) {
                break;
            }
        }
        let weight = 2.0 / (pp * pp);
        nodes[i] = (z, weight);
        nodes[n - 1 - i] = (-z, weight);
    }
    nodes
}

/// `(E[h], Var[h])` with `h = F_X⁻¹(Φ(ρ z + √(1−ρ²) ξ))`, `z = Φ⁻¹(t)`,
/// `ξ ~ N(0, 1)`.
fn copula_conditional_moments(marginal_x: MarginalSpec, rho: f64, t: f64) -> (f64, f64) {
    let z = normal::quantile(t);
    let s = (1.0 - rho * rho).sqrt();
    let norm = std::f64::consts::PI.sqrt();
    let values: Vec<(f64, f64)> = gauss_hermite_64()
        .iter()
        .map(|&(x, wt)| {
            let xi = std::f64::consts::SQRT_2 * x;
            let h = marginal_x.quantile_unchecked(open_clamp(normal::cdf(rho * z + s * xi)));
            (wt / norm, h)
        })
        .collect();
    let mean: f64 = values.iter().map(|&(p, h)| p * h).sum();
    let var: f64 = values
        .iter()
        .map(|&(p, h)| p * (h - mean) * (h - mean))
        .sum();
    (mean, var.max(0.0))
}

#[cfg(test)]
mod tests {
    use super::*;

    const EXP1: MarginalSpec = MarginalSpec::Exponential { rate: 1.0 };

    fn bvn(rho: f64) -> ModelSpec {
        ModelSpec::BivariateGaussian {
            mu_x: 0.0,
            mu_y: 0.0,
            sigma_x: 1.0,
            sigma_y: 1.0,
            rho,
        }
    }

    fn correlation(s: &PairedSample) -> f64 {
        let n = s.len() as f64;
        let mx = s.xs().iter().sum::<f64>() / n;
        let my = s.ys().iter().sum::<f64>() / n;
        let (mut sxy, mut sxx, mut syy) = (0.0, 0.0, 0.0);
        for (x, y) in s.xs().iter().zip(s.ys()) {
            sxy += (x - mx) * (y - my);
            sxx += (x - mx) * (x - mx);
            syy += (y - my) * (y - my);
        }
        sxy / (sxx * syy).sqrt()
    }

    #[test]
    fn quantile_examples() {
        let one_minus_inv_e = 1.0 - (-1.0f64).exp();
        assert!((EXP1.quantile(one_minus_inv_e).unwrap() - 1.0).abs() < 1e-14);
        assert_eq!(MarginalSpec::Uniform01.quantile(0.3).unwrap(), 0.3);
        let z = MarginalSpec::Normal {
            mu: 0.0,
            sigma: 1.0,
        }
        .quantile(0.95)
        .unwrap();
        assert!((z - 1.6449).abs() < 1e-4);
        assert!(EXP1.quantile(1.0).is_err());
        assert!(EXP1.quantile(-0.1).is_err());
    }

    #[test]
    fn quantiles_increase() {
        let marginals = [
            EXP1,
            MarginalSpec::Pareto {
                shape: 3.0,
                scale: 2.0,
            },
            MarginalSpec::LogNormal {
                mu: 0.1,
                sigma: 0.7,
            },
            MarginalSpec::Uniform01,
            MarginalSpec::Normal {
                mu: -1.0,
                sigma: 2.0,
            },
        ];
        for m in marginals {
            let mut prev = f64::NEG_INFINITY;
            for i in 1..1000 {
                let q = m.quantile(i as f64 / 1000.0).unwrap();
                assert!(q > prev, "{m:?}");
                prev = q;
            }
        }
    }

    #[test]
    fn invalid_models_are_rejected() {
        assert!(bvn(1.0).validate().is_err());
        assert!(MarginalSpec::Exponential { rate: 0.0 }.validate().is_err());
        assert!(ModelSpec::SelfRisk {
            marginal: MarginalSpec::Normal {
                mu: 0.0,
                sigma: -1.0
            }
        }
        .sample_pairs(3, 0)
        .is_err());
        // heavy Pareto is constructible but flagged
        let heavy = ModelSpec::SelfRisk {
            marginal: MarginalSpec::Pareto {
                shape: 1.5,
                scale: 1.0,
            },
        };
        assert!(heavy.validate().is_ok());
        assert!(!heavy.inference_safe());
    }

    #[test]
    fn self_risk_pairs_coincide() {
        let s = ModelSpec::SelfRisk { marginal: EXP1 }
            .sample_pairs(5, 11)
            .unwrap();
        assert_eq!(s.len(), 5);
        assert_eq!(s.xs(), s.ys());
    }

    #[test]
    fn sampling_is_deterministic() {
        let m = ModelSpec::GaussianCopula {
            marginal_x: EXP1,
            marginal_y: MarginalSpec::LogNormal {
                mu: 0.0,
                sigma: 1.0,
            },
            rho: 0.3,
        };
        assert_eq!(
            m.sample_pairs(100, 5).unwrap(),
            m.sample_pairs(100, 5).unwrap()
        );
        assert_ne!(
            m.sample_pairs(100, 5).unwrap(),
            m.sample_pairs(100, 6).unwrap()
        );
    }

    #[test]
    fn sample_correlations() {
        let ind = ModelSpec::Independent {
            marginal_x: MarginalSpec::Uniform01,
            marginal_y: MarginalSpec::Uniform01,
        };
        assert!(correlation(&ind.sample_pairs(100_000, 1).unwrap()).abs() < 0.02);
        let r = correlation(&bvn(0.5).sample_pairs(100_000, 2).unwrap());
        assert!((r - 0.5).abs() < 0.02, "{r}");
    }

    #[test]
    fn curve_examples() {
        let ind = ModelSpec::Independent {
            marginal_x: EXP1,
            marginal_y: MarginalSpec::Uniform01,
        };
        assert_eq!(ind.regression_curve(0.7).unwrap(), 1.0);
        let selfu = ModelSpec::SelfRisk {
            marginal: MarginalSpec::Uniform01,
        };
        assert_eq!(selfu.regression_curve(0.25).unwrap(), 0.25);
        let g = bvn(0.5).regression_curve(0.975).unwrap();
        assert!((g - 0.98).abs() < 1e-4, "{g}");

        assert_eq!(
            ModelSpec::SelfRisk { marginal: EXP1 }
                .conditional_variance_curve(0.5)
                .unwrap(),
            0.0
        );
        assert_eq!(bvn(0.5).conditional_variance_curve(0.3).unwrap(), 0.75);
        let ind2 = ModelSpec::Independent {
            marginal_x: MarginalSpec::Exponential { rate: 2.0 },
            marginal_y: MarginalSpec::Uniform01,
        };
        assert_eq!(ind2.conditional_variance_curve(0.9).unwrap(), 0.25);
    }

    #[test]
    fn gauss_hermite_rule_integrates_moments() {
        let rule = gauss_hermite(64);
        let sqrt_pi = std::f64::consts::PI.sqrt();
        let m0: f64 = rule.iter().map(|n| n.1).sum();
        let m2: f64 = rule.iter().map(|n| n.1 * n.0 * n.0).sum();
        let m4: f64 = rule.iter().map(|n| n.1 * n.0.powi(4)).sum();
        assert!((m0 - sqrt_pi).abs() < 1e-13);
        assert!((m2 - sqrt_pi / 2.0).abs() < 1e-13);
        assert!((m4 - 3.0 * sqrt_pi / 4.0).abs() < 1e-12);
    }

    #[test]
    fn copula_with_normal_marginals_matches_bvn_curves() {
        let cop = ModelSpec::GaussianCopula {
            marginal_x: MarginalSpec::Normal {
                mu: 0.0,
                sigma: 1.0,
            },
            marginal_y: MarginalSpec::Normal {
                mu: 0.0,
                sigma: 1.0,
            },
            rho: 0.5,
        };
        for &t in &[0.01, 0.3, 0.5, 0.9, 0.999] {
            let g = cop.regression_curve(t).unwrap();
            let v = cop.conditional_variance_curve(t).unwrap();
            assert!(
                (g - bvn(0.5).regression_curve(t).unwrap()).abs() < 1e-10,
                "t={t}"
            );
            assert!((v - 0.75).abs() < 1e-10, "t={t}: {v}");
        }
    }

    #[test]
    fn unsupported_curves() {
        let heavy = ModelSpec::Independent {
            marginal_x: MarginalSpec::Pareto {
                shape: 1.5,
                scale: 1.0,
            },
            marginal_y: EXP1,
        };
        assert!(matches!(
            heavy.regression_curve(0.5),
            Err(Error::Unsupported(_))
        ));
    }

    #[test]
    fn allocation_examples() {
        let ind90 = WeightSpec::indicator(0.9).unwrap();
        let v = ModelSpec::SelfRisk { marginal: EXP1 }
            .true_allocation(&ind90)
            .unwrap();
        assert!((v - (1.0 + 10f64.ln())).abs() < 1e-9, "{v}");
        let v = bvn(0.5)
            .true_allocation(&WeightSpec::indicator(0.95).unwrap())
            .unwrap();
        let z = normal::quantile(0.95);
        let closed = 0.5 * normal::pdf(z) / 0.05;
        assert!((v - closed).abs() < 1e-9);
        assert!((v - 1.0314).abs() < 1e-4);
        let one = WeightSpec::constant(1.0).unwrap();
        let ln = ModelSpec::GaussianCopula {
            marginal_x: MarginalSpec::LogNormal {
                mu: 0.0,
                sigma: 0.5,
            },
            marginal_y: EXP1,
            rho: 0.4,
        };
        assert!((ln.true_allocation(&one).unwrap() - (0.125f64).exp()).abs() < 1e-8);
        assert!(matches!(
            bvn(0.5).true_allocation(&WeightSpec::constant(0.0).unwrap()),
            Err(Error::ZeroDenominator(_))
        ));
    }

    #[test]
    fn premium_examples() {
        let v = true_premium(&EXP1, &WeightSpec::proportional_hazards(0.8).unwrap()).unwrap();
        assert!((v - 1.25).abs() < 1e-8, "{v}");
        let v = true_premium(
            &MarginalSpec::Uniform01,
            &WeightSpec::constant(1.0).unwrap(),
        )
        .unwrap();
        assert!((v - 0.5).abs() < 1e-12);
        let heavy = MarginalSpec::Pareto {
            shape: 0.8,
            scale: 1.0,
        };
        assert!(matches!(
            true_premium(&heavy, &WeightSpec::constant(1.0).unwrap()),
            Err(Error::Divergent(_))
        ));
    }
}
