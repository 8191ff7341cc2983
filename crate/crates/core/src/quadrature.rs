//! Adaptive Gauss–Kronrod quadrature and integration over the open unit
//! interval with integrable endpoint singularities.
//!
//! Integrals over (0, 1) are assembled from a core piece `[ε₀, 1 − ε₀]` and
//! a sequence of tail layers `[ε_{k+1}, ε_k]` (and their mirror images near
//! 1). The layer increments tell convergent tails (geometrically shrinking
//! increments) from divergent ones (increments that stop shrinking).

use crate::error::{Error, Result};

// 15-point Kronrod nodes/weights with the embedded 7-point Gauss rule.
const XGK: [f64; 8] = [
    0.991_455_371_120_812_6,
    0.949_107_912_342_758_5,
    0.864_864_423_359_769_1,
    0.741_531_185_599_394_4,
    0.586_087_235_467_691_1,
    0.405_845_151_377_397_2,
    0.207_784_955_007_898_5,
    0.0,
];
const WGK: [f64; 8] = [
    0.022_935_322_010_529_22,
    0.063_092_092_629_978_55,
    0.104_790_010_322_250_2,
    0.140_653_259_715_525_9,
    0.169_004_726_639_267_9,
    0.190_350_578_064_785_4,
    0.204_432_940_075_298_9,
    0.209_482_141_084_727_8,
];
const WG: [f64; 4] = [
    0.129_484_966_168_869_7,
    0.279_705_391_489_276_7,
    0.381_830_050_505_118_9,
    0.417_959_183_673_469_4,
];

/// Tolerances shared by every quadrature in the crate.
#[derive(Debug, Clone, PartialEq)]
pub struct QuadratureConfig {
    pub abs_tol: f64,
    pub rel_tol: f64,
    pub max_subdivisions: usize,
    /// Truncation points ε₀ > ε₁ > … used to peel off the endpoint tails.
    pub truncations: Vec<f64>,
    /// Tail convergence is judged only on layers inside this truncation.
    pub judge_below: f64,
    /// Successive layer increments must shrink by at least this factor.
    pub max_ratio: f64,
}

impl Default for QuadratureConfig {
    fn default() -> Self {
        Self {
            abs_tol: 1e-10,
            rel_tol: 1e-12,
            max_subdivisions: 4000,
            truncations: (3..=12).map(|k| 10f64.powi(-k)).collect(),
            judge_below: 1e-6,
            max_ratio: 0.999,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Estimate {
    pub value: f64,
    pub error: f64,
}

fn kronrod15<F: Fn(f64) -> f64>(f: &F, a: f64, b: f64) -> (f64, f64) {
    let center = 0.5 * (a + b);
    let half = 0.5 * (b - a);
    let fc = f(center);
    let mut kronrod = fc * WGK[7];
    let mut gauss = fc * WG[3];
    for j in 0..7 {
        let x = half * XGK[j];
        let s = f(center - x) + f(center + x);
        kronrod += WGK[j] * s;
        if j % 2 == 1 {
            gauss += WG[j / 2] * s;
        }
    }
    (kronrod * half, ((kronrod - gauss) * half).abs())
}

/// Globally adaptive G7–K15 quadrature of `f` over `[a, b]`.
pub fn gauss_kronrod<F: Fn(f64) -> f64>(
    f: F,
    a: f64,
    b: f64,
    cfg: &QuadratureConfig,
) -> Result<Estimate> {
    if a == b {
        return Ok(Estimate {
            value: 0.0,
            error: 0.0,
        });
    }
    let (v, e) = kronrod15(&f, a, b);
    let mut segments = vec![(a, b, v, e)];
    let mut value = v;
    let mut error = e;
    // Abscissae near |x| are only resolved to ε|x|, so an integrand on a
    // short interval far from 0 (a deep tail layer by 1) cannot be known
    // better than relative ε·max(|a|,|b|)/(b − a).
    let resolution = 50.0 * f64::EPSILON * a.abs().max(b.abs()) / (b - a).abs();
    let tol = |value: f64| {
        cfg.abs_tol
            .max(cfg.rel_tol * value.abs())
            .max(resolution * value.abs())
    };
    while error > tol(value) {
        if !value.is_finite() {
            break;
        }
        if segments.len() >= cfg.max_subdivisions {
            return Err(Error::Divergent(format!(
                "no convergence on [{a}, {b}] after {} subdivisions (error {error:e})",
                segments.len()
            )));
        }
        let (idx, _) = segments
            .iter()
            .enumerate()
            .max_by(|x, y| x.1 .3.total_cmp(&y.1 .3))
            .expect("non-empty");
        let (lo, hi, v0, e0) = segments.swap_remove(idx);
        let mid = 0.5 * (lo + hi);
        if mid <= lo || mid >= hi {
            // interval below floating-point resolution; keep what we have
            segments.push((lo, hi, v0, 0.0));
            error -= e0;
            continue;
        }
        let (v1, e1) = kronrod15(&f, lo, mid);
        let (v2, e2) = kronrod15(&f, mid, hi);
        value += v1 + v2 - v0;
        error += e1 + e2 - e0;
        segments.push((lo, mid, v1, e1));
        segments.push((mid, hi, v2, e2));
    }
    // re-add to shed the drift of incremental updates
    let value: f64 = segments.iter().map(|s| s.2).sum();
    let error: f64 = segments.iter().map(|s| s.3).sum();
    if !value.is_finite() {
        return Err(Error::Divergent(format!(
            "non-finite integrand on [{a}, {b}]"
        )));
    }
    Ok(Estimate { value, error })
}

/// Integrates over `[a, b]`, splitting at every breakpoint strictly inside.
pub fn integrate_pieces<F: Fn(f64) -> f64>(
    f: &F,
    a: f64,
    b: f64,
    breakpoints: &[f64],
    cfg: &QuadratureConfig,
) -> Result<f64> {
    let mut cuts = vec![a];
    cuts.extend(breakpoints.iter().copied().filter(|&t| t > a && t < b));
    cuts.push(b);
    let mut total = 0.0;
    for w in cuts.windows(2) {
        total += gauss_kronrod(f, w[0], w[1], cfg)?.value;
    }
    Ok(total)
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, serde::Serialize)]
#[serde(rename_all = "snake_case")]
pub enum TailStatus {
    /// Increments already below resolution.
    Negligible,
    /// Increments shrink geometrically; the remainder was extrapolated.
    Geometric,
    /// Increments fail to shrink.
    Divergent,
}

#[derive(Debug, Clone, PartialEq)]
pub struct TailReport {
    /// Contribution of each layer, outermost (ε₀ side) first.
    pub increments: Vec<f64>,
    pub status: TailStatus,
    pub extrapolation: f64,
}

#[derive(Debug, Clone, PartialEq)]
pub struct UnitIntegral {
    pub value: f64,
    pub core: f64,
    pub left: TailReport,
    pub right: TailReport,
}

impl UnitIntegral {
    pub fn converged(&self) -> bool {
        self.left.status != TailStatus::Divergent && self.right.status != TailStatus::Divergent
    }
}

fn classify_tail(
    increments: &[f64],
    judged: usize,
    scale: f64,
    cfg: &QuadratureConfig,
) -> TailReport {
    let last = increments.last().copied().unwrap_or(0.0);
    if last.abs() <= 1e-13 * scale {
        return TailReport {
            increments: increments.to_vec(),
            status: TailStatus::Negligible,
            extrapolation: 0.0,
        };
    }
    let tail = &increments[increments.len().saturating_sub(judged.max(2))..];
    let ratios: Vec<f64> = tail
        .windows(2)
        .map(|w| {
            if w[0] == 0.0 {
                f64::INFINITY
            } else {
                (w[1] / w[0]).abs()
            }
        })
        .collect();
    let shrinking = !ratios.is_empty() && ratios.iter().all(|&r| r < cfg.max_ratio);
    if shrinking {
        let r = *ratios.last().expect("non-empty");
        TailReport {
            increments: increments.to_vec(),
            status: TailStatus::Geometric,
            extrapolation: last * r / (1.0 - r),
        }
    } else {
        TailReport {
            increments: increments.to_vec(),
            status: TailStatus::Divergent,
            extrapolation: 0.0,
        }
    }
}

/// Integrates `f` over the open interval (0, 1), never evaluating at the
/// endpoints. Breakpoints are honoured as piece boundaries.
pub fn integrate_unit_detailed<F: Fn(f64) -> f64>(
    f: F,
    breakpoints: &[f64],
    cfg: &QuadratureConfig,
) -> Result<UnitIntegral> {
    let eps = &cfg.truncations;
    if eps.is_empty() {
        return Err(Error::InvalidSpec("empty truncation sequence".into()));
    }
    let core = integrate_pieces(&f, eps[0], 1.0 - eps[0], breakpoints, cfg)?;
    let mut left = Vec::with_capacity(eps.len());
    let mut right = Vec::with_capacity(eps.len());
    for w in eps.windows(2) {
        let (outer, inner) = (w[0], w[1]);
        left.push(integrate_pieces(&f, inner, outer, breakpoints, cfg)?);
        right.push(integrate_pieces(
            &f,
            1.0 - outer,
            1.0 - inner,
            breakpoints,
            cfg,
        )?);
    }
    let judged = eps.iter().filter(|&&e| e < cfg.judge_below).count();
    let raw = core + left.iter().sum::<f64>() + right.iter().sum::<f64>();
    let scale = raw.abs().max(1.0);
    let left = classify_tail(&left, judged, scale, cfg);
    let right = classify_tail(&right, judged, scale, cfg);
    Ok(UnitIntegral {
        value: raw + left.extrapolation + right.extrapolation,
        core,
        left,
        right,
    })
}

/// Value of a convergent integral over (0, 1); `Divergent` otherwise.
pub fn integrate_unit<F: Fn(f64) -> f64>(
    f: F,
    breakpoints: &[f64],
    cfg: &QuadratureConfig,
) -> Result<f64> {
    let r = integrate_unit_detailed(f, breakpoints, cfg)?;
    if !r.converged() {
        let side = if r.left.status == TailStatus::Divergent {
            "near 0"
        } else {
            "near 1"
        };
        return Err(Error::Divergent(format!(
            "tail increments {side} do not shrink under truncation"
        )));
    }
    Ok(r.value)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn polynomial_is_exact() {
        let cfg = QuadratureConfig::default();
        let v = gauss_kronrod(|x| x.powi(5) - 2.0 * x, 0.0, 2.0, &cfg).unwrap();
        assert!((v.value - (64.0 / 6.0 - 4.0)).abs() < 1e-13);
    }

    #[test]
    fn integrable_power_singularity() {
        let cfg = QuadratureConfig::default();
        // ∫ 0.5 t^{-1/2} = 1
        let v = integrate_unit(|t| 0.5 / t.sqrt(), &[], &cfg).unwrap();
        assert!((v - 1.0).abs() < 1e-7, "{v}");
        // ∫ -ln(1-t) = 1
        let v = integrate_unit(|t| -(-t).ln_1p(), &[], &cfg).unwrap();
        assert!((v - 1.0).abs() < 1e-9, "{v}");
    }

    #[test]
    fn divergent_singularities_are_detected() {
        let cfg = QuadratureConfig::default();
        assert!(matches!(
            integrate_unit(|t| 1.0 / (1.0 - t), &[], &cfg),
            Err(Error::Divergent(_))
        ));
        assert!(matches!(
            integrate_unit(|t| t.powf(-1.2), &[], &cfg),
            Err(Error::Divergent(_))
        ));
    }

    #[test]
    fn breakpoints_make_step_functions_exact() {
        let cfg = QuadratureConfig::default();
        let v = integrate_unit(|t| if t > 0.37 { 2.0 } else { 0.0 }, &[0.37], &cfg).unwrap();
        assert!((v - 1.26).abs() < 1e-12, "{v}");
    }
}
