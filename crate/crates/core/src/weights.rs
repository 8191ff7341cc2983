//! Weight functions `w` on (0, 1) and numerical checks of their regularity.

use serde::{Deserialize, Serialize};

use crate::error::{check_unit, Error, Result};
use crate::quadrature::{integrate_unit, integrate_unit_detailed, QuadratureConfig, TailStatus};

#[derive(Debug, Clone, PartialEq)]
pub enum WeightKind {
    /// `w(t) = 1{t > p}`
    Indicator {
        p: f64,
    },
    /// `w(t) = ν(1 − t)^{ν−1}`
    ProportionalHazards {
        nu: f64,
    },
    /// Same formula as proportional hazards, restricted to `ν ≥ 1`.
    SGini {
        nu: f64,
    },
    Constant {
        c: f64,
    },
    Tabulated(TabulatedWeight),
}

/// A user-supplied weight: linear between nodes, constant beyond the
/// outermost ones.
#[derive(Debug, Clone, PartialEq)]
pub struct TabulatedWeight {
    nodes: Vec<(f64, f64)>,
    delta: Option<f64>,
}

impl TabulatedWeight {
    pub fn new(nodes: Vec<(f64, f64)>, delta: Option<f64>) -> Result<Self> {
        if nodes.is_empty() {
            return Err(Error::InvalidSpec(
                "tabulated weight needs at least one node".into(),
            ));
        }
        for &(t, w) in &nodes {
            if !(t > 0.0 && t < 1.0) {
                return Err(Error::InvalidSpec(format!(
                    "tabulated node t = {t} outside (0, 1)"
                )));
            }
            if !w.is_finite() {
                return Err(Error::InvalidSpec(format!(
                    "tabulated value at t = {t} is not finite"
                )));
            }
        }
        if nodes.windows(2).any(|w| w[1].0 <= w[0].0) {
            return Err(Error::InvalidSpec(
                "tabulated nodes must be strictly increasing in t".into(),
            ));
        }
        if let Some(d) = delta {
            if !(d > 0.0 && d < 0.5) {
                return Err(Error::InvalidSpec(format!(
                    "coverage delta {d} outside (0, 1/2)"
                )));
            }
            let (first, last) = (nodes[0].0, nodes[nodes.len() - 1].0);
            if first > d || last < 1.0 - d {
                return Err(Error::InvalidSpec(format!(
                    "tabulated grid [{first}, {last}] does not cover ({d}, {})",
                    1.0 - d
                )));
            }
        }
        Ok(Self { nodes, delta })
    }

    pub fn nodes(&self) -> &[(f64, f64)] {
        &self.nodes
    }

    fn eval(&self, t: f64) -> f64 {
        let nodes = &self.nodes;
        let idx = nodes.partition_point(|&(x, _)| x <= t);
        if idx == 0 {
            return nodes[0].1;
        }
        if idx == nodes.len() {
            return nodes[idx - 1].1;
        }
        let (t0, w0) = nodes[idx - 1];
        let (t1, w1) = nodes[idx];
        w0 + (w1 - w0) * (t - t0) / (t1 - t0)
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct WeightSpec {
    kind: WeightKind,
    breakpoints: Vec<f64>,
    tail_exponents: Option<(f64, f64)>,
}

impl WeightSpec {
    pub fn indicator(p: f64) -> Result<Self> {
        if !(p > 0.0 && p < 1.0) {
            return Err(Error::InvalidSpec(format!(
                "indicator level p = {p} outside (0, 1)"
            )));
        }
        Self::new(WeightKind::Indicator { p }, vec![p], None)
    }

    pub fn proportional_hazards(nu: f64) -> Result<Self> {
        if !(nu > 0.0 && nu.is_finite()) {
            return Err(Error::InvalidSpec(format!(
                "proportional hazards ν = {nu} must be > 0"
            )));
        }
        Self::new(WeightKind::ProportionalHazards { nu }, vec![], None)
    }

    pub fn sgini(nu: f64) -> Result<Self> {
        if !(nu >= 1.0 && nu.is_finite()) {
            return Err(Error::InvalidSpec(format!("S-Gini ν = {nu} must be ≥ 1")));
        }
        Self::new(WeightKind::SGini { nu }, vec![], None)
    }

    pub fn constant(c: f64) -> Result<Self> {
        if !c.is_finite() {
            return Err(Error::InvalidSpec("constant weight must be finite".into()));
        }
        Self::new(WeightKind::Constant { c }, vec![], None)
    }

    pub fn tabulated(table: TabulatedWeight) -> Result<Self> {
        Self::new(WeightKind::Tabulated(table), vec![], None)
    }

    /// General constructor; validates breakpoints and declared exponents.
    pub fn new(
        kind: WeightKind,
        breakpoints: Vec<f64>,
        tail_exponents: Option<(f64, f64)>,
    ) -> Result<Self> {
        if breakpoints.iter().any(|&t| !(t > 0.0 && t < 1.0)) {
            return Err(Error::InvalidSpec(
                "breakpoints must lie strictly inside (0, 1)".into(),
            ));
        }
        if breakpoints.windows(2).any(|w| w[1] <= w[0]) {
            return Err(Error::InvalidSpec(
                "breakpoints must be strictly increasing".into(),
            ));
        }
        if let Some((k1, k2)) = tail_exponents {
            if !((0.0..1.0).contains(&k1) && (0.0..1.0).contains(&k2)) {
                return Err(Error::InvalidSpec(format!(
                    "tail exponents ({k1}, {k2}) must lie in [0, 1)"
                )));
            }
        }
        if let WeightKind::Indicator { p } = kind {
            if !breakpoints.contains(&p) {
                return Err(Error::InvalidSpec(format!(
                    "indicator weight must declare its breakpoint at {p}"
                )));
            }
        }
        Ok(Self {
            kind,
            breakpoints,
            tail_exponents,
        })
    }

    pub fn with_tail_exponents(mut self, kappa1: f64, kappa2: f64) -> Result<Self> {
        self.tail_exponents = Some((kappa1, kappa2));
        Self::new(self.kind, self.breakpoints, self.tail_exponents)
    }

    pub fn kind(&self) -> &WeightKind {
        &self.kind
    }

    pub fn breakpoints(&self) -> &[f64] {
        &self.breakpoints
    }

    pub fn tail_exponents(&self) -> Option<(f64, f64)> {
        self.tail_exponents
    }

    /// Points where quadrature should split: declared breakpoints plus the
    /// kinks of a tabulated weight.
    pub fn quadrature_breakpoints(&self) -> Vec<f64> {
        let mut pts = self.breakpoints.clone();
        if let WeightKind::Tabulated(table) = &self.kind {
            pts.extend(table.nodes.iter().map(|n| n.0));
            pts.sort_by(f64::total_cmp);
            pts.dedup();
        }
        pts
    }

    /// `w(t)` for `t` in (0, 1). Right-continuous at breakpoints.
    pub fn eval(&self, t: f64) -> Result<f64> {
        check_unit("t", t)?;
        Ok(self.eval_unchecked(t))
    }

    pub(crate) fn eval_unchecked(&self, t: f64) -> f64 {
        match &self.kind {
            WeightKind::Indicator { p } => {
                if t > *p {
                    1.0
                } else {
                    0.0
                }
            }
            WeightKind::ProportionalHazards { nu } | WeightKind::SGini { nu } => {
                nu * (1.0 - t).powf(nu - 1.0)
            }
            WeightKind::Constant { c } => *c,
            WeightKind::Tabulated(table) => table.eval(t),
        }
    }

    /// `∫₀¹ w(u) du`.
    pub fn integral(&self) -> Result<f64> {
        self.integral_with(&QuadratureConfig::default())
    }

    pub fn integral_with(&self, cfg: &QuadratureConfig) -> Result<f64> {
        match &self.kind {
            WeightKind::Indicator { p } => Ok(1.0 - p),
            WeightKind::ProportionalHazards { .. } | WeightKind::SGini { .. } => Ok(1.0),
            WeightKind::Constant { c } => Ok(*c),
            WeightKind::Tabulated(_) => integrate_unit(
                |t| self.eval_unchecked(t),
                &self.quadrature_breakpoints(),
                cfg,
            ),
        }
    }

    /// The density `w* = w / ∫w`; fails when the integral vanishes.
    pub fn normalized(&self) -> Result<NormalizedWeight<'_>> {
        let integral = self.integral()?;
        if integral == 0.0 {
            return Err(Error::ZeroDenominator("weight integrates to zero".into()));
        }
        Ok(NormalizedWeight {
            weight: self,
            integral,
        })
    }

    /// `[w(1/(n+1)), …, w(n/(n+1))]`.
    pub fn grid_weights(&self, n: usize) -> Result<Vec<f64>> {
        if n == 0 {
            return Err(Error::SampleTooSmall {
                required: 1,
                actual: 0,
            });
        }
        let denom = (n + 1) as f64;
        Ok((1..=n)
            .map(|k| self.eval_unchecked(k as f64 / denom))
            .collect())
    }
}

#[derive(Debug, Clone, Copy)]
pub struct NormalizedWeight<'a> {
    weight: &'a WeightSpec,
    integral: f64,
}

impl NormalizedWeight<'_> {
    pub fn eval(&self, t: f64) -> Result<f64> {
        Ok(self.weight.eval(t)? / self.integral)
    }

    pub fn integral_of_weight(&self) -> f64 {
        self.integral
    }
}

// ---------------------------------------------------------------------------
// JSON form

#[derive(Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "lowercase", deny_unknown_fields)]
enum WeightKindJson {
    Indicator {
        p: f64,
        #[serde(default, skip_serializing_if = "Option::is_none")]
        breakpoints: Option<Vec<f64>>,
        #[serde(default, skip_serializing_if = "Option::is_none")]
        tail_exponents: Option<[f64; 2]>,
    },
    Ph {
        nu: f64,
        #[serde(default, skip_serializing_if = "Option::is_none")]
        breakpoints: Option<Vec<f64>>,
        #[serde(default, skip_serializing_if = "Option::is_none")]
        tail_exponents: Option<[f64; 2]>,
    },
    Sgini {
        nu: f64,
        #[serde(default, skip_serializing_if = "Option::is_none")]
        breakpoints: Option<Vec<f64>>,
        #[serde(default, skip_serializing_if = "Option::is_none")]
        tail_exponents: Option<[f64; 2]>,
    },
    Constant {
        c: f64,
        #[serde(default, skip_serializing_if = "Option::is_none")]
        breakpoints: Option<Vec<f64>>,
        #[serde(default, skip_serializing_if = "Option::is_none")]
        tail_exponents: Option<[f64; 2]>,
    },
    Tabulated {
        grid: Vec<[f64; 2]>,
        #[serde(default, skip_serializing_if = "Option::is_none")]
        delta: Option<f64>,
        #[serde(default, skip_serializing_if = "Option::is_none")]
        breakpoints: Option<Vec<f64>>,
        #[serde(default, skip_serializing_if = "Option::is_none")]
        tail_exponents: Option<[f64; 2]>,
    },
}

impl TryFrom<WeightKindJson> for WeightSpec {
    type Error = Error;

    fn try_from(j: WeightKindJson) -> Result<Self> {
        let (base, bps, tails) = match j {
            WeightKindJson::Indicator {
                p,
                breakpoints,
                tail_exponents,
            } => (WeightSpec::indicator(p)?, breakpoints, tail_exponents),
            WeightKindJson::Ph {
                nu,
                breakpoints,
                tail_exponents,
            } => (
                WeightSpec::proportional_hazards(nu)?,
                breakpoints,
                tail_exponents,
            ),
            WeightKindJson::Sgini {
                nu,
                breakpoints,
                tail_exponents,
            } => (WeightSpec::sgini(nu)?, breakpoints, tail_exponents),
            WeightKindJson::Constant {
                c,
                breakpoints,
                tail_exponents,
            } => (WeightSpec::constant(c)?, breakpoints, tail_exponents),
            WeightKindJson::Tabulated {
                grid,
                delta,
                breakpoints,
                tail_exponents,
            } => {
                let nodes = grid.into_iter().map(|[t, w]| (t, w)).collect();
                (
                    WeightSpec::tabulated(TabulatedWeight::new(nodes, delta)?)?,
                    breakpoints,
                    tail_exponents,
                )
            }
        };
        let breakpoints = match bps {
            Some(mut b) => {
                if let WeightKind::Indicator { p } = base.kind {
                    if !b.contains(&p) {
                        b.push(p);
                        b.sort_by(f64::total_cmp);
                    }
                }
                b
            }
            None => base.breakpoints,
        };
        WeightSpec::new(base.kind, breakpoints, tails.map(|[a, b]| (a, b)))
    }
}

impl From<&WeightSpec> for WeightKindJson {
    fn from(w: &WeightSpec) -> Self {
        let breakpoints = match &w.kind {
            WeightKind::Indicator { p } if w.breakpoints == [*p] => None,
            _ if w.breakpoints.is_empty() => None,
            _ => Some(w.breakpoints.clone()),
        };
        let tail_exponents = w.tail_exponents.map(|(a, b)| [a, b]);
        match &w.kind {
            WeightKind::Indicator { p } => WeightKindJson::Indicator {
                p: *p,
                breakpoints,
                tail_exponents,
            },
            WeightKind::ProportionalHazards { nu } => WeightKindJson::Ph {
                nu: *nu,
                breakpoints,
                tail_exponents,
            },
            WeightKind::SGini { nu } => WeightKindJson::Sgini {
                nu: *nu,
                breakpoints,
                tail_exponents,
            },
            WeightKind::Constant { c } => WeightKindJson::Constant {
                c: *c,
                breakpoints,
                tail_exponents,
            },
            WeightKind::Tabulated(table) => WeightKindJson::Tabulated {
                grid: table.nodes.iter().map(|&(t, w)| [t, w]).collect(),
                delta: table.delta,
                breakpoints,
                tail_exponents,
            },
        }
    }
}

impl Serialize for WeightSpec {
    fn serialize<S: serde::Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        WeightKindJson::from(self).serialize(s)
    }
}

impl<'de> Deserialize<'de> for WeightSpec {
    fn deserialize<D: serde::Deserializer<'de>>(d: D) -> std::result::Result<Self, D::Error> {
        let j = WeightKindJson::deserialize(d)?;
        WeightSpec::try_from(j).map_err(serde::de::Error::custom)
    }
}

// ---------------------------------------------------------------------------
// Regularity checks. These produce numerical evidence only: a constant that
// stays put as the grid refines, or one that keeps growing.

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct NormReport {
    pub finite: bool,
    /// `‖w^power‖_q`; for a divergent norm, the truncated value reached.
    pub estimate: f64,
    pub inconclusive: bool,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct ConditionReport {
    pub pass: bool,
    pub grid_stable: bool,
    /// Smallest constant satisfying the bound on the coarse grid.
    pub constant: f64,
    /// Same on the refined grid.
    pub constant_refined: f64,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub failure_location: Option<f64>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub note: Option<String>,
}

const STABLE_GROWTH: f64 = 1.01;

/// Numerical membership test `w^power ∈ L_q` on (0, 1).
pub fn check_lq(w: &WeightSpec, q: f64, power: f64) -> NormReport {
    check_lq_on(w, (0.0, 1.0), q, power)
}

/// As [`check_lq`] for `w · 1_{(a, b)}`.
pub fn check_lq_on(w: &WeightSpec, interval: (f64, f64), q: f64, power: f64) -> NormReport {
    let (a, b) = interval;
    let inside = |t: f64| t > a && t < b;
    let mut breakpoints = w.quadrature_breakpoints();
    breakpoints.extend([a, b].into_iter().filter(|&x| x > 0.0 && x < 1.0));
    breakpoints.sort_by(f64::total_cmp);

    if q.is_infinite() {
        // essential supremum over grids approaching the endpoints
        let sup_on = |depth: i32| -> f64 {
            let mut best: f64 = 0.0;
            let per_decade = 40;
            for i in 0..=(depth * per_decade) {
                let u = 0.5 * 10f64.powf(-(i as f64) / per_decade as f64);
                for t in [u, 1.0 - u] {
                    if t > 0.0 && t < 1.0 && inside(t) {
                        best = best.max(w.eval_unchecked(t).abs().powf(power));
                    }
                }
            }
            for i in 1..2000 {
                let t = i as f64 / 2000.0;
                if inside(t) {
                    best = best.max(w.eval_unchecked(t).abs().powf(power));
                }
            }
            best
        };
        let coarse = sup_on(8);
        let fine = sup_on(12);
        let finite = fine.is_finite() && fine <= coarse * STABLE_GROWTH + 1e-300;
        return NormReport {
            finite,
            estimate: fine,
            inconclusive: false,
        };
    }

    let exponent = power * q;
    let cfg = QuadratureConfig::default();
    let integrand = |t: f64| {
        if inside(t) {
            w.eval_unchecked(t).abs().powf(exponent)
        } else {
            0.0
        }
    };
    match integrate_unit_detailed(integrand, &breakpoints, &cfg) {
        Ok(r) => {
            let finite = r.converged() && r.value.is_finite();
            let partial = r.core
                + r.left.increments.iter().sum::<f64>()
                + r.right.increments.iter().sum::<f64>();
            let base = if finite { r.value } else { partial };
            NormReport {
                finite,
                estimate: base.powf(1.0 / q),
                inconclusive: r.left.status == TailStatus::Geometric
                    && r.left.increments.last().is_some_and(|x| x.abs() > 1e-3)
                    || r.right.status == TailStatus::Geometric
                        && r.right.increments.last().is_some_and(|x| x.abs() > 1e-3),
            }
        }
        Err(_) => NormReport {
            finite: false,
            estimate: f64::INFINITY,
            inconclusive: true,
        },
    }
}

/// A partition `0 = a₀ < a₁ < … < a_j = 1` with neighbourhood width ε.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct PartitionSpec {
    points: Vec<f64>,
    epsilon: f64,
}

impl PartitionSpec {
    pub fn new(points: Vec<f64>, epsilon: f64) -> Result<Self> {
        if points.len() < 2 || points[0] != 0.0 || points[points.len() - 1] != 1.0 {
            return Err(Error::InvalidSpec("partition must run from 0 to 1".into()));
        }
        if points.windows(2).any(|w| w[1] <= w[0]) {
            return Err(Error::InvalidSpec(
                "partition points must be strictly increasing".into(),
            ));
        }
        if !(epsilon > 0.0 && epsilon < 1.0) {
            return Err(Error::InvalidSpec(format!(
                "partition epsilon {epsilon} outside (0, 1)"
            )));
        }
        Ok(Self { points, epsilon })
    }

    pub fn len(&self) -> usize {
        self.points.len() - 1
    }

    pub fn is_empty(&self) -> bool {
        self.len() == 0
    }

    /// `A_i = (a_{i−1}, a_i)`.
    pub fn segment(&self, i: usize) -> (f64, f64) {
        (self.points[i], self.points[i + 1])
    }

    /// `B_{i,ε} = (a_{i−1} − ε, a_i + ε) ∩ (0, 1)`.
    pub fn neighbourhood(&self, i: usize) -> (f64, f64) {
        let (a, b) = self.segment(i);
        ((a - self.epsilon).max(0.0), (b + self.epsilon).min(1.0))
    }
}

/// Checks `w · 1_{A_i} ∈ L_{power·q_i}` for every segment of the partition.
pub fn check_partition(
    w: &WeightSpec,
    partition: &PartitionSpec,
    exponents: &[f64],
    power: f64,
) -> Result<Vec<NormReport>> {
    if exponents.len() != partition.len() {
        return Err(Error::InvalidSpec(format!(
            "{} exponents for {} segments",
            exponents.len(),
            partition.len()
        )));
    }
    Ok((0..partition.len())
        .map(|i| check_lq_on(w, partition.segment(i), exponents[i], power))
        .collect())
}

fn central_difference(w: &WeightSpec, t: f64) -> f64 {
    let h = 1e-4 * t.min(1.0 - t);
    (w.eval_unchecked(t + h) - w.eval_unchecked(t - h)) / (2.0 * h)
}

/// Tail growth bound `t(1−t)|w′(t)|, |w(t)| ≤ c t^{−κ₁/2}(1−t)^{−κ₂/2}` on
/// `(0, ε) ∪ (1 − ε, 1)`.
pub fn check_tail_growth(
    w: &WeightSpec,
    kappa1: f64,
    kappa2: f64,
    epsilon: f64,
) -> Result<ConditionReport> {
    if !((0.0..1.0).contains(&kappa1) && (0.0..1.0).contains(&kappa2)) {
        return Err(Error::domain("kappa", kappa1.max(kappa2), "[0, 1)"));
    }
    if !(epsilon > 0.0 && epsilon < 0.5) {
        return Err(Error::domain("epsilon", epsilon, "(0, 1/2)"));
    }
    let mut kinks = w.breakpoints.clone();
    if let WeightKind::Tabulated(table) = &w.kind {
        kinks.extend(table.nodes.iter().map(|n| n.0));
    }
    if let Some(&loc) = kinks.iter().find(|&&t| t < epsilon || t > 1.0 - epsilon) {
        return Ok(ConditionReport {
            pass: false,
            grid_stable: false,
            constant: f64::INFINITY,
            constant_refined: f64::INFINITY,
            failure_location: Some(loc),
            note: Some("weight is not differentiable inside the tail region".into()),
        });
    }
    let ratio_at = |t: f64| -> f64 {
        let bound = t.powf(-kappa1 / 2.0) * (1.0 - t).powf(-kappa2 / 2.0);
        let value = w.eval_unchecked(t).abs();
        let slope = t * (1.0 - t) * central_difference(w, t).abs();
        value.max(slope) / bound
    };
    let sup_to = |decades: f64| -> (f64, f64) {
        let per_decade = 50.0;
        let steps = (decades * per_decade) as i32;
        let mut best = (0.0, epsilon);
        for i in 0..=steps {
            let u = epsilon * 0.999 * 10f64.powf(-(i as f64) / per_decade);
            for t in [u, 1.0 - u] {
                let r = ratio_at(t);
                if r > best.0 || r.is_nan() {
                    best = (r, t);
                }
            }
        }
        best
    };
    let depth = |target: f64| (epsilon / target).log10();
    let (coarse, _) = sup_to(depth(1e-6));
    let (fine, at) = sup_to(depth(1e-10));
    let grid_stable = fine.is_finite() && fine <= coarse * STABLE_GROWTH + 1e-12;
    Ok(ConditionReport {
        pass: grid_stable,
        grid_stable,
        constant: coarse,
        constant_refined: fine,
        failure_location: (!grid_stable).then_some(at),
        note: None,
    })
}

/// Hölder continuity of order `r` on each segment between breakpoints,
/// restricted to `(ε, 1 − ε)`.
pub fn check_hoelder(w: &WeightSpec, r: f64, epsilon: f64) -> Result<ConditionReport> {
    if !(r > 0.5) {
        return Err(Error::domain("r", r, "(1/2, ∞)"));
    }
    if !(epsilon > 0.0 && epsilon < 0.5) {
        return Err(Error::domain("epsilon", epsilon, "(0, 1/2)"));
    }
    let mut cuts = vec![epsilon];
    cuts.extend(
        w.breakpoints
            .iter()
            .copied()
            .filter(|&t| t > epsilon && t < 1.0 - epsilon),
    );
    cuts.push(1.0 - epsilon);

    let sup_quotient = |points: usize| -> (f64, f64) {
        let mut best = (0.0, f64::NAN);
        for seg in cuts.windows(2) {
            let inset = 1e-9 * (seg[1] - seg[0]);
            let (lo, hi) = (seg[0] + inset, seg[1] - inset);
            let ts: Vec<f64> = (0..points)
                .map(|i| lo + (hi - lo) * i as f64 / (points - 1) as f64)
                .collect();
            let ws: Vec<f64> = ts.iter().map(|&t| w.eval_unchecked(t)).collect();
            for i in 0..points {
                for j in (i + 1)..points {
                    let q = (ws[j] - ws[i]).abs() / (ts[j] - ts[i]).powf(r);
                    if q > best.0 {
                        best = (q, 0.5 * (ts[i] + ts[j]));
                    }
                }
            }
        }
        best
    };
    let (coarse, _) = sup_quotient(200);
    let (fine, at) = sup_quotient(800);
    // A sampled supremum creeps up under refinement even for smooth w; a
    // genuine failure grows without bound.
    let grid_stable = fine.is_finite() && fine <= coarse * 1.05 + 1e-9;
    Ok(ConditionReport {
        pass: grid_stable,
        grid_stable,
        constant: coarse,
        constant_refined: fine,
        failure_location: (!grid_stable).then_some(at),
        note: None,
    })
}
