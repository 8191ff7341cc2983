//! Weighted premiums `π_w` and weighted capital allocations `Π_w`:
//! concomitant-based estimators, quadrature oracles for parametric models,
//! asymptotic variance and confidence intervals, and a seeded Monte Carlo
//! harness for checking consistency and asymptotic normality.

pub mod asymptotics;
pub mod distributions;
pub mod empirical;
pub mod error;
pub mod montecarlo;
pub mod normal;
pub mod quadrature;
pub mod rng;
pub mod sum;
pub mod weights;

pub use distributions::{MarginalSpec, ModelSpec};
pub use empirical::{EstimateReport, PairedSample, Variant};
pub use error::{Error, Result};
pub use montecarlo::{ExperimentConfig, ExperimentKind, ExperimentResult};
pub use weights::{WeightKind, WeightSpec};
