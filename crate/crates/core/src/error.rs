use thiserror::Error;

pub type Result<T> = std::result::Result<T, Error>;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum Error {
    #[error("argument {name} = {value} is outside the domain {domain}")]
    Domain {
        name: &'static str,
        value: f64,
        domain: &'static str,
    },

    #[error("invalid specification: {0}")]
    InvalidSpec(String),

    #[error("integral diverges: {0}")]
    Divergent(String),

    #[error("zero denominator: {0}")]
    ZeroDenominator(String),

    #[error("sample too small: need at least {required} observations, got {actual}")]
    SampleTooSmall { required: usize, actual: usize },

    #[error("empty sample")]
    EmptySample,

    #[error("unsupported: {0}")]
    Unsupported(String),

    #[error("zero asymptotic variance: {0}")]
    ZeroVariance(String),

    #[error("experiment aborted: {failures} of {replications} replications failed at n = {n}")]
    ExperimentAborted {
        n: usize,
        failures: usize,
        replications: usize,
    },
}

impl Error {
    pub(crate) fn domain(name: &'static str, value: f64, domain: &'static str) -> Self {
        Error::Domain {
            name,
            value,
            domain,
        }
    }
}

/// Checks `0 < t < 1`.
pub(crate) fn check_unit(name: &'static str, t: f64) -> Result<()> {
    if t > 0.0 && t < 1.0 {
        Ok(())
    } else {
        Err(Error::domain(name, t, "(0, 1)"))
    }
}
