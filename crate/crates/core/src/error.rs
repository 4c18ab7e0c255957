use thiserror::Error;

pub type Result<T, E = Error> = std::result::Result<T, E>;

/// A boundary zero that blocks a signed spectral-flow count.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct BlockingZero {
    pub k: f64,
    pub s: f64,
    pub a_prime: f64,
    pub a_second: f64,
}

#[derive(Debug, Clone, PartialEq, Error)]
pub enum Error {
    #[error("{what} = {value} lies outside [{lo}, {hi}]")]
    Domain {
        what: &'static str,
        value: f64,
        lo: f64,
        hi: f64,
    },

    #[error("invalid parameter: {0}")]
    InvalidParameter(String),

    /// Zero lies in the spectrum of a boundary operator (some k + A vanishes).
    #[error("non-invertible boundary: {0}")]
    NonInvertibleBoundary(String),

    #[error("reconstruction of v needs a nonzero spectral parameter")]
    ZeroSpectralParameter,

    #[error("step size underflow at t = {t} (h = {h:e})")]
    StepUnderflow { t: f64, h: f64 },

    #[error("step limit of {steps} exceeded at t = {t}")]
    StepLimit { t: f64, steps: usize },

    #[error("numerical failure: {0}")]
    Numerical(String),

    #[error("degenerate regularization: delta = {delta} is within 1e-9 of 2/ell(T) = {threshold}")]
    DegenerateDelta { delta: f64, threshold: f64 },

    #[error("s = {s} is not a boundary zero of mode k = {k} (m = {m:e})")]
    NotBoundaryZero { s: f64, k: f64, m: f64 },

    #[error("{} nontransverse boundary zero(s) present; signed count refused", .0.len())]
    NontransverseCrossing(Vec<BlockingZero>),

    #[error("gauge path file, line {line}: {msg}")]
    PathFormat { line: usize, msg: String },
}

impl Error {
    pub(crate) fn domain(what: &'static str, value: f64, lo: f64, hi: f64) -> Self {
        Error::Domain { what, value, lo, hi }
    }

    /// True for failures of the numerical machinery rather than of the inputs.
    pub fn is_numerical(&self) -> bool {
        matches!(
            self,
            Error::StepUnderflow { .. } | Error::StepLimit { .. } | Error::Numerical(_)
        )
    }
}
