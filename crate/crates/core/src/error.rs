use thiserror::Error;

pub type Result<T> = std::result::Result<T, Error>;

/// Which argument of a material evaluation left the validity window.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Axis {
    Wavelength,
    Temperature,
}

impl std::fmt::Display for Axis {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        match self {
            Axis::Wavelength => f.write_str("wavelength"),
            Axis::Temperature => f.write_str("temperature"),
        }
    }
}

#[derive(Debug, Clone, Error)]
pub enum Error {
    #[error("{material}: {axis} {value} outside validity [{min}, {max}]")]
    OutOfValidityRange {
        material: String,
        axis: Axis,
        value: f64,
        min: f64,
        max: f64,
    },

    #[error("no root: {0}")]
    NoRoot(String),

    #[error("grid did not converge after {refinements} refinements (last change {last_change:e})")]
    GridNotConverged { refinements: usize, last_change: f64 },

    #[error("fit failed: {0}")]
    FitFailed(String),

    #[error("numerical failure: {0}")]
    NumericalFailure(String),

    #[error("target Schmidt number {target} unreachable, best K = {best_k} at pump FWHM {best_fwhm_hz:e} Hz")]
    TargetUnreachable {
        target: f64,
        best_k: f64,
        best_fwhm_hz: f64,
    },

    #[error("division by zero: {0}")]
    DivisionByZero(&'static str),

    #[error("invalid ordering: {0}")]
    InvalidOrdering(String),

    #[error("truncation {truncation} leaves tail probability {tail:e} per mode (limit {limit:e})")]
    TruncationInsufficient { truncation: usize, tail: f64, limit: f64 },

    #[error("only {heralds} herald-conditioned samples (need at least {required})")]
    MonteCarloUnderflow { heralds: u64, required: u64 },

    #[error("line {line}: {message}")]
    Parse { line: usize, message: String },

    #[error("invalid parameter `{name}`: {message}")]
    InvalidParameter { name: &'static str, message: String },

    #[error("unknown material record: {0}")]
    UnknownMaterial(String),
}

impl Error {
    pub(crate) fn invalid(name: &'static str, message: impl Into<String>) -> Self {
        Error::InvalidParameter {
            name,
            message: message.into(),
        }
    }
}
