use std::io;

use thiserror::Error;

pub type Result<T, E = Error> = std::result::Result<T, E>;

#[derive(Debug, Error)]
pub enum Error {
    #[error("invalid parameter: {0}")]
    InvalidParameter(String),

    #[error(
        "Fock truncation n_max = {n_max} leaves tail probability {tail:.3e} above tolerance {tolerance:.3e}"
    )]
    TruncationTooSmall {
        n_max: usize,
        tail: f64,
        tolerance: f64,
    },

    #[error("dimension mismatch: expected {expected}, found {found}")]
    DimensionMismatch { expected: usize, found: usize },

    #[error("input is not a valid density matrix: {0}")]
    InvalidState(String),

    #[error("adaptive step size underflow at t = {t} (h = {step:.3e})")]
    StepUnderflow { t: f64, step: f64 },

    #[error(
        "positivity violated at t = {t}: minimum eigenvalue {min_eigenvalue:.3e}; increase n_max"
    )]
    PositivityViolation { t: f64, min_eigenvalue: f64 },

    #[error("invalid configuration: {0}")]
    InvalidConfig(String),

    #[error("no grid points")]
    NoGridPoints,

    #[error("grid point {point}: {source}")]
    GridPoint {
        point: String,
        #[source]
        source: Box<Error>,
    },

    #[error(transparent)]
    Io(#[from] io::Error),
}

impl Error {
    /// True for failures of the numerics themselves, as opposed to bad input.
    pub fn is_numerical(&self) -> bool {
        match self {
            Error::StepUnderflow { .. } | Error::PositivityViolation { .. } => true,
            Error::GridPoint { source, .. } => source.is_numerical(),
            _ => false,
        }
    }

    pub(crate) fn at_point(self, point: impl Into<String>) -> Error {
        Error::GridPoint {
            point: point.into(),
            source: Box::new(self),
        }
    }
}
