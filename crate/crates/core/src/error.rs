//! Error and warning types shared across the crate.

use std::fmt;

/// Failure modes of the library.
#[derive(Debug, Clone, PartialEq, thiserror::Error)]
pub enum Error {
    #[error("domain error: {0}")]
    Domain(String),
    #[error("value {value} lies outside the support of the model")]
    OutsideSupport { value: f64 },
    #[error("invalid parameter: {0}")]
    Parameter(String),
    #[error("geometry mismatch: {0}")]
    Geometry(String),
    #[error("dimension mismatch: {0}")]
    Dimension(String),
    #[error("no fit: {0}")]
    NoFit(String),
    #[error("cap exceeded: {0}")]
    CapExceeded(String),
    #[error("parse error: {0}")]
    Parse(String),
    #[error("io error: {0}")]
    Io(String),
    #[error("failed to converge: {0}")]
    Convergence(String),
}

pub type Result<T> = std::result::Result<T, Error>;

impl From<std::io::Error> for Error {
    fn from(e: std::io::Error) -> Self {
        Error::Io(e.to_string())
    }
}

pub(crate) fn domain(msg: impl Into<String>) -> Error {
    Error::Domain(msg.into())
}

pub(crate) fn param(msg: impl Into<String>) -> Error {
    Error::Parameter(msg.into())
}

/// Non-fatal diagnostics attached to reports.
#[derive(Debug, Clone, PartialEq)]
pub enum Warning {
    /// Two observations map to the same cumulative value.
    Tie { index: usize, value: f64 },
    /// An observation maps to cumulative value 0 or 1.
    Boundary { value: f64 },
    /// A point of one sample equals a point of the other (two-sample test).
    CrossSampleTie { value: f64 },
    /// An occupied bin carries no model mass.
    EmptyMass { bin: usize },
}

impl fmt::Display for Warning {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Warning::Tie { index, value } => {
                write!(f, "tied observations at value {value} (sorted index {index}); fidelity is -inf")
            }
            Warning::Boundary { value } => {
                write!(f, "observation {value} sits on a support boundary; fidelity is -inf")
            }
            Warning::CrossSampleTie { value } => {
                write!(f, "value {value} occurs in both samples; placed in the left bin")
            }
            Warning::EmptyMass { bin } => write!(f, "occupied bin {bin} has zero model mass"),
        }
    }
}

impl Warning {
    /// Short machine-readable tag.
    pub fn kind(&self) -> &'static str {
        match self {
            Warning::Tie { .. } => "tie",
            Warning::Boundary { .. } => "boundary",
            Warning::CrossSampleTie { .. } => "cross_sample_tie",
            Warning::EmptyMass { .. } => "empty_mass",
        }
    }
}
