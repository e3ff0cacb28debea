use thiserror::Error;

use crate::prony::Verdict;
use crate::C64;

pub type Result<T> = std::result::Result<T, AfsumError>;

#[derive(Debug, Clone, PartialEq, Error)]
pub enum AfsumError {
    #[error("pole: {function} is singular at z = {z}")]
    Pole { function: String, z: C64 },

    #[error("domain: {function} is evaluated only for |z| <= {limit}, got |z| = {modulus}")]
    Domain {
        function: String,
        limit: f64,
        modulus: f64,
    },

    #[error("incompatible basis: h_{index} = 0 while f_{index} = {value}")]
    IncompatibleBasis { index: usize, value: C64 },

    #[error("degree_deficient: Hankel pivot {pivot:e} in column {column} is below {threshold:e}; the generating polynomial has degree < {n}")]
    Degenerate {
        n: usize,
        column: usize,
        pivot: f64,
        threshold: f64,
    },

    #[error("non-regular moment problem: {0}")]
    NonRegular(Verdict),

    #[error("root finder failed for degree {degree}: residual {residual:e} exceeds {limit:e}")]
    NonConvergence {
        degree: usize,
        residual: f64,
        limit: f64,
    },

    #[error("amplitude formula: |G'(lambda_{index})| = {value:e} is below {threshold:e}")]
    SingularDerivative {
        index: usize,
        value: f64,
        threshold: f64,
    },

    #[error("singular linear system: pivot {pivot:e} in column {column} is below {threshold:e}")]
    SingularSystem {
        column: usize,
        pivot: f64,
        threshold: f64,
    },

    #[error("separation failure: none of {trials} variations of q gave simple roots")]
    SeparationFailure { trials: usize },

    #[error("forbidden p: p = {p} lies within {distance:e} of the degenerate set for n = {n}")]
    ForbiddenP { n: usize, p: C64, distance: f64 },

    #[error("moment residual {residual:e} exceeds {limit:e}")]
    Residual { residual: f64, limit: f64 },

    #[error("invalid argument: {0}")]
    InvalidArgument(String),

    #[error("parse error: {0}")]
    Parse(String),

    #[error("io error: {0}")]
    Io(String),
}

impl AfsumError {
    /// Short verdict name used in one-line diagnostics.
    pub fn verdict(&self) -> &'static str {
        match self {
            AfsumError::Pole { .. } => "pole",
            AfsumError::Domain { .. } => "domain",
            AfsumError::IncompatibleBasis { .. } => "incompatible_basis",
            AfsumError::Degenerate { .. } => "degree_deficient",
            AfsumError::NonRegular(v) => v.as_str(),
            AfsumError::NonConvergence { .. } => "non_convergence",
            AfsumError::SingularDerivative { .. } => "singular_derivative",
            AfsumError::SingularSystem { .. } => "singular_system",
            AfsumError::SeparationFailure { .. } => "separation_failure",
            AfsumError::ForbiddenP { .. } => "forbidden_p",
            AfsumError::Residual { .. } => "residual",
            AfsumError::InvalidArgument(_) => "invalid_argument",
            AfsumError::Parse(_) => "parse",
            AfsumError::Io(_) => "io",
        }
    }
}

impl From<std::io::Error> for AfsumError {
    fn from(e: std::io::Error) -> Self {
        AfsumError::Io(e.to_string())
    }
}
