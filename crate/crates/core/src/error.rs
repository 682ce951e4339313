use thiserror::Error;

/// Broad failure classes, used by front ends to pick an exit status.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum ErrorClass {
    /// Malformed or inconsistent input.
    Input,
    /// A numeric guard tripped (vanishing norm, allocation cap).
    Numeric,
    /// A modelling assumption on the path does not hold.
    Assumption,
}

#[derive(Debug, Error, Clone, PartialEq)]
pub enum Error {
    #[error("dimension mismatch: expected {expected}, found {found}")]
    DimensionMismatch { expected: usize, found: usize },

    #[error("depth mismatch: expected {expected}, found {found}")]
    DepthMismatch { expected: usize, found: usize },

    #[error("degree mismatch: expected {expected}, found {found}")]
    DegreeMismatch { expected: usize, found: usize },

    #[error("coefficient count {found} does not match {dim}^{degree} = {expected}")]
    CoefficientCount {
        dim: usize,
        degree: usize,
        expected: usize,
        found: usize,
    },

    #[error("not a permutation of 1..={degree}: {sigma:?}")]
    InvalidPermutation { degree: usize, sigma: Vec<usize> },

    #[error("allocation of {requested} coefficients exceeds the cap of {limit}")]
    AllocationCap { requested: u128, limit: usize },

    #[error("invalid path: {0}")]
    InvalidPath(String),

    #[error("path has zero length")]
    ZeroLength,

    #[error("tensor norm {norm:e} is not above the threshold {threshold:e}")]
    NormTooSmall { norm: f64, threshold: f64 },

    #[error("insertion position {p} outside 1..={max}")]
    InsertionPosition { p: usize, max: usize },

    #[error("signature depth {depth} is below the required minimum {min}")]
    DepthTooSmall { depth: usize, min: usize },

    #[error("riemann oracle: {0}")]
    OracleBudget(String),

    #[error("split point {0} must lie strictly inside (0, 1)")]
    SplitOutOfRange(f64),

    #[error("alpha = {alpha} is too small; the minimum admissible value is K(omega)/D = {min}")]
    AlphaTooSmall { alpha: f64, min: f64 },

    #[error("assumption (A1) violated: {0}")]
    AssumptionViolated(String),

    #[error("path must have unit total variation, found {0}")]
    NotNormalized(f64),

    #[error("invalid argument: {0}")]
    InvalidArgument(String),
}

impl Error {
    pub fn class(&self) -> ErrorClass {
        match self {
            Error::NormTooSmall { .. } | Error::AllocationCap { .. } | Error::OracleBudget(_) => {
                ErrorClass::Numeric
            }
            Error::AssumptionViolated(_) | Error::AlphaTooSmall { .. } => ErrorClass::Assumption,
            _ => ErrorClass::Input,
        }
    }
}

pub type Result<T> = std::result::Result<T, Error>;
