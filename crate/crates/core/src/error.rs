use thiserror::Error;

/// Errors produced anywhere in the workbench.
#[derive(Debug, Error, Clone, PartialEq)]
pub enum Error {
    #[error("spin lift has a non-integral entry: {0}")]
    Parity(String),
    #[error("determinant is {0}, expected 1")]
    Det(String),
    #[error("denominator {denominator} does not divide {numerator}")]
    Divisibility { numerator: String, denominator: u32 },
    #[error("invalid generator: {0}")]
    InvalidGenerator(String),
    #[error("invalid base point: {0}")]
    InvalidBasePoint(String),
    #[error("node budget of {budget} exceeded")]
    BudgetExceeded { budget: usize },
    #[error("insufficient data: {0}")]
    InsufficientData(String),
    #[error("generator is not invertible modulo {q}")]
    NonInvertibleGenerator { q: u64 },
    #[error("unsupported sieve dimension {0}")]
    UnsupportedDimension(String),
    #[error("step size {0} is too large")]
    StepTooLarge(String),
    #[error("invalid range: {0}")]
    InvalidRange(String),
    #[error("argument outside domain: {0}")]
    Domain(String),
    #[error("target unachievable: {0}")]
    Unachievable(String),
    #[error("grid too short: needs u up to {needed}, has {available}")]
    GridTooShort { needed: f64, available: f64 },
    #[error("cannot factor zero")]
    ZeroInput,
    #[error("machine integer overflow")]
    Overflow,
    #[error("i/o error: {0}")]
    Io(String),
}

impl Error {
    /// Stable machine-readable name of the variant.
    pub fn kind(&self) -> &'static str {
        match self {
            Error::Parity(_) => "Parity",
            Error::Det(_) => "Det",
            Error::Divisibility { .. } => "Divisibility",
            Error::InvalidGenerator(_) => "InvalidGenerator",
            Error::InvalidBasePoint(_) => "InvalidBasePoint",
            Error::BudgetExceeded { .. } => "BudgetExceeded",
            Error::InsufficientData(_) => "InsufficientData",
            Error::NonInvertibleGenerator { .. } => "NonInvertibleGenerator",
            Error::UnsupportedDimension(_) => "UnsupportedDimension",
            Error::StepTooLarge(_) => "StepTooLarge",
            Error::InvalidRange(_) => "InvalidRange",
            Error::Domain(_) => "Domain",
            Error::Unachievable(_) => "Unachievable",
            Error::GridTooShort { .. } => "GridTooShort",
            Error::ZeroInput => "ZeroInput",
            Error::Overflow => "Overflow",
            Error::Io(_) => "Io",
        }
    }

    /// Input rejected before any search or solve ran to completion.
    pub fn is_validation(&self) -> bool {
        matches!(
            self,
            Error::Parity(_)
                | Error::Det(_)
                | Error::Divisibility { .. }
                | Error::InvalidGenerator(_)
                | Error::InvalidBasePoint(_)
                | Error::InsufficientData(_)
                | Error::NonInvertibleGenerator { .. }
                | Error::UnsupportedDimension(_)
                | Error::InvalidRange(_)
                | Error::Domain(_)
                | Error::ZeroInput
        )
    }
}

impl From<std::io::Error> for Error {
    fn from(e: std::io::Error) -> Self {
        Error::Io(e.to_string())
    }
}

impl From<csv::Error> for Error {
    fn from(e: csv::Error) -> Self {
        Error::Io(e.to_string())
    }
}

impl From<serde_json::Error> for Error {
    fn from(e: serde_json::Error) -> Self {
        Error::Io(e.to_string())
    }
}

pub type Result<T, E = Error> = std::result::Result<T, E>;
