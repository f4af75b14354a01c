use thiserror::Error;

/// Errors raised by the library. Every public fallible operation returns this type.
#[derive(Debug, Error, Clone, PartialEq)]
pub enum Error {
    #[error("dimension mismatch: expected {expected}, got {got}")]
    DimensionMismatch { expected: usize, got: usize },

    #[error("matrix is singular to working precision (condition estimate {condition:e})")]
    SingularMatrix { condition: f64 },

    #[error("metric is not positive definite (smallest eigenvalue ratio {ratio:e})")]
    NotPositiveDefinite { ratio: f64 },

    #[error("bilinear form is not Hermitian with respect to J (residual {residual:e})")]
    NotHermitian { residual: f64 },

    #[error("real basis is not adapted to the complex structure")]
    NotAdapted,

    #[error("invalid complex structure: {0}")]
    InvalidComplexStructure(String),

    #[error("complex structure is not integrable (Nijenhuis residual {residual:e})")]
    NotIntegrable { residual: f64 },

    #[error("complex structure is not abelian (residual {residual:e})")]
    NotAbelian { residual: f64 },

    #[error("Lie algebra is not unimodular (residual {residual:e})")]
    NotUnimodular { residual: f64 },

    #[error("operation requires a complex structure")]
    MissingComplexStructure,

    #[error("bracket is zero")]
    ZeroBracket,

    #[error("subspace is not an ideal (residual {residual:e})")]
    NotAnIdeal { residual: f64 },

    #[error("ideal is not abelian (residual {residual:e})")]
    NotAbelianIdeal { residual: f64 },

    #[error("invalid Cartan decomposition: {0}")]
    InvalidCartan(String),

    #[error("hypothesis violated: {0}")]
    HypothesisViolated(String),

    #[error("unknown catalog entry `{0}`")]
    UnknownEntry(String),

    #[error("catalog entry `{name}` failed verification: {detail}")]
    CatalogMismatch { name: String, detail: String },

    #[error("right-hand side is not finite at t = {t}")]
    NonFiniteRhs { t: f64 },

    #[error("flow kind incompatible with algebra: {0}")]
    IncompatibleFlow(String),

    #[error("parse error: {0}")]
    Parse(String),

    #[error("io error: {0}")]
    Io(String),
}

pub type Result<T> = std::result::Result<T, Error>;

impl From<std::io::Error> for Error {
    fn from(e: std::io::Error) -> Self {
        Error::Io(e.to_string())
    }
}

impl From<serde_json::Error> for Error {
    fn from(e: serde_json::Error) -> Self {
        Error::Parse(e.to_string())
    }
}
