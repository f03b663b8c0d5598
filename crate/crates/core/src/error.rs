use thiserror::Error;

pub type Result<T, E = Error> = std::result::Result<T, E>;

#[derive(Debug, Error)]
pub enum Error {
    #[error("dimension mismatch: expected {expected}, found {found}")]
    DimensionMismatch { expected: usize, found: usize },

    /// A derivative of higher order than the field supports was requested.
    #[error("derivative order {requested} requested but field supports {available:?}")]
    DerivativeOrder { requested: usize, available: Option<usize> },

    #[error("matrix is not antisymmetric (defect {0:.3e})")]
    NotAntisymmetric(f64),

    #[error("singular matrix: {0}")]
    Singular(String),

    #[error("constraint {index} violated at point (residual {residual:.3e})")]
    ConstraintViolation { index: usize, residual: f64 },

    #[error("constraint gradients are linearly dependent at point")]
    DependentConstraints,

    #[error("second-class constraints: {{c{i}, c{j}}} = {bracket:.3e}")]
    SecondClass { i: usize, j: usize, bracket: f64 },

    #[error("invalid parameters: {0}")]
    InvalidParameters(String),

    #[error("Newton projection failed after {attempts} attempts")]
    NewtonFailure { attempts: usize },

    #[error("all critical-locus polynomials vanish identically")]
    DegeneratePolynomials,

    #[error("function is not fibre-holomorphic (dbar residual {residual:.3e})")]
    NotHolomorphic { residual: f64 },

    #[error("background prepotential does not satisfy the normalized equation (residual {residual:.3e})")]
    InvalidBackground { residual: f64 },

    #[error("family has no moment map")]
    MissingMomentMap,

    #[error("non-finite flow at curve parameter t = {time}")]
    NonFinite { time: f64 },

    #[error("fourier fit failed: {0}")]
    FitFailure(String),

    #[error("usage: {0}")]
    Usage(String),

    #[error(transparent)]
    Io(#[from] std::io::Error),

    #[error(transparent)]
    Json(#[from] serde_json::Error),
}
