use thiserror::Error;

/// Errors surfaced by the precoding and simulation pipeline.
#[derive(Error, Debug, Clone, PartialEq)]
pub enum Error {
    #[error("matrix contains non-finite entries")]
    NonFinite,

    #[error("matrix is not Hermitian within tolerance (residual {residual:.3e}, bound {bound:.3e})")]
    NotHermitian { residual: f64, bound: f64 },

    /// The effective channel Gram matrix is (numerically) rank deficient.
    /// Signals that the stream count exceeds the usable channel rank.
    #[error("Gram matrix is singular or not positive definite (min eigenvalue {min_eig:.3e}, threshold {threshold:.3e})")]
    SingularGram { min_eig: f64, threshold: f64 },

    #[error("dimension mismatch: {0}")]
    DimensionMismatch(String),

    #[error("index out of range: {0}")]
    IndexOutOfRange(String),

    #[error("invalid system configuration: {0}")]
    InvalidConfig(String),

    #[error("precoder has zero total power")]
    ZeroPrecoder,

    #[error("singular channel draws exceeded the redraw budget ({attempts} attempts)")]
    RedrawBudgetExceeded { attempts: usize },

    #[error("{0}")]
    Io(String),
}

pub type Result<T> = std::result::Result<T, Error>;
