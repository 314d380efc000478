use thiserror::Error;

pub type Result<T, E = Error> = std::result::Result<T, E>;

#[derive(Debug, Error)]
pub enum Error {
    #[error("matrix is not positive definite (pivot {pivot} at row {row} <= tolerance {tol:e})")]
    NotPositiveDefinite { row: usize, pivot: f64, tol: f64 },

    #[error("dimension mismatch: expected {expected}, found {found}")]
    DimensionMismatch { expected: usize, found: usize },

    #[error("matrix is not symmetric (max asymmetry {asymmetry:e})")]
    NotSymmetric { asymmetry: f64 },

    #[error("matrix contains non-finite entries")]
    NonFinite,

    #[error("empty matrix")]
    Empty,

    #[error("zero vector has no Rayleigh quotient")]
    ZeroVector,

    #[error("shift E = {shift} is not above lambda0 = {lambda0} (margin {margin:e})")]
    ShiftBelowLambda0 { shift: f64, lambda0: f64, margin: f64 },

    #[error("level index k = {k} out of range 1..={max}")]
    KTooLarge { k: usize, max: usize },

    #[error("no eigenvalue above lambda0 at index k = {k}: level is negative at E = {shift}")]
    NoGap { k: usize, shift: f64 },

    #[error("shift E = {shift} is singular for the resolvent")]
    SingularShift { shift: f64 },

    #[error("overlap matrices must be the identity; orthonormalize the operator first")]
    NotOrthonormal,

    #[error("invalid configuration: {0}")]
    InvalidConfig(String),

    #[error("quadrature produced a non-finite value for {0}")]
    QuadratureFailure(String),

    #[error("free operator has an eigenvalue {value} inside the gap; cannot split by sign")]
    DegenerateSplit { value: f64 },

    #[error("level k = {k} did not converge in {iterations} iterations (residual {residual:e})")]
    NotConverged { k: usize, iterations: usize, residual: f64 },

    #[error("invalid quantum numbers: {0}")]
    InvalidQuantumNumbers(String),

    #[error(transparent)]
    Io(#[from] std::io::Error),

    #[error(transparent)]
    Json(#[from] serde_json::Error),

    #[error(transparent)]
    Csv(#[from] csv::Error),
}

impl Error {
    /// Process exit code for the command-line runner: 2 for user or
    /// configuration errors, 3 when the gap assumption fails, 4 for
    /// numerical breakdown.
    pub fn exit_code(&self) -> i32 {
        match self {
            Error::InvalidConfig(_)
            | Error::InvalidQuantumNumbers(_)
            | Error::KTooLarge { .. }
            | Error::NotOrthonormal
            | Error::Io(_)
            | Error::Json(_)
            | Error::Csv(_) => 2,
            Error::NoGap { .. } | Error::ShiftBelowLambda0 { .. } => 3,
            Error::NotPositiveDefinite { .. }
            | Error::DimensionMismatch { .. }
            | Error::NotSymmetric { .. }
            | Error::NonFinite
            | Error::Empty
            | Error::ZeroVector
            | Error::SingularShift { .. }
            | Error::QuadratureFailure(_)
            | Error::DegenerateSplit { .. }
            | Error::NotConverged { .. } => 4,
        }
    }
}
