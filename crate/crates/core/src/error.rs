use thiserror::Error;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum Error {
    #[error("dimension mismatch: expected {expected}, found {found}")]
    DimensionMismatch { expected: usize, found: usize },

    #[error("basis matrices are linearly dependent (smallest singular value {sigma_min:e})")]
    LinearDependence { sigma_min: f64 },

    #[error("commutator [E{i}, E{j}] leaves the span of the basis (residual {residual:e})")]
    NotClosed { i: usize, j: usize, residual: f64 },

    #[error("unknown algebra name `{0}`")]
    UnknownName(String),

    #[error("algebra has no matrix representation")]
    MissingRep,

    #[error("matrix became singular (|det| = {det:e}) at step {step}")]
    SingularMatrix { det: f64, step: usize },

    #[error("Lagrangian is only positively homogeneous and undefined at the zero fiber point")]
    ZeroFiberPoint,

    #[error("matrix is not symmetric (max asymmetry {residual:e})")]
    AsymmetricInput { residual: f64 },

    #[error("structure constants violate the Jacobi identity (residual {jacobi:e})")]
    BadAlgebra { jacobi: f64 },

    #[error("Finsler norm vanishes at the given state")]
    ZeroFinslerNorm,

    #[error("velocity must be non-zero")]
    ZeroVelocity,

    #[error("invalid structure constants: {0}")]
    InvalidConstants(String),

    #[error("parse error at {location}: {message}")]
    Parse { location: String, message: String },

    #[error("invalid argument: {0}")]
    InvalidArgument(String),
}

pub type Result<T> = std::result::Result<T, Error>;
