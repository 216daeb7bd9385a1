use thiserror::Error;

/// Errors raised by the geometric and matrix-mechanics routines.
#[derive(Debug, Clone, PartialEq, Error)]
pub enum Error {
    #[error("dimension mismatch: expected {expected}, found {found}")]
    DimensionMismatch { expected: usize, found: usize },

    #[error("matrix is not square: {rows}x{cols}")]
    NotSquare { rows: usize, cols: usize },

    #[error("matrix literal is empty")]
    Empty,

    #[error("operator is not Hermitian (max entrywise deviation {deviation:e})")]
    NotHermitian { deviation: f64 },

    #[error("trace is {trace}, expected 1")]
    InvalidTrace { trace: f64 },

    #[error("operator is not positive semidefinite (min eigenvalue {min_eigenvalue:e})")]
    NotPositive { min_eigenvalue: f64 },

    #[error("zero vector has no ray")]
    ZeroVector,

    #[error("tangent vector is not horizontal (|<psi|v>| = {overlap:e})")]
    NotHorizontal { overlap: f64 },

    #[error("tangent vectors live at different base points")]
    BaseMismatch,

    #[error("probability vector invalid: {0}")]
    InvalidProbabilities(String),

    #[error("state is not pure (purity {purity})")]
    NotPure { purity: f64 },

    #[error("observable has a degenerate spectrum (smallest gap {gap:e}); critical points are not isolated")]
    NonGenericSpectrum { gap: f64 },

    #[error("operator is singular (|det| = {determinant:e})")]
    Singular { determinant: f64 },

    #[error("invalid convex weights: {0}")]
    InvalidWeights(String),

    #[error("dimensions {dim_a}x{dim_b} do not factor total dimension {dim}")]
    BadFactorization { dim: usize, dim_a: usize, dim_b: usize },

    #[error("subsystem dimension must be positive, got {0}")]
    InvalidDimension(usize),

    #[error("entanglement order must be at least 2, got {0}")]
    InvalidOrder(u32),

    #[error("index {index} out of range (bound {bound})")]
    IndexOutOfRange { index: usize, bound: usize },

    #[error("spherical chart is singular at r = {r}, theta = {theta}")]
    CoordinateSingularity { r: f64, theta: f64 },

    #[error("rate must be non-negative, got {0}")]
    NegativeRate(f64),

    #[error("invalid flow configuration: {0}")]
    InvalidConfig(String),

    #[error("state invariant violated at t = {time}: {detail}")]
    InvariantViolation { time: f64, detail: String },

    #[error("at least {min} samples required, got {got}")]
    TooFewSamples { min: usize, got: usize },

    #[error("Bloch vector has norm {norm} > 1")]
    OutsideBlochBall { norm: f64 },

    #[error("eigen-decomposition did not converge")]
    NoConvergence,
}

pub type Result<T> = std::result::Result<T, Error>;
