//! Error type shared by all modules of the crate.

use thiserror::Error;

#[derive(Debug, Error)]
pub enum Error {
    /// Operands live on spaces of different dimension.
    #[error("dimension mismatch: {0}")]
    DimensionMismatch(String),

    /// A joint-space matrix whose size is not the product of the declared
    /// subsystem dimensions.
    #[error("dimensions do not factor: matrix is {total}x{total} but dim_s*dim_e = {dim_s}*{dim_e}")]
    NonFactoringDimensions {
        total: usize,
        dim_s: usize,
        dim_e: usize,
    },

    #[error("invalid dimension: {0}")]
    InvalidDimension(String),

    /// The frame map is singular (or nearly so); no canonical dual exists.
    #[error("not a frame: lower frame bound {bound:.3e} <= tolerance {tol:.3e}")]
    NotAFrame { bound: f64, tol: f64 },

    #[error("frame carries no dual family")]
    MissingDual,

    /// A claimed dual fails the reconstruction identity.
    #[error("duality verification failed: worst residual {0:.3e}")]
    DualityViolation(f64),

    #[error("not a density operator: trace {trace:.6e}, min eigenvalue {min_eig:.3e}")]
    NotADensity { trace: f64, min_eig: f64 },

    /// A frame element with negative eigenvalues met a non-vanishing
    /// environmental operator, so the decomposition is not one-sided positive.
    #[error(
        "non-positive frame element at index {index} has non-vanishing environmental operator (trace norm {norm:.3e})"
    )]
    NonPositiveFrameElement { index: usize, norm: f64 },

    /// The reduced term count and the Schmidt rank disagree; the two routes
    /// must coincide, so this signals an internal inconsistency.
    #[error("OPD cost {reduced} disagrees with operator Schmidt rank {schmidt}")]
    CostMismatch { reduced: usize, schmidt: usize },

    #[error("internal consistency failure: {0}")]
    Inconsistency(String),

    #[error("invalid parameter: {0}")]
    InvalidParameter(String),

    #[error("parse error: {0}")]
    Parse(String),

    #[error(transparent)]
    Json(#[from] serde_json::Error),

    #[error(transparent)]
    Io(#[from] std::io::Error),
}

pub type Result<T> = std::result::Result<T, Error>;
