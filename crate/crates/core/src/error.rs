use thiserror::Error;

/// Every failure the engine reports. Numeric payloads are carried as `f64`
/// regardless of the scalar type used for the computation.
#[derive(Debug, Clone, PartialEq, Error)]
pub enum KdError {
    #[error("dimension mismatch: expected {expected}, found {found}")]
    DimensionMismatch { expected: usize, found: usize },

    #[error("invalid dimension {0}: at least 2 required")]
    InvalidDimension(usize),

    #[error("dimension {found} too small: at least {min} required")]
    DimensionTooSmall { found: usize, min: usize },

    #[error("value is not finite")]
    NonFinite,

    #[error("state is not normalized (norm^2 = {0})")]
    NotNormalized(f64),

    #[error("basis is not orthonormal (max deviation {0:e})")]
    NotOrthonormal(f64),

    #[error("operator is not Hermitian (max deviation {0:e})")]
    NotHermitian(f64),

    #[error("not a density operator: {0}")]
    NotDensityOperator(String),

    #[error("near-orthogonal overlap |<{b}|{a}>| = {modulus:e} below threshold")]
    NearOrthogonalOverlap { a: usize, b: usize, modulus: f64 },

    #[error("basis mismatch: {0}")]
    BasisMismatch(String),

    #[error("grid too coarse: {0}")]
    GridTooCoarse(String),

    #[error("post-selection impossible: Born probability of outcome {b} is {probability:e}")]
    PostSelectionImpossible { b: usize, probability: f64 },

    #[error("insufficient samples: {found} < {min}")]
    InsufficientSamples { found: usize, min: usize },

    #[error("invalid parameter: {0}")]
    InvalidParameter(String),
}

impl KdError {
    /// Stable machine-readable code used by the CLI error reports.
    pub fn code(&self) -> &'static str {
        match self {
            KdError::DimensionMismatch { .. } => "DIMENSION_MISMATCH",
            KdError::InvalidDimension(_) => "INVALID_DIMENSION",
            KdError::DimensionTooSmall { .. } => "DIMENSION_TOO_SMALL",
            KdError::NonFinite => "NON_FINITE",
            KdError::NotNormalized(_) => "NOT_NORMALIZED",
            KdError::NotOrthonormal(_) => "NOT_ORTHONORMAL",
            KdError::NotHermitian(_) => "NOT_HERMITIAN",
            KdError::NotDensityOperator(_) => "NOT_DENSITY_OPERATOR",
            KdError::NearOrthogonalOverlap { .. } => "NEAR_ORTHOGONAL",
            KdError::BasisMismatch(_) => "BASIS_MISMATCH",
            KdError::GridTooCoarse(_) => "GRID_TOO_COARSE",
            KdError::PostSelectionImpossible { .. } => "POST_SELECTION_IMPOSSIBLE",
            KdError::InsufficientSamples { .. } => "INSUFFICIENT_SAMPLES",
            KdError::InvalidParameter(_) => "INVALID_PARAMETER",
        }
    }
}

pub type Result<T, E = KdError> = std::result::Result<T, E>;

pub(crate) fn ensure_dim(expected: usize, found: usize) -> Result<()> {
    if expected == found {
        Ok(())
    } else {
        Err(KdError::DimensionMismatch { expected, found })
    }
}
