use thiserror::Error;

/// Errors raised by the geometry kernel.
///
/// Each variant maps to a stable upper-case code (see [`GeoError::code`]) that
/// the command-line front end and the JSON reports use verbatim.
#[derive(Debug, Clone, PartialEq, Error)]
pub enum GeoError {
    #[error("matrix is not Hermitian (deviation {deviation:.3e})")]
    NonHermitianInput { deviation: f64 },
    #[error("matrix is not unitary (deviation {deviation:.3e})")]
    NonUnitaryInput { deviation: f64 },
    #[error("function undefined on the spectrum: {0}")]
    DomainError(String),
    #[error("dimension mismatch: expected {expected}, got {got}")]
    DimensionMismatch { expected: usize, got: usize },
    #[error("projections are too far apart: ||P - Q|| = {distance:.6} >= 1")]
    GrassmannTooFar { distance: f64 },
    #[error("projection ranks differ: {0} vs {1}")]
    RankMismatch(usize, usize),
    #[error("point {index} is off the {space} space (deviation {deviation:.3e})")]
    OffSpacePoint {
        index: usize,
        space: String,
        deviation: f64,
    },
    #[error("curve has zero length")]
    ZeroLength,
    #[error("curve endpoints do not match (gap {gap:.3e})")]
    EndpointMismatch { gap: f64 },
    #[error("curves live on different spaces")]
    SpaceMismatch,
    #[error("matrix is zero")]
    ZeroMatrix,
    #[error("target is the identity")]
    IdentityTarget,
    #[error("speed budget exceeded: {0}")]
    SpeedBudgetExceeded(String),
    #[error("the minimal curve is unique; only GEODESIC mode is available")]
    UniqueGeodesicOnly,
    #[error("curve does not start at zero (||c(0)|| = {norm:.3e})")]
    BadStart { norm: f64 },
    #[error("endpoint spectral norm {norm:.6} exceeds pi")]
    NormBoundExceeded { norm: f64 },
    #[error("projector {index} does not commute with the endpoint (residual {residual:.3e})")]
    NoncommutingSystem { index: usize, residual: f64 },
    #[error("eigencurve tracking is ambiguous at node {node}")]
    TrackingAmbiguous { node: usize },
    #[error("precondition violated: {0}")]
    PreconditionViolated(String),
    #[error("invalid input: {0}")]
    InvalidInput(String),
}

impl GeoError {
    pub fn code(&self) -> &'static str {
        match self {
            GeoError::NonHermitianInput { .. } => "NON_HERMITIAN_INPUT",
            GeoError::NonUnitaryInput { .. } => "NON_UNITARY_INPUT",
            GeoError::DomainError(_) => "DOMAIN_ERROR",
            GeoError::DimensionMismatch { .. } => "DIMENSION_MISMATCH",
            GeoError::GrassmannTooFar { .. } => "GRASSMANN_TOO_FAR",
            GeoError::RankMismatch(..) => "RANK_MISMATCH",
            GeoError::OffSpacePoint { .. } => "OFF_SPACE_POINT",
            GeoError::ZeroLength => "ZERO_LENGTH",
            GeoError::EndpointMismatch { .. } => "ENDPOINT_MISMATCH",
            GeoError::SpaceMismatch => "SPACE_MISMATCH",
            GeoError::ZeroMatrix => "ZERO_MATRIX",
            GeoError::IdentityTarget => "IDENTITY_TARGET",
            GeoError::SpeedBudgetExceeded(_) => "SPEED_BUDGET_EXCEEDED",
            GeoError::UniqueGeodesicOnly => "UNIQUE_GEODESIC_ONLY",
            GeoError::BadStart { .. } => "BAD_START",
            GeoError::NormBoundExceeded { .. } => "NORM_BOUND_EXCEEDED",
            GeoError::NoncommutingSystem { .. } => "NONCOMMUTING_SYSTEM",
            GeoError::TrackingAmbiguous { .. } => "TRACKING_AMBIGUOUS",
            GeoError::PreconditionViolated(_) => "PRECONDITION_VIOLATED",
            GeoError::InvalidInput(_) => "INVALID_INPUT",
        }
    }

    /// True for errors caused by the geometry of otherwise well-formed inputs
    /// (as opposed to malformed matrices).
    pub fn is_precondition(&self) -> bool {
        matches!(
            self,
            GeoError::GrassmannTooFar { .. }
                | GeoError::RankMismatch(..)
                | GeoError::ZeroLength
                | GeoError::EndpointMismatch { .. }
                | GeoError::SpaceMismatch
                | GeoError::ZeroMatrix
                | GeoError::IdentityTarget
                | GeoError::SpeedBudgetExceeded(_)
                | GeoError::UniqueGeodesicOnly
                | GeoError::BadStart { .. }
                | GeoError::NormBoundExceeded { .. }
                | GeoError::NoncommutingSystem { .. }
                | GeoError::TrackingAmbiguous { .. }
                | GeoError::PreconditionViolated(_)
        )
    }
}

pub type Result<T> = std::result::Result<T, GeoError>;
