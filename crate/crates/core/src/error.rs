use thiserror::Error;

/// Domain errors raised by the library. The CLI maps these to exit status 1.
#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum Error {
    #[error("point is not in the rational span of the generators")]
    NotInSpan,
    #[error("generators are linearly dependent")]
    DependentGenerators,
    #[error("point lies outside the support of the fan")]
    PointOutsideSupport,
    #[error("maximal cone {cone} is not full-dimensional")]
    NotFullDimensional { cone: usize },
    #[error("heights do not induce a simplicial lower hull")]
    DegenerateHeights,
    #[error("invalid fan: {0}")]
    InvalidFan(String),
    #[error("fan is not eligible for GKZ mode: {0}")]
    NotGkzEligible(String),
    #[error("delta stabilization did not settle within {halvings} halvings")]
    NoStabilization { halvings: u32 },
    #[error("degree functional is not strictly positive on the support")]
    UnboundedDegree,
    #[error("quotient dimension {dim} exceeds the normalized volume {volume}")]
    DimensionOvershoot { dim: usize, volume: usize },
    #[error("quotient did not stabilize within {cap} offsets (dimension {dim}, volume {volume})")]
    NoStabilizationWindow { cap: i64, dim: usize, volume: usize },
    #[error("no integral particular solution for the exponent lattice")]
    NoParticularSolution,
    #[error("coordinate x_{index} is zero")]
    ZeroCoordinate { index: usize },
    #[error("dimension mismatch: {0}")]
    DimensionMismatch(String),
}

pub type Result<T> = std::result::Result<T, Error>;

impl Error {
    /// Stable machine-readable name used in error objects.
    pub fn kind(&self) -> &'static str {
        match self {
            Error::NotInSpan => "not_in_span",
            Error::DependentGenerators => "dependent_generators",
            Error::PointOutsideSupport => "point_outside_support",
            Error::NotFullDimensional { .. } => "not_full_dimensional",
            Error::DegenerateHeights => "degenerate_heights",
            Error::InvalidFan(_) => "invalid_fan",
            Error::NotGkzEligible(_) => "not_gkz_eligible",
            Error::NoStabilization { .. } => "no_stabilization",
            Error::UnboundedDegree => "unbounded_degree",
            Error::DimensionOvershoot { .. } => "dimension_overshoot",
            Error::NoStabilizationWindow { .. } => "no_stabilization_window",
            Error::NoParticularSolution => "no_particular_solution",
            Error::ZeroCoordinate { .. } => "zero_coordinate",
            Error::DimensionMismatch(_) => "dimension_mismatch",
        }
    }
}
