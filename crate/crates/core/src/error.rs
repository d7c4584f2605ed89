use thiserror::Error;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum GeomError {
    #[error("evaluation point coincides with a pole")]
    PoleHit,
    #[error("series budget exhausted before reaching tolerance {0:e}")]
    ToleranceUnreachable(f64),
    #[error("point outside the admissible domain: {0}")]
    DomainViolation(String),
    #[error("point lies on a Dirac string of the chosen gauge")]
    GaugeStringHit,
    #[error("triple is not definite")]
    DefiniteViolation,
    #[error("coefficient matrix nearly degenerate (condition {0:e})")]
    NearDegenerate(f64),
    #[error("empty sample region")]
    EmptyRegion,
    #[error("radius must be positive")]
    NonPositiveRadius,
    #[error("(beta, tau) pair not in the ALG table")]
    InvalidPair,
    #[error("evaluation at the singular fiber")]
    SingularFiberHit,
    #[error("stencil leaves the admissible grid")]
    StencilOverrun,
    #[error("measured decay slower than declared: {0}")]
    DecayViolation(String),
    #[error("sector data mismatch: {0}")]
    SectorMismatch(String),
    #[error("scale parameter too large: {0}")]
    ScaleViolation(String),
    #[error("pole set is not symmetric under the involution")]
    FixedPointMismatch,
    #[error("boundary twist violated by {0:e}")]
    BoundaryTwistViolation(f64),
    #[error("ill-conditioned mode solve: {0}")]
    IllConditioned(String),
    #[error("insufficient sample range")]
    InsufficientRange,
    #[error("region unresolved: {0}")]
    RegionUnresolved(String),
    #[error("invalid fiber configuration: {0}")]
    InvalidConfig(String),
    #[error("primitive does not reproduce the form difference (defect {0:e})")]
    PotentialMismatch(f64),
    #[error("invalid parameter: {0}")]
    InvalidParameter(String),
}

pub type Result<T> = std::result::Result<T, GeomError>;
