use thiserror::Error;

pub type Result<T> = std::result::Result<T, MapError>;

#[derive(Debug, Error)]
pub enum MapError {
    #[error("invalid curve parameter: {0}")]
    InvalidParameter(String),

    #[error("polygon is clockwise; vertices must be given counterclockwise")]
    Orientation,

    #[error("polygon is not simple: {0}")]
    SelfIntersecting(String),

    #[error("the origin must lie strictly inside the curve")]
    OriginOutside,

    #[error("invalid mesh request: {0}")]
    InvalidMesh(String),

    #[error("operation requires a {expected} mesh")]
    WrongMeshKind { expected: &'static str },

    #[error("parameter {0} is a corner of the curve")]
    CornerParameter(f64),

    #[error("length mismatch: expected {expected} values, got {got}")]
    LengthMismatch { expected: usize, got: usize },

    #[error("kernel singular: parameters {t} and {tau} map to the same point")]
    Singular { t: f64, tau: f64 },

    #[error("linear system is numerically singular (condition estimate {0:.3e})")]
    IllConditioned(f64),

    #[error("density modulus {0:.3e} vanishes at a node; the solve is degenerate")]
    DegenerateDensity(f64),

    #[error("boundary correspondence under-resolved: angle step {step:.3} at node {node}; refine the mesh")]
    Resolution { node: usize, step: f64 },

    #[error("point {0} is outside the admissible domain: {1}")]
    Domain(String, &'static str),

    #[error("no analytic reference for {0} curves")]
    NoAnalyticReference(&'static str),

    #[error(transparent)]
    Io(#[from] std::io::Error),

    #[error(transparent)]
    Json(#[from] serde_json::Error),
}
