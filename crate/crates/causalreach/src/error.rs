use thiserror::Error;

pub type Result<T> = std::result::Result<T, Error>;

#[derive(Debug, Error)]
pub enum Error {
    #[error("point {point:?} lies outside the domain of `{manifold}`")]
    OutsideDomain { manifold: String, point: Vec<f64> },

    #[error("metric is numerically degenerate at {point:?} (|det| = {det:.3e})")]
    DegenerateMetric { point: Vec<f64>, det: f64 },

    #[error("metric does not have index 1 at {point:?}")]
    BadIndex { point: Vec<f64> },

    #[error("point {point:?} is too close to the domain boundary for the difference stencil")]
    StencilOutsideDomain { point: Vec<f64> },

    #[error("control row {row} violates the causal cone: u0 = {u0}, |u_sp| = {spatial}")]
    ConeViolation { row: usize, u0: f64, spatial: f64 },

    #[error("bracket expression exceeds supported nesting depth 3")]
    BracketTooDeep,

    #[error("frame index {index} out of range for rank {rank}")]
    BadFrameIndex { index: usize, rank: usize },

    #[error("curve has a spacelike segment at step {step} (g = {value:.3e})")]
    SpacelikeSegment { step: usize, value: f64 },

    #[error("unknown manifold `{name}`; available: {available}")]
    UnknownManifold { name: String, available: String },

    #[error("horizon {horizon} exceeds the configured covering copies ({copies}) of the quotient")]
    HorizonExceedsCover { horizon: f64, copies: usize },

    #[error("invalid configuration: {0}")]
    InvalidConfig(String),

    #[error("manifold definition error: {0}")]
    ManifoldDef(String),

    #[error(transparent)]
    Io(#[from] std::io::Error),

    #[error(transparent)]
    Json(#[from] serde_json::Error),
}
