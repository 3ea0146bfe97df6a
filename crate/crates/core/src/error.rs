use thiserror::Error;

use crate::qh_solver::KEstimate;

#[derive(Debug, Error)]
pub enum Error {
    #[error("invalid domain spec: {0}")]
    InvalidSpec(String),
    #[error("invalid point: {0}")]
    InvalidPoint(String),
    #[error("dimension mismatch: expected {expected}, got {got}")]
    DimensionMismatch { expected: usize, got: usize },
    #[error("point outside domain: {0}")]
    PointOutsideDomain(String),
    #[error("sampling exhausted: {0}")]
    SamplingExhausted(String),
    #[error("points are not in a radial configuration")]
    NotRadialConfiguration,
    #[error("points are not on a nearest-boundary segment")]
    NotOnNearestBoundarySegment,
    #[error("inversion center singularity")]
    CenterSingularity,
    #[error("argument out of range: {0}")]
    OutOfRange(String),
    #[error("segment leaves the domain")]
    SegmentExitsDomain,
    #[error("no closed form applies to this configuration")]
    NoClosedForm,
    #[error("numeric k supports dimensions 2 and 3, got {0}")]
    UnsupportedDimension(usize),
    #[error("refinement budget exceeded; best estimate {}", .0.value)]
    BudgetExceeded(Box<KEstimate>),
    #[error("vertex index {index} is not interior to a path of {len} vertices")]
    IndexOutOfRange { index: usize, len: usize },
    #[error("hypothesis never satisfied for {0}")]
    NoHypothesisHits(String),
    #[error("unknown bound {0}")]
    UnknownBound(String),
    #[error("profile axis mismatch: expected {expected}, got {got}")]
    AxisMismatch { expected: String, got: String },
    #[error("usage: {0}")]
    Usage(String),
    #[error("i/o failure on {path}: {source}")]
    Io {
        path: String,
        #[source]
        source: std::io::Error,
    },
}

pub type Result<T> = std::result::Result<T, Error>;
