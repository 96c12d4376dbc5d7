use thiserror::Error;

use crate::geom::RationalPoint;

pub type Result<T> = std::result::Result<T, Error>;

#[derive(Debug, Error)]
pub enum Error {
    #[error("degenerate segment: both endpoints are {0}")]
    DegenerateSegment(RationalPoint),

    #[error("need at least {needed} points, got {got}")]
    TooFewPoints { needed: usize, got: usize },

    #[error("all points are collinear, the convex hull is degenerate")]
    DegenerateHull,

    #[error("duplicate point {point} at indices {first} and {second}")]
    DuplicatePoint {
        point: RationalPoint,
        first: usize,
        second: usize,
    },

    #[error("zero denominator in rational {0:?}")]
    ZeroDenominator(String),

    #[error("cannot parse rational {0:?}")]
    ParseRational(String),

    #[error("not in general position: points {0}, {1} and {2} are collinear")]
    NotGeneralPosition(usize, usize, usize),

    #[error("segments {0} and {1} overlap along a common subsegment")]
    OverlappingSegments(usize, usize),

    #[error("vertex {vertex} lies in the interior of segment {segment}")]
    VertexOnSegment { vertex: usize, segment: usize },

    #[error("visibility graph is disconnected ({components} components); this indicates a geometry bug")]
    Disconnected { components: usize },

    #[error("colouring has {got} entries but the point set has {expected} points")]
    ColouringLength { expected: usize, got: usize },

    #[error("colour {colour} at index {index} is outside [1, {k}]")]
    ColourOutOfRange { index: usize, colour: usize, k: usize },

    #[error("generator gave up after {attempts} attempts: {reason}")]
    Infeasible { attempts: usize, reason: String },

    #[error("invalid input: {0}")]
    Invalid(String),

    #[error(transparent)]
    Json(#[from] serde_json::Error),

    #[error(transparent)]
    Io(#[from] std::io::Error),
}
