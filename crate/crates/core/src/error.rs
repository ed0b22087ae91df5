use thiserror::Error;

use crate::geometry::PointId;

#[derive(Debug, Error)]
pub enum Error {
    #[error("empty input")]
    EmptyInput,
    #[error("need at least {need} points, got {got}")]
    TooFewPoints { need: usize, got: usize },
    #[error("all input points are collinear")]
    AllCollinear,
    #[error("point {index} has a non-finite coordinate")]
    NonFinite { index: usize },
    #[error("duplicate point: {point} coincides with vertex {existing}")]
    DuplicatePoint { point: PointId, existing: PointId },
    #[error("triangle vertices are not in counter-clockwise order")]
    NotCounterClockwise,
    #[error("invalid parameter: {0}")]
    InvalidParameter(String),
    #[error("triangle {triangle} is not in conflict with the point")]
    NotInConflict { triangle: u32 },
    #[error("point coincides with vertex {existing}")]
    CoincidentVertex { existing: PointId },
    #[error("line {line}: {message}")]
    Parse { line: usize, message: String },
    #[error("internal invariant violated: {0}")]
    Internal(String),
}

pub type Result<T, E = Error> = std::result::Result<T, E>;
