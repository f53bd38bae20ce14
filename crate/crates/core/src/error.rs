use thiserror::Error;

pub type Result<T> = std::result::Result<T, Error>;

#[derive(Debug, Error)]
pub enum Error {
    #[error("io error: {0}")]
    Io(#[from] std::io::Error),

    #[error("parse error at line {line}: {msg}")]
    Parse { line: usize, msg: String },

    #[error("degenerate triangle {triangle}: area {area:e}")]
    DegenerateTriangle { triangle: usize, area: f64 },

    #[error("non-conforming mesh: {0}")]
    NonConforming(String),

    #[error("collinear corners")]
    CollinearCorners,

    #[error("degenerate knot multiset: {0}")]
    DegenerateKnots(String),

    #[error("point ({x}, {y}) lies outside the domain")]
    OutsideDomain { x: f64, y: f64 },

    #[error("singular matrix: {0}")]
    Singular(String),

    #[error("index {index} out of range (len {len})")]
    OutOfRange { index: usize, len: usize },

    #[error("invalid argument: {0}")]
    InvalidArgument(String),

    #[error("evaluator failed: {0}")]
    Evaluator(String),
}
