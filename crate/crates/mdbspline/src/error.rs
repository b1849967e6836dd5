use thiserror::Error;

/// Errors raised by knot vector validation, sparse kernels, space
/// construction, extraction, and conversion.
#[derive(Error, Debug)]
pub enum Error {
    #[error("knot vector too short: degree {degree} needs at least {min} knots, got {len}")]
    TooShort {
        degree: usize,
        len: usize,
        min: usize,
    },

    #[error("knots must be non-decreasing: knots[{index}] = {value} is below its predecessor {prev}")]
    NonDecreasingViolated {
        index: usize,
        value: f64,
        prev: f64,
    },

    #[error("knot vector is not open: {reason}")]
    NotOpen { reason: &'static str },

    #[error("knot {knot} has multiplicity {multiplicity}, maximum allowed is {max}")]
    MultiplicityExceeded {
        knot: f64,
        multiplicity: usize,
        max: usize,
    },

    #[error("point {x} lies outside the domain [{min}, {max}]")]
    OutOfDomain { x: f64, min: f64, max: f64 },

    #[error("derivative order {order} exceeds the degree {degree}")]
    OrderTooHigh { order: usize, degree: usize },

    #[error("target space is not a superspace of the source: {reason}")]
    NotNested { reason: String },

    #[error("basic intervals differ: [{found_lo}, {found_hi}] vs expected [{expected_lo}, {expected_hi}]")]
    IntervalMismatch {
        expected_lo: f64,
        expected_hi: f64,
        found_lo: f64,
        found_hi: f64,
    },

    #[error("dimension mismatch: {context} ({left} vs {right})")]
    DimensionMismatch {
        context: &'static str,
        left: usize,
        right: usize,
    },

    #[error("matrix is numerically rank deficient: pivot {pivot} at index {index} below threshold {threshold}")]
    RankDeficient {
        index: usize,
        pivot: f64,
        threshold: f64,
    },

    #[error("least-squares residual {residual} exceeds the bound {bound}; system is inconsistent")]
    ResidualTooLarge { residual: f64, bound: f64 },

    #[error("join {join} carries no continuity constraints")]
    NoConstraints { join: usize },

    #[error("constraint column does not hold a single contiguous nonzero block: {reason}")]
    NonContiguousBlock { reason: String },

    #[error("constraint block sums to {sum} (scale {scale}), expected zero")]
    BlockSumNonzero { sum: f64, scale: f64 },

    #[error("constraint column is identically zero")]
    ZeroVector,

    #[error("periodic order {order} exceeds the admissible maximum {max}")]
    PeriodicOrderTooHigh { order: i32, max: i32 },

    #[error("periodic configuration is not supported: {reason}")]
    UnsupportedPeriodic { reason: String },

    #[error("space dimension {value} is not positive")]
    NonPositiveDimension { value: i64 },

    #[error("segment counts differ: source has {source_segments}, target has {target_segments}")]
    SegmentCountMismatch {
        source_segments: usize,
        target_segments: usize,
    },

    #[error("continuity order {kappa} at join {join} exceeds min segment degree {max}")]
    InvalidContinuity { join: usize, kappa: i32, max: i32 },

    #[error("continuity list has {found} entries, expected {expected}")]
    ContinuityCountMismatch { expected: usize, found: usize },

    #[error("coefficient vector has {found} entries, expected {expected}")]
    CoefficientCountMismatch { expected: usize, found: usize },

    #[error("matrix market parse error at line {line}: {msg}")]
    MatrixMarketParse { line: usize, msg: String },

    #[error(transparent)]
    Io(#[from] std::io::Error),
}

pub type Result<T> = std::result::Result<T, Error>;
