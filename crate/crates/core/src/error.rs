use thiserror::Error;

/// Errors raised by the geometry, map, and iteration layers.
#[derive(Debug, Clone, PartialEq, Error)]
pub enum Error {
    #[error("dimension mismatch: expected {expected}, got {actual}")]
    DimensionMismatch { expected: usize, actual: usize },

    #[error("invalid exponent p = {0}; expected p >= 1 or infinity")]
    InvalidExponent(f64),

    #[error("space dimension must be positive")]
    ZeroDimension,

    #[error("non-finite coordinate in point")]
    NonFinite,

    #[error("invalid set: {0}")]
    InvalidSet(String),

    #[error("operation requires a convex set (interval or polytope)")]
    NonConvexSet,

    #[error("hausdorff distance between {0} is not supported in dimension > 1")]
    UnsupportedHausdorff(&'static str),

    #[error("invalid map specification: {0}")]
    InvalidMap(String),

    #[error("point {point:?} lies outside the map domain")]
    OutOfDomain { point: Vec<f64> },

    #[error("parameter {name} = {value} out of range: {expected}")]
    ParameterOutOfRange {
        name: &'static str,
        value: f64,
        expected: &'static str,
    },

    #[error("{0} must be nonempty")]
    Empty(&'static str),

    #[error("sequence length mismatch: {0} vs {1}")]
    LengthMismatch(usize, usize),

    #[error("sequence too short: need at least {needed}, got {actual}")]
    SequenceTooShort { needed: usize, actual: usize },

    #[error("maps do not commute: x = {x:?} in T(y), y = {y:?}, dist(t(x), T(t(y))) = {distance}")]
    NotCommuting {
        x: Vec<f64>,
        y: Vec<f64>,
        distance: f64,
    },

    #[error("T(x) misses the fixed-point set of t at x = {x:?} (distance {distance})")]
    EmptyIntersection { x: Vec<f64>, distance: f64 },

    #[error("no approximate fixed point of t found: {0}")]
    NoFixedPoints(String),

    #[error("could not draw a subsequence of length >= {window} after {attempts} attempts")]
    SubsequenceRetryExhausted { window: usize, attempts: usize },
}

pub type Result<T, E = Error> = std::result::Result<T, E>;
