use thiserror::Error;

pub type Result<T, E = Error> = core::result::Result<T, E>;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum Error {
    #[error("image has zero width or height")]
    EmptyImage,
    #[error("expected {expected} pixels, got {actual}")]
    PixelCount { expected: usize, actual: usize },
    #[error("image contains NaN or infinite values")]
    NonFinite,
    #[error("expected a square power-of-two image, got {width}x{height}")]
    NotPowerOfTwoSquare { width: usize, height: usize },
    #[error("{levels} decomposition levels do not fit a {size}x{size} image")]
    TooManyLevels { levels: usize, size: usize },
    #[error("image is {actual:?}, expected {expected:?}")]
    DimensionMismatch {
        expected: (usize, usize),
        actual: (usize, usize),
    },
    #[error("coefficient set does not match the transform it is used with")]
    ShapeMismatch,
    #[error("expected {expected} weights, got {actual}")]
    WeightCount { expected: usize, actual: usize },
    #[error("invalid configuration: {0}")]
    InvalidConfig(&'static str),
    #[error("the target set is empty")]
    EmptyTargets,
}
