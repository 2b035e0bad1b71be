use thiserror::Error;

/// Largest tuple size accepted by the engine. Neuron addresses are `u32`.
pub const MAX_TUPLE_SIZE: usize = 24;

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum WisardError {
    #[error("tuple size {0} is out of range (1..={MAX_TUPLE_SIZE})")]
    TupleSizeOutOfRange(usize),

    #[error("retina must have at least one pixel")]
    EmptyRetina,

    #[error("pattern has {actual} bits but {width}x{height} requires {expected}")]
    BitCountMismatch {
        width: usize,
        height: usize,
        expected: usize,
        actual: usize,
    },

    #[error("pattern bit at index {index} is {value}, expected 0 or 1")]
    NonBinaryBit { index: usize, value: u8 },

    #[error("invalid pattern: {0}")]
    InvalidPattern(String),

    #[error("pattern is {actual_width}x{actual_height} but the model retina is {width}x{height}")]
    DimensionMismatch {
        width: usize,
        height: usize,
        actual_width: usize,
        actual_height: usize,
    },

    #[error("pixel index {index} is out of bounds for a retina of {len} pixels")]
    IndexOutOfBounds { index: usize, len: usize },

    #[error("label must not be empty")]
    EmptyLabel,

    #[error("unknown label {0:?}")]
    UnknownLabel(String),

    #[error("bleaching level must be at least 1")]
    InvalidBleach,

    #[error("invalid mapping: {0}")]
    InvalidMapping(String),

    #[error("unsupported model format version {found} (expected {expected})")]
    VersionMismatch { found: u64, expected: u64 },

    #[error("malformed model document: {0}")]
    Malformed(String),

    #[error("model invariant violated: {0}")]
    InvariantViolation(String),
}

impl WisardError {
    /// Stable machine-readable code, shared by the CLI and the HTTP service.
    pub fn code(&self) -> &'static str {
        match self {
            WisardError::TupleSizeOutOfRange(_) => "INVALID_TUPLE_SIZE",
            WisardError::EmptyRetina => "EMPTY_RETINA",
            WisardError::BitCountMismatch { .. }
            | WisardError::NonBinaryBit { .. }
            | WisardError::InvalidPattern(_) => {
                "INVALID_PATTERN"
            }
            WisardError::DimensionMismatch { .. } => "DIMENSION_MISMATCH",
            WisardError::IndexOutOfBounds { .. } => "INDEX_OUT_OF_BOUNDS",
            WisardError::EmptyLabel => "EMPTY_LABEL",
            WisardError::UnknownLabel(_) => "UNKNOWN_LABEL",
            WisardError::InvalidBleach => "INVALID_BLEACH",
            WisardError::InvalidMapping(_) => "INVALID_MAPPING",
            WisardError::VersionMismatch { .. } => "VERSION_MISMATCH",
            WisardError::Malformed(_) => "MALFORMED_MODEL",
            WisardError::InvariantViolation(_) => "INVARIANT_VIOLATION",
        }
    }
}

pub type Result<T> = std::result::Result<T, WisardError>;
