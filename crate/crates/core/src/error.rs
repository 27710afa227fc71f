use thiserror::Error;

/// Errors produced anywhere in the toolkit.
#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum Error {
    #[error("contract violation: {0}")]
    Contract(String),

    #[error("block width mismatch: {left} bits vs {right} bits")]
    WidthMismatch { left: u32, right: u32 },

    #[error("invalid block width {0} (expected 1..=128 bits)")]
    InvalidWidth(u32),

    #[error("counter {counter} does not fit in a {bits}-bit block")]
    CounterOverflow { counter: u128, bits: u32 },

    #[error("toy permutation width {0} exceeds the 20-bit limit")]
    SizeLimit(u32),

    #[error("block count {got} must be even")]
    EvenLengthRequired { got: usize },

    #[error("matrix dimension mismatch: {0}")]
    DimensionMismatch(String),

    #[error("incomplete share set, missing indices {missing:?}")]
    IncompleteSet { missing: Vec<u8> },

    #[error("corrupt share set: {0}")]
    CorruptSet(String),

    #[error("container has bad magic")]
    BadMagic,

    #[error("unsupported container version {0}")]
    UnsupportedVersion(u8),

    #[error("container checksum mismatch (stored {stored:#010x}, computed {computed:#010x})")]
    ChecksumMismatch { stored: u32, computed: u32 },

    #[error("container truncated or mis-sized: {0}")]
    TruncatedContainer(String),

    #[error("malformed container header: {0}")]
    BadHeader(String),

    #[error("insufficient data: {got} samples, need at least {need}")]
    InsufficientData { got: usize, need: usize },

    #[error("storage I/O error: {0}")]
    Io(String),
}

impl Error {
    pub(crate) fn contract(msg: impl Into<String>) -> Self {
        Error::Contract(msg.into())
    }
}

impl From<std::io::Error> for Error {
    fn from(e: std::io::Error) -> Self {
        Error::Io(e.to_string())
    }
}

pub type Result<T> = std::result::Result<T, Error>;
