use thiserror::Error;

pub type Result<T, E = Error> = std::result::Result<T, E>;

/// Failures while decoding a serialized record.
#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum DecodeError {
    #[error("input truncated")]
    Truncated,
    #[error("bad magic bytes")]
    BadMagic,
    #[error("unsupported format version {0}")]
    UnsupportedVersion(u8),
    #[error("checksum mismatch")]
    Checksum,
    #[error("suite id {found:#04x} does not match expected {expected:#04x}")]
    WrongSuite { expected: u8, found: u8 },
    #[error("unknown suite id {0:#04x}")]
    UnknownSuite(u8),
    #[error("record kind {found:#04x} does not match expected {expected:#04x}")]
    WrongKind { expected: u8, found: u8 },
    #[error("expected field tag {expected:#04x}, found {found:#04x}")]
    UnexpectedTag { expected: u8, found: u8 },
    #[error("invalid group element or scalar encoding")]
    InvalidElement,
    #[error("malformed field: {0}")]
    Malformed(&'static str),
    #[error("trailing bytes after record")]
    TrailingBytes,
}

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum Error {
    #[error("vector length must be at least 1")]
    EmptyVector,
    #[error("length mismatch: expected {expected}, got {got}")]
    LengthMismatch { expected: usize, got: usize },
    #[error("product element dimension mismatch: {left} vs {right}")]
    DimensionMismatch { left: usize, right: usize },
    #[error("delegatable slot at index {0} is not allowed here")]
    DelegatableSlot(usize),
    #[error("invalid delegation: {0}")]
    InvalidDelegation(String),
    #[error("payload of {len} bytes exceeds the limit of {max} bytes")]
    PayloadTooLarge { len: usize, max: usize },
    #[error("scheme requires an asymmetric group suite")]
    AsymmetricSuiteRequired,
    #[error("index {index} out of range for {len} entries")]
    IndexOutOfRange { index: usize, len: usize },
    #[error("invalid predicate encoding: {0}")]
    InvalidEncoding(String),
    #[error("decode error: {0}")]
    Decode(#[from] DecodeError),
}
