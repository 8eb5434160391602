use thiserror::Error;

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum ParamsError {
    #[error("unsupported security level `{0}` (expected 1, 3 or 5)")]
    UnsupportedLevel(String),
    #[error("modulus {0} is not a Mersenne prime")]
    NotMersenne(u8),
    #[error("inconsistent parameter set: {0}")]
    Inconsistent(&'static str),
}

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum PrgError {
    #[error("keystream request for zero bytes")]
    EmptyRequest,
    #[error("keystream request of {0} bytes overflows the 48-bit block counter")]
    CounterOverflow(usize),
    #[error("invalid hex for {what}: expected {expected} hex digits")]
    BadHex { what: &'static str, expected: usize },
}

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum SampleError {
    #[error("modulus {0} is not a Mersenne prime")]
    UnsupportedModulus(u8),
    #[error("insufficient input: tau = {tau} bytes but n' = {n_prime} elements requested")]
    InsufficientInput { tau: usize, n_prime: usize },
    #[error("raw byte string has {actual} bytes, expected tau = {expected}")]
    LengthMismatch { expected: usize, actual: usize },
    #[error("element {value} at index {index} is not below modulus {q}")]
    OutOfRange { index: usize, value: u8, q: u8 },
    #[error(transparent)]
    Prg(#[from] PrgError),
}

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum FomError {
    #[error("{0} metrics must carry {1}")]
    MissingField(&'static str, &'static str),
    #[error("{0} metrics must not carry {1}")]
    UnexpectedField(&'static str, &'static str),
    #[error("{0} must be positive")]
    NonPositive(&'static str),
    #[error("{0} must not be negative")]
    Negative(&'static str),
    #[error("frequency must be positive")]
    ZeroFrequency,
}
