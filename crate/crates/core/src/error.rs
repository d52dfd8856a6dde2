use thiserror::Error;

pub type Result<T> = std::result::Result<T, Error>;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum Error {
    #[error("dimension {dim} exceeds configured cap {cap}")]
    DimensionOverflow { dim: usize, cap: usize },

    #[error("dimension mismatch: {left} vs {right}")]
    DimensionMismatch { left: usize, right: usize },

    #[error("operator is not Hermitian (deviation {deviation:e})")]
    NonHermitian { deviation: f64 },

    #[error("operator is not square ({rows}x{cols})")]
    NotSquare { rows: usize, cols: usize },

    #[error("unknown register `{0}`")]
    InvalidRegister(String),

    #[error("invalid register layout: {0}")]
    InvalidLayout(String),

    #[error("bitstring length {got} does not match expected {expected}")]
    LengthMismatch { expected: usize, got: usize },

    #[error("measurement outcome has probability {probability:e}; cannot renormalize")]
    DegenerateMeasurement { probability: f64 },

    #[error("block size {block} does not divide {n}")]
    NotADivisor { n: usize, block: usize },

    #[error("invalid state: {0}")]
    InvalidState(String),

    #[error("invalid ensemble: {0}")]
    InvalidEnsemble(String),

    #[error("invalid POVM: {0}")]
    InvalidPovm(String),

    #[error("extractor parameters violate k >= l + 2 log2(1/eps): k = {k}, required {required}")]
    ExtractorEntropy { k: f64, required: f64 },

    #[error("invalid parameter: {0}")]
    InvalidParameter(String),

    #[error("size cap exceeded: {0}")]
    SizeCap(String),

    #[error("key derivation returned an abort symbol")]
    NikeAbort,

    #[error("no discrete logarithm of {target} to base {generator} modulo {prime}")]
    DiscreteLogNotFound { prime: u64, generator: u64, target: u64 },

    #[error("distribution Z is not enumerable for scheme `{0}`")]
    NotEnumerable(String),

    #[error("unknown experiment `{0}`")]
    UnknownExperiment(String),

    #[error("i/o error: {0}")]
    Io(String),
}

impl From<std::io::Error> for Error {
    fn from(e: std::io::Error) -> Self {
        Error::Io(e.to_string())
    }
}

impl From<csv::Error> for Error {
    fn from(e: csv::Error) -> Self {
        Error::Io(e.to_string())
    }
}
