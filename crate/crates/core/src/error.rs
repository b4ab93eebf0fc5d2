use thiserror::Error;

pub type Result<T, E = Error> = std::result::Result<T, E>;

/// Coarse classification used by front ends to pick exit codes.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum ErrorKind {
    /// Bad input: malformed laws, shape mismatches, out-of-range parameters.
    Config,
    /// An enumeration or search would exceed the configured budget.
    Resource,
    /// A computed object broke an invariant that construction should guarantee.
    Invariant,
}

#[derive(Debug, Error)]
pub enum Error {
    #[error("shape mismatch: {left:?} vs {right:?}")]
    ShapeMismatch {
        left: (usize, usize),
        right: (usize, usize),
    },

    #[error("negative mass {value} at index {index}")]
    NegativeMass { index: usize, value: f64 },

    #[error("invalid probability law: {0}")]
    InvalidLaw(String),

    #[error("sequence lengths differ: {left} vs {right}")]
    LengthMismatch { left: usize, right: usize },

    #[error("symbol {symbol} outside alphabet of size {size}")]
    SymbolOutOfRange { symbol: usize, size: usize },

    #[error("invalid distortion measure: {0}")]
    InvalidDistortion(String),

    #[error("invalid argument: {0}")]
    InvalidArgument(String),

    #[error("enumeration of {required} points exceeds the budget of {limit}; {hint}")]
    BudgetExceeded {
        required: u128,
        limit: u64,
        hint: &'static str,
    },

    #[error("output symbol {symbol} has zero marginal mass; run reduce_alphabet first")]
    ZeroMarginalOutput { symbol: usize },

    #[error("alphabet reduction removed every reproduction symbol (threshold {threshold})")]
    EmptyAlphabet { threshold: f64 },

    #[error("pair (x={x}, y={y}) has backward mass {mass}, not zero")]
    NotPathological { x: usize, y: usize, mass: f64 },

    #[error("could not draw {wanted} distinct codewords within the retry bound")]
    DuplicateCodewords { wanted: usize },

    #[error("invariant violated: {0}")]
    Invariant(String),

    #[error("parse error on line {line}: {message}")]
    Parse { line: usize, message: String },

    #[error(transparent)]
    Json(#[from] serde_json::Error),
}

impl Error {
    pub fn kind(&self) -> ErrorKind {
        match self {
            Error::BudgetExceeded { .. } | Error::DuplicateCodewords { .. } => ErrorKind::Resource,
            Error::Invariant(_) => ErrorKind::Invariant,
            _ => ErrorKind::Config,
        }
    }
}
