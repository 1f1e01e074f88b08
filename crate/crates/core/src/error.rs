use thiserror::Error;

/// Every failure the library can report.
///
/// Domain errors (the ones a caller can provoke with well-formed but
/// unsuitable input) carry enough context to be rendered as structured
/// output by the command-line front end.
#[derive(Debug, Clone, PartialEq, Error)]
pub enum Error {
    #[error("beta is an integer ({0}); the beta-shift degenerates to the full shift")]
    IntegerBeta(String),

    #[error("beta must be a real number greater than 1 (got {0})")]
    InvalidBeta(String),

    #[error("digit {index} stays ambiguous at the precision cap of {bits} bits ({} digits certified)", certified.len())]
    PrecisionExhausted {
        index: usize,
        bits: u64,
        certified: Vec<u32>,
    },

    #[error("no admissible root beta > 1: {0}")]
    NoRoot(String),

    #[error("digit prefix too short for tolerance {tol:e}: best certified width is {width:e}")]
    InsufficientDepth { tol: f64, width: f64 },

    #[error("need {needed} digits/states but only {available} are available")]
    DepthExceeded { needed: usize, available: usize },

    #[error("word {word} is not in the language (offending suffix starts at position {position})")]
    NotInLanguage { word: String, position: usize },

    #[error("window needs {needed} table entries, budget is {budget}")]
    WindowTooLarge { needed: u64, budget: u64 },

    #[error("cylinder of length {m} does not fit in [-{n}, {n}]")]
    WindowTooSmall { m: usize, n: usize },

    #[error("digit sequence carries no periodicity certificate")]
    NotEventuallyPeriodic,

    #[error("exact oracle unavailable: {0}")]
    OracleUnavailable(String),

    #[error("malformed digits: {0}")]
    MalformedDigits(String),

    #[error("malformed potential: {0}")]
    MalformedPotential(String),

    #[error("cannot parse beta expression: {0}")]
    Parse(String),
}

impl Error {
    /// Short machine-readable tag used in structured error output.
    pub fn kind(&self) -> &'static str {
        match self {
            Error::IntegerBeta(_) => "IntegerBeta",
            Error::InvalidBeta(_) => "InvalidBeta",
            Error::PrecisionExhausted { .. } => "PrecisionExhausted",
            Error::NoRoot(_) => "NoRoot",
            Error::InsufficientDepth { .. } => "InsufficientDepth",
            Error::DepthExceeded { .. } => "DepthExceeded",
            Error::NotInLanguage { .. } => "NotInLanguage",
            Error::WindowTooLarge { .. } => "WindowTooLarge",
            Error::WindowTooSmall { .. } => "WindowTooSmall",
            Error::NotEventuallyPeriodic => "NotEventuallyPeriodic",
            Error::OracleUnavailable(_) => "OracleUnavailable",
            Error::MalformedDigits(_) => "MalformedDigits",
            Error::MalformedPotential(_) => "MalformedPotential",
            Error::Parse(_) => "Parse",
        }
    }
}

pub type Result<T> = std::result::Result<T, Error>;
