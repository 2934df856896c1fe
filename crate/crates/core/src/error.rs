use thiserror::Error;

use crate::words::Word;

pub type Result<T> = std::result::Result<T, Error>;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum Error {
    #[error("symbol {symbol} out of range for alphabet of size {alphabet}")]
    SymbolOutOfRange { symbol: u32, alphabet: usize },
    #[error("invalid transition matrix: {0}")]
    InvalidTms(String),
    #[error("transition structure is not transitive")]
    NotTransitive,
    #[error("transition structure is not mixing")]
    NotMixing,
    #[error("weight at state {0} is not positive")]
    NonPositiveWeight(usize),
    #[error("word {0} is not admissible")]
    Inadmissible(Word),
    #[error("invalid measure: {0}")]
    InvalidMeasure(String),
    #[error("argument out of range: {0}")]
    OutOfRange(String),
    #[error("stochastic matrix is reducible")]
    Reducible,
    #[error("beta must be greater than one")]
    NotGreaterThanOne,
    #[error("beta must not be an integer")]
    IntegerBeta,
    #[error("precision exhausted: {0}")]
    PrecisionExhausted(String),
    #[error("invalid beta spec: {0}")]
    InvalidBetaSpec(String),
    #[error("digit set must contain more than one symbol")]
    SingletonAlphabet,
    #[error("no full prefix within the first {0} symbols")]
    Undetermined(usize),
    #[error("point lies in the exceptional set (its tail equals omega)")]
    InGamma,
    #[error("restricted system is a singleton")]
    SingletonSystem,
    #[error("eigenvalue bracket did not converge up to truncation {0}")]
    NoConvergence(usize),
    #[error("word {0} is not a concatenation of return words")]
    NotFactorizable(Word),
    #[error("word is not a prefix of a point of Z: {0}")]
    NotInZ(String),
    #[error("parse error: {0}")]
    Parse(String),
    #[error("invalid argument: {0}")]
    InvalidArgument(String),
}

impl Error {
    /// Stable machine-readable name of the variant.
    pub fn kind(&self) -> &'static str {
        match self {
            Error::SymbolOutOfRange { .. } => "SymbolOutOfRange",
            Error::InvalidTms(_) => "InvalidTms",
            Error::NotTransitive => "NotTransitive",
            Error::NotMixing => "NotMixing",
            Error::NonPositiveWeight(_) => "NonPositiveWeight",
            Error::Inadmissible(_) => "Inadmissible",
            Error::InvalidMeasure(_) => "InvalidMeasure",
            Error::OutOfRange(_) => "OutOfRange",
            Error::Reducible => "Reducible",
            Error::NotGreaterThanOne => "NotGreaterThanOne",
            Error::IntegerBeta => "IntegerBeta",
            Error::PrecisionExhausted(_) => "PrecisionExhausted",
            Error::InvalidBetaSpec(_) => "InvalidBetaSpec",
            Error::SingletonAlphabet => "SingletonAlphabet",
            Error::Undetermined(_) => "Undetermined",
            Error::InGamma => "InGamma",
            Error::SingletonSystem => "SingletonSystem",
            Error::NoConvergence(_) => "NoConvergence",
            Error::NotFactorizable(_) => "NotFactorizable",
            Error::NotInZ(_) => "NotInZ",
            Error::Parse(_) => "Parse",
            Error::InvalidArgument(_) => "InvalidArgument",
        }
    }
}
