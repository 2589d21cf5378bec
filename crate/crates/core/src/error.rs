use thiserror::Error;

pub type Result<T, E = Error> = core::result::Result<T, E>;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum Error {
    #[error("not a bijection on 1..={n}: {reason}")]
    NotABijection { n: usize, reason: &'static str },
    #[error("size mismatch: {left} vs {right}")]
    SizeMismatch { left: usize, right: usize },
    #[error("colourings are defined on different position sets")]
    DomainMismatch,
    #[error("colouring v is not injective")]
    InvalidV,
    #[error("invalid triple: {0}")]
    InvalidTriple(&'static str),
    #[error("{what} = {value} is outside {min}..={max}")]
    OutOfRange {
        what: &'static str,
        value: i64,
        min: i64,
        max: i64,
    },
    #[error("n = {n} exceeds the exhaustive cutoff {limit}")]
    CutoffExceeded { n: usize, limit: usize },
    #[error("malformed feedback at query {index}: {value}")]
    MalformedFeedback { index: usize, value: usize },
    #[error("feedback is inconsistent with every codeword: {0}")]
    InconsistentFeedback(&'static str),
    #[error("invalid argument: {0}")]
    InvalidArgument(&'static str),
}

impl Error {
    pub(crate) fn out_of_range(what: &'static str, value: usize, min: usize, max: usize) -> Self {
        Error::OutOfRange {
            what,
            value: value as i64,
            min: min as i64,
            max: max as i64,
        }
    }

    /// Stable machine-readable name of the variant.
    pub fn kind(&self) -> &'static str {
        match self {
            Error::NotABijection { .. } => "NotABijection",
            Error::SizeMismatch { .. } => "SizeMismatch",
            Error::DomainMismatch => "DomainMismatch",
            Error::InvalidV => "InvalidV",
            Error::InvalidTriple(_) => "InvalidTriple",
            Error::OutOfRange { .. } => "OutOfRange",
            Error::CutoffExceeded { .. } => "CutoffExceeded",
            Error::MalformedFeedback { .. } => "MalformedFeedback",
            Error::InconsistentFeedback(_) => "InconsistentFeedback",
            Error::InvalidArgument(_) => "InvalidArgument",
        }
    }
}
