use thiserror::Error;

/// Everything that can go wrong in this crate.
#[derive(Debug, Clone, PartialEq, Error)]
pub enum Error {
    #[error("probability vector has length {actual}, expected {expected}")]
    LengthMismatch { expected: usize, actual: usize },
    #[error("negative probability mass {value} at state {index}")]
    NegativeMass { index: usize, value: f64 },
    #[error("non-finite probability mass at state {index}")]
    NonFiniteMass { index: usize },
    #[error("total probability mass {sum} is not 1")]
    MassNotOne { sum: f64 },
    #[error("space of {attrs} attributes exceeds the limit of {max}")]
    SpaceTooLarge { attrs: usize, max: usize },
    #[error("invalid propositional space: {0}")]
    InvalidSpace(String),
    #[error("attribute index {attr} out of range for a space of {k} attributes")]
    AttributeOutOfRange { attr: usize, k: usize },
    #[error("unknown attribute `{0}`")]
    UnknownAttribute(String),
    #[error("attribute {0} appears more than once")]
    DuplicateAttribute(usize),
    #[error("attribute {0} is not an evidence attribute of this problem")]
    NotEvidence(usize),
    #[error("evidence attribute {0} has no observation")]
    MissingObservation(usize),
    #[error("conditioning event has zero probability")]
    ZeroProbabilityEvidence,
    #[error("combined belief and disbelief are both certain")]
    ContradictoryCertainty,
    #[error("belief measure out of range: mb={mb}, md={md}")]
    InvalidMeasure { mb: f64, md: f64 },
    #[error("cannot combine an empty list of belief measures")]
    EmptyCombination,
    #[error("literals do not both confirm or both disconfirm the hypothesis")]
    NotSameDirection,
    #[error("no evidence assignment could be evaluated")]
    EverythingSkipped,
    #[error("invalid partition: {0}")]
    InvalidPartition(String),
    #[error("unknown distribution family `{0}`")]
    UnknownFamily(String),
    #[error("invalid configuration: {0}")]
    InvalidConfig(String),
    #[error("malformed distribution file: {0}")]
    Parse(String),
    #[error("i/o error: {0}")]
    Io(String),
}

impl Error {
    /// True for failures of a well-formed query (as opposed to bad input).
    pub fn is_computational(&self) -> bool {
        matches!(
            self,
            Error::ZeroProbabilityEvidence
                | Error::ContradictoryCertainty
                | Error::EverythingSkipped
                | Error::NotSameDirection
        )
    }
}

impl From<std::io::Error> for Error {
    fn from(e: std::io::Error) -> Self {
        Error::Io(e.to_string())
    }
}

pub type Result<T, E = Error> = std::result::Result<T, E>;
