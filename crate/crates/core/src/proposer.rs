use thiserror::Error;

use crate::bounds::Bounds;
use crate::error::CoreError;
use crate::records::ScoredRecord;

/// Everything a proposer gets to see when asked for the next mean.
#[derive(Debug, Clone, Copy)]
pub struct ProposalRequest<'a> {
    /// Selected records, weakest generation first, strongest record last.
    pub records: &'a [ScoredRecord],
    pub bounds: &'a Bounds,
    pub description: &'a str,
    /// Index of the generation the mean will seed.
    pub generation: usize,
}

/// An integer-encoded mean in `[0, 1000]^d`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ProposedMean {
    pub encoded: Vec<i64>,
    /// Model output the mean was parsed from; empty for offline proposers.
    pub raw_response: String,
}

#[derive(Debug, Clone, Error, PartialEq, Eq)]
pub enum ResponseParseError {
    #[error("no bracketed integer list in response")]
    NoList,
    #[error("expected {expected} components, found {found}")]
    Arity { expected: usize, found: usize },
    #[error("component {index} = {value} outside [0, 1000]")]
    OutOfRange { index: usize, value: i64 },
}

#[derive(Debug, Error)]
pub enum ProposerError {
    #[error("no records to propose from")]
    EmptyRecords,
    #[error("transport failure: {0}")]
    Transport(String),
    #[error("no usable response after {attempts} attempts: {last}")]
    RetriesExhausted {
        attempts: usize,
        last: ResponseParseError,
    },
    #[error(transparent)]
    Core(#[from] CoreError),
    #[error("audit log: {0}")]
    Audit(#[from] std::io::Error),
}

/// Supplies the Gaussian mean for the next generation.
pub trait MeanProposer {
    fn propose(&mut self, request: &ProposalRequest<'_>) -> Result<ProposedMean, ProposerError>;
}
