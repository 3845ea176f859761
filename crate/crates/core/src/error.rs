use thiserror::Error;

use crate::spectrum::DistanceSpectrum;

#[derive(Debug, Clone, PartialEq, Error)]
pub enum Error {
    #[error("index {index} is outside 0..{length}")]
    Domain { index: usize, length: usize },

    #[error("lengths differ: expected {expected}, got {actual}")]
    LengthMismatch { expected: usize, actual: usize },

    #[error("not a permutation: inputs {first} and {second} both map to {value}")]
    NotAPermutation {
        first: usize,
        second: usize,
        value: usize,
    },

    #[error("the requested interleaver class is empty")]
    EmptyClass,

    #[error("spectrum budget exceeded after {nodes} search nodes")]
    BudgetExceeded {
        nodes: u64,
        snapshot: DistanceSpectrum,
    },

    #[error("no defaults for length {0}")]
    NoDefaults(usize),

    #[error("invalid argument: {0}")]
    InvalidArgument(&'static str),
}
