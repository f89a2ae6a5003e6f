//! Character-level sequence-to-sequence transformer that predicts the
//! hyphen-delimited syllabic decomposition of a word, plus greedy decoding,
//! round-trip validation, accuracy measurement and the staged resolution
//! pipeline that turns unknown words into composable decompositions.

mod decode;
mod model;
mod resolve;
mod train;
mod vocab;

pub use decode::{greedy_decode, splitter_accuracy, validate_roundtrip, DecodeFailure};
pub use model::{SplitterConfig, SplitterModel};
pub use resolve::{ResolveFailure, ResolveTallies, Resolver};
pub use train::{
    example_gradients, example_loss, train_splitter, train_splitter_with, SplitterEpochStats,
};
pub use vocab::{CharVocab, BOS, DELIM, EOS, PAD};

use alloc::string::String;
use core::fmt;

/// Errors from splitter configuration and training.
#[derive(Debug, Clone, PartialEq)]
pub enum SplitterError {
    /// Configuration violates a structural constraint.
    InvalidConfig(String),
    /// A word contains a character outside the vocabulary.
    UnknownCharacter(char),
    /// A sequence exceeds the positional-encoding capacity.
    SequenceTooLong { len: usize, max: usize },
    /// The loss became non-finite.
    NanLoss { epoch: usize, example: usize, word: String },
    /// Nothing to train on.
    EmptyDataset,
    /// A serialized model was internally inconsistent.
    MalformedModel(String),
}

impl fmt::Display for SplitterError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            SplitterError::InvalidConfig(msg) => write!(f, "invalid configuration: {msg}"),
            SplitterError::UnknownCharacter(c) => {
                write!(f, "character {c:?} is not in the vocabulary")
            }
            SplitterError::SequenceTooLong { len, max } => {
                write!(f, "sequence of {len} tokens exceeds the maximum of {max}")
            }
            SplitterError::NanLoss { epoch, example, word } => {
                write!(f, "non-finite loss at epoch {epoch}, example {example} ({word:?})")
            }
            SplitterError::EmptyDataset => write!(f, "dataset is empty"),
            SplitterError::MalformedModel(msg) => write!(f, "malformed model: {msg}"),
        }
    }
}

#[cfg(feature = "std")]
impl std::error::Error for SplitterError {}
