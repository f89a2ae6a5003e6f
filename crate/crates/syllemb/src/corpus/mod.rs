//! Decomposition corpora and training-set construction.
//!
//! The types here are immutable after construction and safe to share across
//! threads for reading. Parsing of on-disk formats lives in the companion
//! crate; this module only deals with already-structured data.

mod decomposition;
mod embedding_table;
mod filter;
mod stats;
mod training;

pub use decomposition::{Decomposition, DecompositionDataset};
pub use embedding_table::EmbeddingTable;
pub use filter::CharFilter;
pub use stats::{coverage_at_top_fraction, coverage_curve, syllable_histogram, Histogram};
pub use training::{OovScope, OovSplit, TrainingSet, VariantConfig, VariantScheme};

use alloc::string::String;
use core::fmt;

/// Errors raised while building corpus structures.
#[derive(Debug, Clone, PartialEq)]
pub enum CorpusError {
    /// A decomposition had no syllables at all.
    NoSyllables { word: String },
    /// A decomposition contained an empty syllable.
    EmptySyllable { word: String },
    /// The concatenated syllables do not reproduce the word.
    RejoinMismatch { word: String, joined: String },
    /// A vector's length does not match the table dimension.
    DimensionMismatch { expected: usize, got: usize },
    /// No word is shared between the decomposition dataset and the table.
    EmptyIntersection,
    /// An out-of-vocabulary split removed every training example.
    EmptyRetainedSet,
    /// A fraction parameter fell outside `[0, 1]`.
    InvalidFraction(f64),
    /// A training-set word has no decomposition in the backing dataset.
    MissingDecomposition { word: String },
    /// Start/end markers must be two distinct non-syllable characters.
    InvalidMarkers { start: char, end: char },
    /// A deserialized training set referenced an out-of-range syllable id.
    InvalidSyllableId { word: String, id: u32 },
}

impl fmt::Display for CorpusError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            CorpusError::NoSyllables { word } => {
                write!(f, "decomposition of {word:?} has no syllables")
            }
            CorpusError::EmptySyllable { word } => {
                write!(f, "decomposition of {word:?} contains an empty syllable")
            }
            CorpusError::RejoinMismatch { word, joined } => {
                write!(f, "syllables rejoin to {joined:?}, not {word:?}")
            }
            CorpusError::DimensionMismatch { expected, got } => {
                write!(f, "expected vector of dimension {expected}, got {got}")
            }
            CorpusError::EmptyIntersection => {
                write!(f, "no overlap between decompositions and embedding table")
            }
            CorpusError::EmptyRetainedSet => {
                write!(f, "out-of-vocabulary split would remove every training example")
            }
            CorpusError::InvalidFraction(x) => {
                write!(f, "fraction {x} is outside [0, 1]")
            }
            CorpusError::MissingDecomposition { word } => {
                write!(f, "no decomposition available for training word {word:?}")
            }
            CorpusError::InvalidMarkers { start, end } => {
                write!(f, "invalid start/end markers {start:?}/{end:?}")
            }
            CorpusError::InvalidSyllableId { word, id } => {
                write!(f, "example {word:?} references syllable id {id} outside the vocabulary")
            }
        }
    }
}

#[cfg(feature = "std")]
impl std::error::Error for CorpusError {}
