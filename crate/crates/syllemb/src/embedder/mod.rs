//! Composition models that rebuild word vectors from trainable syllable
//! embeddings: a plain normalized sum and two attention-pooled variants (one
//! at full dimensionality, one with a lower-dimensional table expanded back
//! by a linear layer), together with their training loop and phrase-level
//! inference.

mod infer;
mod model;
mod train;

pub use infer::EmbedOutcome;
pub use model::{param_count, EmbedderConfig, EmbedderKind, EmbedderModel};
pub use train::{
    example_gradients, train_embedder, train_embedder_with, EpochStats, ExampleGrads, TrainError,
};

use alloc::string::String;
use core::fmt;

/// Errors from model construction and composition.
#[derive(Debug, Clone, PartialEq)]
pub enum EmbedderError {
    /// Configuration violates a structural constraint.
    InvalidConfig(String),
    /// A syllable variant has no embedding.
    UnknownSyllable(String),
    /// Composition produced a zero-norm vector.
    ZeroNorm,
    /// A syllable id fell outside the table.
    InvalidId(u32),
}

impl fmt::Display for EmbedderError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            EmbedderError::InvalidConfig(msg) => write!(f, "invalid configuration: {msg}"),
            EmbedderError::UnknownSyllable(s) => {
                write!(f, "no embedding for syllable variant {s:?}")
            }
            EmbedderError::ZeroNorm => write!(f, "composition produced a zero-norm vector"),
            EmbedderError::InvalidId(id) => write!(f, "syllable id {id} outside the table"),
        }
    }
}

#[cfg(feature = "std")]
impl std::error::Error for EmbedderError {}
