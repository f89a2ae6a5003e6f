//! Word-pair similarity benchmarking and the annotation arithmetic used when
//! translating evaluation sets: Spearman/Pearson correlation, cosine scoring
//! with missing-word accounting, annotator agreement, deviation flagging and
//! score aggregation.

mod annotations;
mod correlation;
mod pairs;

pub use annotations::{
    aggregate_final_scores, annotator_agreement, flag_deviations, AgreementReport,
    AnnotationItem, AnnotationSet,
};
pub use correlation::{average_ranks, pearson, spearman};
pub use pairs::{
    evaluate_pairs, split_phrase, EvalReport, Pair, PairDataset, PairOutcome, PhraseVector,
};

use alloc::string::String;
use core::fmt;

/// Errors from evaluation arithmetic.
#[derive(Debug, Clone, PartialEq)]
pub enum EvalError {
    /// Correlation inputs differ in length.
    LengthMismatch { left: usize, right: usize },
    /// Fewer than two observations.
    TooFewObservations(usize),
    /// A correlation input is constant, leaving the correlation undefined.
    ConstantInput,
    /// A non-finite value was encountered.
    NonFinite,
    /// Every pair of the dataset was skipped for missing words.
    NoUsablePairs,
    /// Deviation flagging needs at least three annotators.
    TooFewAnnotators(usize),
    /// Annotation scores beyond the five-point scale.
    ScoreOutOfScale { pair_id: String, score: u32 },
    /// Items disagree on the number of annotators.
    RaggedAnnotations { pair_id: String },
    /// The same pair id occurs twice in an annotation set.
    DuplicatePairId(String),
}

impl fmt::Display for EvalError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            EvalError::LengthMismatch { left, right } => {
                write!(f, "input lengths differ: {left} vs {right}")
            }
            EvalError::TooFewObservations(n) => {
                write!(f, "need at least two observations, got {n}")
            }
            EvalError::ConstantInput => write!(f, "correlation undefined for constant input"),
            EvalError::NonFinite => write!(f, "non-finite value in correlation input"),
            EvalError::NoUsablePairs => write!(f, "every pair was skipped for missing words"),
            EvalError::TooFewAnnotators(n) => {
                write!(f, "need at least three annotators, got {n}")
            }
            EvalError::ScoreOutOfScale { pair_id, score } => {
                write!(f, "annotation score {score} for pair {pair_id:?} is outside 0..=4")
            }
            EvalError::RaggedAnnotations { pair_id } => {
                write!(f, "pair {pair_id:?} has a different number of annotator scores")
            }
            EvalError::DuplicatePairId(id) => write!(f, "duplicate pair id {id:?}"),
        }
    }
}

#[cfg(feature = "std")]
impl std::error::Error for EvalError {}
