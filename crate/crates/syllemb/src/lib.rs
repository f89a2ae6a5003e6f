//! Compression of a pretrained word-embedding table into a small set of
//! trainable syllable embeddings, plus the tooling around it:
//!
//! - [`corpus`]: decomposition datasets, character filtering, training-set
//!   construction, start/end token variants, sparseness statistics and
//!   out-of-vocabulary splits.
//! - [`nn`]: dense tensors, a small reverse-mode gradient tape, the AMSGrad
//!   optimizer and the epoch learning-rate schedule.
//! - [`embedder`]: the vanilla (normalized sum) and attention composition
//!   models, their training loop and word/phrase inference.
//! - [`splitter`]: a character-level encoder-decoder transformer that
//!   predicts syllabic decompositions, with greedy decoding and the staged
//!   resolution pipeline for unknown words.
//! - [`eval`]: Spearman/Pearson correlation, word-pair similarity
//!   benchmarking and annotator-agreement arithmetic.
//!
//! The crate is `no_std`-compatible (with `alloc`); disable default features
//! and enable `libm` to build without the standard library. File formats,
//! reports and the command-line interface live in the companion crate.

#![cfg_attr(not(feature = "std"), no_std)]

extern crate alloc;

#[cfg(all(not(feature = "std"), not(feature = "libm")))]
compile_error!("either the `std` or the `libm` feature must be enabled");

pub mod corpus;
pub mod embedder;
pub mod eval;


pub(crate) mod math;
pub mod nn;
pub mod splitter;

