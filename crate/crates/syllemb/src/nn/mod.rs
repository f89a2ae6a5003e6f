//! Deterministic numerical kernels: dense tensors, activations and losses,
//! a small reverse-mode gradient tape covering the operations the two model
//! families need, the AMSGrad optimizer and the epoch learning-rate schedule.
//!
//! Everything is 64-bit and single-threaded; given identical inputs the same
//! bits come out on every run.

mod gradcheck;
mod kernels;
mod optim;
mod tape;
mod tensor;

pub use gradcheck::check_gradient;
pub use kernels::{cross_entropy, l2_norm, l2_normalize, layer_norm, mse, softmax};
pub use optim::{lr_at_epoch, AdamConfig, AdamState};
pub use tape::{Tape, Var};
pub use tensor::Tensor;

use alloc::string::String;
use core::fmt;

/// Errors from numerical kernels and the optimizer.
#[derive(Debug, Clone, PartialEq)]
pub enum NnError {
    /// Attempted to normalize a vector with zero L2 norm.
    ZeroNorm,
    /// Operand shapes do not agree.
    ShapeMismatch { context: String, left: usize, right: usize },
    /// A class index fell outside the logit vector.
    IndexOutOfRange { index: usize, len: usize },
}

impl fmt::Display for NnError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            NnError::ZeroNorm => write!(f, "cannot normalize a zero-norm vector"),
            NnError::ShapeMismatch { context, left, right } => {
                write!(f, "shape mismatch in {context}: {left} vs {right}")
            }
            NnError::IndexOutOfRange { index, len } => {
                write!(f, "index {index} out of range for length {len}")
            }
        }
    }
}

#[cfg(feature = "std")]
impl std::error::Error for NnError {}
