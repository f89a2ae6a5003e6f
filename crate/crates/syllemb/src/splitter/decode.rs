use alloc::string::String;
use alloc::vec::Vec;

use super::model::{example_forward, Forward, SplitterModel};
use super::vocab::{BOS, DELIM, EOS, PAD};
use super::SplitterError;
use crate::corpus::{Decomposition, DecompositionDataset};

/// Why a decode produced no usable decomposition. Running out of budget
/// without an end token is distinct from emitting a malformed sequence.
#[derive(Debug, Clone, PartialEq, Eq)]
pub enum DecodeFailure {
    /// The word contains a character the model never saw.
    UnknownCharacter(char),
    /// The word exceeds the model's positional capacity.
    InputTooLong { len: usize, max: usize },
    /// No end token within the decoding budget.
    NoEos,
    /// The emitted sequence was malformed (stray specials, or leading,
    /// trailing or consecutive delimiters).
    InvalidOutput,
}

impl core::fmt::Display for DecodeFailure {
    fn fmt(&self, f: &mut core::fmt::Formatter<'_>) -> core::fmt::Result {
        match self {
            DecodeFailure::UnknownCharacter(c) => write!(f, "unknown character {c:?}"),
            DecodeFailure::InputTooLong { len, max } => {
                write!(f, "word of {len} tokens exceeds capacity {max}")
            }
            DecodeFailure::NoEos => write!(f, "no end token within the decoding budget"),
            DecodeFailure::InvalidOutput => write!(f, "malformed output sequence"),
        }
    }
}

#[cfg(feature = "std")]
impl std::error::Error for DecodeFailure {}

/// Greedy argmax decoding. The budget defaults to `2 * |word| + 2` emitted
/// tokens; a perfect decomposition needs at most `2 * |word|`. Deterministic
/// for fixed weights.
pub fn greedy_decode(
    model: &SplitterModel,
    word: &str,
    budget: Option<usize>,
) -> Result<Decomposition, DecodeFailure> {
    let src = model.vocab().encode_word(word).map_err(|e| match e {
        SplitterError::UnknownCharacter(c) => DecodeFailure::UnknownCharacter(c),
        other => panic!("unexpected encode error: {other}"),
    })?;
    if src.len() > model.max_len() {
        return Err(DecodeFailure::InputTooLong { len: src.len(), max: model.max_len() });
    }
    let budget = budget.unwrap_or(2 * word.chars().count() + 2);

    // Encode once; decoding steps reuse the memory values.
    let mut enc = Forward::new(model, None);
    let memory_var = enc.encode(&src).map_err(decode_error)?;
    let memory = enc.tape.value(memory_var).clone();

    let mut prefix = alloc::vec![BOS];
    loop {
        if prefix.len() >= model.max_len() {
            return Err(DecodeFailure::NoEos);
        }
        let mut fwd = Forward::new(model, None);
        let mem = fwd.inject_memory(&memory);
        let logits = fwd.decode(&prefix, mem).map_err(decode_error)?;
        let last = fwd.tape.value(logits).row(prefix.len() - 1);
        let next = argmax(last);
        if next == EOS {
            break;
        }
        prefix.push(next);
        if prefix.len() - 1 > budget {
            return Err(DecodeFailure::NoEos);
        }
    }
    tokens_to_decomposition(model, &prefix[1..])
}

fn decode_error(e: SplitterError) -> DecodeFailure {
    match e {
        SplitterError::SequenceTooLong { len, max } => DecodeFailure::InputTooLong { len, max },
        other => panic!("unexpected forward error: {other}"),
    }
}

fn argmax(xs: &[f64]) -> usize {
    let mut best = 0;
    for (i, &x) in xs.iter().enumerate() {
        if x > xs[best] {
            best = i;
        }
    }
    best
}

fn tokens_to_decomposition(
    model: &SplitterModel,
    tokens: &[usize],
) -> Result<Decomposition, DecodeFailure> {
    let chars = model.vocab().chars();
    let mut syllables: Vec<String> = Vec::new();
    let mut current = String::new();
    for &t in tokens {
        match t {
            DELIM => {
                if current.is_empty() {
                    return Err(DecodeFailure::InvalidOutput);
                }
                syllables.push(core::mem::take(&mut current));
            }
            PAD | BOS | EOS => return Err(DecodeFailure::InvalidOutput),
            c => current.push(chars[c - 4]),
        }
    }
    if current.is_empty() {
        // Covers both the empty output and a trailing delimiter.
        return Err(DecodeFailure::InvalidOutput);
    }
    syllables.push(current);
    let word: String = syllables.concat();
    Ok(Decomposition::new(word, syllables).expect("syllables rejoin by construction"))
}

/// True iff the concatenated syllables reproduce the word exactly — the
/// guard against sequence-to-sequence insertions and deletions.
pub fn validate_roundtrip(word: &str, d: &Decomposition) -> bool {
    d.syllables().concat() == word
}

/// Fraction of evaluation words whose greedy decode matches the reference
/// syllables exactly; any decode failure counts as wrong.
pub fn splitter_accuracy(model: &SplitterModel, eval: &DecompositionDataset) -> f64 {
    assert!(!eval.is_empty(), "evaluation set must be nonempty");
    let mut hits = 0usize;
    for reference in eval.iter() {
        if let Ok(decoded) = greedy_decode(model, reference.word(), None) {
            if decoded.syllables() == reference.syllables() {
                hits += 1;
            }
        }
    }
    hits as f64 / eval.len() as f64
}

/// Teacher-forced mean loss of a dataset under the current weights, with
/// dropout off. Words that cannot be encoded are skipped.
pub(crate) fn dataset_loss(model: &SplitterModel, ds: &DecompositionDataset) -> Option<f64> {
    let mut sum = 0.0;
    let mut n = 0usize;
    for d in ds.iter() {
        let Ok((src, tgt)) = model.vocab().encode_example(d) else { continue };
        let Ok((fwd, loss)) = example_forward(model, &src, &tgt, None) else { continue };
        sum += fwd.tape.value(loss).data()[0];
        n += 1;
    }
    (n > 0).then(|| sum / n as f64)
}
