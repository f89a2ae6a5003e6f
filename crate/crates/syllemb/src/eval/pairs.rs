use alloc::collections::BTreeSet;
use alloc::string::{String, ToString};
use alloc::vec::Vec;

use super::correlation::spearman;
use super::EvalError;
use crate::nn::l2_norm;

/// One scored word pair. Either side may be a multiword phrase (spaces or
/// underscores between words).
#[derive(Debug, Clone, PartialEq)]
pub struct Pair {
    pub word1: String,
    pub word2: String,
    pub score: f64,
}

/// A named list of scored pairs.
#[derive(Debug, Clone)]
pub struct PairDataset {
    name: String,
    pairs: Vec<Pair>,
}

impl PairDataset {
    pub fn new(name: String, pairs: Vec<Pair>) -> Result<Self, EvalError> {
        if pairs.iter().any(|p| !p.score.is_finite()) {
            return Err(EvalError::NonFinite);
        }
        Ok(PairDataset { name, pairs })
    }

    pub fn name(&self) -> &str {
        &self.name
    }

    pub fn pairs(&self) -> &[Pair] {
        &self.pairs
    }

    pub fn len(&self) -> usize {
        self.pairs.len()
    }

    pub fn is_empty(&self) -> bool {
        self.pairs.is_empty()
    }

    /// Lowercased single words occurring anywhere in the dataset, with
    /// phrases split on spaces and underscores.
    pub fn unique_words(&self) -> BTreeSet<String> {
        let mut words = BTreeSet::new();
        for p in &self.pairs {
            for phrase in [&p.word1, &p.word2] {
                for w in split_phrase(phrase) {
                    words.insert(w);
                }
            }
        }
        words
    }
}

/// Lowercase a phrase and split it into words on spaces and underscores.
pub fn split_phrase(phrase: &str) -> Vec<String> {
    phrase
        .to_lowercase()
        .split(|c| c == ' ' || c == '_')
        .filter(|w| !w.is_empty())
        .map(str::to_string)
        .collect()
}

/// The outcome of embedding one phrase: a vector, or the list of words that
/// could not be resolved (empty when the failure was not word-specific,
/// e.g. a zero-norm sum).
#[derive(Debug, Clone, PartialEq)]
pub enum PhraseVector {
    Present(Vec<f64>),
    Missing(Vec<String>),
}

/// Per-pair evaluation record; `similarity` is `None` for skipped pairs.
#[derive(Debug, Clone, PartialEq)]
pub struct PairOutcome {
    pub word1: String,
    pub word2: String,
    pub gold: f64,
    pub similarity: Option<f64>,
}

/// Benchmark result: Spearman over the usable pairs plus missing-word
/// accounting. `missing_words` counts unique unresolved words; a pair is
/// skipped when either side fails to embed.
#[derive(Debug, Clone)]
pub struct EvalReport {
    pub dataset: String,
    pub spearman: f64,
    pub pairs_used: usize,
    pub pairs_total: usize,
    pub missing_words: usize,
    pub missing_word_list: Vec<String>,
    pub per_pair: Vec<PairOutcome>,
}

/// Score every pair by cosine similarity of the embedded phrases and rank
/// the usable pairs against the gold scores.
pub fn evaluate_pairs(
    mut embed: impl FnMut(&str) -> PhraseVector,
    ds: &PairDataset,
) -> Result<EvalReport, EvalError> {
    let mut missing: BTreeSet<String> = BTreeSet::new();
    let mut golds = Vec::new();
    let mut sims = Vec::new();
    let mut per_pair = Vec::with_capacity(ds.len());

    for pair in ds.pairs() {
        let a = embed(&pair.word1);
        let b = embed(&pair.word2);
        let mut sim = None;
        match (&a, &b) {
            (PhraseVector::Present(va), PhraseVector::Present(vb)) => {
                if let Some(c) = cosine(va, vb) {
                    sim = Some(c);
                }
            }
            _ => {}
        }
        for outcome in [a, b] {
            if let PhraseVector::Missing(words) = outcome {
                missing.extend(words);
            }
        }
        if let Some(c) = sim {
            golds.push(pair.score);
            sims.push(c);
        }
        per_pair.push(PairOutcome {
            word1: pair.word1.clone(),
            word2: pair.word2.clone(),
            gold: pair.score,
            similarity: sim,
        });
    }

    if sims.is_empty() {
        return Err(EvalError::NoUsablePairs);
    }
    let rho = spearman(&sims, &golds)?;
    Ok(EvalReport {
        dataset: ds.name().to_string(),
        spearman: rho,
        pairs_used: sims.len(),
        pairs_total: ds.len(),
        missing_words: missing.len(),
        missing_word_list: missing.into_iter().collect(),
        per_pair,
    })
}

fn cosine(a: &[f64], b: &[f64]) -> Option<f64> {
    if a.len() != b.len() {
        return None;
    }
    let na = l2_norm(a);
    let nb = l2_norm(b);
    if na == 0.0 || nb == 0.0 {
        return None;
    }
    let dot: f64 = a.iter().zip(b).map(|(&x, &y)| x * y).sum();
    Some(dot / (na * nb))
}
