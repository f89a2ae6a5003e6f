use alloc::collections::BTreeMap;
use alloc::string::String;
use alloc::vec::Vec;

use super::model::EmbedderModel;
use crate::corpus::Decomposition;
use crate::eval::PhraseVector;
use crate::nn::l2_normalize;

/// Result of embedding a phrase: the unit vector, or the unique words that
/// could not be resolved (empty when the failure was a zero-norm sum rather
/// than a missing word).
#[derive(Debug, Clone, PartialEq)]
pub enum EmbedOutcome {
    Present(Vec<f64>),
    Missing(Vec<String>),
}

impl From<EmbedOutcome> for PhraseVector {
    fn from(o: EmbedOutcome) -> PhraseVector {
        match o {
            EmbedOutcome::Present(v) => PhraseVector::Present(v),
            EmbedOutcome::Missing(w) => PhraseVector::Missing(w),
        }
    }
}

impl EmbedderModel {
    /// Embed a phrase: lowercase, split on spaces and underscores, resolve
    /// each word to a decomposition, compose per word, and for multiword
    /// phrases sum the per-word unit vectors and normalize the sum. The
    /// phrase is missing as soon as any word cannot be resolved or composed.
    pub fn embed(
        &self,
        phrase: &str,
        mut resolve: impl FnMut(&str) -> Option<Decomposition>,
    ) -> EmbedOutcome {
        let words = crate::eval::split_phrase(phrase);
        if words.is_empty() {
            return EmbedOutcome::Missing(Vec::new());
        }

        let mut cache: BTreeMap<&str, Option<Vec<f64>>> = BTreeMap::new();
        for word in &words {
            if cache.contains_key(word.as_str()) {
                continue;
            }
            let vector = resolve(word).and_then(|d| self.compose_word(&d).ok());
            cache.insert(word, vector);
        }

        let missing: Vec<String> = cache
            .iter()
            .filter(|(_, v)| v.is_none())
            .map(|(w, _)| String::from(*w))
            .collect();
        if !missing.is_empty() {
            return EmbedOutcome::Missing(missing);
        }

        if words.len() == 1 {
            return EmbedOutcome::Present(cache[words[0].as_str()].clone().expect("present"));
        }

        let mut sum = alloc::vec![0.0; self.out_dim()];
        for word in &words {
            let v = cache[word.as_str()].as_ref().expect("present");
            for (acc, x) in sum.iter_mut().zip(v) {
                *acc += x;
            }
        }
        match l2_normalize(&sum) {
            Ok(v) => EmbedOutcome::Present(v),
            Err(_) => EmbedOutcome::Missing(Vec::new()),
        }
    }
}
