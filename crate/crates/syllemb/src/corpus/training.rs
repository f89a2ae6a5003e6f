use alloc::collections::{BTreeMap, BTreeSet};
use alloc::string::{String, ToString};
use alloc::vec::Vec;

use super::{CorpusError, DecompositionDataset, EmbeddingTable};
use crate::math;

/// Parameters for start/end token variants: the fraction of start/end
/// syllables (by frequency) that receive a marked variant, and the marker
/// characters themselves. The markers must not be corpus characters.
#[derive(Debug, Clone, PartialEq)]
pub struct VariantConfig {
    fraction: f64,
    start_marker: char,
    end_marker: char,
}

impl VariantConfig {
    pub fn new(fraction: f64) -> Result<Self, CorpusError> {
        Self::with_markers(fraction, '$', '#')
    }

    pub fn with_markers(fraction: f64, start: char, end: char) -> Result<Self, CorpusError> {
        if !(0.0..=1.0).contains(&fraction) {
            return Err(CorpusError::InvalidFraction(fraction));
        }
        if start == end {
            return Err(CorpusError::InvalidMarkers { start, end });
        }
        Ok(VariantConfig { fraction, start_marker: start, end_marker: end })
    }

    pub fn fraction(&self) -> f64 {
        self.fraction
    }

    pub fn start_marker(&self) -> char {
        self.start_marker
    }

    pub fn end_marker(&self) -> char {
        self.end_marker
    }
}

/// The resolved marking rule: which syllables receive a start variant when
/// word-initial and an end variant when word-final. Carried along from the
/// training set into trained models so inference marks words the same way.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct VariantScheme {
    start_marker: char,
    end_marker: char,
    start_marked: BTreeSet<String>,
    end_marked: BTreeSet<String>,
}

impl VariantScheme {
    /// The empty scheme: no syllable is ever marked.
    pub fn none() -> Self {
        VariantScheme {
            start_marker: '$',
            end_marker: '#',
            start_marked: BTreeSet::new(),
            end_marked: BTreeSet::new(),
        }
    }

    pub fn from_parts(
        start_marker: char,
        end_marker: char,
        start_marked: BTreeSet<String>,
        end_marked: BTreeSet<String>,
    ) -> Result<Self, CorpusError> {
        if start_marker == end_marker {
            return Err(CorpusError::InvalidMarkers { start: start_marker, end: end_marker });
        }
        Ok(VariantScheme { start_marker, end_marker, start_marked, end_marked })
    }

    /// Rank syllables by how often they appear word-initially (and, separately,
    /// word-finally), descending with lexicographic tie-breaking, and mark the
    /// top `ceil(fraction * candidates)` of each list.
    pub fn from_dataset(ds: &DecompositionDataset, cfg: &VariantConfig) -> Self {
        VariantScheme {
            start_marker: cfg.start_marker,
            end_marker: cfg.end_marker,
            start_marked: top_fraction(ds.start_counts(), cfg.fraction),
            end_marked: top_fraction(ds.end_counts(), cfg.fraction),
        }
    }

    pub fn start_marker(&self) -> char {
        self.start_marker
    }

    pub fn end_marker(&self) -> char {
        self.end_marker
    }

    pub fn start_marked(&self) -> &BTreeSet<String> {
        &self.start_marked
    }

    pub fn end_marked(&self) -> &BTreeSet<String> {
        &self.end_marked
    }

    pub fn is_empty(&self) -> bool {
        self.start_marked.is_empty() && self.end_marked.is_empty()
    }

    /// Map a word's syllables to their variant strings. Only the first and
    /// last positions can be marked; a one-syllable word may receive both
    /// markers at once.
    pub fn mark(&self, syllables: &[String]) -> Vec<String> {
        let last = syllables.len().saturating_sub(1);
        syllables
            .iter()
            .enumerate()
            .map(|(i, syl)| {
                let mut out = String::new();
                if i == 0 && self.start_marked.contains(syl) {
                    out.push(self.start_marker);
                }
                out.push_str(syl);
                if i == last && self.end_marked.contains(syl) {
                    out.push(self.end_marker);
                }
                out
            })
            .collect()
    }

    /// Remove the markers from a variant string, recovering the base syllable.
    pub fn strip<'a>(&self, variant: &'a str) -> &'a str {
        let v = variant.strip_prefix(self.start_marker).unwrap_or(variant);
        v.strip_suffix(self.end_marker).unwrap_or(v)
    }
}

fn top_fraction(counts: &BTreeMap<String, usize>, fraction: f64) -> BTreeSet<String> {
    let mut ranked: Vec<(&String, usize)> = counts.iter().map(|(s, &c)| (s, c)).collect();
    ranked.sort_by(|a, b| b.1.cmp(&a.1).then_with(|| a.0.cmp(b.0)));
    let k = math::ceil_frac(fraction, ranked.len());
    ranked.into_iter().take(k).map(|(s, _)| s.clone()).collect()
}

/// Whether an out-of-vocabulary split considers every word or only words from
/// the evaluation vocabulary.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum OovScope {
    EvalOnly,
    Global,
}

/// The outcome of an out-of-vocabulary split: the reduced training set plus
/// the removed words. Removed words consist entirely of frequent syllable
/// variants, which makes them composable test cases; `uncomposable` lists
/// any removed word whose variants no longer survive in the retained vocab.
#[derive(Debug, Clone)]
pub struct OovSplit {
    pub retained: TrainingSet,
    pub removed_words: Vec<String>,
    pub min_count: usize,
    pub uncomposable: Vec<String>,
}

/// The material a composition model trains on: one example per word shared
/// between a decomposition dataset and an embedding table, with syllable
/// variants mapped to dense ids and the source vector as regression target.
#[derive(Debug, Clone)]
pub struct TrainingSet {
    dim: usize,
    words: Vec<String>,
    examples: Vec<Vec<u32>>,
    targets: Vec<f32>,
    vocab_list: Vec<String>,
    vocab: BTreeMap<String, u32>,
    scheme: VariantScheme,
}

impl TrainingSet {
    /// Intersect a decomposition dataset with an embedding table. Examples
    /// are the shared words; the vocabulary holds exactly the syllables of
    /// those words, id-ordered lexicographically.
    pub fn build(
        ds: &DecompositionDataset,
        emb: &EmbeddingTable,
    ) -> Result<Self, CorpusError> {
        let shared: Vec<&super::Decomposition> =
            ds.iter().filter(|d| emb.contains(d.word())).collect();
        if shared.is_empty() {
            return Err(CorpusError::EmptyIntersection);
        }

        let mut vocab_set: BTreeSet<&str> = BTreeSet::new();
        for d in &shared {
            for s in d.syllables() {
                vocab_set.insert(s);
            }
        }
        let vocab_list: Vec<String> = vocab_set.into_iter().map(str::to_string).collect();
        let vocab: BTreeMap<String, u32> =
            vocab_list.iter().enumerate().map(|(i, s)| (s.clone(), i as u32)).collect();

        let dim = emb.dim();
        let mut words = Vec::with_capacity(shared.len());
        let mut examples = Vec::with_capacity(shared.len());
        let mut targets = Vec::with_capacity(shared.len() * dim);
        for d in &shared {
            words.push(d.word().to_string());
            examples.push(d.syllables().iter().map(|s| vocab[s]).collect());
            targets.extend_from_slice(emb.get(d.word()).expect("shared word"));
        }

        Ok(TrainingSet {
            dim,
            words,
            examples,
            targets,
            vocab_list,
            vocab,
            scheme: VariantScheme::none(),
        })
    }

    /// Rebuild the examples with start/end variants applied. The ranking is
    /// computed over `ds` (the full decomposition dataset); the vocabulary
    /// keeps only variants that actually occur in some example. A fraction
    /// of zero reproduces the unmarked training set.
    pub fn apply_variants(
        &self,
        ds: &DecompositionDataset,
        cfg: &VariantConfig,
    ) -> Result<Self, CorpusError> {
        let scheme = VariantScheme::from_dataset(ds, cfg);

        let mut marked: Vec<Vec<String>> = Vec::with_capacity(self.words.len());
        let mut vocab_set: BTreeSet<String> = BTreeSet::new();
        for word in &self.words {
            let d = ds
                .get(word)
                .ok_or_else(|| CorpusError::MissingDecomposition { word: word.clone() })?;
            let variants = scheme.mark(d.syllables());
            vocab_set.extend(variants.iter().cloned());
            marked.push(variants);
        }

        let vocab_list: Vec<String> = vocab_set.into_iter().collect();
        let vocab: BTreeMap<String, u32> =
            vocab_list.iter().enumerate().map(|(i, s)| (s.clone(), i as u32)).collect();
        let examples: Vec<Vec<u32>> =
            marked.iter().map(|vs| vs.iter().map(|v| vocab[v]).collect()).collect();

        Ok(TrainingSet {
            dim: self.dim,
            words: self.words.clone(),
            examples,
            targets: self.targets.clone(),
            vocab_list,
            vocab,
            scheme,
        })
    }

    /// Remove words whose syllable variants are all frequent, turning them
    /// into out-of-vocabulary test cases. Counts are token counts over this
    /// training set's examples, so the outcome depends on the variant
    /// fraction in effect. In `EvalOnly` scope only words from `eval_vocab`
    /// are candidates for removal.
    pub fn oov_split(
        &self,
        eval_vocab: &BTreeSet<String>,
        min_count: usize,
        scope: OovScope,
    ) -> Result<OovSplit, CorpusError> {
        assert!(min_count >= 1, "min_count must be at least 1");
        let counts = self.variant_token_counts();

        let mut removed_idx = Vec::new();
        let mut retained_idx = Vec::new();
        for (i, word) in self.words.iter().enumerate() {
            let candidate = match scope {
                OovScope::Global => true,
                OovScope::EvalOnly => eval_vocab.contains(word),
            };
            let frequent = self.examples[i].iter().all(|&id| counts[id as usize] >= min_count);
            if candidate && frequent {
                removed_idx.push(i);
            } else {
                retained_idx.push(i);
            }
        }
        if retained_idx.is_empty() {
            return Err(CorpusError::EmptyRetainedSet);
        }

        let mut vocab_set: BTreeSet<&str> = BTreeSet::new();
        for &i in &retained_idx {
            for &id in &self.examples[i] {
                vocab_set.insert(&self.vocab_list[id as usize]);
            }
        }
        let vocab_list: Vec<String> = vocab_set.into_iter().map(str::to_string).collect();
        let vocab: BTreeMap<String, u32> =
            vocab_list.iter().enumerate().map(|(i, s)| (s.clone(), i as u32)).collect();

        let mut words = Vec::with_capacity(retained_idx.len());
        let mut examples = Vec::with_capacity(retained_idx.len());
        let mut targets = Vec::with_capacity(retained_idx.len() * self.dim);
        for &i in &retained_idx {
            words.push(self.words[i].clone());
            examples.push(
                self.examples[i]
                    .iter()
                    .map(|&id| vocab[&self.vocab_list[id as usize]])
                    .collect(),
            );
            targets.extend_from_slice(self.target(i));
        }

        let retained = TrainingSet {
            dim: self.dim,
            words,
            examples,
            targets,
            vocab_list,
            vocab,
            scheme: self.scheme.clone(),
        };

        let removed_words: Vec<String> =
            removed_idx.iter().map(|&i| self.words[i].clone()).collect();
        let uncomposable: Vec<String> = removed_idx
            .iter()
            .filter(|&&i| {
                self.examples[i]
                    .iter()
                    .any(|&id| !retained.vocab.contains_key(&self.vocab_list[id as usize]))
            })
            .map(|&i| self.words[i].clone())
            .collect();

        Ok(OovSplit { retained, removed_words, min_count, uncomposable })
    }

    /// Token counts per variant id over all examples (multiplicity included).
    pub fn variant_token_counts(&self) -> Vec<usize> {
        let mut counts = alloc::vec![0usize; self.vocab_list.len()];
        for ids in &self.examples {
            for &id in ids {
                counts[id as usize] += 1;
            }
        }
        counts
    }

    /// Reassemble a training set from its serialized parts, revalidating the
    /// structural invariants.
    pub fn from_parts(
        dim: usize,
        words: Vec<String>,
        examples: Vec<Vec<u32>>,
        targets: Vec<f32>,
        vocab_list: Vec<String>,
        scheme: VariantScheme,
    ) -> Result<Self, CorpusError> {
        if words.len() != examples.len() || targets.len() != words.len() * dim {
            return Err(CorpusError::DimensionMismatch {
                expected: words.len() * dim,
                got: targets.len(),
            });
        }
        let mut used = alloc::vec![false; vocab_list.len()];
        for (word, ids) in words.iter().zip(&examples) {
            if ids.is_empty() {
                return Err(CorpusError::NoSyllables { word: word.clone() });
            }
            for &id in ids {
                let slot = used
                    .get_mut(id as usize)
                    .ok_or(CorpusError::InvalidSyllableId { word: word.clone(), id })?;
                *slot = true;
            }
        }
        if let Some(unused) = used.iter().position(|u| !u) {
            return Err(CorpusError::InvalidSyllableId {
                word: vocab_list[unused].clone(),
                id: unused as u32,
            });
        }
        let vocab: BTreeMap<String, u32> =
            vocab_list.iter().enumerate().map(|(i, s)| (s.clone(), i as u32)).collect();
        Ok(TrainingSet { dim, words, examples, targets, vocab_list, vocab, scheme })
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn len(&self) -> usize {
        self.words.len()
    }

    pub fn is_empty(&self) -> bool {
        self.words.is_empty()
    }

    pub fn vocab_size(&self) -> usize {
        self.vocab_list.len()
    }

    pub fn vocab(&self) -> &BTreeMap<String, u32> {
        &self.vocab
    }

    /// Syllable-variant strings in id order.
    pub fn vocab_list(&self) -> &[String] {
        &self.vocab_list
    }

    pub fn scheme(&self) -> &VariantScheme {
        &self.scheme
    }

    pub fn word(&self, i: usize) -> &str {
        &self.words[i]
    }

    pub fn words(&self) -> &[String] {
        &self.words
    }

    pub fn example_ids(&self, i: usize) -> &[u32] {
        &self.examples[i]
    }

    pub fn target(&self, i: usize) -> &[f32] {
        &self.targets[i * self.dim..(i + 1) * self.dim]
    }

    pub fn targets(&self) -> &[f32] {
        &self.targets
    }
}
