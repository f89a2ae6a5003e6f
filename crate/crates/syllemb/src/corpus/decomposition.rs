use alloc::collections::BTreeMap;
use alloc::string::String;
use alloc::vec::Vec;

use super::CorpusError;

/// A word together with its ordered syllables. The syllables always rejoin
/// to the word exactly; construction fails otherwise.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Decomposition {
    word: String,
    syllables: Vec<String>,
}

impl Decomposition {
    pub fn new(word: String, syllables: Vec<String>) -> Result<Self, CorpusError> {
        if syllables.is_empty() {
            return Err(CorpusError::NoSyllables { word });
        }
        if syllables.iter().any(|s| s.is_empty()) {
            return Err(CorpusError::EmptySyllable { word });
        }
        let joined: String = syllables.concat();
        if joined != word {
            return Err(CorpusError::RejoinMismatch { word, joined });
        }
        Ok(Decomposition { word, syllables })
    }

    pub fn word(&self) -> &str {
        &self.word
    }

    pub fn syllables(&self) -> &[String] {
        &self.syllables
    }

    pub fn syllable_count(&self) -> usize {
        self.syllables.len()
    }
}

/// A word → decomposition map with syllable occurrence statistics.
///
/// Counts are token counts: a syllable appearing twice in one word counts
/// twice. `start_counts`/`end_counts` track how often a syllable occupies
/// the first/last position of a word; a one-syllable word contributes to
/// both.
#[derive(Debug, Clone, Default, PartialEq, Eq)]
pub struct DecompositionDataset {
    items: BTreeMap<String, Decomposition>,
    syllable_counts: BTreeMap<String, usize>,
    start_counts: BTreeMap<String, usize>,
    end_counts: BTreeMap<String, usize>,
}

impl DecompositionDataset {
    pub fn new() -> Self {
        Self::default()
    }

    pub fn from_items(items: impl IntoIterator<Item = Decomposition>) -> Self {
        let mut ds = Self::new();
        for d in items {
            ds.insert(d);
        }
        ds
    }

    /// Insert a decomposition; a pre-existing entry for the same word is
    /// replaced (last one wins) and returned.
    pub fn insert(&mut self, d: Decomposition) -> Option<Decomposition> {
        let previous = self.items.remove(d.word());
        if let Some(old) = &previous {
            self.remove_counts(old);
        }
        self.add_counts(&d);
        self.items.insert(d.word.clone(), d);
        previous
    }

    fn add_counts(&mut self, d: &Decomposition) {
        for syl in d.syllables() {
            *self.syllable_counts.entry(syl.clone()).or_insert(0) += 1;
        }
        let first = &d.syllables()[0];
        *self.start_counts.entry(first.clone()).or_insert(0) += 1;
        let last = d.syllables().last().expect("nonempty");
        *self.end_counts.entry(last.clone()).or_insert(0) += 1;
    }

    fn remove_counts(&mut self, d: &Decomposition) {
        for syl in d.syllables() {
            Self::decrement(&mut self.syllable_counts, syl);
        }
        Self::decrement(&mut self.start_counts, &d.syllables()[0]);
        Self::decrement(&mut self.end_counts, d.syllables().last().expect("nonempty"));
    }

    fn decrement(map: &mut BTreeMap<String, usize>, key: &str) {
        if let Some(n) = map.get_mut(key) {
            *n -= 1;
            if *n == 0 {
                map.remove(key);
            }
        }
    }

    pub fn get(&self, word: &str) -> Option<&Decomposition> {
        self.items.get(word)
    }

    pub fn contains(&self, word: &str) -> bool {
        self.items.contains_key(word)
    }

    pub fn len(&self) -> usize {
        self.items.len()
    }

    pub fn is_empty(&self) -> bool {
        self.items.is_empty()
    }

    pub fn iter(&self) -> impl Iterator<Item = &Decomposition> {
        self.items.values()
    }

    pub fn words(&self) -> impl Iterator<Item = &str> {
        self.items.keys().map(String::as_str)
    }

    pub fn syllable_counts(&self) -> &BTreeMap<String, usize> {
        &self.syllable_counts
    }

    pub fn start_counts(&self) -> &BTreeMap<String, usize> {
        &self.start_counts
    }

    pub fn end_counts(&self) -> &BTreeMap<String, usize> {
        &self.end_counts
    }

    pub fn unique_syllables(&self) -> usize {
        self.syllable_counts.len()
    }

    /// Total number of syllable slots over all words; equals the sum of all
    /// syllable counts.
    pub fn total_syllable_slots(&self) -> usize {
        self.items.values().map(Decomposition::syllable_count).sum()
    }
}
