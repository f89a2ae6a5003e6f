use alloc::collections::BTreeSet;
use alloc::string::String;

use super::Decomposition;

/// The characters a word may consist of after lowercasing: the basic Latin
/// letters, digits and the accented letters that occur in the source corpora.
/// The hyphen is deliberately absent; it doubles as the syllable delimiter
/// and words containing it are rejected (see [`CharFilter::with_hyphen`]).
pub const DEFAULT_ALLOWED: &str =
    "abcdefghijklmnopqrstuvwxyz0123456789\u{e4}\u{e0}\u{e1}\u{e7}\u{eb}\u{e8}\u{e9}\u{ea}\u{ef}\u{ed}\u{ee}\u{f1}\u{f6}\u{f3}\u{fc}\u{fa}";

/// Membership test deciding which words and syllables enter a corpus.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct CharFilter {
    allowed: BTreeSet<char>,
}

impl Default for CharFilter {
    fn default() -> Self {
        CharFilter::new(DEFAULT_ALLOWED.chars())
    }
}

impl CharFilter {
    pub fn new(allowed: impl IntoIterator<Item = char>) -> Self {
        CharFilter { allowed: allowed.into_iter().collect() }
    }

    /// The default set extended with `'-'`.
    pub fn with_hyphen() -> Self {
        CharFilter::new(DEFAULT_ALLOWED.chars().chain(core::iter::once('-')))
    }

    pub fn contains(&self, c: char) -> bool {
        self.allowed.contains(&c)
    }

    pub fn allowed(&self) -> impl Iterator<Item = char> + '_ {
        self.allowed.iter().copied()
    }

    /// True iff every character of the lowercased word is allowed.
    /// Empty words are rejected.
    pub fn is_valid_word(&self, word: &str) -> bool {
        if word.is_empty() {
            return false;
        }
        let lowered: String = word.to_lowercase();
        lowered.chars().all(|c| self.contains(c))
    }

    /// True iff every syllable, taken verbatim (no lowercasing), contains
    /// only allowed characters. Uppercase letters in a syllable therefore
    /// reject the decomposition even when the word itself would pass.
    pub fn is_valid_decomposition(&self, d: &Decomposition) -> bool {
        d.syllables().iter().all(|syl| syl.chars().all(|c| self.contains(c)))
    }
}
