use alloc::collections::BTreeMap;
use alloc::string::{String, ToString};
use alloc::vec::Vec;

use super::SplitterError;
use crate::corpus::{Decomposition, DecompositionDataset};

pub const PAD: usize = 0;
pub const BOS: usize = 1;
pub const EOS: usize = 2;
/// The syllable boundary token. Never a word character: the corpus filter
/// rejects words containing `'-'`.
pub const DELIM: usize = 3;

const SPECIALS: [&str; 4] = ["<pad>", "<bos>", "<eos>", "-"];

/// Token inventory of a splitter: the four specials followed by the sorted
/// distinct characters of the training words. Indices are stable across
/// save/load.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct CharVocab {
    chars: Vec<char>,
    index: BTreeMap<char, usize>,
}

impl CharVocab {
    /// Collect the characters of every word in the dataset, sorted.
    pub fn from_dataset(ds: &DecompositionDataset) -> Self {
        let set: alloc::collections::BTreeSet<char> =
            ds.words().flat_map(|w| w.chars()).collect();
        Self::from_chars(set.into_iter().collect())
    }

    /// Rebuild from an explicit character list (deserialization); the order
    /// given defines the token ids.
    pub fn from_chars(chars: Vec<char>) -> Self {
        let index = chars.iter().enumerate().map(|(i, &c)| (c, SPECIALS.len() + i)).collect();
        CharVocab { chars, index }
    }

    /// Total token count including the specials.
    pub fn size(&self) -> usize {
        SPECIALS.len() + self.chars.len()
    }

    pub fn chars(&self) -> &[char] {
        &self.chars
    }

    pub fn char_id(&self, c: char) -> Option<usize> {
        self.index.get(&c).copied()
    }

    /// Printable token names in id order.
    pub fn token_names(&self) -> Vec<String> {
        SPECIALS
            .iter()
            .map(|s| String::from(*s))
            .chain(self.chars.iter().map(|c| c.to_string()))
            .collect()
    }

    /// `BOS ++ chars(word) ++ EOS`.
    pub fn encode_word(&self, word: &str) -> Result<Vec<usize>, SplitterError> {
        let mut out = Vec::with_capacity(word.chars().count() + 2);
        out.push(BOS);
        for c in word.chars() {
            out.push(self.char_id(c).ok_or(SplitterError::UnknownCharacter(c))?);
        }
        out.push(EOS);
        Ok(out)
    }

    /// Source and target token sequences for one training example. The
    /// target interleaves the syllables with the boundary token:
    /// `BOS ++ chars(syl1) ++ '-' ++ chars(syl2) ++ ... ++ EOS`.
    pub fn encode_example(
        &self,
        d: &Decomposition,
    ) -> Result<(Vec<usize>, Vec<usize>), SplitterError> {
        let source = self.encode_word(d.word())?;
        let mut target = Vec::with_capacity(source.len() + d.syllable_count());
        target.push(BOS);
        for (i, syl) in d.syllables().iter().enumerate() {
            if i > 0 {
                target.push(DELIM);
            }
            for c in syl.chars() {
                target.push(self.char_id(c).ok_or(SplitterError::UnknownCharacter(c))?);
            }
        }
        target.push(EOS);
        Ok((source, target))
    }
}
