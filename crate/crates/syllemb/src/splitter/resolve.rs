use alloc::collections::BTreeMap;
use alloc::string::String;

use super::decode::{greedy_decode, validate_roundtrip, DecodeFailure};
use super::model::SplitterModel;
use crate::corpus::{Decomposition, DecompositionDataset, VariantScheme};

/// Reason codes for words the resolver could not turn into a usable
/// decomposition.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum ResolveFailure {
    /// Not in the lookup table and no splitter attached.
    NotInTable,
    /// The splitter failed to produce a well-formed sequence.
    DecodeFailure,
    /// The predicted syllables do not rejoin to the word.
    RoundtripFailure,
    /// Some syllable variant has no embedding in the attached vocabulary.
    UnknownSyllable,
}

impl ResolveFailure {
    pub fn as_str(&self) -> &'static str {
        match self {
            ResolveFailure::NotInTable => "not-in-table",
            ResolveFailure::DecodeFailure => "decode-failure",
            ResolveFailure::RoundtripFailure => "roundtrip-failure",
            ResolveFailure::UnknownSyllable => "unknown-syllable",
        }
    }
}

/// Counters over all resolution attempts, for reporting alongside
/// evaluation results.
#[derive(Debug, Clone, Default, PartialEq, Eq)]
pub struct ResolveTallies {
    pub table_hits: usize,
    pub splitter_resolutions: usize,
    pub not_in_table: usize,
    pub decode_failures: usize,
    pub roundtrip_failures: usize,
    pub unknown_syllables: usize,
}

/// Staged decomposition lookup: (1) the table, (2) the splitter for words
/// the table lacks, (3) round-trip validation of decoded output, (4) the
/// requirement that every marked syllable variant has an embedding. The
/// vocabulary check also applies to table entries so that everything the
/// resolver returns is composable.
pub struct Resolver<'a> {
    table: &'a DecompositionDataset,
    model: Option<&'a SplitterModel>,
    vocab: Option<(&'a BTreeMap<String, u32>, &'a VariantScheme)>,
    tallies: ResolveTallies,
}

impl<'a> Resolver<'a> {
    pub fn new(table: &'a DecompositionDataset) -> Self {
        Resolver { table, model: None, vocab: None, tallies: ResolveTallies::default() }
    }

    pub fn with_model(mut self, model: &'a SplitterModel) -> Self {
        self.model = Some(model);
        self
    }

    /// Attach the syllable-variant vocabulary (and the scheme that marks
    /// decompositions) that step 4 checks against.
    pub fn with_vocab(
        mut self,
        vocab: &'a BTreeMap<String, u32>,
        scheme: &'a VariantScheme,
    ) -> Self {
        self.vocab = Some((vocab, scheme));
        self
    }

    pub fn tallies(&self) -> &ResolveTallies {
        &self.tallies
    }

    pub fn resolve(&mut self, word: &str) -> Result<Decomposition, ResolveFailure> {
        let model = self.model;
        self.resolve_with(word, model.map(|m| move |w: &str| greedy_decode(m, w, None)))
    }

    /// Resolution with an arbitrary decode step, letting tests drive the
    /// pipeline with synthetic decoders.
    pub fn resolve_with<D>(
        &mut self,
        word: &str,
        decode: Option<D>,
    ) -> Result<Decomposition, ResolveFailure>
    where
        D: FnOnce(&str) -> Result<Decomposition, DecodeFailure>,
    {
        if let Some(d) = self.table.get(word) {
            self.tallies.table_hits += 1;
            if !self.passes_vocab(d) {
                self.tallies.unknown_syllables += 1;
                return Err(ResolveFailure::UnknownSyllable);
            }
            return Ok(d.clone());
        }

        let Some(decode) = decode else {
            self.tallies.not_in_table += 1;
            return Err(ResolveFailure::NotInTable);
        };

        let decoded = match decode(word) {
            Ok(d) => d,
            Err(_) => {
                self.tallies.decode_failures += 1;
                return Err(ResolveFailure::DecodeFailure);
            }
        };
        if !validate_roundtrip(word, &decoded) {
            self.tallies.roundtrip_failures += 1;
            return Err(ResolveFailure::RoundtripFailure);
        }
        if !self.passes_vocab(&decoded) {
            self.tallies.unknown_syllables += 1;
            return Err(ResolveFailure::UnknownSyllable);
        }
        self.tallies.splitter_resolutions += 1;
        Ok(decoded)
    }

    fn passes_vocab(&self, d: &Decomposition) -> bool {
        match self.vocab {
            None => true,
            Some((vocab, scheme)) => {
                scheme.mark(d.syllables()).iter().all(|v| vocab.contains_key(v))
            }
        }
    }
}
