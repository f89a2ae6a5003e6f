//! The decomposition corpus format: UTF-8, one record per line,
//! `word<TAB>syl1-syl2-...-sylN`, no escaping.
//!
//! Malformed lines (missing tab, empty word or syllable) are hard errors
//! with their line number; lines whose syllables fail the character filter
//! or do not rejoin to the word are skipped and counted.

use std::path::Path;

use serde::Serialize;
use syllemb::corpus::{CharFilter, CorpusError, Decomposition, DecompositionDataset};

use super::FormatError;

/// What happened to the lines of a parsed file.
#[derive(Debug, Clone, Default, PartialEq, Eq, Serialize)]
pub struct SkipReport {
    pub lines: usize,
    pub accepted: usize,
    pub invalid_chars: usize,
    pub rejoin_mismatch: usize,
    pub replaced_duplicates: usize,
}

pub fn parse(
    text: &str,
    filter: &CharFilter,
    path: &Path,
) -> Result<(DecompositionDataset, SkipReport), FormatError> {
    let mut ds = DecompositionDataset::new();
    let mut report = SkipReport::default();

    for (i, line) in text.lines().enumerate() {
        let lineno = i + 1;
        if line.is_empty() {
            continue;
        }
        report.lines += 1;

        let mut fields = line.split('\t');
        let (word, rest) = match (fields.next(), fields.next(), fields.next()) {
            (Some(w), Some(r), None) => (w, r),
            _ => return Err(FormatError::parse(path, lineno, "expected exactly one tab")),
        };
        if word.is_empty() {
            return Err(FormatError::parse(path, lineno, "empty word"));
        }
        let syllables: Vec<String> = rest.split('-').map(str::to_string).collect();
        if syllables.iter().any(String::is_empty) {
            return Err(FormatError::parse(path, lineno, "empty syllable"));
        }

        let d = match Decomposition::new(word.to_string(), syllables) {
            Ok(d) => d,
            Err(CorpusError::RejoinMismatch { .. }) => {
                report.rejoin_mismatch += 1;
                continue;
            }
            Err(e) => return Err(FormatError::parse(path, lineno, e.to_string())),
        };
        if !filter.is_valid_decomposition(&d) {
            report.invalid_chars += 1;
            continue;
        }
        if ds.insert(d).is_some() {
            report.replaced_duplicates += 1;
            log::warn!("{}:{lineno}: duplicate word {word:?}, keeping the last entry", path.display());
        }
        report.accepted += 1;
    }
    // Replaced entries were counted as accepted twice.
    report.accepted -= report.replaced_duplicates;
    Ok((ds, report))
}

pub fn load(
    path: &Path,
    filter: &CharFilter,
) -> Result<(DecompositionDataset, SkipReport), FormatError> {
    let text = std::fs::read_to_string(path)?;
    parse(&text, filter, path)
}

/// Serialize a dataset back to the TSV format, one word per line in sorted
/// order.
pub fn write(ds: &DecompositionDataset) -> String {
    let mut out = String::new();
    for d in ds.iter() {
        out.push_str(d.word());
        out.push('\t');
        out.push_str(&d.syllables().join("-"));
        out.push('\n');
    }
    out
}
