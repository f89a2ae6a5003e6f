//! Scored word pairs: `word1<TAB>word2<TAB>score`. Phrases may contain
//! spaces or underscores. A non-numeric score on the first line is treated
//! as a column header and skipped.

use std::path::Path;

use syllemb::eval::{Pair, PairDataset};

use super::FormatError;

pub fn parse(text: &str, name: &str, path: &Path) -> Result<PairDataset, FormatError> {
    let mut pairs = Vec::new();
    for (i, line) in text.lines().enumerate() {
        let lineno = i + 1;
        if line.is_empty() {
            continue;
        }
        let fields: Vec<&str> = line.split('\t').collect();
        if fields.len() != 3 {
            return Err(FormatError::parse(
                path,
                lineno,
                format!("expected 3 tab-separated fields, got {}", fields.len()),
            ));
        }
        let score: f64 = match fields[2].parse() {
            Ok(s) => s,
            Err(_) if lineno == 1 => continue, // header row
            Err(_) => {
                return Err(FormatError::parse(
                    path,
                    lineno,
                    format!("non-numeric score {:?}", fields[2]),
                ))
            }
        };
        if fields[0].is_empty() || fields[1].is_empty() {
            return Err(FormatError::parse(path, lineno, "empty word"));
        }
        pairs.push(Pair { word1: fields[0].to_string(), word2: fields[1].to_string(), score });
    }
    Ok(PairDataset::new(name.to_string(), pairs)?)
}

pub fn load(path: &Path) -> Result<PairDataset, FormatError> {
    let text = std::fs::read_to_string(path)?;
    let name = path.file_stem().and_then(|s| s.to_str()).unwrap_or("pairs");
    parse(&text, name, path)
}
