use alloc::collections::BTreeMap;
use alloc::string::String;
use alloc::vec::Vec;

use super::CorpusError;

/// A fixed word → vector map, the teacher signal for composition training.
///
/// Vectors are stored in 32-bit precision (the precision of the source text
/// files); lookups of absent words return `None` rather than a zero vector.
#[derive(Debug, Clone, Default)]
pub struct EmbeddingTable {
    dim: usize,
    entries: BTreeMap<String, Vec<f32>>,
}

impl EmbeddingTable {
    pub fn new(dim: usize) -> Self {
        EmbeddingTable { dim, entries: BTreeMap::new() }
    }

    /// Insert a vector, keeping the first occurrence on duplicates.
    /// Returns whether the entry was newly added.
    pub fn insert_first(&mut self, word: String, vector: Vec<f32>) -> Result<bool, CorpusError> {
        if vector.len() != self.dim {
            return Err(CorpusError::DimensionMismatch { expected: self.dim, got: vector.len() });
        }
        if self.entries.contains_key(&word) {
            return Ok(false);
        }
        self.entries.insert(word, vector);
        Ok(true)
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn len(&self) -> usize {
        self.entries.len()
    }

    pub fn is_empty(&self) -> bool {
        self.entries.is_empty()
    }

    pub fn get(&self, word: &str) -> Option<&[f32]> {
        self.entries.get(word).map(Vec::as_slice)
    }

    pub fn contains(&self, word: &str) -> bool {
        self.entries.contains_key(word)
    }

    pub fn iter(&self) -> impl Iterator<Item = (&str, &[f32])> {
        self.entries.iter().map(|(w, v)| (w.as_str(), v.as_slice()))
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use alloc::string::ToString;
    use alloc::vec;

    #[test]
    fn dimension_enforced() {
        let mut t = EmbeddingTable::new(2);
        t.insert_first("a".to_string(), vec![1.0, 0.0]).unwrap();
        let err = t.insert_first("b".to_string(), vec![1.0]).unwrap_err();
        assert_eq!(err, CorpusError::DimensionMismatch { expected: 2, got: 1 });
    }

    #[test]
    fn first_occurrence_wins() {
        let mut t = EmbeddingTable::new(1);
        assert!(t.insert_first("a".to_string(), vec![1.0]).unwrap());
        assert!(!t.insert_first("a".to_string(), vec![2.0]).unwrap());
        assert_eq!(t.get("a"), Some(&[1.0f32][..]));
    }

    #[test]
    fn absent_word_distinguishable() {
        let t = EmbeddingTable::new(1);
        assert!(t.get("missing").is_none());
    }
}
