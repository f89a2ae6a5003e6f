//! Serialized training sets produced by `prepare` and consumed by
//! `train embedder`. Header meta: dimensionality, the variant vocabulary in
//! id order, the words with their id sequences and the variant scheme;
//! payload: the `targets` matrix.

use std::collections::BTreeSet;
use std::path::Path;

use syllemb::corpus::{TrainingSet, VariantScheme};

use super::container::{meta_char, meta_string_list, meta_usize, Container};
use super::FormatError;

pub const FORMAT: &str = "training-set";

pub fn to_container(ts: &TrainingSet) -> Container {
    let scheme = ts.scheme();
    let examples: Vec<&[u32]> = (0..ts.len()).map(|i| ts.example_ids(i)).collect();
    let meta = serde_json::json!({
        "dim": ts.dim(),
        "vocab": ts.vocab_list(),
        "words": ts.words(),
        "examples": examples,
        "start_marker": scheme.start_marker().to_string(),
        "end_marker": scheme.end_marker().to_string(),
        "start_marked": scheme.start_marked().iter().collect::<Vec<_>>(),
        "end_marked": scheme.end_marked().iter().collect::<Vec<_>>(),
    });
    let mut c = Container::new(FORMAT, meta);
    c.push_array("targets", ts.len(), ts.dim(), ts.targets().to_vec());
    c
}

pub fn from_container(c: &Container) -> Result<TrainingSet, FormatError> {
    c.expect_format(FORMAT)?;
    let dim = meta_usize(&c.meta, "dim")?;
    let vocab = meta_string_list(&c.meta, "vocab")?;
    let words = meta_string_list(&c.meta, "words")?;
    let examples: Vec<Vec<u32>> = c
        .meta
        .get("examples")
        .and_then(|v| serde_json::from_value(v.clone()).ok())
        .ok_or_else(|| FormatError::Container("meta field examples missing".into()))?;
    let scheme = VariantScheme::from_parts(
        meta_char(&c.meta, "start_marker")?,
        meta_char(&c.meta, "end_marker")?,
        meta_string_list(&c.meta, "start_marked")?.into_iter().collect::<BTreeSet<_>>(),
        meta_string_list(&c.meta, "end_marked")?.into_iter().collect::<BTreeSet<_>>(),
    )?;
    let (_, targets) = c
        .array("targets")
        .ok_or_else(|| FormatError::Container("missing array targets".into()))?;
    Ok(TrainingSet::from_parts(dim, words, examples, targets.to_vec(), vocab, scheme)?)
}

pub fn save(ts: &TrainingSet, path: &Path) -> Result<(), FormatError> {
    to_container(ts).save(path)
}

pub fn load(path: &Path) -> Result<TrainingSet, FormatError> {
    from_container(&Container::load(path)?)
}

#[cfg(test)]
mod tests {
    use super::*;
    use syllemb::corpus::{
        CharFilter, DecompositionDataset, EmbeddingTable, VariantConfig,
    };

    #[test]
    fn roundtrip() {
        let (ds, _) = crate::formats::decomp_tsv::parse(
            "apple\tap-ple\napply\tap-ply\nbox\tbox\n",
            &CharFilter::default(),
            std::path::Path::new("t.tsv"),
        )
        .unwrap();
        let mut emb = EmbeddingTable::new(3);
        for (i, w) in ds.words().enumerate() {
            let mut v = vec![0.0f32; 3];
            v[i] = 1.0;
            emb.insert_first(w.to_string(), v).unwrap();
        }
        let _ = DecompositionDataset::new();
        let ts = TrainingSet::build(&ds, &emb)
            .unwrap()
            .apply_variants(&ds, &VariantConfig::new(0.5).unwrap())
            .unwrap();

        let mut bytes = Vec::new();
        to_container(&ts).write_to(&mut bytes).unwrap();
        let back = from_container(&Container::read_from(&mut bytes.as_slice()).unwrap()).unwrap();

        assert_eq!(back.dim(), ts.dim());
        assert_eq!(back.words(), ts.words());
        assert_eq!(back.vocab_list(), ts.vocab_list());
        assert_eq!(back.scheme(), ts.scheme());
        for i in 0..ts.len() {
            assert_eq!(back.example_ids(i), ts.example_ids(i));
            assert_eq!(back.target(i), ts.target(i));
        }
    }
}
