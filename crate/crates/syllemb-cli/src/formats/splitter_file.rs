//! Splitter-model container. Header meta: the hyperparameters and the
//! character inventory; payload: every trainable array under its schema
//! name plus the fixed positional table (`pos`) last.

use std::collections::BTreeMap;
use std::path::Path;

use syllemb::splitter::{CharVocab, SplitterConfig, SplitterModel};

use super::container::{meta_str, meta_usize, narrow, widen, Container};
use super::FormatError;

pub const FORMAT: &str = "splitter-model";

pub fn to_container(model: &SplitterModel) -> Container {
    let cfg = model.config();
    let meta = serde_json::json!({
        "layers": cfg.layers(),
        "embedding": cfg.embedding(),
        "heads": cfg.heads(),
        "hidden": cfg.hidden(),
        "dropout": cfg.dropout,
        "chars": model.vocab().chars().iter().collect::<String>(),
        "max_len": model.max_len(),
    });
    let mut c = Container::new(FORMAT, meta);
    for (name, rows, cols, data) in model.named_arrays() {
        c.push_array(name, rows, cols, narrow(data));
    }
    c.push_array("pos", model.max_len(), cfg.embedding(), narrow(model.positional_encodings()));
    c
}

pub fn from_container(c: &Container) -> Result<SplitterModel, FormatError> {
    c.expect_format(FORMAT)?;
    let config = SplitterConfig::new(
        meta_usize(&c.meta, "layers")?,
        meta_usize(&c.meta, "embedding")?,
        meta_usize(&c.meta, "heads")?,
        meta_usize(&c.meta, "hidden")?,
    )?;
    let chars: Vec<char> = meta_str(&c.meta, "chars")?.chars().collect();
    let vocab = CharVocab::from_chars(chars);

    let mut arrays: BTreeMap<String, Vec<f64>> = BTreeMap::new();
    for (spec, data) in &c.arrays {
        if spec.name != "pos" {
            arrays.insert(spec.name.clone(), widen(data));
        }
    }
    Ok(SplitterModel::from_arrays(config, vocab, arrays)?)
}

pub fn save(model: &SplitterModel, path: &Path) -> Result<(), FormatError> {
    to_container(model).save(path)
}

pub fn load(path: &Path) -> Result<SplitterModel, FormatError> {
    from_container(&Container::load(path)?)
}

#[cfg(test)]
mod tests {
    use super::*;
    use rand::SeedableRng;
    use rand_chacha::ChaCha8Rng;

    #[test]
    fn roundtrip_preserves_decoding() {
        let config = SplitterConfig::new(1, 16, 4, 32).unwrap();
        let vocab = CharVocab::from_chars(vec!['a', 'b', 'o', 'x']);
        let mut rng = ChaCha8Rng::seed_from_u64(3);
        let model = SplitterModel::init(config, vocab, &mut rng);

        let mut bytes = Vec::new();
        to_container(&model).write_to(&mut bytes).unwrap();
        let back = from_container(&Container::read_from(&mut bytes.as_slice()).unwrap()).unwrap();

        assert_eq!(back.vocab(), model.vocab());
        assert_eq!(back.config(), model.config());
        // Token indices and weights survive, so decoding agrees bit-for-bit
        // after the 32-bit narrowing on both sides.
        let narrowed = from_container(&to_container(&back)).unwrap();
        let a = syllemb::splitter::greedy_decode(&back, "boxa", None);
        let b = syllemb::splitter::greedy_decode(&narrowed, "boxa", None);
        match (a, b) {
            (Ok(x), Ok(y)) => assert_eq!(x.syllables(), y.syllables()),
            (x, y) => assert_eq!(format!("{x:?}"), format!("{y:?}")),
        }
    }

    /// Serialized sizes for the hyperparameter sweep corners stay within the
    /// expected band.
    #[test]
    fn serialized_sizes_in_expected_range() {
        let vocab_chars: Vec<char> = "abcdefghijklmnopqrstuvwxyz0123456789".chars().collect();
        let mut rng = ChaCha8Rng::seed_from_u64(1);

        let small = SplitterModel::init(
            SplitterConfig::new(1, 16, 4, 64).unwrap(),
            CharVocab::from_chars(vocab_chars.clone()),
            &mut rng,
        );
        let mut bytes = Vec::new();
        to_container(&small).write_to(&mut bytes).unwrap();
        assert!(
            (50_000..1_500_000).contains(&bytes.len()),
            "small config serialized to {} bytes",
            bytes.len()
        );

        let large = SplitterModel::init(
            SplitterConfig::new(2, 64, 16, 256).unwrap(),
            CharVocab::from_chars(vocab_chars),
            &mut rng,
        );
        let mut bytes = Vec::new();
        to_container(&large).write_to(&mut bytes).unwrap();
        assert!(
            (50_000..1_500_000).contains(&bytes.len()),
            "large config serialized to {} bytes",
            bytes.len()
        );
    }
}
