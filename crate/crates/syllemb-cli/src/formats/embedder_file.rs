//! Composition-model container. Header meta: kind, dimensions, the
//! syllable-variant vocabulary in id order, the variant markers and the
//! marked syllable sets. Payload arrays in fixed order: `syllable_table`,
//! then `w_q`, `w_k`, `b_k` for the attention kinds, then `w_e`, `b_e` for
//! the expanding kind.

use std::collections::BTreeSet;
use std::path::Path;

use syllemb::corpus::VariantScheme;
use syllemb::embedder::{EmbedderKind, EmbedderModel};

use super::container::{meta_char, meta_str, meta_string_list, meta_usize, narrow, Container};
use super::FormatError;

pub const FORMAT: &str = "embedder-model";

fn kind_from_str(s: &str) -> Result<EmbedderKind, FormatError> {
    match s {
        "vanilla" => Ok(EmbedderKind::Vanilla),
        "attention1" => Ok(EmbedderKind::Attention1),
        "attention2" => Ok(EmbedderKind::Attention2),
        other => Err(FormatError::Container(format!("unknown model kind {other:?}"))),
    }
}

pub fn to_container(model: &EmbedderModel) -> Container {
    let scheme = model.scheme();
    let meta = serde_json::json!({
        "kind": model.kind().as_str(),
        "dim": model.dim(),
        "out_dim": model.out_dim(),
        "vocab": model.vocab_list(),
        "start_marker": scheme.start_marker().to_string(),
        "end_marker": scheme.end_marker().to_string(),
        "start_marked": scheme.start_marked().iter().collect::<Vec<_>>(),
        "end_marked": scheme.end_marked().iter().collect::<Vec<_>>(),
    });
    let mut c = Container::new(FORMAT, meta);
    let d = model.dim();
    c.push_array("syllable_table", model.vocab_size(), d, narrow(model.table()));
    let (w_q, w_k, b_k, w_e, b_e) = model.weights();
    if !w_q.is_empty() {
        c.push_array("w_q", d, d, narrow(w_q));
        c.push_array("w_k", d, d, narrow(w_k));
        c.push_array("b_k", 1, d, narrow(b_k));
    }
    if !w_e.is_empty() {
        c.push_array("w_e", model.out_dim(), d, narrow(w_e));
        c.push_array("b_e", 1, model.out_dim(), narrow(b_e));
    }
    c
}

pub fn from_container(c: &Container) -> Result<EmbedderModel, FormatError> {
    c.expect_format(FORMAT)?;
    let kind = kind_from_str(&meta_str(&c.meta, "kind")?)?;
    let dim = meta_usize(&c.meta, "dim")?;
    let out_dim = meta_usize(&c.meta, "out_dim")?;
    let vocab = meta_string_list(&c.meta, "vocab")?;
    let scheme = VariantScheme::from_parts(
        meta_char(&c.meta, "start_marker")?,
        meta_char(&c.meta, "end_marker")?,
        meta_string_list(&c.meta, "start_marked")?.into_iter().collect::<BTreeSet<_>>(),
        meta_string_list(&c.meta, "end_marked")?.into_iter().collect::<BTreeSet<_>>(),
    )?;

    let table = c.take("syllable_table", vocab.len(), dim)?;
    let attention = !matches!(kind, EmbedderKind::Vanilla);
    let (w_q, w_k, b_k) = if attention {
        (c.take("w_q", dim, dim)?, c.take("w_k", dim, dim)?, c.take("b_k", 1, dim)?)
    } else {
        (vec![], vec![], vec![])
    };
    let (w_e, b_e) = if matches!(kind, EmbedderKind::Attention2) {
        (c.take("w_e", out_dim, dim)?, c.take("b_e", 1, out_dim)?)
    } else {
        (vec![], vec![])
    };

    Ok(EmbedderModel::from_parts(
        kind, dim, out_dim, vocab, scheme, table, w_q, w_k, b_k, w_e, b_e,
    )?)
}

pub fn save(model: &EmbedderModel, path: &Path) -> Result<(), FormatError> {
    to_container(model).save(path)
}

pub fn load(path: &Path) -> Result<EmbedderModel, FormatError> {
    from_container(&Container::load(path)?)
}
