use alloc::collections::BTreeMap;
use alloc::string::{String, ToString};
use alloc::vec::Vec;

use rand::Rng;

use super::EmbedderError;
use crate::corpus::{Decomposition, VariantScheme};
use crate::math;
use crate::nn::{l2_normalize, softmax};

/// Which composition the model applies on top of the syllable table.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum EmbedderKind {
    /// Normalized sum of the syllable embeddings.
    Vanilla,
    /// Attention pooling over the syllables, table at output dimensionality.
    Attention1,
    /// Attention pooling over a lower-dimensional table, expanded back to
    /// the output dimensionality by a linear layer.
    Attention2,
}

impl EmbedderKind {
    pub fn as_str(&self) -> &'static str {
        match self {
            EmbedderKind::Vanilla => "vanilla",
            EmbedderKind::Attention1 => "attention1",
            EmbedderKind::Attention2 => "attention2",
        }
    }
}

/// Model family, dimensions and training settings.
#[derive(Debug, Clone, PartialEq)]
pub struct EmbedderConfig {
    kind: EmbedderKind,
    dim: usize,
    out_dim: usize,
    pub epochs: usize,
    pub seed: u64,
    pub init_scale: f64,
    /// Stop once the mean epoch loss improves by less than this; `None`
    /// always runs the full epoch budget.
    pub early_stop: Option<f64>,
}

impl EmbedderConfig {
    pub fn vanilla(dim: usize) -> Self {
        EmbedderConfig {
            kind: EmbedderKind::Vanilla,
            dim,
            out_dim: dim,
            epochs: 30,
            seed: 0,
            init_scale: 0.1,
            early_stop: Some(1e-6),
        }
    }

    pub fn attention1(dim: usize) -> Self {
        EmbedderConfig { kind: EmbedderKind::Attention1, ..EmbedderConfig::vanilla(dim) }
    }

    /// The expanding variant: the table lives at `inner_dim` and a linear
    /// layer maps pooled vectors to `out_dim`, with `inner_dim < out_dim`.
    pub fn attention2(inner_dim: usize, out_dim: usize) -> Result<Self, EmbedderError> {
        if inner_dim >= out_dim {
            return Err(EmbedderError::InvalidConfig(alloc::format!(
                "inner dimension {inner_dim} must be smaller than output dimension {out_dim}"
            )));
        }
        Ok(EmbedderConfig {
            kind: EmbedderKind::Attention2,
            dim: inner_dim,
            out_dim,
            ..EmbedderConfig::vanilla(inner_dim)
        })
    }

    pub fn with_epochs(mut self, epochs: usize) -> Self {
        assert!(epochs >= 1, "at least one epoch");
        self.epochs = epochs;
        self
    }

    pub fn with_seed(mut self, seed: u64) -> Self {
        self.seed = seed;
        self
    }

    pub fn with_init_scale(mut self, scale: f64) -> Self {
        self.init_scale = scale;
        self
    }

    pub fn without_early_stop(mut self) -> Self {
        self.early_stop = None;
        self
    }

    pub fn kind(&self) -> EmbedderKind {
        self.kind
    }

    /// Dimensionality of the syllable table.
    pub fn dim(&self) -> usize {
        self.dim
    }

    /// Dimensionality of composed word vectors.
    pub fn out_dim(&self) -> usize {
        self.out_dim
    }
}

/// Trainable parameter count for a given vocabulary size: the table itself,
/// plus `2*D^2 + D` for the attention scorer, plus `D*out + out` for the
/// expansion layer when present.
pub fn param_count(cfg: &EmbedderConfig, vocab_size: usize) -> usize {
    let d = cfg.dim;
    let base = vocab_size * d;
    match cfg.kind {
        EmbedderKind::Vanilla => base,
        EmbedderKind::Attention1 => base + 2 * d * d + d,
        EmbedderKind::Attention2 => base + 2 * d * d + d + d * cfg.out_dim + cfg.out_dim,
    }
}

/// A trained (or initializing) composition model: the syllable-variant
/// table and, for the attention kinds, the scorer and expansion weights.
/// The variant scheme is carried along so inference marks syllables exactly
/// the way training did.
#[derive(Debug, Clone)]
pub struct EmbedderModel {
    kind: EmbedderKind,
    dim: usize,
    out_dim: usize,
    vocab_list: Vec<String>,
    vocab: BTreeMap<String, u32>,
    scheme: VariantScheme,
    /// `|vocab| x dim`, row-major.
    pub(crate) table: Vec<f64>,
    /// `dim x dim`; queries are `context * w_q^T`.
    pub(crate) w_q: Vec<f64>,
    /// `dim x dim`; keys are `syllable * w_k^T + b_k`.
    pub(crate) w_k: Vec<f64>,
    pub(crate) b_k: Vec<f64>,
    /// `out_dim x dim` expansion weight (attention2 only).
    pub(crate) w_e: Vec<f64>,
    pub(crate) b_e: Vec<f64>,
}

impl EmbedderModel {
    /// Random initialization. Syllable rows and the scorer weights start
    /// near zero so early compositions stay close to the plain average and
    /// attention starts near uniform; biases start at zero.
    pub fn init(
        cfg: &EmbedderConfig,
        vocab_list: Vec<String>,
        scheme: VariantScheme,
        rng: &mut impl Rng,
    ) -> Self {
        let d = cfg.dim;
        let bound = cfg.init_scale / math::sqrt(d as f64);
        let mut uniform = |n: usize, b: f64| -> Vec<f64> {
            (0..n).map(|_| rng.gen_range(-b..b)).collect()
        };

        let table = uniform(vocab_list.len() * d, bound);
        let (w_q, w_k, b_k) = match cfg.kind {
            EmbedderKind::Vanilla => (Vec::new(), Vec::new(), Vec::new()),
            _ => (uniform(d * d, bound), uniform(d * d, bound), alloc::vec![0.0; d]),
        };
        let (w_e, b_e) = match cfg.kind {
            EmbedderKind::Attention2 => (
                uniform(cfg.out_dim * d, 1.0 / math::sqrt(d as f64)),
                alloc::vec![0.0; cfg.out_dim],
            ),
            _ => (Vec::new(), Vec::new()),
        };

        let vocab = vocab_list.iter().enumerate().map(|(i, s)| (s.clone(), i as u32)).collect();
        EmbedderModel {
            kind: cfg.kind,
            dim: d,
            out_dim: cfg.out_dim,
            vocab_list,
            vocab,
            scheme,
            table,
            w_q,
            w_k,
            b_k,
            w_e,
            b_e,
        }
    }

    /// Reassemble a model from serialized parts, revalidating shapes.
    #[allow(clippy::too_many_arguments)]
    pub fn from_parts(
        kind: EmbedderKind,
        dim: usize,
        out_dim: usize,
        vocab_list: Vec<String>,
        scheme: VariantScheme,
        table: Vec<f64>,
        w_q: Vec<f64>,
        w_k: Vec<f64>,
        b_k: Vec<f64>,
        w_e: Vec<f64>,
        b_e: Vec<f64>,
    ) -> Result<Self, EmbedderError> {
        let check = |name: &str, got: usize, want: usize| -> Result<(), EmbedderError> {
            if got != want {
                return Err(EmbedderError::InvalidConfig(alloc::format!(
                    "array {name} has {got} values, expected {want}"
                )));
            }
            Ok(())
        };
        check("table", table.len(), vocab_list.len() * dim)?;
        match kind {
            EmbedderKind::Vanilla => {
                if dim != out_dim {
                    return Err(EmbedderError::InvalidConfig(
                        "table and output dimensions must agree".to_string(),
                    ));
                }
                check("w_q", w_q.len(), 0)?;
                check("w_e", w_e.len(), 0)?;
            }
            EmbedderKind::Attention1 => {
                if dim != out_dim {
                    return Err(EmbedderError::InvalidConfig(
                        "table and output dimensions must agree".to_string(),
                    ));
                }
                check("w_q", w_q.len(), dim * dim)?;
                check("w_k", w_k.len(), dim * dim)?;
                check("b_k", b_k.len(), dim)?;
                check("w_e", w_e.len(), 0)?;
            }
            EmbedderKind::Attention2 => {
                check("w_q", w_q.len(), dim * dim)?;
                check("w_k", w_k.len(), dim * dim)?;
                check("b_k", b_k.len(), dim)?;
                check("w_e", w_e.len(), out_dim * dim)?;
                check("b_e", b_e.len(), out_dim)?;
            }
        }
        let vocab = vocab_list.iter().enumerate().map(|(i, s)| (s.clone(), i as u32)).collect();
        Ok(EmbedderModel {
            kind,
            dim,
            out_dim,
            vocab_list,
            vocab,
            scheme,
            table,
            w_q,
            w_k,
            b_k,
            w_e,
            b_e,
        })
    }

    pub fn kind(&self) -> EmbedderKind {
        self.kind
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn out_dim(&self) -> usize {
        self.out_dim
    }

    pub fn vocab_size(&self) -> usize {
        self.vocab_list.len()
    }

    pub fn vocab(&self) -> &BTreeMap<String, u32> {
        &self.vocab
    }

    pub fn vocab_list(&self) -> &[String] {
        &self.vocab_list
    }

    pub fn scheme(&self) -> &VariantScheme {
        &self.scheme
    }

    pub fn table(&self) -> &[f64] {
        &self.table
    }

    pub fn weights(&self) -> (&[f64], &[f64], &[f64], &[f64], &[f64]) {
        (&self.w_q, &self.w_k, &self.b_k, &self.w_e, &self.b_e)
    }

    pub fn syllable_row(&self, id: u32) -> &[f64] {
        let i = id as usize;
        &self.table[i * self.dim..(i + 1) * self.dim]
    }

    /// Number of trainable parameters actually stored.
    pub fn param_count(&self) -> usize {
        self.table.len()
            + self.w_q.len()
            + self.w_k.len()
            + self.b_k.len()
            + self.w_e.len()
            + self.b_e.len()
    }

    fn check_ids(&self, ids: &[u32]) -> Result<(), EmbedderError> {
        assert!(!ids.is_empty(), "composition needs at least one syllable");
        match ids.iter().find(|&&id| id as usize >= self.vocab_list.len()) {
            Some(&bad) => Err(EmbedderError::InvalidId(bad)),
            None => Ok(()),
        }
    }

    /// Normalized sum of the syllable rows.
    pub fn compose_vanilla(&self, ids: &[u32]) -> Result<Vec<f64>, EmbedderError> {
        self.check_ids(ids)?;
        let mut sum = alloc::vec![0.0; self.dim];
        for &id in ids {
            for (acc, x) in sum.iter_mut().zip(self.syllable_row(id)) {
                *acc += x;
            }
        }
        l2_normalize(&sum).map_err(|_| EmbedderError::ZeroNorm)
    }

    /// Attention weights over the syllables: the mean row is the context,
    /// scores are scaled dot products between the projected context and the
    /// projected syllables. They are a probability vector.
    pub fn attention_weights(&self, ids: &[u32]) -> Result<Vec<f64>, EmbedderError> {
        self.check_ids(ids)?;
        let d = self.dim;
        let n = ids.len();

        let mut context = alloc::vec![0.0; d];
        for &id in ids {
            for (acc, x) in context.iter_mut().zip(self.syllable_row(id)) {
                *acc += x;
            }
        }
        for x in &mut context {
            *x /= n as f64;
        }

        // q = w_q * context
        let mut query = alloc::vec![0.0; d];
        for i in 0..d {
            query[i] = self.w_q[i * d..(i + 1) * d]
                .iter()
                .zip(&context)
                .map(|(&w, &c)| w * c)
                .sum();
        }

        let scale = 1.0 / math::sqrt(d as f64);
        let mut scores = alloc::vec![0.0; n];
        for (slot, &id) in scores.iter_mut().zip(ids) {
            let row = self.syllable_row(id);
            let mut z = 0.0;
            for i in 0..d {
                let key_i: f64 = self.w_k[i * d..(i + 1) * d]
                    .iter()
                    .zip(row)
                    .map(|(&w, &s)| w * s)
                    .sum::<f64>()
                    + self.b_k[i];
                z += query[i] * key_i;
            }
            *slot = z * scale;
        }
        Ok(softmax(&scores))
    }

    /// Attention-pooled combination of the syllable rows, before any
    /// expansion layer.
    pub fn pooled(&self, ids: &[u32]) -> Result<Vec<f64>, EmbedderError> {
        let weights = self.attention_weights(ids)?;
        let mut pooled = alloc::vec![0.0; self.dim];
        for (&id, &alpha) in ids.iter().zip(&weights) {
            for (acc, x) in pooled.iter_mut().zip(self.syllable_row(id)) {
                *acc += alpha * x;
            }
        }
        Ok(pooled)
    }

    /// Normalized pooled vector; for the expanding kind this is the
    /// pre-expansion composition.
    pub fn compose_pooled(&self, ids: &[u32]) -> Result<Vec<f64>, EmbedderError> {
        l2_normalize(&self.pooled(ids)?).map_err(|_| EmbedderError::ZeroNorm)
    }

    /// The model's composition at output dimensionality.
    pub fn compose(&self, ids: &[u32]) -> Result<Vec<f64>, EmbedderError> {
        match self.kind {
            EmbedderKind::Vanilla => self.compose_vanilla(ids),
            EmbedderKind::Attention1 => self.compose_pooled(ids),
            EmbedderKind::Attention2 => {
                let pooled = self.pooled(ids)?;
                let mut out = self.b_e.clone();
                for (i, slot) in out.iter_mut().enumerate() {
                    *slot += self.w_e[i * self.dim..(i + 1) * self.dim]
                        .iter()
                        .zip(&pooled)
                        .map(|(&w, &p)| w * p)
                        .sum::<f64>();
                }
                l2_normalize(&out).map_err(|_| EmbedderError::ZeroNorm)
            }
        }
    }

    /// Mark a decomposition with the model's variant scheme and compose it.
    /// Fails when any resulting variant has no embedding.
    pub fn compose_word(&self, d: &Decomposition) -> Result<Vec<f64>, EmbedderError> {
        let variants = self.scheme.mark(d.syllables());
        let mut ids = Vec::with_capacity(variants.len());
        for v in &variants {
            match self.vocab.get(v) {
                Some(&id) => ids.push(id),
                None => return Err(EmbedderError::UnknownSyllable(v.clone())),
            }
        }
        self.compose(&ids)
    }

    /// True iff every variant of the marked decomposition has an embedding.
    pub fn covers(&self, d: &Decomposition) -> bool {
        self.scheme.mark(d.syllables()).iter().all(|v| self.vocab.contains_key(v))
    }
}
