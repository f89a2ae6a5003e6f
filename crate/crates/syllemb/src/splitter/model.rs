use alloc::collections::BTreeMap;
use alloc::string::String;
use alloc::vec::Vec;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use super::vocab::CharVocab;
use super::SplitterError;
use crate::math;
use crate::nn::{Tape, Tensor, Var};

const LAYER_NORM_EPS: f64 = 1e-5;
/// Positional-encoding capacity; caps both training sequences and decoding.
pub(crate) const MAX_LEN: usize = 256;

/// Encoder-decoder hyperparameters. The head count is limited to one fourth
/// of the embedding width and must divide it evenly; both stacks use the
/// same number of layers.
#[derive(Debug, Clone, PartialEq)]
pub struct SplitterConfig {
    layers: usize,
    embedding: usize,
    heads: usize,
    hidden: usize,
    pub dropout: f64,
    pub epochs: usize,
    pub seed: u64,
    /// Stop once the monitored mean loss improves by less than this.
    pub early_stop: Option<f64>,
}

impl SplitterConfig {
    pub fn new(
        layers: usize,
        embedding: usize,
        heads: usize,
        hidden: usize,
    ) -> Result<Self, SplitterError> {
        if layers == 0 || embedding == 0 || heads == 0 || hidden == 0 {
            return Err(SplitterError::InvalidConfig(
                String::from("all dimensions must be positive"),
            ));
        }
        if heads * 4 > embedding {
            return Err(SplitterError::InvalidConfig(alloc::format!(
                "{heads} heads exceed one fourth of embedding width {embedding}"
            )));
        }
        if embedding % heads != 0 {
            return Err(SplitterError::InvalidConfig(alloc::format!(
                "embedding width {embedding} is not divisible by {heads} heads"
            )));
        }
        Ok(SplitterConfig {
            layers,
            embedding,
            heads,
            hidden,
            dropout: 0.1,
            epochs: 10,
            seed: 0,
            early_stop: Some(1e-6),
        })
    }

    pub fn with_dropout(mut self, p: f64) -> Self {
        assert!((0.0..1.0).contains(&p), "dropout must be in [0, 1)");
        self.dropout = p;
        self
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

    pub fn without_early_stop(mut self) -> Self {
        self.early_stop = None;
        self
    }

    pub fn layers(&self) -> usize {
        self.layers
    }

    pub fn embedding(&self) -> usize {
        self.embedding
    }

    pub fn heads(&self) -> usize {
        self.heads
    }

    pub fn hidden(&self) -> usize {
        self.hidden
    }
}

#[derive(Debug, Clone)]
pub(crate) struct Attention {
    pub wq: Vec<f64>,
    pub bq: Vec<f64>,
    pub wk: Vec<f64>,
    pub bk: Vec<f64>,
    pub wv: Vec<f64>,
    pub bv: Vec<f64>,
    pub wo: Vec<f64>,
    pub bo: Vec<f64>,
}

#[derive(Debug, Clone)]
pub(crate) struct FeedForward {
    pub w1: Vec<f64>,
    pub b1: Vec<f64>,
    pub w2: Vec<f64>,
    pub b2: Vec<f64>,
}

#[derive(Debug, Clone)]
pub(crate) struct Norm {
    pub gain: Vec<f64>,
    pub bias: Vec<f64>,
}

#[derive(Debug, Clone)]
pub(crate) struct EncoderLayer {
    pub attn: Attention,
    pub norm1: Norm,
    pub ff: FeedForward,
    pub norm2: Norm,
}

#[derive(Debug, Clone)]
pub(crate) struct DecoderLayer {
    pub self_attn: Attention,
    pub norm1: Norm,
    pub cross_attn: Attention,
    pub norm2: Norm,
    pub ff: FeedForward,
    pub norm3: Norm,
}

/// The trained splitter: character embeddings, fixed sinusoidal positional
/// encodings, the encoder and decoder stacks and the output projection.
/// Inference is deterministic; dropout only acts during training.
#[derive(Debug, Clone)]
pub struct SplitterModel {
    pub(crate) config: SplitterConfig,
    pub(crate) vocab: CharVocab,
    pub(crate) char_emb: Vec<f64>,
    pub(crate) pos: Vec<f64>,
    pub(crate) enc_layers: Vec<EncoderLayer>,
    pub(crate) enc_norm: Norm,
    pub(crate) dec_layers: Vec<DecoderLayer>,
    pub(crate) dec_norm: Norm,
    pub(crate) out_w: Vec<f64>,
    pub(crate) out_b: Vec<f64>,
}

/// Fixed sinusoidal positional encodings, `max_len x d` row-major.
pub(crate) fn sinusoidal_positions(max_len: usize, d: usize) -> Vec<f64> {
    let mut pe = alloc::vec![0.0; max_len * d];
    for pos in 0..max_len {
        for i in 0..d.div_ceil(2) {
            let freq = math::exp(-((2 * i) as f64) / d as f64 * math::ln(10000.0));
            let angle = pos as f64 * freq;
            pe[pos * d + 2 * i] = math::sin(angle);
            if 2 * i + 1 < d {
                pe[pos * d + 2 * i + 1] = math::cos(angle);
            }
        }
    }
    pe
}

impl SplitterModel {
    /// Random initialization: linear weights uniform in `(-1/sqrt(in),
    /// 1/sqrt(in))`, biases zero, layer norms at identity.
    pub fn init(config: SplitterConfig, vocab: CharVocab, rng: &mut ChaCha8Rng) -> Self {
        let d = config.embedding;
        let h = config.hidden;
        let v = vocab.size();

        fn linear(rng: &mut ChaCha8Rng, out: usize, inp: usize) -> Vec<f64> {
            let bound = 1.0 / math::sqrt(inp as f64);
            (0..out * inp).map(|_| rng.gen_range(-bound..bound)).collect()
        }
        fn attention(rng: &mut ChaCha8Rng, d: usize) -> Attention {
            Attention {
                wq: linear(rng, d, d),
                bq: alloc::vec![0.0; d],
                wk: linear(rng, d, d),
                bk: alloc::vec![0.0; d],
                wv: linear(rng, d, d),
                bv: alloc::vec![0.0; d],
                wo: linear(rng, d, d),
                bo: alloc::vec![0.0; d],
            }
        }
        fn feed_forward(rng: &mut ChaCha8Rng, d: usize, h: usize) -> FeedForward {
            FeedForward {
                w1: linear(rng, h, d),
                b1: alloc::vec![0.0; h],
                w2: linear(rng, d, h),
                b2: alloc::vec![0.0; d],
            }
        }
        fn norm(d: usize) -> Norm {
            Norm { gain: alloc::vec![1.0; d], bias: alloc::vec![0.0; d] }
        }

        let char_emb = linear(rng, v, d);
        let enc_layers = (0..config.layers)
            .map(|_| EncoderLayer {
                attn: attention(rng, d),
                norm1: norm(d),
                ff: feed_forward(rng, d, h),
                norm2: norm(d),
            })
            .collect();
        let dec_layers = (0..config.layers)
            .map(|_| DecoderLayer {
                self_attn: attention(rng, d),
                norm1: norm(d),
                cross_attn: attention(rng, d),
                norm2: norm(d),
                ff: feed_forward(rng, d, h),
                norm3: norm(d),
            })
            .collect();

        SplitterModel {
            char_emb,
            pos: sinusoidal_positions(MAX_LEN, d),
            enc_layers,
            enc_norm: norm(d),
            dec_layers,
            dec_norm: norm(d),
            out_w: linear(rng, v, d),
            out_b: alloc::vec![0.0; v],
            config,
            vocab,
        }
    }

    pub fn config(&self) -> &SplitterConfig {
        &self.config
    }

    pub fn vocab(&self) -> &CharVocab {
        &self.vocab
    }

    pub fn max_len(&self) -> usize {
        MAX_LEN
    }

    pub fn positional_encodings(&self) -> &[f64] {
        &self.pos
    }

    /// Trainable parameter count.
    pub fn param_count(&self) -> usize {
        self.named_arrays().iter().map(|(_, _, _, a)| a.len()).sum()
    }

    /// Expected `(name, rows, cols)` triples in serialization order for a
    /// given configuration and vocabulary size. The character table comes
    /// first; the positional table is fixed (not trainable) and serialized
    /// separately by callers.
    pub fn array_schema(config: &SplitterConfig, vocab_size: usize) -> Vec<(String, usize, usize)> {
        let d = config.embedding;
        let h = config.hidden;
        let mut out: Vec<(String, usize, usize)> = Vec::new();
        out.push((String::from("char_emb"), vocab_size, d));
        let attn = |out: &mut Vec<(String, usize, usize)>, prefix: &str| {
            for part in ["q", "k", "v", "o"] {
                out.push((alloc::format!("{prefix}.{part}_w"), d, d));
                out.push((alloc::format!("{prefix}.{part}_b"), 1, d));
            }
        };
        let norm = |out: &mut Vec<(String, usize, usize)>, name: &str| {
            out.push((alloc::format!("{name}.gain"), 1, d));
            out.push((alloc::format!("{name}.bias"), 1, d));
        };
        let ff = |out: &mut Vec<(String, usize, usize)>, prefix: &str| {
            out.push((alloc::format!("{prefix}.w1"), h, d));
            out.push((alloc::format!("{prefix}.b1"), 1, h));
            out.push((alloc::format!("{prefix}.w2"), d, h));
            out.push((alloc::format!("{prefix}.b2"), 1, d));
        };
        for l in 0..config.layers {
            attn(&mut out, &alloc::format!("enc.{l}.attn"));
            norm(&mut out, &alloc::format!("enc.{l}.norm1"));
            ff(&mut out, &alloc::format!("enc.{l}.ff"));
            norm(&mut out, &alloc::format!("enc.{l}.norm2"));
        }
        norm(&mut out, "enc.norm");
        for l in 0..config.layers {
            attn(&mut out, &alloc::format!("dec.{l}.self_attn"));
            norm(&mut out, &alloc::format!("dec.{l}.norm1"));
            attn(&mut out, &alloc::format!("dec.{l}.cross_attn"));
            norm(&mut out, &alloc::format!("dec.{l}.norm2"));
            ff(&mut out, &alloc::format!("dec.{l}.ff"));
            norm(&mut out, &alloc::format!("dec.{l}.norm3"));
        }
        norm(&mut out, "dec.norm");
        out.push((String::from("out_w"), vocab_size, d));
        out.push((String::from("out_b"), 1, vocab_size));
        out
    }

    /// All trainable arrays with their schema entries, in schema order.
    pub fn named_arrays(&self) -> Vec<(String, usize, usize, &[f64])> {
        let schema = Self::array_schema(&self.config, self.vocab.size());
        let params = self.params();
        assert_eq!(schema.len(), params.len());
        schema
            .into_iter()
            .zip(params)
            .map(|((name, r, c), data)| {
                debug_assert_eq!(r * c, data.len(), "{name}");
                (name, r, c, data.as_slice())
            })
            .collect()
    }

    /// Rebuild a model from named arrays, validating against the schema.
    pub fn from_arrays(
        config: SplitterConfig,
        vocab: CharVocab,
        mut arrays: BTreeMap<String, Vec<f64>>,
    ) -> Result<Self, SplitterError> {
        let schema = Self::array_schema(&config, vocab.size());
        let mut rng = ChaCha8Rng::seed_from_u64(0);
        let mut model = Self::init(config, vocab, &mut rng);
        {
            let mut slots = model.params_mut();
            for (i, (name, r, c)) in schema.iter().enumerate() {
                let data = arrays.remove(name).ok_or_else(|| {
                    SplitterError::MalformedModel(alloc::format!("missing array {name}"))
                })?;
                if data.len() != r * c {
                    return Err(SplitterError::MalformedModel(alloc::format!(
                        "array {name} has {} values, expected {}",
                        data.len(),
                        r * c
                    )));
                }
                *slots[i] = data;
            }
        }
        if let Some(extra) = arrays.into_keys().next() {
            return Err(SplitterError::MalformedModel(alloc::format!(
                "unexpected array {extra}"
            )));
        }
        Ok(model)
    }

    fn params(&self) -> Vec<&Vec<f64>> {
        let mut v: Vec<&Vec<f64>> = Vec::new();
        v.push(&self.char_emb);
        for l in &self.enc_layers {
            push_attention(&mut v, &l.attn);
            push_norm(&mut v, &l.norm1);
            push_ff(&mut v, &l.ff);
            push_norm(&mut v, &l.norm2);
        }
        push_norm(&mut v, &self.enc_norm);
        for l in &self.dec_layers {
            push_attention(&mut v, &l.self_attn);
            push_norm(&mut v, &l.norm1);
            push_attention(&mut v, &l.cross_attn);
            push_norm(&mut v, &l.norm2);
            push_ff(&mut v, &l.ff);
            push_norm(&mut v, &l.norm3);
        }
        push_norm(&mut v, &self.dec_norm);
        v.push(&self.out_w);
        v.push(&self.out_b);
        v
    }

    pub(crate) fn params_mut(&mut self) -> Vec<&mut Vec<f64>> {
        let mut v: Vec<&mut Vec<f64>> = Vec::new();
        v.push(&mut self.char_emb);
        for l in &mut self.enc_layers {
            let EncoderLayer { attn, norm1, ff, norm2 } = l;
            push_attention_mut(&mut v, attn);
            push_norm_mut(&mut v, norm1);
            push_ff_mut(&mut v, ff);
            push_norm_mut(&mut v, norm2);
        }
        push_norm_mut(&mut v, &mut self.enc_norm);
        for l in &mut self.dec_layers {
            let DecoderLayer { self_attn, norm1, cross_attn, norm2, ff, norm3 } = l;
            push_attention_mut(&mut v, self_attn);
            push_norm_mut(&mut v, norm1);
            push_attention_mut(&mut v, cross_attn);
            push_norm_mut(&mut v, norm2);
            push_ff_mut(&mut v, ff);
            push_norm_mut(&mut v, norm3);
        }
        push_norm_mut(&mut v, &mut self.dec_norm);
        v.push(&mut self.out_w);
        v.push(&mut self.out_b);
        v
    }
}



fn push_attention<'a>(v: &mut Vec<&'a Vec<f64>>, a: &'a Attention) {
    v.extend([&a.wq, &a.bq, &a.wk, &a.bk, &a.wv, &a.bv, &a.wo, &a.bo]);
}

fn push_attention_mut<'a>(v: &mut Vec<&'a mut Vec<f64>>, a: &'a mut Attention) {
    let Attention { wq, bq, wk, bk, wv, bv, wo, bo } = a;
    v.extend([wq, bq, wk, bk, wv, bv, wo, bo]);
}

fn push_norm<'a>(v: &mut Vec<&'a Vec<f64>>, n: &'a Norm) {
    v.extend([&n.gain, &n.bias]);
}

fn push_norm_mut<'a>(v: &mut Vec<&'a mut Vec<f64>>, n: &'a mut Norm) {
    let Norm { gain, bias } = n;
    v.push(gain);
    v.push(bias);
}

fn push_ff<'a>(v: &mut Vec<&'a Vec<f64>>, f: &'a FeedForward) {
    v.extend([&f.w1, &f.b1, &f.w2, &f.b2]);
}

fn push_ff_mut<'a>(v: &mut Vec<&'a mut Vec<f64>>, f: &'a mut FeedForward) {
    let FeedForward { w1, b1, w2, b2 } = f;
    v.extend([w1, b1, w2, b2]);
}

/// One forward construction over a gradient tape. Holds the interned
/// parameter leaves so training can read their gradients afterwards; at
/// inference no dropout masks are drawn and the pass is deterministic.
pub(crate) struct Forward<'m> {
    model: &'m SplitterModel,
    pub tape: Tape,
    /// Parameter leaf per schema index (index 0, the character table, is
    /// gathered per sequence instead; see `src_gather`/`tgt_gather`).
    pub param_vars: Vec<Option<Var>>,
    pub src_gather: Option<Var>,
    pub tgt_gather: Option<Var>,
    dropout_rng: Option<ChaCha8Rng>,
}

impl<'m> Forward<'m> {
    pub fn new(model: &'m SplitterModel, dropout_rng: Option<ChaCha8Rng>) -> Self {
        let mut tape = Tape::new();
        let schema = SplitterModel::array_schema(&model.config, model.vocab.size());
        let params = model.params();
        let mut param_vars = Vec::with_capacity(params.len());
        param_vars.push(None);
        for (i, p) in params.iter().enumerate().skip(1) {
            let (_, r, c) = &schema[i];
            param_vars.push(Some(tape.leaf(Tensor::matrix(*r, *c, (*p).clone()))));
        }
        Forward { model, tape, param_vars, src_gather: None, tgt_gather: None, dropout_rng }
    }

    fn var(&self, schema_idx: usize) -> Var {
        self.param_vars[schema_idx].expect("trainable leaf")
    }

    fn dropout(&mut self, x: Var) -> Var {
        let p = self.model.config.dropout;
        let Some(rng) = self.dropout_rng.as_mut() else { return x };
        if p == 0.0 {
            return x;
        }
        let value = self.tape.value(x);
        let scale = 1.0 / (1.0 - p);
        let mask: Vec<f64> = (0..value.len())
            .map(|_| if rng.gen_range(0.0..1.0) < p { 0.0 } else { scale })
            .collect();
        let (r, c) = value.dims2();
        let mask = self.tape.leaf(Tensor::matrix(r, c, mask));
        self.tape.mul_elem(x, mask)
    }

    /// Token embedding scaled by `sqrt(d)` plus positional encodings.
    fn embed(&mut self, ids: &[usize]) -> Result<(Var, Var), SplitterError> {
        let d = self.model.config.embedding;
        if ids.len() > MAX_LEN {
            return Err(SplitterError::SequenceTooLong { len: ids.len(), max: MAX_LEN });
        }
        let mut rows = Vec::with_capacity(ids.len() * d);
        for &id in ids {
            rows.extend_from_slice(&self.model.char_emb[id * d..(id + 1) * d]);
        }
        let gathered = self.tape.leaf(Tensor::matrix(ids.len(), d, rows));
        let scaled = self.tape.scale(gathered, math::sqrt(d as f64));
        let pe = self
            .tape
            .leaf(Tensor::matrix(ids.len(), d, self.model.pos[..ids.len() * d].to_vec()));
        let with_pos = self.tape.add(scaled, pe);
        let out = self.dropout(with_pos);
        Ok((out, gathered))
    }

    /// Multi-head scaled dot-product attention; `base` is the schema index
    /// of the block's `q_w` array.
    fn attention(&mut self, base: usize, q_in: Var, kv_in: Var, causal: bool) -> Var {
        let d = self.model.config.embedding;
        let heads = self.model.config.heads;
        let dh = d / heads;

        let project = |fwd: &mut Self, input: Var, offset: usize| -> Var {
            let w = fwd.var(base + offset);
            let b = fwd.var(base + offset + 1);
            let projected = fwd.tape.matmul_nt(input, w);
            fwd.tape.add_row(projected, b)
        };
        let q = project(self, q_in, 0);
        let k = project(self, kv_in, 2);
        let v = project(self, kv_in, 4);

        let m = self.tape.value(q).dims2().0;
        let n = self.tape.value(k).dims2().0;
        let mask = causal.then(|| {
            let mut data = alloc::vec![0.0; m * n];
            for i in 0..m {
                for j in (i + 1)..n {
                    data[i * n + j] = -1e30;
                }
            }
            self.tape.leaf(Tensor::matrix(m, n, data))
        });

        let mut contexts = Vec::with_capacity(heads);
        for h in 0..heads {
            let qh = self.tape.slice_cols(q, h * dh, dh);
            let kh = self.tape.slice_cols(k, h * dh, dh);
            let vh = self.tape.slice_cols(v, h * dh, dh);
            let scores = self.tape.matmul_nt(qh, kh);
            let scaled = self.tape.scale(scores, 1.0 / math::sqrt(dh as f64));
            let masked = match mask {
                Some(m) => self.tape.add(scaled, m),
                None => scaled,
            };
            let weights = self.tape.row_softmax(masked);
            contexts.push(self.tape.matmul(weights, vh));
        }
        let merged = self.tape.concat_cols(&contexts);
        let out = self.tape.matmul_nt(merged, self.var(base + 6));
        self.tape.add_row(out, self.var(base + 7))
    }

    fn norm(&mut self, base: usize, x: Var) -> Var {
        let gain = self.var(base);
        let bias = self.var(base + 1);
        self.tape.layer_norm_rows(x, gain, bias, LAYER_NORM_EPS)
    }

    fn feed_forward(&mut self, base: usize, x: Var) -> Var {
        let pre = self.tape.matmul_nt(x, self.var(base));
        let pre = self.tape.add_row(pre, self.var(base + 1));
        let act = self.tape.relu(pre);
        let act = self.dropout(act);
        let out = self.tape.matmul_nt(act, self.var(base + 2));
        self.tape.add_row(out, self.var(base + 3))
    }

    fn residual(&mut self, x: Var, sub: Var, norm_base: usize) -> Var {
        let sub = self.dropout(sub);
        let added = self.tape.add(x, sub);
        self.norm(norm_base, added)
    }

    /// Run the encoder; returns the memory and the embedding gather leaf.
    pub fn encode(&mut self, src_ids: &[usize]) -> Result<Var, SplitterError> {
        // Schema layout per encoder layer: 8 attention + 2 norm + 4 ff + 2 norm.
        let (mut x, gather) = self.embed(src_ids)?;
        self.src_gather = Some(gather);
        let mut base = 1;
        for _ in 0..self.model.config.layers {
            let attn_out = self.attention(base, x, x, false);
            x = self.residual(x, attn_out, base + 8);
            let ff_out = self.feed_forward(base + 10, x);
            x = self.residual(x, ff_out, base + 14);
            base += 16;
        }
        Ok(self.norm(base, x))
    }

    /// Run the decoder over a gold prefix against the encoded memory and
    /// project to vocabulary logits, one row per prefix position.
    pub fn decode(&mut self, tgt_ids: &[usize], memory: Var) -> Result<Var, SplitterError> {
        let (mut y, gather) = self.embed(tgt_ids)?;
        self.tgt_gather = Some(gather);
        let mut base = 1 + self.model.config.layers * 16 + 2;
        for _ in 0..self.model.config.layers {
            let self_out = self.attention(base, y, y, true);
            y = self.residual(y, self_out, base + 8);
            let cross_out = self.attention(base + 10, y, memory, false);
            y = self.residual(y, cross_out, base + 18);
            let ff_out = self.feed_forward(base + 20, y);
            y = self.residual(y, ff_out, base + 24);
            base += 26;
        }
        let y = self.norm(base, y);
        let logits = self.tape.matmul_nt(y, self.var(base + 2));
        Ok(self.tape.add_row(logits, self.var(base + 3)))
    }

    /// Inject an already-computed memory tensor (decoding reuses the encoder
    /// output across steps).
    pub fn inject_memory(&mut self, memory: &Tensor) -> Var {
        self.tape.leaf(memory.clone())
    }
}

/// Teacher-forced loss of one example: summed cross entropy of each next
/// token given the gold prefix.
pub(crate) fn example_forward<'m>(
    model: &'m SplitterModel,
    src_ids: &[usize],
    tgt_ids: &[usize],
    dropout_rng: Option<ChaCha8Rng>,
) -> Result<(Forward<'m>, Var), SplitterError> {
    debug_assert!(tgt_ids.len() >= 2, "target needs BOS and EOS");
    let mut fwd = Forward::new(model, dropout_rng);
    let memory = fwd.encode(src_ids)?;
    let logits = fwd.decode(&tgt_ids[..tgt_ids.len() - 1], memory)?;
    let loss = fwd.tape.cross_entropy_rows(logits, &tgt_ids[1..]);
    Ok((fwd, loss))
}

#[cfg(test)]
mod tests {
    use super::*;
    use alloc::vec;

    fn toy_model() -> SplitterModel {
        let config = SplitterConfig::new(2, 16, 4, 32).unwrap();
        let vocab = CharVocab::from_chars(vec!['a', 'b', 'c']);
        let mut rng = ChaCha8Rng::seed_from_u64(5);
        SplitterModel::init(config, vocab, &mut rng)
    }

    #[test]
    fn head_limit_enforced() {
        assert!(SplitterConfig::new(1, 32, 16, 64).is_err());
        assert!(SplitterConfig::new(1, 64, 16, 64).is_ok());
        assert!(SplitterConfig::new(1, 32, 8, 64).is_ok());
        // Head count must divide the embedding width.
        assert!(SplitterConfig::new(1, 36, 7, 64).is_err());
    }

    #[test]
    fn schema_matches_stored_arrays() {
        let m = toy_model();
        let arrays = m.named_arrays();
        let schema = SplitterModel::array_schema(m.config(), m.vocab().size());
        assert_eq!(arrays.len(), schema.len());
        for ((name, r, c, data), (sname, sr, sc)) in arrays.iter().zip(&schema) {
            assert_eq!(name, sname);
            assert_eq!((r, c), (sr, sc));
            assert_eq!(data.len(), r * c);
        }
    }

    #[test]
    fn arrays_roundtrip() {
        let m = toy_model();
        let map: BTreeMap<String, Vec<f64>> =
            m.named_arrays().into_iter().map(|(n, _, _, d)| (n, d.to_vec())).collect();
        let rebuilt =
            SplitterModel::from_arrays(m.config().clone(), m.vocab().clone(), map).unwrap();
        assert_eq!(rebuilt.char_emb, m.char_emb);
        assert_eq!(rebuilt.out_b, m.out_b);
        assert_eq!(rebuilt.enc_layers[1].ff.w2, m.enc_layers[1].ff.w2);
        assert_eq!(rebuilt.dec_layers[0].cross_attn.wo, m.dec_layers[0].cross_attn.wo);
    }

    #[test]
    fn forward_is_deterministic_without_dropout() {
        let m = toy_model();
        let src = vec![crate::splitter::BOS, 4, 5, crate::splitter::EOS];
        let tgt = vec![crate::splitter::BOS, 4, crate::splitter::DELIM, 5, crate::splitter::EOS];
        let (fwd1, loss1) = example_forward(&m, &src, &tgt, None).unwrap();
        let (fwd2, loss2) = example_forward(&m, &src, &tgt, None).unwrap();
        assert_eq!(fwd1.tape.value(loss1), fwd2.tape.value(loss2));
        assert!(fwd1.tape.value(loss1).data()[0].is_finite());
    }

    #[test]
    fn positional_encodings_bounded() {
        let pe = sinusoidal_positions(64, 16);
        assert!(pe.iter().all(|x| x.abs() <= 1.0));
        // First position is sin(0)/cos(0) alternating.
        assert_eq!(pe[0], 0.0);
        assert_eq!(pe[1], 1.0);
    }

    #[test]
    fn sequence_length_capped() {
        let m = toy_model();
        let src = vec![4usize; MAX_LEN + 1];
        let tgt = vec![crate::splitter::BOS, 4, crate::splitter::EOS];
        match example_forward(&m, &src, &tgt, None) {
            Err(SplitterError::SequenceTooLong { .. }) => {}
            Err(other) => panic!("unexpected error {other:?}"),
            Ok(_) => panic!("expected a length error"),
        }
    }
}
