use alloc::string::String;
use alloc::vec::Vec;

use rand::seq::SliceRandom;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

use super::model::{EmbedderConfig, EmbedderKind, EmbedderModel};
use crate::corpus::TrainingSet;
use crate::math;
use crate::nn::{lr_at_epoch, AdamConfig, AdamState, NnError, Tape, Tensor};

/// Per-epoch training record.
#[derive(Debug, Clone, PartialEq)]
pub struct EpochStats {
    pub epoch: usize,
    pub lr: f64,
    pub mean_loss: f64,
}

/// Errors aborting a training run.
#[derive(Debug, Clone, PartialEq)]
pub enum TrainError {
    /// Training-set and model dimensions disagree.
    DimensionMismatch { expected: usize, got: usize },
    /// The loss became non-finite.
    NanLoss { epoch: usize, example: usize, word: String },
    /// A composition collapsed to a zero-norm vector.
    ZeroNorm { epoch: usize, example: usize, word: String },
    /// Nothing to train on.
    EmptyTrainingSet,
}

impl core::fmt::Display for TrainError {
    fn fmt(&self, f: &mut core::fmt::Formatter<'_>) -> core::fmt::Result {
        match self {
            TrainError::DimensionMismatch { expected, got } => {
                write!(f, "dimension mismatch: expected {expected}, got {got}")
            }
            TrainError::NanLoss { epoch, example, word } => {
                write!(f, "non-finite loss at epoch {epoch}, example {example} ({word:?})")
            }
            TrainError::ZeroNorm { epoch, example, word } => {
                write!(f, "zero-norm composition at epoch {epoch}, example {example} ({word:?})")
            }
            TrainError::EmptyTrainingSet => write!(f, "training set is empty"),
        }
    }
}

#[cfg(feature = "std")]
impl std::error::Error for TrainError {}

/// Loss and parameter gradients for a single example.
pub struct ExampleGrads {
    pub loss: f64,
    /// One `dim`-sized gradient block per syllable position (duplicates not
    /// yet merged).
    pub table_rows: Vec<f64>,
    pub w_q: Vec<f64>,
    pub w_k: Vec<f64>,
    pub b_k: Vec<f64>,
    pub w_e: Vec<f64>,
    pub b_e: Vec<f64>,
}

/// Record the example's forward pass on a gradient tape and run the reverse
/// sweep. The forward mirrors the composition: gather rows, pool (sum or
/// attention), normalize, optionally expand, then mean squared error against
/// the target vector.
pub fn example_gradients(
    model: &EmbedderModel,
    ids: &[u32],
    target: &[f64],
) -> Result<ExampleGrads, NnError> {
    let d = model.dim();
    let n = ids.len();
    let mut tape = Tape::new();

    let mut rows = Vec::with_capacity(n * d);
    for &id in ids {
        rows.extend_from_slice(model.syllable_row(id));
    }
    let gathered = tape.leaf(Tensor::matrix(n, d, rows));
    let target_leaf = tape.leaf(Tensor::vector(target.to_vec()));

    let (w_q, w_k, b_k, w_e, b_e) = model.weights();
    let mut leaves = (None, None, None, None, None);

    let composed = match model.kind() {
        EmbedderKind::Vanilla => {
            let summed = tape.sum_rows(gathered);
            tape.l2_normalize_row(summed)?
        }
        kind => {
            let wq = tape.leaf(Tensor::matrix(d, d, w_q.to_vec()));
            let wk = tape.leaf(Tensor::matrix(d, d, w_k.to_vec()));
            let bk = tape.leaf(Tensor::vector(b_k.to_vec()));
            leaves.0 = Some(wq);
            leaves.1 = Some(wk);
            leaves.2 = Some(bk);

            let context = tape.mean_rows(gathered);
            let query = tape.matmul_nt(context, wq);
            let keyed = tape.matmul_nt(gathered, wk);
            let keys = tape.add_row(keyed, bk);
            let scores = tape.matmul_nt(query, keys);
            let scaled = tape.scale(scores, 1.0 / math::sqrt(d as f64));
            let weights = tape.row_softmax(scaled);
            let pooled = tape.matmul(weights, gathered);

            match kind {
                EmbedderKind::Attention1 => tape.l2_normalize_row(pooled)?,
                EmbedderKind::Attention2 => {
                    let we = tape.leaf(Tensor::matrix(model.out_dim(), d, w_e.to_vec()));
                    let be = tape.leaf(Tensor::vector(b_e.to_vec()));
                    leaves.3 = Some(we);
                    leaves.4 = Some(be);
                    let expanded = tape.matmul_nt(pooled, we);
                    let shifted = tape.add_row(expanded, be);
                    tape.l2_normalize_row(shifted)?
                }
                EmbedderKind::Vanilla => unreachable!(),
            }
        }
    };

    let loss = tape.mse(composed, target_leaf);
    tape.backward(loss);

    let grad_of = |v: Option<crate::nn::Var>| -> Vec<f64> {
        v.map(|v| tape.grad(v).data().to_vec()).unwrap_or_default()
    };
    Ok(ExampleGrads {
        loss: tape.value(loss).data()[0],
        table_rows: tape.grad(gathered).data().to_vec(),
        w_q: grad_of(leaves.0),
        w_k: grad_of(leaves.1),
        b_k: grad_of(leaves.2),
        w_e: grad_of(leaves.3),
        b_e: grad_of(leaves.4),
    })
}

/// Train with default optimizer settings.
pub fn train_embedder(
    ts: &TrainingSet,
    cfg: &EmbedderConfig,
) -> Result<(EmbedderModel, Vec<EpochStats>), TrainError> {
    train_embedder_with(ts, cfg, &AdamConfig::default())
}

/// One optimizer step per example in shuffled order, with the learning rate
/// scheduled per epoch. Stops early once the mean epoch loss improves by
/// less than 1e-6. Fully deterministic for a given seed.
pub fn train_embedder_with(
    ts: &TrainingSet,
    cfg: &EmbedderConfig,
    adam: &AdamConfig,
) -> Result<(EmbedderModel, Vec<EpochStats>), TrainError> {
    if ts.is_empty() {
        return Err(TrainError::EmptyTrainingSet);
    }
    if ts.dim() != cfg.out_dim() {
        return Err(TrainError::DimensionMismatch { expected: cfg.out_dim(), got: ts.dim() });
    }

    let mut rng = ChaCha8Rng::seed_from_u64(cfg.seed);
    let mut model =
        EmbedderModel::init(cfg, ts.vocab_list().to_vec(), ts.scheme().clone(), &mut rng);

    let d = model.dim();
    let mut table_state = AdamState::new(model.table.len());
    let mut wq_state = AdamState::new(model.w_q.len());
    let mut wk_state = AdamState::new(model.w_k.len());
    let mut bk_state = AdamState::new(model.b_k.len());
    let mut we_state = AdamState::new(model.w_e.len());
    let mut be_state = AdamState::new(model.b_e.len());

    let mut order: Vec<usize> = (0..ts.len()).collect();
    let mut history: Vec<EpochStats> = Vec::new();

    for epoch in 0..cfg.epochs {
        let lr = lr_at_epoch(epoch, adam.lr0);
        order.shuffle(&mut rng);

        let mut loss_sum = 0.0;
        for &i in &order {
            let ids = ts.example_ids(i);
            let target: Vec<f64> = ts.target(i).iter().map(|&x| x as f64).collect();

            let grads = example_gradients(&model, ids, &target).map_err(|e| match e {
                NnError::ZeroNorm => TrainError::ZeroNorm {
                    epoch,
                    example: i,
                    word: ts.word(i).into(),
                },
                other => panic!("unexpected kernel error: {other}"),
            })?;
            if !grads.loss.is_finite() {
                return Err(TrainError::NanLoss { epoch, example: i, word: ts.word(i).into() });
            }
            loss_sum += grads.loss;

            let rows: Vec<usize> = ids.iter().map(|&id| id as usize).collect();
            table_state
                .step_rows(&mut model.table, d, &rows, &grads.table_rows, adam, lr)
                .expect("row gradient shapes agree");
            if !model.w_q.is_empty() {
                wq_state.step(&mut model.w_q, &grads.w_q, adam, lr).expect("shapes agree");
                wk_state.step(&mut model.w_k, &grads.w_k, adam, lr).expect("shapes agree");
                bk_state.step(&mut model.b_k, &grads.b_k, adam, lr).expect("shapes agree");
            }
            if !model.w_e.is_empty() {
                we_state.step(&mut model.w_e, &grads.w_e, adam, lr).expect("shapes agree");
                be_state.step(&mut model.b_e, &grads.b_e, adam, lr).expect("shapes agree");
            }
        }

        let mean_loss = loss_sum / ts.len() as f64;
        if !mean_loss.is_finite() {
            return Err(TrainError::NanLoss { epoch, example: 0, word: String::new() });
        }
        let improved = history
            .last()
            .map(|prev: &EpochStats| prev.mean_loss - mean_loss)
            .unwrap_or(f64::INFINITY);
        history.push(EpochStats { epoch, lr, mean_loss });
        if let Some(delta) = cfg.early_stop {
            if improved < delta && epoch + 1 < cfg.epochs {
                break;
            }
        }
    }

    Ok((model, history))
}
