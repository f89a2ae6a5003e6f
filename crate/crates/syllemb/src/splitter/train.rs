use alloc::string::ToString;
use alloc::vec::Vec;

use rand::seq::SliceRandom;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use super::decode::dataset_loss;
use super::model::{example_forward, SplitterConfig, SplitterModel};
use super::vocab::CharVocab;
use super::SplitterError;
use crate::corpus::DecompositionDataset;
use crate::nn::{lr_at_epoch, AdamConfig, AdamState};

/// Per-epoch training record; `eval_loss` is present when an evaluation set
/// is monitored.
#[derive(Debug, Clone, PartialEq)]
pub struct SplitterEpochStats {
    pub epoch: usize,
    pub lr: f64,
    pub mean_loss: f64,
    pub eval_loss: Option<f64>,
}

/// Teacher-forced loss of one example with dropout off.
pub fn example_loss(
    model: &SplitterModel,
    d: &crate::corpus::Decomposition,
) -> Result<f64, SplitterError> {
    let (src, tgt) = model.vocab().encode_example(d)?;
    let (fwd, loss) = example_forward(model, &src, &tgt, None)?;
    Ok(fwd.tape.value(loss).data()[0])
}

/// Loss and gradients of one example with dropout off, one gradient vector
/// per schema array (the character table's row gradients are scattered into
/// a full-size gradient).
pub fn example_gradients(
    model: &SplitterModel,
    d: &crate::corpus::Decomposition,
) -> Result<(f64, Vec<Vec<f64>>), SplitterError> {
    let (src, tgt) = model.vocab().encode_example(d)?;
    let (mut fwd, loss) = example_forward(model, &src, &tgt, None)?;
    fwd.tape.backward(loss);

    let d_model = model.config().embedding();
    let mut emb_grad = alloc::vec![0.0; model.vocab().size() * d_model];
    let mut scatter = |ids: &[usize], grads: &[f64]| {
        for (j, &id) in ids.iter().enumerate() {
            for k in 0..d_model {
                emb_grad[id * d_model + k] += grads[j * d_model + k];
            }
        }
    };
    scatter(&src, fwd.tape.grad(fwd.src_gather.expect("encoder ran")).data());
    scatter(&tgt[..tgt.len() - 1], fwd.tape.grad(fwd.tgt_gather.expect("decoder ran")).data());

    let mut arrays = Vec::with_capacity(fwd.param_vars.len());
    arrays.push(emb_grad);
    for v in fwd.param_vars.iter().skip(1) {
        arrays.push(fwd.tape.grad(v.expect("dense parameter")).data().to_vec());
    }
    Ok((fwd.tape.value(loss).data()[0], arrays))
}

/// Train with default optimizer settings and no evaluation monitoring.
pub fn train_splitter(
    ds: &DecompositionDataset,
    cfg: &SplitterConfig,
) -> Result<(SplitterModel, Vec<SplitterEpochStats>), SplitterError> {
    train_splitter_with(ds, None, cfg, &AdamConfig::default())
}

/// Teacher-forced training, strictly one example per optimizer step, with
/// the per-epoch learning-rate schedule. The loss of an example is the sum
/// of its token cross entropies. Early stopping watches the evaluation loss
/// when `eval` is given, the training loss otherwise. Deterministic per seed.
pub fn train_splitter_with(
    ds: &DecompositionDataset,
    eval: Option<&DecompositionDataset>,
    cfg: &SplitterConfig,
    adam: &AdamConfig,
) -> Result<(SplitterModel, Vec<SplitterEpochStats>), SplitterError> {
    if ds.is_empty() {
        return Err(SplitterError::EmptyDataset);
    }

    let vocab = CharVocab::from_dataset(ds);
    let mut examples = Vec::with_capacity(ds.len());
    for d in ds.iter() {
        let (src, tgt) = vocab.encode_example(d)?;
        if src.len() > super::model::MAX_LEN || tgt.len() > super::model::MAX_LEN {
            return Err(SplitterError::SequenceTooLong {
                len: src.len().max(tgt.len()),
                max: super::model::MAX_LEN,
            });
        }
        examples.push((src, tgt, d.word().to_string()));
    }

    let mut rng = ChaCha8Rng::seed_from_u64(cfg.seed);
    let mut model = SplitterModel::init(cfg.clone(), vocab, &mut rng);

    let schema = SplitterModel::array_schema(&model.config, model.vocab.size());
    let mut states: Vec<AdamState> =
        schema.iter().map(|(_, r, c)| AdamState::new(r * c)).collect();
    let d_model = model.config.embedding();

    let mut order: Vec<usize> = (0..examples.len()).collect();
    let mut history: Vec<SplitterEpochStats> = Vec::new();
    let mut monitored_prev = f64::INFINITY;

    for epoch in 0..cfg.epochs {
        let lr = lr_at_epoch(epoch, adam.lr0);
        order.shuffle(&mut rng);

        let mut loss_sum = 0.0;
        for &i in &order {
            let (src, tgt, word) = &examples[i];
            let dropout_rng = (cfg.dropout > 0.0)
                .then(|| ChaCha8Rng::seed_from_u64(rng.gen::<u64>()));

            let (loss_value, dense_grads, emb_rows, emb_grads) = {
                let (fwd, loss) = example_forward(&model, src, tgt, dropout_rng)?;
                let mut fwd = fwd;
                fwd.tape.backward(loss);

                let dense: Vec<Option<Vec<f64>>> = fwd
                    .param_vars
                    .iter()
                    .map(|v| v.map(|v| fwd.tape.grad(v).data().to_vec()))
                    .collect();
                let src_gather = fwd.src_gather.expect("encoder ran");
                let tgt_gather = fwd.tgt_gather.expect("decoder ran");
                let mut rows: Vec<usize> = src.clone();
                rows.extend_from_slice(&tgt[..tgt.len() - 1]);
                let mut grads = fwd.tape.grad(src_gather).data().to_vec();
                grads.extend_from_slice(fwd.tape.grad(tgt_gather).data());
                (fwd.tape.value(loss).data()[0], dense, rows, grads)
            };

            if !loss_value.is_finite() {
                return Err(SplitterError::NanLoss { epoch, example: i, word: word.clone() });
            }
            loss_sum += loss_value;

            let mut params = model.params_mut();
            states[0]
                .step_rows(params[0], d_model, &emb_rows, &emb_grads, adam, lr)
                .expect("gather shapes agree");
            for (idx, grad) in dense_grads.iter().enumerate().skip(1) {
                let grad = grad.as_ref().expect("dense parameter");
                states[idx].step(params[idx], grad, adam, lr).expect("shapes agree");
            }
        }

        let mean_loss = loss_sum / examples.len() as f64;
        let eval_loss = eval.and_then(|e| dataset_loss(&model, e));
        history.push(SplitterEpochStats { epoch, lr, mean_loss, eval_loss });

        let monitored = eval_loss.unwrap_or(mean_loss);
        if let Some(delta) = cfg.early_stop {
            if monitored_prev - monitored < delta && epoch + 1 < cfg.epochs {
                break;
            }
        }
        monitored_prev = monitored;
    }

    Ok((model, history))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::corpus::Decomposition;
    use crate::splitter::{greedy_decode, splitter_accuracy};
    use alloc::string::String;

    fn decomp(word: &str, syls: &[&str]) -> Decomposition {
        Decomposition::new(word.to_string(), syls.iter().map(|s| s.to_string()).collect())
            .unwrap()
    }

    /// A one-word dataset must be memorized exactly.
    #[test]
    fn memorizes_one_word() {
        let ds = DecompositionDataset::from_items([decomp("apple", &["ap", "ple"])]);
        let cfg = SplitterConfig::new(1, 16, 4, 32)
            .unwrap()
            .with_epochs(40)
            .with_seed(2)
            .with_dropout(0.0)
            .without_early_stop();
        let (model, history) = train_splitter(&ds, &cfg).unwrap();
        assert!(history.last().unwrap().mean_loss < history[0].mean_loss);
        let d = greedy_decode(&model, "apple", None).unwrap();
        assert_eq!(d.syllables(), &[String::from("ap"), String::from("ple")]);
        assert_eq!(splitter_accuracy(&model, &ds), 1.0);
    }

    #[test]
    fn training_is_reproducible() {
        let ds = DecompositionDataset::from_items([
            decomp("aba", &["a", "ba"]),
            decomp("bab", &["ba", "b"]),
        ]);
        let cfg = SplitterConfig::new(1, 16, 4, 16).unwrap().with_epochs(3).with_seed(9);
        let (m1, h1) = train_splitter(&ds, &cfg).unwrap();
        let (m2, h2) = train_splitter(&ds, &cfg).unwrap();
        assert_eq!(m1.char_emb, m2.char_emb);
        assert_eq!(m1.out_w, m2.out_w);
        assert_eq!(h1, h2);
    }

    #[test]
    fn empty_dataset_rejected() {
        let ds = DecompositionDataset::new();
        let cfg = SplitterConfig::new(1, 16, 4, 16).unwrap();
        assert_eq!(train_splitter(&ds, &cfg).unwrap_err(), SplitterError::EmptyDataset);
    }
}
