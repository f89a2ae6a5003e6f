//! Analytic gradients of every trainable model against central finite
//! differences. The numeric side evaluates the loss through the plain
//! inference code path, so these checks also pin the tape forward against
//! the direct implementation.

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use std::collections::BTreeMap;

use syllemb::corpus::{Decomposition, VariantScheme};
use syllemb::embedder::{example_gradients, EmbedderConfig, EmbedderKind, EmbedderModel};
use syllemb::nn::{check_gradient, mse};
use syllemb::splitter::{CharVocab, SplitterConfig, SplitterModel};

const TOLERANCE: f64 = 1e-4;

/// Some coordinates have structurally zero gradients (key-projection biases:
/// softmax is invariant to shifting every key by a constant), which central
/// differences only resolve to rounding noise. Those are held to an absolute
/// bound; the relative check runs over the live coordinates, patched into
/// the full parameter vector.
fn check_with_dead_coords(
    mut f: impl FnMut(&[f64]) -> f64,
    params: &[f64],
    analytic: &[f64],
) -> f64 {
    const DEAD: f64 = 1e-8;
    const STEP: f64 = 1e-5;
    let mut work = params.to_vec();
    for (i, &a) in analytic.iter().enumerate() {
        if a.abs() < DEAD {
            let orig = work[i];
            work[i] = orig + STEP;
            let plus = f(&work);
            work[i] = orig - STEP;
            let minus = f(&work);
            work[i] = orig;
            let numeric = (plus - minus) / (2.0 * STEP);
            assert!(
                numeric.abs() < 1e-6,
                "coordinate {i}: analytic ~ 0 but numeric gradient is {numeric}"
            );
        }
    }
    let live: Vec<usize> =
        (0..params.len()).filter(|&i| analytic[i].abs() >= DEAD).collect();
    let live_params: Vec<f64> = live.iter().map(|&i| params[i]).collect();
    let live_analytic: Vec<f64> = live.iter().map(|&i| analytic[i]).collect();
    let mut full = params.to_vec();
    check_gradient(
        |p: &[f64]| {
            for (&i, &x) in live.iter().zip(p) {
                full[i] = x;
            }
            f(&full)
        },
        &live_params,
        &live_analytic,
    )
}

fn random_model(cfg: &EmbedderConfig, vocab_size: usize, seed: u64) -> EmbedderModel {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let vocab: Vec<String> = (0..vocab_size).map(|i| format!("s{i}")).collect();
    // A healthy init scale keeps the finite-difference stencil well away
    // from the zero-norm singularity.
    let cfg = cfg.clone().with_init_scale(1.0);
    EmbedderModel::init(&cfg, vocab, VariantScheme::none(), &mut rng)
}

/// Flatten model parameters in a fixed order: table, then the attention and
/// expansion weights as present.
fn flatten(model: &EmbedderModel) -> Vec<f64> {
    let (w_q, w_k, b_k, w_e, b_e) = model.weights();
    let mut flat = model.table().to_vec();
    flat.extend_from_slice(w_q);
    flat.extend_from_slice(w_k);
    flat.extend_from_slice(b_k);
    flat.extend_from_slice(w_e);
    flat.extend_from_slice(b_e);
    flat
}

fn rebuild(model: &EmbedderModel, flat: &[f64]) -> EmbedderModel {
    let d = model.dim();
    let v = model.vocab_size();
    let (w_q, w_k, b_k, w_e, b_e) = model.weights();
    let mut at = v * d;
    let take = |len: usize, at: &mut usize| -> Vec<f64> {
        let out = flat[*at..*at + len].to_vec();
        *at += len;
        out
    };
    EmbedderModel::from_parts(
        model.kind(),
        d,
        model.out_dim(),
        model.vocab_list().to_vec(),
        model.scheme().clone(),
        flat[..v * d].to_vec(),
        take(w_q.len(), &mut at),
        take(w_k.len(), &mut at),
        take(b_k.len(), &mut at),
        take(w_e.len(), &mut at),
        take(b_e.len(), &mut at),
    )
    .expect("shapes preserved")
}

/// Gradient of the example loss with respect to every parameter, assembled
/// from the per-position row gradients plus the dense weight gradients.
fn analytic_flat(model: &EmbedderModel, ids: &[u32], target: &[f64]) -> (f64, Vec<f64>) {
    let grads = example_gradients(model, ids, target).expect("forward succeeds");
    let d = model.dim();
    let mut table_grad = vec![0.0; model.vocab_size() * d];
    for (pos, &id) in ids.iter().enumerate() {
        for k in 0..d {
            table_grad[id as usize * d + k] += grads.table_rows[pos * d + k];
        }
    }
    let mut flat = table_grad;
    flat.extend(&grads.w_q);
    flat.extend(&grads.w_k);
    flat.extend(&grads.b_k);
    flat.extend(&grads.w_e);
    flat.extend(&grads.b_e);
    (grads.loss, flat)
}

fn check_embedder(kind: EmbedderKind, seed: u64) -> f64 {
    let (cfg, out_dim) = match kind {
        EmbedderKind::Vanilla => (EmbedderConfig::vanilla(5), 5),
        EmbedderKind::Attention1 => (EmbedderConfig::attention1(5), 5),
        EmbedderKind::Attention2 => (EmbedderConfig::attention2(4, 6).unwrap(), 6),
    };
    let model = random_model(&cfg, 7, seed);
    let mut rng = ChaCha8Rng::seed_from_u64(seed ^ 0xfeed);
    // A duplicated syllable id exercises gradient accumulation on one row.
    let ids = [0u32, 3, 3, 5];
    let target: Vec<f64> = (0..out_dim).map(|_| rng.gen_range(-1.0..1.0)).collect();

    let (loss, analytic) = analytic_flat(&model, &ids, &target);
    let params = flatten(&model);
    let direct = |p: &[f64]| {
        let m = rebuild(&model, p);
        mse(&m.compose(&ids).expect("compose succeeds"), &target).expect("same dim")
    };
    assert!((direct(&params) - loss).abs() < 1e-12, "tape and direct losses agree");
    check_with_dead_coords(direct, &params, &analytic)
}

#[test]
fn vanilla_gradients_match_finite_differences() {
    for seed in [1, 2, 3] {
        let err = check_embedder(EmbedderKind::Vanilla, seed);
        assert!(err < TOLERANCE, "seed {seed}: relative error {err}");
    }
}

#[test]
fn attention1_gradients_match_finite_differences() {
    for seed in [4, 5, 6] {
        let err = check_embedder(EmbedderKind::Attention1, seed);
        assert!(err < TOLERANCE, "seed {seed}: relative error {err}");
    }
}

#[test]
fn attention2_gradients_match_finite_differences() {
    for seed in [7, 8, 9] {
        let err = check_embedder(EmbedderKind::Attention2, seed);
        assert!(err < TOLERANCE, "seed {seed}: relative error {err}");
    }
}

#[test]
fn splitter_gradients_match_finite_differences() {
    let config = SplitterConfig::new(1, 16, 4, 32).unwrap().with_dropout(0.0);
    let vocab = CharVocab::from_chars(vec!['a', 'b', 'l', 'p']);
    let mut rng = ChaCha8Rng::seed_from_u64(17);
    let model = SplitterModel::init(config.clone(), vocab.clone(), &mut rng);

    let example = Decomposition::new(
        "appal".to_string(),
        vec!["ap".to_string(), "pal".to_string()],
    )
    .unwrap();

    let (loss, grad_arrays) = syllemb::splitter::example_gradients(&model, &example).unwrap();
    let analytic: Vec<f64> = grad_arrays.into_iter().flatten().collect();

    let schema = SplitterModel::array_schema(&config, vocab.size());
    let current: Vec<(String, Vec<f64>)> = model
        .named_arrays()
        .into_iter()
        .map(|(n, _, _, d)| (n, d.to_vec()))
        .collect();
    let params: Vec<f64> = current.iter().flat_map(|(_, d)| d.iter().copied()).collect();

    let direct = |p: &[f64]| {
        let mut arrays = BTreeMap::new();
        let mut at = 0;
        for (name, r, c) in &schema {
            arrays.insert(name.clone(), p[at..at + r * c].to_vec());
            at += r * c;
        }
        let m = SplitterModel::from_arrays(config.clone(), vocab.clone(), arrays).unwrap();
        syllemb::splitter::example_loss(&m, &example).unwrap()
    };
    assert!((direct(&params) - loss).abs() < 1e-9, "loss paths agree");

    let err = check_with_dead_coords(direct, &params, &analytic);
    assert!(err < TOLERANCE, "relative error {err}");
}
