//! Command-line entry point: dataset preparation, corpus statistics, model
//! training, decoding, pair evaluation, annotation arithmetic and embedding
//! export. Every run that writes artifacts also writes a manifest echoing
//! the resolved configuration, the seed and checksums of the inputs.

use std::collections::BTreeSet;
use std::path::{Path, PathBuf};

use anyhow::{bail, Context, Result};
use clap::{Args, Parser, Subcommand, ValueEnum};
use serde_json::json;

use syllemb::corpus::{
    coverage_curve, syllable_histogram, CharFilter, DecompositionDataset, OovScope, TrainingSet,
    VariantConfig,
};
use syllemb::embedder::{train_embedder_with, EmbedderConfig};
use syllemb::eval::{
    aggregate_final_scores, annotator_agreement, evaluate_pairs, flag_deviations, split_phrase,
    PhraseVector,
};
use syllemb::nn::{l2_normalize, AdamConfig};
use syllemb::splitter::{
    greedy_decode, splitter_accuracy, train_splitter_with, Resolver, SplitterConfig,
};

use syllemb_cli::formats::{
    annotations_tsv, decomp_tsv, emb_text, embedder_file, pairs_tsv, splitter_file,
    training_file,
};
use syllemb_cli::report::{
    agreement_json, coverage_tsv, eval_report_json, grid_tsv, histogram_tsv, loss_history_tsv,
    per_pair_tsv, write_manifest, GridCell,
};

#[derive(Parser)]
#[command(name = "syllemb", version, about = "Syllable-embedding toolkit")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Build training sets from a decomposition corpus and an embedding table
    Prepare {
        #[command(subcommand)]
        action: PrepareAction,
    },
    /// Corpus statistics as plot-ready tables
    Analyze {
        #[command(subcommand)]
        action: AnalyzeAction,
    },
    /// Train composition models and splitters
    Train {
        #[command(subcommand)]
        action: TrainAction,
    },
    /// Decode words into syllables with a trained splitter
    Split(SplitArgs),
    /// Evaluate embeddings on scored word pairs
    Eval {
        #[command(subcommand)]
        action: EvalAction,
    },
    /// Annotation agreement, deviation flags and score aggregation
    Annotate {
        #[command(subcommand)]
        action: AnnotateAction,
    },
    /// Materialize word embeddings for a word list
    Export(ExportArgs),
}

#[derive(Args)]
struct CorpusInputs {
    /// Decomposition TSV (word<TAB>syl1-syl2-...)
    #[arg(long)]
    decomp: PathBuf,
    /// Embedding text file
    #[arg(long)]
    emb: PathBuf,
    /// Allow '-' inside words and syllables
    #[arg(long)]
    allow_hyphen: bool,
}

#[derive(Subcommand)]
enum PrepareAction {
    /// Intersect the corpus with the embedding table
    Intersect {
        #[command(flatten)]
        inputs: CorpusInputs,
        /// Output training-set container
        #[arg(long)]
        out: PathBuf,
        /// Summary JSON (defaults to <out>.summary.json)
        #[arg(long)]
        summary: Option<PathBuf>,
    },
    /// Intersect, then mark frequent start/end syllables
    Variants {
        #[command(flatten)]
        inputs: CorpusInputs,
        /// Fraction of start/end syllables receiving marked variants
        #[arg(long)]
        fraction: f64,
        #[arg(long, default_value = "$")]
        start_marker: char,
        #[arg(long, default_value = "#")]
        end_marker: char,
        #[arg(long)]
        out: PathBuf,
        #[arg(long)]
        summary: Option<PathBuf>,
    },
    /// Remove frequent-syllable words, making them composable test cases
    OovSplit {
        #[command(flatten)]
        inputs: CorpusInputs,
        /// Variant fraction applied before counting
        #[arg(long, default_value_t = 0.0)]
        fraction: f64,
        /// Minimum occurrence count of every syllable variant
        #[arg(long)]
        min_count: usize,
        #[arg(long, value_enum, default_value_t = ScopeArg::EvalOnly)]
        scope: ScopeArg,
        /// Pair file supplying the evaluation vocabulary (eval-only scope)
        #[arg(long)]
        eval_pairs: Option<PathBuf>,
        #[arg(long)]
        out: PathBuf,
        /// Write removed words, one per line
        #[arg(long)]
        removed_out: Option<PathBuf>,
        #[arg(long)]
        summary: Option<PathBuf>,
    },
}

#[derive(Clone, Copy, ValueEnum)]
enum ScopeArg {
    EvalOnly,
    Global,
}

#[derive(Subcommand)]
enum AnalyzeAction {
    /// Syllable occurrence histogram
    Histogram {
        #[arg(long)]
        decomp: PathBuf,
        #[arg(long)]
        allow_hyphen: bool,
        #[arg(long, default_value_t = 20)]
        bin_width: usize,
        #[arg(long, default_value_t = 1000)]
        cap: usize,
        #[arg(long)]
        out: PathBuf,
    },
    /// Fraction of words formed from the top-x% most frequent syllables
    Coverage {
        #[arg(long)]
        decomp: PathBuf,
        #[arg(long)]
        allow_hyphen: bool,
        #[arg(long, default_value_t = 100)]
        steps: usize,
        #[arg(long)]
        out: PathBuf,
    },
}

#[derive(Clone, Copy, ValueEnum)]
enum KindArg {
    Vanilla,
    Attention1,
    Attention2,
}

#[derive(Subcommand)]
enum TrainAction {
    /// Train a composition model on a prepared training set
    Embedder {
        /// Training-set container from `prepare`
        #[arg(long)]
        train_set: PathBuf,
        #[arg(long, value_enum)]
        kind: KindArg,
        /// Syllable-table dimensionality for the expanding kind
        #[arg(long, default_value_t = 200)]
        inner_dim: usize,
        #[arg(long, default_value_t = 30)]
        epochs: usize,
        #[arg(long, default_value_t = 0)]
        seed: u64,
        #[arg(long, default_value_t = 0.05)]
        lr0: f64,
        #[arg(long, default_value_t = 0.1)]
        init_scale: f64,
        /// Disable the loss-plateau early stop
        #[arg(long)]
        no_early_stop: bool,
        #[arg(long)]
        out: PathBuf,
        /// Loss history TSV (defaults to <out>.loss.tsv)
        #[arg(long)]
        loss_out: Option<PathBuf>,
    },
    /// Train a syllable splitter; list-valued dimensions run a grid search
    Splitter {
        #[arg(long)]
        decomp: PathBuf,
        #[arg(long)]
        allow_hyphen: bool,
        #[arg(long, value_delimiter = ',')]
        layers: Vec<usize>,
        #[arg(long, value_delimiter = ',')]
        embedding: Vec<usize>,
        #[arg(long, value_delimiter = ',')]
        heads: Vec<usize>,
        #[arg(long, value_delimiter = ',')]
        hidden: Vec<usize>,
        #[arg(long, default_value_t = 0.1)]
        dropout: f64,
        #[arg(long, default_value_t = 10)]
        epochs: usize,
        #[arg(long, default_value_t = 0)]
        seed: u64,
        #[arg(long, default_value_t = 0.05)]
        lr0: f64,
        /// Held-out decompositions for accuracy/plateau monitoring
        #[arg(long)]
        eval_decomp: Option<PathBuf>,
        #[arg(long)]
        no_early_stop: bool,
        /// Model container (single-configuration runs)
        #[arg(long)]
        out: Option<PathBuf>,
        #[arg(long)]
        loss_out: Option<PathBuf>,
        /// Grid accuracy table (multi-configuration runs)
        #[arg(long)]
        grid_out: Option<PathBuf>,
    },
}

#[derive(Args)]
struct SplitArgs {
    /// Splitter model container
    #[arg(long)]
    model: PathBuf,
    /// A single word to decode
    #[arg(long)]
    word: Option<String>,
    /// A file of words, one per line
    #[arg(long)]
    words_file: Option<PathBuf>,
    /// Output TSV (stdout when omitted)
    #[arg(long)]
    out: Option<PathBuf>,
}

#[derive(Subcommand)]
enum EvalAction {
    /// Cosine similarities against gold pair scores
    Pairs {
        /// Composition-model container
        #[arg(long, conflicts_with = "table")]
        model: Option<PathBuf>,
        /// Fixed embedding text file evaluated by lookup
        #[arg(long)]
        table: Option<PathBuf>,
        #[arg(long)]
        pairs: PathBuf,
        /// Decomposition table for lookups
        #[arg(long)]
        decomp: Option<PathBuf>,
        #[arg(long)]
        allow_hyphen: bool,
        /// Splitter container resolving words the table lacks
        #[arg(long)]
        splitter: Option<PathBuf>,
        /// Report JSON
        #[arg(long)]
        out: PathBuf,
        /// Per-pair similarity TSV
        #[arg(long)]
        per_pair: Option<PathBuf>,
    },
}

#[derive(Subcommand)]
enum AnnotateAction {
    /// Pairwise Pearson correlation between annotators
    Agreement {
        #[arg(long)]
        annotations: PathBuf,
        #[arg(long)]
        out: PathBuf,
    },
    /// Scores deviating from the other annotators' average
    Flags {
        #[arg(long)]
        annotations: PathBuf,
        #[arg(long, default_value_t = 1.0)]
        threshold: f64,
        #[arg(long)]
        out: PathBuf,
    },
    /// Arithmetic mean of the annotations per pair
    Aggregate {
        #[arg(long)]
        annotations: PathBuf,
        #[arg(long)]
        out: PathBuf,
    },
}

#[derive(Args)]
struct ExportArgs {
    /// Composition-model container
    #[arg(long)]
    model: PathBuf,
    /// Word list, one word or phrase per line
    #[arg(long)]
    words: PathBuf,
    /// Decomposition table for lookups
    #[arg(long)]
    decomp: Option<PathBuf>,
    #[arg(long)]
    allow_hyphen: bool,
    /// Splitter container for words the table lacks
    #[arg(long)]
    splitter: Option<PathBuf>,
    /// Output embedding text file
    #[arg(long)]
    out: PathBuf,
}

fn filter_for(allow_hyphen: bool) -> CharFilter {
    if allow_hyphen {
        CharFilter::with_hyphen()
    } else {
        CharFilter::default()
    }
}

fn load_corpus(
    path: &Path,
    allow_hyphen: bool,
) -> Result<(DecompositionDataset, decomp_tsv::SkipReport)> {
    let (ds, report) = decomp_tsv::load(path, &filter_for(allow_hyphen))
        .with_context(|| format!("loading decompositions from {}", path.display()))?;
    if report.rejoin_mismatch + report.invalid_chars > 0 {
        log::info!(
            "{}: skipped {} lines (invalid characters: {}, rejoin mismatches: {})",
            path.display(),
            report.rejoin_mismatch + report.invalid_chars,
            report.invalid_chars,
            report.rejoin_mismatch
        );
    }
    Ok((ds, report))
}

fn build_training_set(
    inputs: &CorpusInputs,
) -> Result<(DecompositionDataset, decomp_tsv::SkipReport, TrainingSet)> {
    let (ds, report) = load_corpus(&inputs.decomp, inputs.allow_hyphen)?;
    let emb = emb_text::load(&inputs.emb)
        .with_context(|| format!("loading embeddings from {}", inputs.emb.display()))?;
    let ts = TrainingSet::build(&ds, &emb)?;
    Ok((ds, report, ts))
}

fn write_summary(path: &Path, value: &serde_json::Value) -> Result<()> {
    std::fs::write(path, serde_json::to_string_pretty(value)?)?;
    Ok(())
}

fn summary_path(out: &Path, explicit: Option<PathBuf>) -> PathBuf {
    explicit.unwrap_or_else(|| PathBuf::from(format!("{}.summary.json", out.display())))
}

fn eval_vocab_from_pairs(path: &Path) -> Result<BTreeSet<String>> {
    Ok(pairs_tsv::load(path)?.unique_words())
}

fn cmd_prepare(action: PrepareAction) -> Result<()> {
    match action {
        PrepareAction::Intersect { inputs, out, summary } => {
            let (_, report, ts) = build_training_set(&inputs)?;
            training_file::save(&ts, &out)?;
            let summary_file = summary_path(&out, summary);
            write_summary(
                &summary_file,
                &json!({
                    "words": ts.len(),
                    "syllables": ts.vocab_size(),
                    "dim": ts.dim(),
                    "skip_report": report,
                }),
            )?;
            write_manifest(
                "prepare intersect",
                json!({
                    "decomp": inputs.decomp,
                    "emb": inputs.emb,
                    "allow_hyphen": inputs.allow_hyphen,
                }),
                None,
                &[inputs.decomp.clone(), inputs.emb.clone()],
                &[out, summary_file],
            )?;
        }
        PrepareAction::Variants {
            inputs,
            fraction,
            start_marker,
            end_marker,
            out,
            summary,
        } => {
            let (ds, report, ts) = build_training_set(&inputs)?;
            let cfg = VariantConfig::with_markers(fraction, start_marker, end_marker)?;
            let marked = ts.apply_variants(&ds, &cfg)?;
            training_file::save(&marked, &out)?;
            let summary_file = summary_path(&out, summary);
            write_summary(
                &summary_file,
                &json!({
                    "words": marked.len(),
                    "syllables": ts.vocab_size(),
                    "syllable_variants": marked.vocab_size(),
                    "dim": marked.dim(),
                    "fraction": fraction,
                    "start_marked": marked.scheme().start_marked().len(),
                    "end_marked": marked.scheme().end_marked().len(),
                    "skip_report": report,
                }),
            )?;
            write_manifest(
                "prepare variants",
                json!({
                    "decomp": inputs.decomp,
                    "emb": inputs.emb,
                    "allow_hyphen": inputs.allow_hyphen,
                    "fraction": fraction,
                    "start_marker": start_marker.to_string(),
                    "end_marker": end_marker.to_string(),
                }),
                None,
                &[inputs.decomp.clone(), inputs.emb.clone()],
                &[out, summary_file],
            )?;
        }
        PrepareAction::OovSplit {
            inputs,
            fraction,
            min_count,
            scope,
            eval_pairs,
            out,
            removed_out,
            summary,
        } => {
            if min_count < 1 {
                bail!("--min-count must be at least 1");
            }
            let (ds, report, ts) = build_training_set(&inputs)?;
            let ts = if fraction > 0.0 {
                ts.apply_variants(&ds, &VariantConfig::new(fraction)?)?
            } else {
                ts
            };
            let (scope, eval_vocab) = match scope {
                ScopeArg::Global => (OovScope::Global, BTreeSet::new()),
                ScopeArg::EvalOnly => {
                    let path = eval_pairs
                        .as_ref()
                        .context("--eval-pairs is required with eval-only scope")?;
                    (OovScope::EvalOnly, eval_vocab_from_pairs(path)?)
                }
            };
            let split = ts.oov_split(&eval_vocab, min_count, scope)?;
            if !split.uncomposable.is_empty() {
                log::warn!(
                    "{} removed words lost a syllable variant from the retained vocabulary: {:?}",
                    split.uncomposable.len(),
                    split.uncomposable
                );
            }
            training_file::save(&split.retained, &out)?;
            let mut outputs = vec![out.clone()];
            if let Some(removed_path) = &removed_out {
                std::fs::write(removed_path, split.removed_words.join("\n") + "\n")?;
                outputs.push(removed_path.clone());
            }
            let summary_file = summary_path(&out, summary);
            write_summary(
                &summary_file,
                &json!({
                    "retained_words": split.retained.len(),
                    "retained_syllable_variants": split.retained.vocab_size(),
                    "removed_words": split.removed_words.len(),
                    "removed_word_list": split.removed_words,
                    "uncomposable": split.uncomposable,
                    "min_count": min_count,
                    "fraction": fraction,
                    "skip_report": report,
                }),
            )?;
            outputs.push(summary_file);
            let mut input_files = vec![inputs.decomp.clone(), inputs.emb.clone()];
            if let Some(p) = &eval_pairs {
                input_files.push(p.clone());
            }
            write_manifest(
                "prepare oov-split",
                json!({
                    "decomp": inputs.decomp,
                    "emb": inputs.emb,
                    "allow_hyphen": inputs.allow_hyphen,
                    "fraction": fraction,
                    "min_count": min_count,
                    "scope": match scope {
                        OovScope::EvalOnly => "eval-only",
                        OovScope::Global => "global",
                    },
                    "eval_pairs": eval_pairs,
                }),
                None,
                &input_files,
                &outputs,
            )?;
        }
    }
    Ok(())
}

fn cmd_analyze(action: AnalyzeAction) -> Result<()> {
    match action {
        AnalyzeAction::Histogram { decomp, allow_hyphen, bin_width, cap, out } => {
            if bin_width < 1 {
                bail!("--bin-width must be at least 1");
            }
            let (ds, _) = load_corpus(&decomp, allow_hyphen)?;
            let h = syllable_histogram(&ds, bin_width, cap);
            std::fs::write(&out, histogram_tsv(&h))?;
            write_manifest(
                "analyze histogram",
                json!({"decomp": decomp, "bin_width": bin_width, "cap": cap}),
                None,
                &[decomp],
                &[out],
            )?;
        }
        AnalyzeAction::Coverage { decomp, allow_hyphen, steps, out } => {
            if steps < 1 {
                bail!("--steps must be at least 1");
            }
            let (ds, _) = load_corpus(&decomp, allow_hyphen)?;
            let curve = coverage_curve(&ds, steps);
            std::fs::write(&out, coverage_tsv(&curve))?;
            write_manifest(
                "analyze coverage",
                json!({"decomp": decomp, "steps": steps}),
                None,
                &[decomp],
                &[out],
            )?;
        }
    }
    Ok(())
}

fn cmd_train(action: TrainAction) -> Result<()> {
    match action {
        TrainAction::Embedder {
            train_set,
            kind,
            inner_dim,
            epochs,
            seed,
            lr0,
            init_scale,
            no_early_stop,
            out,
            loss_out,
        } => {
            let ts = training_file::load(&train_set)?;
            let mut cfg = match kind {
                KindArg::Vanilla => EmbedderConfig::vanilla(ts.dim()),
                KindArg::Attention1 => EmbedderConfig::attention1(ts.dim()),
                KindArg::Attention2 => EmbedderConfig::attention2(inner_dim, ts.dim())?,
            };
            cfg = cfg.with_epochs(epochs).with_seed(seed).with_init_scale(init_scale);
            if no_early_stop {
                cfg = cfg.without_early_stop();
            }
            let adam = AdamConfig { lr0, ..AdamConfig::default() };
            let (model, history) = train_embedder_with(&ts, &cfg, &adam)?;
            embedder_file::save(&model, &out)?;
            let loss_file =
                loss_out.unwrap_or_else(|| PathBuf::from(format!("{}.loss.tsv", out.display())));
            let rows: Vec<(usize, f64, f64, Option<f64>)> =
                history.iter().map(|s| (s.epoch, s.lr, s.mean_loss, None)).collect();
            std::fs::write(&loss_file, loss_history_tsv(&rows))?;
            println!(
                "trained {} model: {} parameters, {} epochs, final loss {:.6}",
                model.kind().as_str(),
                model.param_count(),
                history.len(),
                history.last().map(|s| s.mean_loss).unwrap_or(f64::NAN)
            );
            write_manifest(
                "train embedder",
                json!({
                    "train_set": train_set,
                    "kind": match kind {
                        KindArg::Vanilla => "vanilla",
                        KindArg::Attention1 => "attention1",
                        KindArg::Attention2 => "attention2",
                    },
                    "inner_dim": inner_dim,
                    "epochs": epochs,
                    "lr0": lr0,
                    "init_scale": init_scale,
                    "early_stop": !no_early_stop,
                }),
                Some(seed),
                &[train_set.clone()],
                &[out, loss_file],
            )?;
        }
        TrainAction::Splitter {
            decomp,
            allow_hyphen,
            layers,
            embedding,
            heads,
            hidden,
            dropout,
            epochs,
            seed,
            lr0,
            eval_decomp,
            no_early_stop,
            out,
            loss_out,
            grid_out,
        } => {
            if [&layers, &embedding, &heads, &hidden].iter().any(|v| v.is_empty()) {
                bail!("--layers, --embedding, --heads and --hidden are required");
            }
            let (ds, _) = load_corpus(&decomp, allow_hyphen)?;
            let eval_ds = eval_decomp
                .as_ref()
                .map(|p| load_corpus(p, allow_hyphen).map(|(ds, _)| ds))
                .transpose()?;
            let adam = AdamConfig { lr0, ..AdamConfig::default() };

            let combos = layers.len() * embedding.len() * heads.len() * hidden.len();
            let configure = |l: usize, e: usize, h: usize, f: usize| -> Result<SplitterConfig, syllemb::splitter::SplitterError> {
                let mut cfg = SplitterConfig::new(l, e, h, f)?
                    .with_dropout(dropout)
                    .with_epochs(epochs)
                    .with_seed(seed);
                if no_early_stop {
                    cfg = cfg.without_early_stop();
                }
                Ok(cfg)
            };

            if combos == 1 {
                let out = out.context("--out is required for a single configuration")?;
                let cfg = configure(layers[0], embedding[0], heads[0], hidden[0])?;
                let (model, history) =
                    train_splitter_with(&ds, eval_ds.as_ref(), &cfg, &adam)?;
                splitter_file::save(&model, &out)?;
                let loss_file = loss_out
                    .unwrap_or_else(|| PathBuf::from(format!("{}.loss.tsv", out.display())));
                let rows: Vec<(usize, f64, f64, Option<f64>)> = history
                    .iter()
                    .map(|s| (s.epoch, s.lr, s.mean_loss, s.eval_loss))
                    .collect();
                std::fs::write(&loss_file, loss_history_tsv(&rows))?;
                if let Some(eval_ds) = &eval_ds {
                    println!("eval accuracy: {:.4}", splitter_accuracy(&model, eval_ds));
                }
                let mut input_files = vec![decomp.clone()];
                input_files.extend(eval_decomp.clone());
                write_manifest(
                    "train splitter",
                    json!({
                        "decomp": decomp,
                        "layers": layers[0],
                        "embedding": embedding[0],
                        "heads": heads[0],
                        "hidden": hidden[0],
                        "dropout": dropout,
                        "epochs": epochs,
                        "lr0": lr0,
                        "eval_decomp": eval_decomp,
                        "early_stop": !no_early_stop,
                    }),
                    Some(seed),
                    &input_files,
                    &[out, loss_file],
                )?;
            } else {
                let grid_file =
                    grid_out.context("--grid-out is required for a configuration grid")?;
                let eval_ds = eval_ds
                    .context("--eval-decomp is required for a configuration grid")?;
                let mut cells = Vec::new();
                for &l in &layers {
                    for &f in &hidden {
                        for &e in &embedding {
                            for &h in &heads {
                                let accuracy = match configure(l, e, h, f) {
                                    Ok(cfg) => {
                                        let (model, _) = train_splitter_with(
                                            &ds,
                                            Some(&eval_ds),
                                            &cfg,
                                            &adam,
                                        )?;
                                        let acc = splitter_accuracy(&model, &eval_ds);
                                        log::info!(
                                            "layers={l} embedding={e} heads={h} hidden={f}: {acc:.4}"
                                        );
                                        Some(acc)
                                    }
                                    Err(_) => None,
                                };
                                cells.push(GridCell {
                                    layers: l,
                                    hidden: f,
                                    embedding: e,
                                    heads: h,
                                    accuracy,
                                });
                            }
                        }
                    }
                }
                std::fs::write(&grid_file, grid_tsv(&cells))?;
                write_manifest(
                    "train splitter grid",
                    json!({
                        "decomp": decomp,
                        "layers": layers,
                        "embedding": embedding,
                        "heads": heads,
                        "hidden": hidden,
                        "dropout": dropout,
                        "epochs": epochs,
                        "lr0": lr0,
                        "eval_decomp": eval_decomp,
                    }),
                    Some(seed),
                    &[decomp.clone(), eval_decomp.clone().unwrap()],
                    &[grid_file],
                )?;
            }
        }
    }
    Ok(())
}

fn cmd_split(args: SplitArgs) -> Result<()> {
    let model = splitter_file::load(&args.model)?;
    let mut words: Vec<String> = Vec::new();
    if let Some(w) = &args.word {
        words.push(w.clone());
    }
    if let Some(path) = &args.words_file {
        words.extend(
            std::fs::read_to_string(path)?
                .lines()
                .filter(|l| !l.is_empty())
                .map(str::to_string),
        );
    }
    if words.is_empty() {
        bail!("nothing to decode: pass --word or --words-file");
    }

    let mut out = String::new();
    for word in &words {
        match greedy_decode(&model, &word.to_lowercase(), None) {
            Ok(d) => out.push_str(&format!("{word}\t{}\n", d.syllables().join("-"))),
            Err(e) => out.push_str(&format!("{word}\t!{e}\n")),
        }
    }
    match &args.out {
        Some(path) => {
            std::fs::write(path, &out)?;
            let mut inputs = vec![args.model.clone()];
            inputs.extend(args.words_file.clone());
            write_manifest(
                "split",
                json!({"model": args.model, "word": args.word, "words_file": args.words_file}),
                None,
                &inputs,
                &[path.clone()],
            )?;
        }
        None => print!("{out}"),
    }
    Ok(())
}

/// Lookup-based embedding over a fixed table: try the full phrase with
/// spaces joined by underscores, then fall back to combining per-word
/// vectors for multiword phrases.
fn table_phrase_vector(
    table: &syllemb::corpus::EmbeddingTable,
    phrase: &str,
) -> PhraseVector {
    let words = split_phrase(phrase);
    let key = words.join("_");
    if let Some(v) = table.get(&key) {
        return PhraseVector::Present(v.iter().map(|&x| x as f64).collect());
    }
    let mut missing = Vec::new();
    let mut sum = vec![0.0f64; table.dim()];
    for word in &words {
        match table.get(word) {
            Some(v) => {
                let unit = match l2_normalize(&v.iter().map(|&x| x as f64).collect::<Vec<_>>()) {
                    Ok(u) => u,
                    Err(_) => {
                        missing.push(word.clone());
                        continue;
                    }
                };
                for (acc, x) in sum.iter_mut().zip(&unit) {
                    *acc += x;
                }
            }
            None => missing.push(word.clone()),
        }
    }
    if !missing.is_empty() || words.is_empty() {
        missing.sort();
        missing.dedup();
        return PhraseVector::Missing(missing);
    }
    match l2_normalize(&sum) {
        Ok(v) => PhraseVector::Present(v),
        Err(_) => PhraseVector::Missing(vec![]),
    }
}

fn cmd_eval(action: EvalAction) -> Result<()> {
    let EvalAction::Pairs {
        model,
        table,
        pairs,
        decomp,
        allow_hyphen,
        splitter,
        out,
        per_pair,
    } = action;
    let dataset = pairs_tsv::load(&pairs)?;

    let mut input_files = vec![pairs.clone()];
    let report;
    let mut tallies = None;

    if let Some(table_path) = &table {
        let emb = emb_text::load(table_path)?;
        input_files.push(table_path.clone());
        report = evaluate_pairs(|phrase| table_phrase_vector(&emb, phrase), &dataset)?;
    } else {
        let model_path = model.as_ref().context("pass either --model or --table")?;
        let embedder = embedder_file::load(model_path)?;
        input_files.push(model_path.clone());

        let lookup = match &decomp {
            Some(path) => {
                input_files.push(path.clone());
                load_corpus(path, allow_hyphen)?.0
            }
            None => DecompositionDataset::new(),
        };
        let splitter_model = splitter
            .as_ref()
            .map(|p| {
                input_files.push(p.clone());
                splitter_file::load(p)
            })
            .transpose()?;

        let mut resolver = Resolver::new(&lookup)
            .with_vocab(embedder.vocab(), embedder.scheme());
        if let Some(m) = &splitter_model {
            resolver = resolver.with_model(m);
        }
        report = evaluate_pairs(
            |phrase| embedder.embed(phrase, |w| resolver.resolve(w).ok()).into(),
            &dataset,
        )?;
        tallies = Some(resolver.tallies().clone());
    }

    std::fs::write(
        &out,
        serde_json::to_string_pretty(&eval_report_json(&report, tallies.as_ref()))?,
    )?;
    let mut outputs = vec![out.clone()];
    if let Some(pp) = &per_pair {
        std::fs::write(pp, per_pair_tsv(&report))?;
        outputs.push(pp.clone());
    }
    println!(
        "{}: spearman {:.4} over {}/{} pairs, {} missing words",
        report.dataset, report.spearman, report.pairs_used, report.pairs_total,
        report.missing_words
    );
    write_manifest(
        "eval pairs",
        json!({
            "model": model,
            "table": table,
            "pairs": pairs,
            "decomp": decomp,
            "splitter": splitter,
        }),
        None,
        &input_files,
        &outputs,
    )?;
    Ok(())
}

fn cmd_annotate(action: AnnotateAction) -> Result<()> {
    match action {
        AnnotateAction::Agreement { annotations, out } => {
            let set = annotations_tsv::load(&annotations)?;
            let report = annotator_agreement(&set);
            std::fs::write(&out, serde_json::to_string_pretty(&agreement_json(&report))?)?;
            write_manifest(
                "annotate agreement",
                json!({"annotations": annotations}),
                None,
                &[annotations.clone()],
                &[out],
            )?;
        }
        AnnotateAction::Flags { annotations, threshold, out } => {
            let set = annotations_tsv::load(&annotations)?;
            let flagged = flag_deviations(&set, threshold)?;
            let value = json!({
                "threshold": threshold,
                "flagged": flagged
                    .iter()
                    .enumerate()
                    .map(|(i, ids)| json!({"annotator": i, "pairs": ids}))
                    .collect::<Vec<_>>(),
            });
            std::fs::write(&out, serde_json::to_string_pretty(&value)?)?;
            write_manifest(
                "annotate flags",
                json!({"annotations": annotations, "threshold": threshold}),
                None,
                &[annotations.clone()],
                &[out],
            )?;
        }
        AnnotateAction::Aggregate { annotations, out } => {
            let set = annotations_tsv::load(&annotations)?;
            let scores = aggregate_final_scores(&set);
            let mut text = String::from("pair_id\tscore\n");
            for (id, score) in &scores {
                text.push_str(&format!("{id}\t{score}\n"));
            }
            std::fs::write(&out, text)?;
            write_manifest(
                "annotate aggregate",
                json!({"annotations": annotations}),
                None,
                &[annotations.clone()],
                &[out],
            )?;
        }
    }
    Ok(())
}

fn cmd_export(args: ExportArgs) -> Result<()> {
    let embedder = embedder_file::load(&args.model)?;
    let lookup = match &args.decomp {
        Some(path) => load_corpus(path, args.allow_hyphen)?.0,
        None => DecompositionDataset::new(),
    };
    let splitter_model = args.splitter.as_ref().map(|p| splitter_file::load(p)).transpose()?;
    let mut resolver = Resolver::new(&lookup).with_vocab(embedder.vocab(), embedder.scheme());
    if let Some(m) = &splitter_model {
        resolver = resolver.with_model(m);
    }

    let mut rows = Vec::new();
    let mut skipped = Vec::new();
    for line in std::fs::read_to_string(&args.words)?.lines() {
        if line.is_empty() {
            continue;
        }
        match embedder.embed(line, |w| resolver.resolve(w).ok()) {
            syllemb::embedder::EmbedOutcome::Present(v) => rows.push((line.to_string(), v)),
            syllemb::embedder::EmbedOutcome::Missing(_) => skipped.push(line.to_string()),
        }
    }
    if rows.is_empty() {
        bail!("no word in {} could be embedded", args.words.display());
    }
    std::fs::write(&args.out, emb_text::write_rows(&rows))?;
    println!("exported {} embeddings, skipped {}", rows.len(), skipped.len());
    if !skipped.is_empty() {
        log::info!("skipped words: {skipped:?}");
    }

    let mut input_files = vec![args.model.clone(), args.words.clone()];
    input_files.extend(args.decomp.clone());
    input_files.extend(args.splitter.clone());
    write_manifest(
        "export",
        json!({
            "model": args.model,
            "words": args.words,
            "decomp": args.decomp,
            "splitter": args.splitter,
        }),
        None,
        &input_files,
        &[args.out.clone()],
    )?;
    Ok(())
}

fn main() {
    env_logger::Builder::from_env(env_logger::Env::default().default_filter_or("warn")).init();
    let cli = Cli::parse();
    let result = match cli.command {
        Command::Prepare { action } => cmd_prepare(action),
        Command::Analyze { action } => cmd_analyze(action),
        Command::Train { action } => cmd_train(action),
        Command::Split(args) => cmd_split(args),
        Command::Eval { action } => cmd_eval(action),
        Command::Annotate { action } => cmd_annotate(action),
        Command::Export(args) => cmd_export(args),
    };
    if let Err(e) = result {
        eprintln!("error: {e:#}");
        std::process::exit(1);
    }
}
