//! Report emission: evaluation JSON, plot-ready TSV tables, grid-search
//! tables and the per-run manifest.

use std::path::{Path, PathBuf};

use serde_json::{json, Value};
use sha2::{Digest, Sha256};

use syllemb::corpus::Histogram;
use syllemb::eval::{AgreementReport, EvalReport};
use syllemb::splitter::ResolveTallies;

/// Evaluation report with fields named after the in-memory type, plus the
/// resolver reason-code tallies when a resolver was involved.
pub fn eval_report_json(report: &EvalReport, tallies: Option<&ResolveTallies>) -> Value {
    let mut out = json!({
        "dataset": report.dataset,
        "spearman": report.spearman,
        "pairs_used": report.pairs_used,
        "pairs_total": report.pairs_total,
        "missing_words": report.missing_words,
        "missing_word_list": report.missing_word_list,
    });
    if let Some(t) = tallies {
        out["resolver"] = json!({
            "table_hits": t.table_hits,
            "splitter_resolutions": t.splitter_resolutions,
            "not_in_table": t.not_in_table,
            "decode_failures": t.decode_failures,
            "roundtrip_failures": t.roundtrip_failures,
            "unknown_syllables": t.unknown_syllables,
        });
    }
    out
}

/// Per-pair dump: gold score and cosine (empty when the pair was skipped).
pub fn per_pair_tsv(report: &EvalReport) -> String {
    let mut out = String::from("word1\tword2\tgold\tsimilarity\n");
    for p in &report.per_pair {
        let sim = p.similarity.map(|s| s.to_string()).unwrap_or_default();
        out.push_str(&format!("{}\t{}\t{}\t{}\n", p.word1, p.word2, p.gold, sim));
    }
    out
}

/// Plot-ready histogram rows; the overflow mass gets an open-ended last row.
pub fn histogram_tsv(h: &Histogram) -> String {
    let mut out = String::from("from\tto\tcount\n");
    for (i, &count) in h.bins().iter().enumerate() {
        let (lo, hi) = h.bin_range(i);
        out.push_str(&format!("{lo}\t{hi}\t{count}\n"));
    }
    out.push_str(&format!("{}\t\t{}\n", h.cap() + 1, h.overflow()));
    out
}

pub fn coverage_tsv(curve: &[(f64, f64)]) -> String {
    let mut out = String::from("fraction\tcoverage\n");
    for (fraction, coverage) in curve {
        out.push_str(&format!("{fraction}\t{coverage}\n"));
    }
    out
}

pub fn loss_history_tsv(rows: &[(usize, f64, f64, Option<f64>)]) -> String {
    let mut out = String::from("epoch\tlr\tmean_loss\teval_loss\n");
    for (epoch, lr, loss, eval) in rows {
        let eval = eval.map(|x| x.to_string()).unwrap_or_default();
        out.push_str(&format!("{epoch}\t{lr}\t{loss}\t{eval}\n"));
    }
    out
}

pub fn agreement_json(report: &AgreementReport) -> Value {
    json!({
        "pairwise": report
            .pairwise
            .iter()
            .map(|(a, b, r)| json!({"annotators": [a, b], "pearson": r}))
            .collect::<Vec<_>>(),
        "average": report.average,
    })
}

/// One grid-search cell; `accuracy` is absent for configurations skipped by
/// the head-count constraint.
pub struct GridCell {
    pub layers: usize,
    pub hidden: usize,
    pub embedding: usize,
    pub heads: usize,
    pub accuracy: Option<f64>,
}

/// Accuracy table with one row per (layers, hidden) and one column per
/// (embedding, heads), skipped combinations shown as `--`.
pub fn grid_tsv(cells: &[GridCell]) -> String {
    let mut embeddings: Vec<usize> = cells.iter().map(|c| c.embedding).collect();
    embeddings.sort_unstable();
    embeddings.dedup();
    let mut heads: Vec<usize> = cells.iter().map(|c| c.heads).collect();
    heads.sort_unstable();
    heads.dedup();
    let mut rows: Vec<(usize, usize)> = cells.iter().map(|c| (c.layers, c.hidden)).collect();
    rows.sort_unstable();
    rows.dedup();

    let mut out = String::from("layers\thidden");
    for &e in &embeddings {
        for &h in &heads {
            out.push_str(&format!("\te{e}_h{h}"));
        }
    }
    out.push('\n');
    for &(layers, hidden) in &rows {
        out.push_str(&format!("{layers}\t{hidden}"));
        for &e in &embeddings {
            for &h in &heads {
                let cell = cells.iter().find(|c| {
                    c.layers == layers && c.hidden == hidden && c.embedding == e && c.heads == h
                });
                match cell.and_then(|c| c.accuracy) {
                    Some(acc) => out.push_str(&format!("\t{:.1}", acc * 100.0)),
                    None => out.push_str("\t--"),
                }
            }
        }
        out.push('\n');
    }
    out
}

fn sha256_file(path: &Path) -> std::io::Result<String> {
    let bytes = std::fs::read(path)?;
    let mut hasher = Sha256::new();
    hasher.update(&bytes);
    Ok(format!("{:x}", hasher.finalize()))
}

/// Write `<primary_output>.manifest.json` echoing the resolved run: the
/// command, its arguments, the seed, checksummed inputs and the produced
/// artifacts. Identical manifests mean identical runs.
pub fn write_manifest(
    command: &str,
    args: Value,
    seed: Option<u64>,
    inputs: &[PathBuf],
    outputs: &[PathBuf],
) -> anyhow::Result<PathBuf> {
    let mut input_entries = Vec::new();
    for path in inputs {
        input_entries.push(json!({
            "path": path.display().to_string(),
            "sha256": sha256_file(path)?,
        }));
    }
    let manifest = json!({
        "tool": env!("CARGO_PKG_NAME"),
        "version": env!("CARGO_PKG_VERSION"),
        "command": command,
        "args": args,
        "seed": seed,
        "inputs": input_entries,
        "outputs": outputs.iter().map(|p| p.display().to_string()).collect::<Vec<_>>(),
    });
    let primary = outputs.first().ok_or_else(|| anyhow::anyhow!("no outputs"))?;
    let path = PathBuf::from(format!("{}.manifest.json", primary.display()));
    std::fs::write(&path, serde_json::to_string_pretty(&manifest)?)?;
    Ok(path)
}
