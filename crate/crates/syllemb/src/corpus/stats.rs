use alloc::vec::Vec;

use super::DecompositionDataset;
use crate::math;

/// Occurrence histogram of syllable counts: bin `i` covers counts in
/// `[i*width+1, (i+1)*width]` up to `cap`; rarer-than-never is impossible and
/// anything above `cap` lands in `overflow`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Histogram {
    bin_width: usize,
    cap: usize,
    bins: Vec<usize>,
    overflow: usize,
}

impl Histogram {
    pub fn bin_width(&self) -> usize {
        self.bin_width
    }

    pub fn cap(&self) -> usize {
        self.cap
    }

    pub fn bins(&self) -> &[usize] {
        &self.bins
    }

    pub fn overflow(&self) -> usize {
        self.overflow
    }

    /// Inclusive count range covered by bin `i`.
    pub fn bin_range(&self, i: usize) -> (usize, usize) {
        (i * self.bin_width + 1, ((i + 1) * self.bin_width).min(self.cap))
    }

    /// Total mass: number of unique syllables.
    pub fn total(&self) -> usize {
        self.bins.iter().sum::<usize>() + self.overflow
    }

    pub fn first_bin_fraction(&self) -> f64 {
        if self.total() == 0 {
            return 0.0;
        }
        self.bins.first().copied().unwrap_or(0) as f64 / self.total() as f64
    }
}

/// Histogram of how many times each unique syllable occurs in the dataset.
pub fn syllable_histogram(ds: &DecompositionDataset, bin_width: usize, cap: usize) -> Histogram {
    assert!(bin_width >= 1, "bin width must be at least 1");
    assert!(cap >= bin_width, "cap must be at least one bin wide");
    let n_bins = cap.div_ceil(bin_width);
    let mut bins = alloc::vec![0usize; n_bins];
    let mut overflow = 0;
    for &count in ds.syllable_counts().values() {
        if count > cap {
            overflow += 1;
        } else {
            bins[(count - 1) / bin_width] += 1;
        }
    }
    Histogram { bin_width, cap, bins, overflow }
}

/// Fraction of words consisting entirely of syllables from the most frequent
/// `ceil(fraction * |syllables|)` syllables (descending count, lexicographic
/// tie-break). Monotone in `fraction` and exactly 1.0 at `fraction = 1`.
pub fn coverage_at_top_fraction(ds: &DecompositionDataset, fraction: f64) -> f64 {
    assert!((0.0..=1.0).contains(&fraction), "fraction must be in [0, 1]");
    let ranks = word_max_ranks(ds);
    let k = math::ceil_frac(fraction, ds.unique_syllables());
    coverage_at_k(&ranks, k, ds.len())
}

/// Coverage sampled at `steps + 1` evenly spaced fractions from 0 to 1,
/// returned as `(fraction, coverage)` rows.
pub fn coverage_curve(ds: &DecompositionDataset, steps: usize) -> Vec<(f64, f64)> {
    assert!(steps >= 1, "need at least one step");
    let ranks = word_max_ranks(ds);
    let total = ds.unique_syllables();
    (0..=steps)
        .map(|i| {
            let fraction = i as f64 / steps as f64;
            let k = math::ceil_frac(fraction, total);
            (fraction, coverage_at_k(&ranks, k, ds.len()))
        })
        .collect()
}

/// For every word, the worst (largest) frequency rank among its syllables;
/// a word is covered by the top-k set iff its max rank is below k.
fn word_max_ranks(ds: &DecompositionDataset) -> Vec<usize> {
    let mut ranked: Vec<(&str, usize)> =
        ds.syllable_counts().iter().map(|(s, &c)| (s.as_str(), c)).collect();
    ranked.sort_by(|a, b| b.1.cmp(&a.1).then_with(|| a.0.cmp(b.0)));
    let rank_of: alloc::collections::BTreeMap<&str, usize> =
        ranked.iter().enumerate().map(|(i, &(s, _))| (s, i)).collect();
    ds.iter()
        .map(|d| {
            d.syllables()
                .iter()
                .map(|s| rank_of[s.as_str()])
                .max()
                .expect("decompositions are nonempty")
        })
        .collect()
}

fn coverage_at_k(max_ranks: &[usize], k: usize, n_words: usize) -> f64 {
    if n_words == 0 {
        return 0.0;
    }
    let covered = max_ranks.iter().filter(|&&r| r < k).count();
    covered as f64 / n_words as f64
}
