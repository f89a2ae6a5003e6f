use alloc::collections::{BTreeMap, BTreeSet};
use alloc::string::String;
use alloc::vec::Vec;

use super::correlation::pearson;
use super::EvalError;

/// Integer similarity judgements on a five-point scale (0..=4), one score
/// per annotator per pair, with at least two annotators.
#[derive(Debug, Clone)]
pub struct AnnotationSet {
    items: Vec<AnnotationItem>,
    annotators: usize,
}

#[derive(Debug, Clone)]
pub struct AnnotationItem {
    pub pair_id: String,
    pub scores: Vec<u8>,
}

impl AnnotationSet {
    pub fn new(items: Vec<AnnotationItem>) -> Result<Self, EvalError> {
        let annotators = items.first().map(|i| i.scores.len()).unwrap_or(0);
        if annotators < 2 {
            return Err(EvalError::TooFewObservations(annotators));
        }
        let mut seen: BTreeSet<&str> = BTreeSet::new();
        for item in &items {
            if item.scores.len() != annotators {
                return Err(EvalError::RaggedAnnotations { pair_id: item.pair_id.clone() });
            }
            if let Some(&bad) = item.scores.iter().find(|&&s| s > 4) {
                return Err(EvalError::ScoreOutOfScale {
                    pair_id: item.pair_id.clone(),
                    score: bad as u32,
                });
            }
            if !seen.insert(&item.pair_id) {
                return Err(EvalError::DuplicatePairId(item.pair_id.clone()));
            }
        }
        Ok(AnnotationSet { items, annotators })
    }

    pub fn annotators(&self) -> usize {
        self.annotators
    }

    pub fn items(&self) -> &[AnnotationItem] {
        &self.items
    }

    pub fn len(&self) -> usize {
        self.items.len()
    }

    pub fn is_empty(&self) -> bool {
        self.items.is_empty()
    }

    fn column(&self, annotator: usize) -> Vec<f64> {
        self.items.iter().map(|i| i.scores[annotator] as f64).collect()
    }
}

/// Pairwise Pearson correlations between annotators plus their mean.
/// A pair involving a constant annotator is undefined (`None`) and excluded
/// from the average.
#[derive(Debug, Clone)]
pub struct AgreementReport {
    /// `(annotator_a, annotator_b, correlation)` for every a < b.
    pub pairwise: Vec<(usize, usize, Option<f64>)>,
    pub average: Option<f64>,
}

pub fn annotator_agreement(set: &AnnotationSet) -> AgreementReport {
    let mut pairwise = Vec::new();
    let mut sum = 0.0;
    let mut defined = 0usize;
    for a in 0..set.annotators() {
        for b in (a + 1)..set.annotators() {
            let r = pearson(&set.column(a), &set.column(b)).ok();
            if let Some(v) = r {
                sum += v;
                defined += 1;
            }
            pairwise.push((a, b, r));
        }
    }
    let average = if defined > 0 { Some(sum / defined as f64) } else { None };
    AgreementReport { pairwise, average }
}

/// For each annotator, the pair ids where their score deviates strictly more
/// than `threshold` from the mean of the other annotators' scores. Requires
/// at least three annotators so that "the others" form a meaningful average.
pub fn flag_deviations(
    set: &AnnotationSet,
    threshold: f64,
) -> Result<Vec<Vec<String>>, EvalError> {
    if set.annotators() < 3 {
        return Err(EvalError::TooFewAnnotators(set.annotators()));
    }
    let mut flagged = alloc::vec![Vec::new(); set.annotators()];
    for item in set.items() {
        let total: f64 = item.scores.iter().map(|&s| s as f64).sum();
        for (a, &score) in item.scores.iter().enumerate() {
            let others = (total - score as f64) / (set.annotators() - 1) as f64;
            if (score as f64 - others).abs() > threshold {
                flagged[a].push(item.pair_id.clone());
            }
        }
    }
    Ok(flagged)
}

/// Arithmetic mean of all annotator scores per pair.
pub fn aggregate_final_scores(set: &AnnotationSet) -> BTreeMap<String, f64> {
    set.items()
        .iter()
        .map(|item| {
            let mean = item.scores.iter().map(|&s| s as f64).sum::<f64>()
                / item.scores.len() as f64;
            (item.pair_id.clone(), mean)
        })
        .collect()
}

#[cfg(test)]
mod tests {
    use super::*;
    use alloc::string::ToString;
    use alloc::vec;

    fn set(rows: &[(&str, &[u8])]) -> AnnotationSet {
        AnnotationSet::new(
            rows.iter()
                .map(|(id, scores)| AnnotationItem {
                    pair_id: id.to_string(),
                    scores: scores.to_vec(),
                })
                .collect(),
        )
        .unwrap()
    }

    #[test]
    fn identical_annotators_agree_perfectly() {
        let s = set(&[("p1", &[0, 0, 0]), ("p2", &[2, 2, 2]), ("p3", &[4, 4, 4])]);
        let report = annotator_agreement(&s);
        assert_eq!(report.pairwise.len(), 3);
        for (_, _, r) in &report.pairwise {
            assert_eq!(*r, Some(1.0));
        }
        assert_eq!(report.average, Some(1.0));
    }

    #[test]
    fn reversed_annotators_anticorrelate() {
        let s = set(&[("p1", &[0, 4]), ("p2", &[2, 2]), ("p3", &[4, 0])]);
        let report = annotator_agreement(&s);
        assert_eq!(report.pairwise, vec![(0, 1, Some(-1.0))]);
    }

    #[test]
    fn constant_annotator_flagged_undefined() {
        let s = set(&[("p1", &[0, 2]), ("p2", &[1, 2]), ("p3", &[4, 2])]);
        let report = annotator_agreement(&s);
        assert_eq!(report.pairwise, vec![(0, 1, None)]);
        assert_eq!(report.average, None);
    }

    #[test]
    fn three_annotator_agreement_oracle() {
        let s = set(&[
            ("p1", &[0, 1, 0]),
            ("p2", &[1, 1, 2]),
            ("p3", &[2, 3, 2]),
            ("p4", &[3, 2, 4]),
            ("p5", &[4, 4, 3]),
        ]);
        let report = annotator_agreement(&s);
        for (a, b, r) in &report.pairwise {
            let col = |i: usize| -> Vec<f64> {
                s.items().iter().map(|it| it.scores[i] as f64).collect()
            };
            let want = pearson(&col(*a), &col(*b)).unwrap();
            assert_eq!(*r, Some(want));
        }
        let mean = report
            .pairwise
            .iter()
            .map(|(_, _, r)| r.unwrap())
            .sum::<f64>()
            / 3.0;
        assert!((report.average.unwrap() - mean).abs() < 1e-15);
    }

    #[test]
    fn deviations_strictly_greater_than_threshold() {
        let s = set(&[
            ("p1", &[4, 1, 1]), // deviations 3, 1.5, 1.5 -> all flagged
            ("p2", &[2, 1, 2]), // deviations 0.5, 1, 0.5 -> none strictly > 1
            ("p3", &[3, 1, 0]), // deviations 2.5, 0.5, 2 -> annotators 0 and 2
        ]);
        let flagged = flag_deviations(&s, 1.0).unwrap();
        assert_eq!(flagged[0], vec!["p1".to_string(), "p3".to_string()]);
        assert_eq!(flagged[1], vec!["p1".to_string()]);
        assert_eq!(flagged[2], vec!["p1".to_string(), "p3".to_string()]);
    }

    #[test]
    fn deviation_needs_three_annotators() {
        let s = set(&[("p1", &[4, 1])]);
        assert_eq!(flag_deviations(&s, 1.0).unwrap_err(), EvalError::TooFewAnnotators(2));
    }

    #[test]
    fn aggregate_means() {
        let s = set(&[("p1", &[1, 2, 3]), ("p2", &[0, 0, 0]), ("p3", &[4, 4, 3])]);
        let scores = aggregate_final_scores(&s);
        assert_eq!(scores["p1"], 2.0);
        assert_eq!(scores["p2"], 0.0);
        assert!((scores["p3"] - 11.0 / 3.0).abs() < 1e-15);
    }

    #[test]
    fn construction_validates() {
        assert!(matches!(
            AnnotationSet::new(vec![AnnotationItem {
                pair_id: "p".to_string(),
                scores: vec![5, 1, 1],
            }]),
            Err(EvalError::ScoreOutOfScale { .. })
        ));
        assert!(matches!(
            AnnotationSet::new(vec![
                AnnotationItem { pair_id: "p".to_string(), scores: vec![1, 1] },
                AnnotationItem { pair_id: "q".to_string(), scores: vec![1, 1, 1] },
            ]),
            Err(EvalError::RaggedAnnotations { .. })
        ));
        assert!(matches!(
            AnnotationSet::new(vec![
                AnnotationItem { pair_id: "p".to_string(), scores: vec![1, 1] },
                AnnotationItem { pair_id: "p".to_string(), scores: vec![2, 2] },
            ]),
            Err(EvalError::DuplicatePairId(_))
        ));
    }
}
