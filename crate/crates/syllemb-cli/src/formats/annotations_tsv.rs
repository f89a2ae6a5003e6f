//! Annotation files: `pair_id<TAB>word1<TAB>word2<TAB>s1<TAB>s2<TAB>...`
//! with integer scores on the five-point scale.

use std::path::Path;

use syllemb::eval::{AnnotationItem, AnnotationSet};

use super::FormatError;

pub fn parse(text: &str, path: &Path) -> Result<AnnotationSet, FormatError> {
    let mut items = Vec::new();
    for (i, line) in text.lines().enumerate() {
        let lineno = i + 1;
        if line.is_empty() {
            continue;
        }
        let fields: Vec<&str> = line.split('\t').collect();
        if fields.len() < 5 {
            return Err(FormatError::parse(
                path,
                lineno,
                "expected pair id, two words and at least two scores",
            ));
        }
        let mut scores = Vec::with_capacity(fields.len() - 3);
        for field in &fields[3..] {
            let s: u8 = field.parse().map_err(|_| {
                FormatError::parse(path, lineno, format!("non-integer score {field:?}"))
            })?;
            scores.push(s);
        }
        items.push(AnnotationItem { pair_id: fields[0].to_string(), scores });
    }
    Ok(AnnotationSet::new(items)?)
}

pub fn load(path: &Path) -> Result<AnnotationSet, FormatError> {
    let text = std::fs::read_to_string(path)?;
    parse(&text, path)
}

#[cfg(test)]
mod tests {
    use super::*;
    use std::path::PathBuf;

    fn path() -> PathBuf {
        PathBuf::from("ann.tsv")
    }

    #[test]
    fn parses_scores() {
        let set = parse("p1\tcat\tdog\t4\t3\t4\np2\tfish\tbird\t1\t2\t1\n", &path()).unwrap();
        assert_eq!(set.annotators(), 3);
        assert_eq!(set.len(), 2);
        assert_eq!(set.items()[0].scores, vec![4, 3, 4]);
    }

    #[test]
    fn fractional_scores_rejected() {
        let err = parse("p1\ta\tb\t2.5\t3\t4\n", &path()).unwrap_err();
        assert!(err.to_string().contains("non-integer"), "{err}");
    }

    #[test]
    fn out_of_scale_scores_rejected() {
        let err = parse("p1\ta\tb\t5\t3\t4\n", &path()).unwrap_err();
        assert!(err.to_string().contains("outside"), "{err}");
    }
}
