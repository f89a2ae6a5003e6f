//! Plain-text embedding tables: an optional `<count> <dim>` header line,
//! then one `token v1 ... vD` row per line, single spaces, `.` decimals.
//! Tokens are stored lowercased; the first occurrence of a token wins.

use std::path::Path;

use syllemb::corpus::EmbeddingTable;

use super::FormatError;

pub fn parse(text: &str, path: &Path) -> Result<EmbeddingTable, FormatError> {
    let mut table: Option<EmbeddingTable> = None;
    let mut declared: Option<(usize, usize)> = None;

    for (i, line) in text.lines().enumerate() {
        let lineno = i + 1;
        if line.is_empty() {
            continue;
        }
        let mut fields = line.split_whitespace();
        let token = fields.next().ok_or_else(|| FormatError::parse(path, lineno, "empty line"))?;
        let rest: Vec<&str> = fields.collect();

        if table.is_none() && declared.is_none() && rest.len() == 1 {
            if let (Ok(count), Ok(dim)) = (token.parse::<usize>(), rest[0].parse::<usize>()) {
                declared = Some((count, dim));
                continue;
            }
        }

        let mut vector = Vec::with_capacity(rest.len());
        for field in &rest {
            let x: f32 = field.parse().map_err(|_| {
                FormatError::parse(path, lineno, format!("non-numeric value {field:?}"))
            })?;
            vector.push(x);
        }
        if vector.is_empty() {
            return Err(FormatError::parse(path, lineno, "row has no values"));
        }

        let table = table.get_or_insert_with(|| {
            let dim = declared.map(|(_, d)| d).unwrap_or(vector.len());
            EmbeddingTable::new(dim)
        });
        if vector.len() != table.dim() {
            return Err(FormatError::parse(
                path,
                lineno,
                format!("row has {} values, expected {}", vector.len(), table.dim()),
            ));
        }
        table.insert_first(token.to_lowercase(), vector)?;
    }

    let table = table.ok_or_else(|| FormatError::parse(path, 1, "no embedding rows"))?;
    if let Some((count, _)) = declared {
        if table.len() != count {
            log::warn!(
                "{}: header declared {count} tokens, found {} (duplicates collapse)",
                path.display(),
                table.len()
            );
        }
    }
    Ok(table)
}

pub fn load(path: &Path) -> Result<EmbeddingTable, FormatError> {
    let text = std::fs::read_to_string(path)?;
    parse(&text, path)
}

/// Emit rows in the same format (no header), used when materializing
/// computed embeddings.
pub fn write_rows(rows: &[(String, Vec<f64>)]) -> String {
    let mut out = String::new();
    for (word, vector) in rows {
        out.push_str(word);
        for x in vector {
            out.push(' ');
            // f32 round-trip precision matches the storage precision.
            out.push_str(&format!("{}", *x as f32));
        }
        out.push('\n');
    }
    out
}

#[cfg(test)]
mod tests {
    use super::*;
    use std::path::PathBuf;

    fn path() -> PathBuf {
        PathBuf::from("emb.txt")
    }

    #[test]
    fn infers_dimension() {
        let t = parse("a 1 0\nb 0 1\n", &path()).unwrap();
        assert_eq!(t.dim(), 2);
        assert_eq!(t.len(), 2);
        assert_eq!(t.get("a"), Some(&[1.0f32, 0.0][..]));
    }

    #[test]
    fn header_sets_dimension() {
        let t = parse("2 3\na 1 0 0\nb 0 1 0\n", &path()).unwrap();
        assert_eq!(t.dim(), 3);
        assert_eq!(t.len(), 2);
    }

    #[test]
    fn one_dimensional_rows_are_not_headers() {
        // "a 5" could look like a header if both fields parsed as numbers;
        // a non-numeric token keeps it a data row.
        let t = parse("a 5\nb 7\n", &path()).unwrap();
        assert_eq!(t.dim(), 1);
        assert_eq!(t.get("b"), Some(&[7.0f32][..]));
    }

    #[test]
    fn dimension_mismatch_names_line() {
        let err = parse("a 1 0\nb 0\n", &path()).unwrap_err();
        assert!(err.to_string().contains("emb.txt:2"), "{err}");
    }

    #[test]
    fn non_numeric_field_rejected() {
        let err = parse("a 1 x\n", &path()).unwrap_err();
        assert!(err.to_string().contains("non-numeric"), "{err}");
    }

    #[test]
    fn casing_folded_first_wins() {
        let t = parse("Apple 1 0\napple 0 1\nAPPLE 5 5\n", &path()).unwrap();
        assert_eq!(t.len(), 1);
        assert_eq!(t.get("apple"), Some(&[1.0f32, 0.0][..]));
    }
}
