//! The binary container shared by model files and serialized training sets:
//!
//! ```text
//! magic "SYLC" | version u32 LE | header_len u32 LE | header JSON (UTF-8)
//! | concatenated little-endian f32 arrays, in header order
//! ```
//!
//! The header names the payload arrays with their shapes, so files are
//! self-describing; the `meta` object carries format-specific fields.

use std::fs::File;
use std::io::{BufReader, BufWriter, Read, Write};
use std::path::Path;

use serde::{Deserialize, Serialize};

use super::FormatError;

const MAGIC: &[u8; 4] = b"SYLC";
const VERSION: u32 = 1;

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct ArraySpec {
    pub name: String,
    pub rows: usize,
    pub cols: usize,
}

#[derive(Debug, Serialize, Deserialize)]
struct Header {
    format: String,
    version: u32,
    meta: serde_json::Value,
    arrays: Vec<ArraySpec>,
}

#[derive(Debug)]
pub struct Container {
    pub format: String,
    pub meta: serde_json::Value,
    pub arrays: Vec<(ArraySpec, Vec<f32>)>,
}

impl Container {
    pub fn new(format: impl Into<String>, meta: serde_json::Value) -> Self {
        Container { format: format.into(), meta, arrays: Vec::new() }
    }

    pub fn push_array(&mut self, name: impl Into<String>, rows: usize, cols: usize, data: Vec<f32>) {
        let name = name.into();
        assert_eq!(data.len(), rows * cols, "array {name} shape mismatch");
        self.arrays.push((ArraySpec { name, rows, cols }, data));
    }

    pub fn array(&self, name: &str) -> Option<(&ArraySpec, &[f32])> {
        self.arrays
            .iter()
            .find(|(spec, _)| spec.name == name)
            .map(|(spec, data)| (spec, data.as_slice()))
    }

    pub fn write_to(&self, w: &mut impl Write) -> Result<(), FormatError> {
        let header = Header {
            format: self.format.clone(),
            version: VERSION,
            meta: self.meta.clone(),
            arrays: self.arrays.iter().map(|(spec, _)| spec.clone()).collect(),
        };
        let header_bytes = serde_json::to_vec(&header).expect("header serializes");
        w.write_all(MAGIC)?;
        w.write_all(&VERSION.to_le_bytes())?;
        w.write_all(&(header_bytes.len() as u32).to_le_bytes())?;
        w.write_all(&header_bytes)?;
        for (_, data) in &self.arrays {
            for &x in data {
                w.write_all(&x.to_le_bytes())?;
            }
        }
        Ok(())
    }

    pub fn read_from(r: &mut impl Read) -> Result<Self, FormatError> {
        let mut magic = [0u8; 4];
        r.read_exact(&mut magic)?;
        if &magic != MAGIC {
            return Err(FormatError::Container("bad magic bytes".into()));
        }
        let mut word = [0u8; 4];
        r.read_exact(&mut word)?;
        let version = u32::from_le_bytes(word);
        if version != VERSION {
            return Err(FormatError::Container(format!("unsupported version {version}")));
        }
        r.read_exact(&mut word)?;
        let header_len = u32::from_le_bytes(word) as usize;
        let mut header_bytes = vec![0u8; header_len];
        r.read_exact(&mut header_bytes)?;
        let header: Header = serde_json::from_slice(&header_bytes)
            .map_err(|e| FormatError::Container(format!("header: {e}")))?;

        let mut arrays = Vec::with_capacity(header.arrays.len());
        for spec in header.arrays {
            let mut bytes = vec![0u8; spec.rows * spec.cols * 4];
            r.read_exact(&mut bytes)?;
            let data: Vec<f32> = bytes
                .chunks_exact(4)
                .map(|c| f32::from_le_bytes([c[0], c[1], c[2], c[3]]))
                .collect();
            arrays.push((spec, data));
        }
        Ok(Container { format: header.format, meta: header.meta, arrays })
    }

    pub fn save(&self, path: &Path) -> Result<(), FormatError> {
        let mut w = BufWriter::new(File::create(path)?);
        self.write_to(&mut w)?;
        w.flush()?;
        Ok(())
    }

    pub fn load(path: &Path) -> Result<Self, FormatError> {
        let mut r = BufReader::new(File::open(path)?);
        let out = Self::read_from(&mut r)?;
        Ok(out)
    }

    pub fn expect_format(&self, format: &str) -> Result<(), FormatError> {
        if self.format != format {
            return Err(FormatError::Container(format!(
                "expected a {format} file, found {}",
                self.format
            )));
        }
        Ok(())
    }

    /// Fetch one array, checking its shape.
    pub fn take(&self, name: &str, rows: usize, cols: usize) -> Result<Vec<f64>, FormatError> {
        let (spec, data) = self
            .array(name)
            .ok_or_else(|| FormatError::Container(format!("missing array {name}")))?;
        if spec.rows != rows || spec.cols != cols {
            return Err(FormatError::Container(format!(
                "array {name} is {}x{}, expected {rows}x{cols}",
                spec.rows, spec.cols
            )));
        }
        Ok(widen(data))
    }
}

pub fn narrow(data: &[f64]) -> Vec<f32> {
    data.iter().map(|&x| x as f32).collect()
}

pub fn widen(data: &[f32]) -> Vec<f64> {
    data.iter().map(|&x| x as f64).collect()
}

pub(crate) fn meta_str(meta: &serde_json::Value, key: &str) -> Result<String, FormatError> {
    meta.get(key)
        .and_then(|v| v.as_str())
        .map(str::to_string)
        .ok_or_else(|| FormatError::Container(format!("meta field {key} missing or not a string")))
}

pub(crate) fn meta_usize(meta: &serde_json::Value, key: &str) -> Result<usize, FormatError> {
    meta.get(key)
        .and_then(|v| v.as_u64())
        .map(|v| v as usize)
        .ok_or_else(|| FormatError::Container(format!("meta field {key} missing or not an integer")))
}

pub(crate) fn meta_string_list(
    meta: &serde_json::Value,
    key: &str,
) -> Result<Vec<String>, FormatError> {
    meta.get(key)
        .and_then(|v| v.as_array())
        .map(|a| a.iter().filter_map(|x| x.as_str().map(str::to_string)).collect())
        .ok_or_else(|| FormatError::Container(format!("meta field {key} missing or not a list")))
}

pub(crate) fn meta_char(meta: &serde_json::Value, key: &str) -> Result<char, FormatError> {
    let s = meta_str(meta, key)?;
    let mut chars = s.chars();
    match (chars.next(), chars.next()) {
        (Some(c), None) => Ok(c),
        _ => Err(FormatError::Container(format!("meta field {key} must be one character"))),
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn roundtrip() {
        let mut c = Container::new("test", serde_json::json!({"k": "v"}));
        c.push_array("a", 2, 3, vec![1.0, 2.0, 3.0, 4.0, 5.0, 6.0]);
        c.push_array("b", 1, 2, vec![-1.5, 0.25]);
        let mut bytes = Vec::new();
        c.write_to(&mut bytes).unwrap();
        assert_eq!(&bytes[..4], b"SYLC");

        let back = Container::read_from(&mut bytes.as_slice()).unwrap();
        assert_eq!(back.format, "test");
        assert_eq!(back.meta["k"], "v");
        assert_eq!(back.take("a", 2, 3).unwrap(), vec![1.0, 2.0, 3.0, 4.0, 5.0, 6.0]);
        assert_eq!(back.take("b", 1, 2).unwrap(), vec![-1.5, 0.25]);
        assert!(back.take("a", 3, 2).is_err());
        assert!(back.take("zzz", 1, 1).is_err());
    }

    #[test]
    fn rejects_garbage() {
        let bytes = b"NOPE0000";
        assert!(Container::read_from(&mut bytes.as_slice()).is_err());
    }
}
