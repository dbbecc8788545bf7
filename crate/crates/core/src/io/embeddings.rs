//! Embedding files.
//!
//! Binary layout, all little-endian:
//!
//! ```text
//! offset  size  field
//! 0       4     magic "DRFT"
//! 4       4     format version (u32, currently 1)
//! 8       4     dimension M (u32, > 0)
//! 12      8     row count N (u64, > 0)
//! 20      4*M*N row-major f32 values
//! ```
//!
//! CSV holds one row per line as M comma-separated decimals. Lines starting
//! with `#` and blank lines are skipped.

use std::path::Path;

use super::bytes::ByteReader;
use super::FormatError;
use crate::engine::EmbeddingSet;
use crate::error::{Error, Result};

pub const EMBEDDING_MAGIC: [u8; 4] = *b"DRFT";
pub const EMBEDDING_VERSION: u32 = 1;
const HEADER_LEN: u64 = 20;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum EmbeddingFormat {
    Binary,
    Csv,
}

impl EmbeddingFormat {
    /// `.csv` (any case) means CSV; anything else is binary.
    pub fn from_path(path: &Path) -> Self {
        match path.extension().and_then(|e| e.to_str()) {
            Some(ext) if ext.eq_ignore_ascii_case("csv") => EmbeddingFormat::Csv,
            _ => EmbeddingFormat::Binary,
        }
    }
}

pub fn read_embeddings(bytes: &[u8], format: EmbeddingFormat, label: impl Into<String>) -> Result<EmbeddingSet> {
    let (dim, data) = match format {
        EmbeddingFormat::Binary => parse_binary(bytes)?,
        EmbeddingFormat::Csv => parse_csv(bytes)?,
    };
    EmbeddingSet::new(dim, data, label)
}

fn parse_binary(bytes: &[u8]) -> Result<(usize, Vec<f64>), FormatError> {
    let mut r = ByteReader::new(bytes);
    r.magic(&EMBEDDING_MAGIC)?;
    let version = r.u32()?;
    if version != EMBEDDING_VERSION {
        return Err(FormatError::UnsupportedVersion { offset: 4, version });
    }
    let dim = r.u32()?;
    if dim == 0 {
        return Err(FormatError::InvalidField {
            offset: 8,
            field: "dimension",
            reason: "must be positive".into(),
        });
    }
    let rows = r.u64()?;
    if rows == 0 {
        return Err(FormatError::InvalidField {
            offset: 12,
            field: "row count",
            reason: "must be positive".into(),
        });
    }
    let payload = (dim as u64)
        .checked_mul(rows)
        .and_then(|n| n.checked_mul(4))
        .ok_or_else(|| FormatError::InvalidField {
            offset: 12,
            field: "row count",
            reason: "payload size overflows".into(),
        })?;
    r.require(payload)?;
    let count = (payload / 4) as usize;
    let mut data = Vec::with_capacity(count);
    for _ in 0..count {
        data.push(r.finite_f32()? as f64);
    }
    r.finish()?;
    Ok((dim as usize, data))
}

fn parse_csv(bytes: &[u8]) -> Result<(usize, Vec<f64>), FormatError> {
    let text = std::str::from_utf8(bytes).map_err(|e| FormatError::InvalidUtf8 {
        offset: e.valid_up_to() as u64,
    })?;
    let mut dim = None;
    let mut data = Vec::new();
    for (i, line) in text.lines().enumerate() {
        let line_no = i + 1;
        let trimmed = line.trim();
        if trimmed.is_empty() || trimmed.starts_with('#') {
            continue;
        }
        let fields: Vec<&str> = trimmed.split(',').collect();
        let expected = *dim.get_or_insert(fields.len());
        if fields.len() != expected {
            return Err(FormatError::RaggedRow {
                line: line_no,
                expected,
                found: fields.len(),
            });
        }
        for (f, text) in fields.iter().enumerate() {
            let text = text.trim();
            match text.parse::<f64>() {
                Ok(v) if v.is_finite() => data.push(v),
                _ => {
                    return Err(FormatError::BadNumber {
                        line: line_no,
                        field: f + 1,
                        text: text.to_owned(),
                    })
                }
            }
        }
    }
    match dim {
        Some(dim) => Ok((dim, data)),
        None => Err(FormatError::NoRows),
    }
}

/// Serializes `set`. Binary output stores `f32`; values outside the `f32`
/// range are an error.
pub fn write_embeddings(set: &EmbeddingSet, format: EmbeddingFormat) -> Result<Vec<u8>> {
    match format {
        EmbeddingFormat::Binary => {
            let mut out = Vec::with_capacity(HEADER_LEN as usize + 4 * set.data().len());
            out.extend_from_slice(&EMBEDDING_MAGIC);
            out.extend_from_slice(&EMBEDDING_VERSION.to_le_bytes());
            let dim = u32::try_from(set.dim())
                .map_err(|_| Error::InvalidParameter("dimension does not fit in u32".into()))?;
            out.extend_from_slice(&dim.to_le_bytes());
            out.extend_from_slice(&(set.len() as u64).to_le_bytes());
            for (index, &v) in set.data().iter().enumerate() {
                let single = v as f32;
                if !single.is_finite() {
                    return Err(Error::NonFinite { index, value: v });
                }
                out.extend_from_slice(&single.to_le_bytes());
            }
            Ok(out)
        }
        EmbeddingFormat::Csv => {
            let mut out = String::new();
            for row in set.rows() {
                let line: Vec<String> = row.iter().map(|v| v.to_string()).collect();
                out.push_str(&line.join(","));
                out.push('\n');
            }
            Ok(out.into_bytes())
        }
    }
}
