//! File formats: binary and CSV embeddings, binary reference profiles,
//! JSON drift/monitor report documents, score lists and SVG drift plots.
//!
//! Every reader reports malformed input as a [`FormatError`] naming the byte
//! offset or line where parsing failed.

mod bytes;
mod embeddings;
mod plot;
mod profile;
mod report;
mod scores;

use std::fs;
use std::path::Path;

use thiserror::Error;

pub use embeddings::{read_embeddings, write_embeddings, EmbeddingFormat, EMBEDDING_MAGIC, EMBEDDING_VERSION};
pub use plot::{emit_drift_plot, PlotOptions};
pub use profile::{load_profile, save_profile, PROFILE_MAGIC, PROFILE_VERSION};
pub use report::{load_report, save_report, ReportBody, ReportDocument, REPORT_SCHEMA_VERSION};
pub use scores::{read_scores, write_scores};

use crate::engine::{EmbeddingSet, ReferenceProfile};
use crate::error::Result;

#[derive(Debug, Error, PartialEq)]
pub enum FormatError {
    #[error("bad magic at byte 0: expected {expected:?}, found {found:?}")]
    BadMagic { expected: String, found: String },

    #[error("unsupported format version {version} at byte {offset}")]
    UnsupportedVersion { offset: u64, version: u32 },

    #[error("truncated input: needed {needed} bytes at byte {offset}, only {available} available")]
    Truncated { offset: u64, needed: u64, available: u64 },

    #[error("{extra} unexpected trailing bytes at byte {offset}")]
    TrailingBytes { offset: u64, extra: u64 },

    #[error("invalid {field} at byte {offset}: {reason}")]
    InvalidField {
        offset: u64,
        field: &'static str,
        reason: String,
    },

    #[error("non-finite value at byte {offset}")]
    NonFiniteValue { offset: u64 },

    #[error("invalid UTF-8 at byte {offset}")]
    InvalidUtf8 { offset: u64 },

    #[error("line {line}: expected {expected} fields, found {found}")]
    RaggedRow { line: usize, expected: usize, found: usize },

    #[error("line {line}, field {field}: '{text}' is not a finite number")]
    BadNumber { line: usize, field: usize, text: String },

    #[error("no data rows")]
    NoRows,

    #[error("malformed document at line {line}, column {column}: {message}")]
    Syntax { line: usize, column: usize, message: String },

    #[error("schema version {found} is not supported (expected {expected})")]
    SchemaMismatch { expected: u32, found: String },

    #[error("document kind '{found}' is not one of {expected}")]
    UnknownKind { expected: &'static str, found: String },

    #[error("invalid document: {0}")]
    InvalidDocument(String),
}

/// Reads an embedding file, choosing the format from the extension when
/// `format` is `None`. The set is labelled with the file stem.
pub fn read_embeddings_file(path: &Path, format: Option<EmbeddingFormat>) -> Result<EmbeddingSet> {
    let format = format.unwrap_or_else(|| EmbeddingFormat::from_path(path));
    let bytes = fs::read(path)?;
    let label = path
        .file_stem()
        .map(|s| s.to_string_lossy().into_owned())
        .unwrap_or_default();
    read_embeddings(&bytes, format, label)
}

pub fn write_embeddings_file(set: &EmbeddingSet, path: &Path, format: Option<EmbeddingFormat>) -> Result<()> {
    let format = format.unwrap_or_else(|| EmbeddingFormat::from_path(path));
    fs::write(path, write_embeddings(set, format)?)?;
    Ok(())
}

pub fn load_profile_file(path: &Path) -> Result<ReferenceProfile> {
    load_profile(&fs::read(path)?)
}

pub fn save_profile_file(profile: &ReferenceProfile, path: &Path) -> Result<()> {
    fs::write(path, save_profile(profile))?;
    Ok(())
}
