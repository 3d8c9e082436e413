use std::path::PathBuf;

use thiserror::Error;

pub type Result<T> = std::result::Result<T, Error>;

#[derive(Debug, Error)]
pub enum Error {
    #[error("empty input")]
    EmptyInput,
    #[error("input length {len} exceeds exact-search guard {guard}; use split heuristic")]
    ExceedsGuard { len: usize, guard: usize },
    #[error("zero variance")]
    ZeroVariance,
    #[error("length mismatch: {0} vs {1}")]
    LengthMismatch(usize, usize),
    #[error("sample too small: {0}")]
    SampleTooSmall(String),
    #[error("block {0:?} absent from CTM table")]
    MissingBlock(String),
    #[error("alphabet mismatch: {0}")]
    Alphabet(String),
    #[error("invalid parameter: {0}")]
    InvalidParam(String),
    #[error("parse error at line {line}: {msg}")]
    Parse { line: usize, msg: String },
    #[error("empty table")]
    EmptyTable,
    #[error("duplicate block {block:?} at line {line}")]
    DuplicateBlock { block: String, line: usize },
    #[error("duplicate id {0:?}")]
    DuplicateId(String),
    #[error("row {id:?}: unknown payload kind {kind:?}")]
    UnknownPayloadKind { id: String, kind: String },
    #[error("row {id:?}: cannot read matrix {path}: {msg}")]
    MatrixPath { id: String, path: PathBuf, msg: String },
    #[error("payload does not match spec")]
    PayloadMismatch,
    #[error("invalid pathway")]
    InvalidPathway,
    #[error(transparent)]
    Io(#[from] std::io::Error),
    #[error(transparent)]
    Csv(#[from] csv::Error),
}
