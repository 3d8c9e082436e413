//! Complexity measures for strings and binary matrices: the assembly index
//! (exact and heuristic), Huffman/RLE/LZW/entropy baselines, CTM-backed
//! block decomposition, the statistics used to compare them, and generators
//! for sequences whose measured complexity misleads.

pub mod assembly;
pub mod bdm;
pub mod coding;
pub mod deceiver;
pub mod error;
pub mod exec;
pub mod ingest;
pub mod matrix;
pub mod measure;
pub mod numfmt;
pub mod stats;

pub use error::{Error, Result};
pub use exec::Execution;
