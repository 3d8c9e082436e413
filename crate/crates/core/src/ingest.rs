//! Dataset loading and preprocessing.
//!
//! File formats (all UTF-8):
//! - dataset CSV: `id,category,payload_kind,payload,reference_value`, where
//!   `payload_kind` is `string` or `matrix`; a matrix payload is the path of
//!   a matrix CSV, relative to the dataset file.
//! - matrix CSV: one comma-separated row per line, no header.
//! - results CSV: `id,category,measure,value,metadata`.

use std::collections::HashSet;
use std::fmt::Write as _;
use std::io::{Read, Write};
use std::path::{Path, PathBuf};

use crate::error::{Error, Result};
use crate::matrix::{BinaryMatrix, Matrix};
use crate::numfmt::sig12;

pub const DATASET_HEADER: [&str; 5] = ["id", "category", "payload_kind", "payload", "reference_value"];
pub const RESULTS_HEADER: [&str; 5] = ["id", "category", "measure", "value", "metadata"];

/// UTF-8 bytes of `s` as `0`/`1` characters, most significant bit first.
pub fn text_to_bits(s: &str) -> String {
    let mut out = String::with_capacity(s.len() * 8);
    for b in s.bytes() {
        let _ = write!(out, "{b:08b}");
    }
    out
}

/// 1 where an entry is strictly above `threshold`, else 0.
pub fn binarize_matrix(m: &Matrix<f64>, threshold: f64) -> BinaryMatrix {
    m.map(|&v| u8::from(v > threshold))
}

/// Pairwise Euclidean distances between the atoms of a V2000 molfile
/// (the first record of an SDF). Only the counts line and atom block are
/// read.
pub fn sdf_distance_matrix(sdf_text: &str) -> Result<Matrix<f64>> {
    let lines: Vec<&str> = sdf_text.lines().collect();
    let err = |line: usize, msg: String| Error::Parse { line, msg };
    let counts = lines.get(3).ok_or_else(|| err(4, "missing counts line".into()))?;
    if counts.contains("V3000") {
        return Err(err(4, "V3000 molfiles are not supported".into()));
    }
    let atoms: usize = fixed_field(counts, 0, 3)
        .and_then(|f| f.parse().ok())
        .or_else(|| counts.split_whitespace().next().and_then(|f| f.parse().ok()))
        .ok_or_else(|| err(4, format!("malformed counts line {counts:?}")))?;
    if atoms == 0 {
        return Err(err(4, "counts line declares no atoms".into()));
    }
    let mut coords = Vec::with_capacity(atoms);
    for k in 0..atoms {
        let line_no = 5 + k;
        let line = lines
            .get(4 + k)
            .filter(|l| !l.starts_with("M  ") && !l.starts_with("$$$$"))
            .ok_or_else(|| err(line_no, format!("atom block ends after {k} of {atoms} atoms")))?;
        coords.push(parse_atom(line).ok_or_else(|| err(line_no, format!("non-numeric coordinates in {line:?}")))?);
    }
    let mut rows = vec![vec![0.0; atoms]; atoms];
    for i in 0..atoms {
        for j in i + 1..atoms {
            let d = coords[i]
                .iter()
                .zip(&coords[j])
                .map(|(a, b): (&f64, &f64)| (a - b).powi(2))
                .sum::<f64>()
                .sqrt();
            rows[i][j] = d;
            rows[j][i] = d;
        }
    }
    Matrix::from_rows(rows)
}

fn fixed_field(line: &str, start: usize, end: usize) -> Option<&str> {
    line.get(start..end.min(line.len())).map(str::trim).filter(|f| !f.is_empty())
}

/// Coordinates of an atom line: `x y z` in 10-column fields followed by an
/// element symbol. Lines without the symbol (e.g. bond lines) are rejected.
fn parse_atom(line: &str) -> Option<[f64; 3]> {
    let is_symbol = |f: &str| f.chars().next().is_some_and(|c| c.is_ascii_alphabetic() || c == '*');
    let fixed = (0..3)
        .map(|i| fixed_field(line, 10 * i, 10 * i + 10).and_then(|f| f.parse::<f64>().ok()))
        .collect::<Option<Vec<f64>>>()
        .filter(|_| fixed_field(line, 30, 34).is_some_and(is_symbol));
    let coords = fixed.or_else(|| {
        let fields: Vec<&str> = line.split_whitespace().collect();
        if fields.len() < 4 || !is_symbol(fields[3]) {
            return None;
        }
        fields[..3].iter().map(|f| f.parse().ok()).collect()
    })?;
    Some([coords[0], coords[1], coords[2]])
}

pub fn parse_matrix_csv(text: &str) -> Result<Matrix<f64>> {
    let mut rows = Vec::new();
    for (i, line) in text.lines().enumerate() {
        if line.trim().is_empty() {
            continue;
        }
        let row = line
            .split(',')
            .map(|f| f.trim().parse::<f64>())
            .collect::<std::result::Result<Vec<f64>, _>>()
            .map_err(|e| Error::Parse { line: i + 1, msg: e.to_string() })?;
        rows.push(row);
    }
    Matrix::from_rows(rows)
}

pub fn read_matrix_csv(path: &Path) -> Result<Matrix<f64>> {
    parse_matrix_csv(&std::fs::read_to_string(path)?)
}

/// Writes any numeric matrix as headerless CSV with 12 significant digits.
pub fn write_matrix_csv<T: Copy + Into<f64>>(m: &Matrix<T>, path: &Path) -> Result<()> {
    let mut out = String::new();
    for row in m.iter_rows() {
        let fields: Vec<String> = row.iter().map(|&v| sig12(v.into())).collect();
        out.push_str(&fields.join(","));
        out.push('\n');
    }
    std::fs::write(path, out)?;
    Ok(())
}

#[derive(Debug, Clone, PartialEq)]
pub enum Payload {
    Text(String),
    Matrix { path: String, data: Matrix<f64> },
}

impl Payload {
    pub fn kind(&self) -> &'static str {
        match self {
            Payload::Text(_) => "string",
            Payload::Matrix { .. } => "matrix",
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct DatasetRecord {
    pub id: String,
    pub category: String,
    pub payload: Payload,
    pub reference_value: Option<f64>,
}

impl DatasetRecord {
    pub fn text(id: impl Into<String>, category: impl Into<String>, payload: impl Into<String>) -> Self {
        Self {
            id: id.into(),
            category: category.into(),
            payload: Payload::Text(payload.into()),
            reference_value: None,
        }
    }
}

fn check_header(headers: &csv::StringRecord, expected: &[&str]) -> Result<()> {
    let got: Vec<&str> = headers.iter().map(str::trim).collect();
    if got != expected {
        return Err(Error::Parse {
            line: 1,
            msg: format!("expected header {:?}, got {:?}", expected.join(","), got.join(",")),
        });
    }
    Ok(())
}

/// Loads a dataset CSV, reading matrix payloads relative to its directory.
pub fn load_dataset(path: &Path) -> Result<Vec<DatasetRecord>> {
    let base = path.parent().map(Path::to_path_buf).unwrap_or_default();
    load_dataset_from(std::fs::File::open(path)?, &base)
}

pub fn load_dataset_from<R: Read>(reader: R, base: &Path) -> Result<Vec<DatasetRecord>> {
    let mut reader = csv::Reader::from_reader(reader);
    check_header(reader.headers()?, &DATASET_HEADER)?;
    let mut seen = HashSet::new();
    let mut records = Vec::new();
    for row in reader.records() {
        let row = row?;
        let line = row.position().map_or(0, |p| p.line() as usize);
        let id = row[0].to_string();
        if id.is_empty() {
            return Err(Error::Parse { line, msg: "empty id".into() });
        }
        if !seen.insert(id.clone()) {
            return Err(Error::DuplicateId(id));
        }
        let raw = &row[3];
        if raw.is_empty() {
            return Err(Error::Parse { line, msg: format!("row {id:?}: empty payload") });
        }
        let payload = match &row[2] {
            "string" => Payload::Text(raw.to_string()),
            "matrix" => {
                let full: PathBuf = base.join(raw);
                let data = read_matrix_csv(&full).map_err(|e| Error::MatrixPath {
                    id: id.clone(),
                    path: full.clone(),
                    msg: e.to_string(),
                })?;
                Payload::Matrix { path: raw.to_string(), data }
            }
            other => {
                return Err(Error::UnknownPayloadKind { id, kind: other.to_string() });
            }
        };
        let reference_value = match row[4].trim() {
            "" => None,
            v => Some(v.parse().map_err(|_| Error::Parse {
                line,
                msg: format!("row {id:?}: reference value {v:?} is not a number"),
            })?),
        };
        records.push(DatasetRecord {
            id,
            category: row[1].to_string(),
            payload,
            reference_value,
        });
    }
    Ok(records)
}

/// Writes dataset rows; matrix payloads are written as their path only.
pub fn write_dataset<W: Write>(records: &[DatasetRecord], out: W) -> Result<()> {
    let mut w = csv::Writer::from_writer(out);
    w.write_record(DATASET_HEADER)?;
    for r in records {
        let payload = match &r.payload {
            Payload::Text(s) => s.as_str(),
            Payload::Matrix { path, .. } => path.as_str(),
        };
        let reference = r.reference_value.map(sig12).unwrap_or_default();
        w.write_record([r.id.as_str(), &r.category, r.payload.kind(), payload, &reference])?;
    }
    w.flush()?;
    Ok(())
}

#[derive(Debug, Clone, PartialEq)]
pub struct MeasureResult {
    pub id: String,
    pub category: String,
    pub measure: String,
    pub value: f64,
    pub metadata: String,
}

pub fn write_results<W: Write>(results: &[MeasureResult], out: W) -> Result<()> {
    let mut w = csv::Writer::from_writer(out);
    w.write_record(RESULTS_HEADER)?;
    for r in results {
        w.write_record([r.id.as_str(), &r.category, &r.measure, &sig12(r.value), &r.metadata])?;
    }
    w.flush()?;
    Ok(())
}

pub fn read_results<R: Read>(reader: R) -> Result<Vec<MeasureResult>> {
    let mut reader = csv::Reader::from_reader(reader);
    check_header(reader.headers()?, &RESULTS_HEADER)?;
    let mut out = Vec::new();
    for row in reader.records() {
        let row = row?;
        let line = row.position().map_or(0, |p| p.line() as usize);
        let value = row[3].trim().parse::<f64>().map_err(|_| Error::Parse {
            line,
            msg: format!("value {:?} is not a number", &row[3]),
        })?;
        out.push(MeasureResult {
            id: row[0].to_string(),
            category: row[1].to_string(),
            measure: row[2].to_string(),
            value,
            metadata: row[4].to_string(),
        });
    }
    Ok(out)
}
