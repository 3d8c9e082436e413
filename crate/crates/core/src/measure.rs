//! Named measures applied to dataset records.

use std::fmt;
use std::str::FromStr;

use crate::assembly::{assembly_index_exact_with, assembly_index_split, DEFAULT_EXACT_GUARD};
use crate::bdm::{bdm_1d, bdm_2d, BdmParams, BdmValue, CtmTable};
use crate::coding::{huffman, lzw_encode, rle_encode, shannon_entropy};
use crate::error::{Error, Result};
use crate::exec::{self, Execution};
use crate::ingest::{binarize_matrix, text_to_bits, DatasetRecord, MeasureResult, Payload};
use crate::matrix::BinaryMatrix;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum Measure {
    Entropy,
    Huffman,
    Rle,
    Lzw,
    MaExact,
    MaSplit,
    Bdm1d,
    Bdm2d,
}

impl Measure {
    pub const ALL: [Measure; 8] = [
        Measure::Entropy,
        Measure::Huffman,
        Measure::Rle,
        Measure::Lzw,
        Measure::MaExact,
        Measure::MaSplit,
        Measure::Bdm1d,
        Measure::Bdm2d,
    ];

    pub fn name(self) -> &'static str {
        match self {
            Measure::Entropy => "entropy",
            Measure::Huffman => "huffman",
            Measure::Rle => "rle",
            Measure::Lzw => "lzw",
            Measure::MaExact => "ma_exact",
            Measure::MaSplit => "ma_split",
            Measure::Bdm1d => "bdm1d",
            Measure::Bdm2d => "bdm2d",
        }
    }

    /// Parses a comma-separated list such as `huffman,ma_split`.
    pub fn parse_list(list: &str) -> Result<Vec<Measure>> {
        let out: Vec<Measure> = list
            .split(',')
            .map(str::trim)
            .filter(|s| !s.is_empty())
            .map(str::parse)
            .collect::<Result<_>>()?;
        if out.is_empty() {
            return Err(Error::InvalidParam("no measures requested".into()));
        }
        Ok(out)
    }
}

impl fmt::Display for Measure {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl FromStr for Measure {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        Measure::ALL
            .into_iter()
            .find(|m| m.name() == s)
            .ok_or_else(|| Error::InvalidParam(format!("unknown measure {s:?}")))
    }
}

/// Tables and parameters shared by every record of a run.
#[derive(Debug, Clone)]
pub struct MeasureContext {
    pub ctm_1d: Option<CtmTable>,
    pub ctm_2d: Option<CtmTable>,
    pub bdm: BdmParams,
    /// Required for matrix payloads.
    pub threshold: Option<f64>,
    pub exact_guard: usize,
    pub exec: Execution,
}

impl Default for MeasureContext {
    fn default() -> Self {
        Self {
            ctm_1d: None,
            ctm_2d: None,
            bdm: BdmParams::default(),
            threshold: None,
            exact_guard: DEFAULT_EXACT_GUARD,
            exec: Execution::default(),
        }
    }
}

impl MeasureContext {
    /// Checks up front that every requested measure has what it needs.
    pub fn check(&self, measures: &[Measure]) -> Result<()> {
        for m in measures {
            match m {
                Measure::Bdm1d if self.ctm_1d.is_none() => {
                    return Err(Error::InvalidParam("bdm1d needs a 1D CTM table (--ctm-table or --toy-ctm)".into()))
                }
                Measure::Bdm2d if self.ctm_2d.is_none() => {
                    return Err(Error::InvalidParam("bdm2d needs a 2D CTM table (--ctm-table or --toy-ctm)".into()))
                }
                _ => {}
            }
        }
        Ok(())
    }
}

/// A measured value plus a short `key=value;...` description.
#[derive(Debug, Clone, PartialEq)]
pub struct Measured {
    pub value: f64,
    pub metadata: String,
}

fn bdm_meta(v: &BdmValue) -> Measured {
    Measured {
        value: v.bits,
        metadata: format!(
            "blocks={};distinct={};surrogate={}",
            v.blocks, v.distinct_blocks, v.surrogate_blocks
        ),
    }
}

fn table(t: &Option<CtmTable>, m: Measure) -> Result<&CtmTable> {
    t.as_ref().ok_or_else(|| Error::InvalidParam(format!("{m} needs a CTM table")))
}

/// Measures a string. `bdm1d` runs on `bits` when given (already binary),
/// otherwise on the UTF-8 bit expansion of `s`.
fn measure_str(s: &str, bits: Option<&str>, m: Measure, ctx: &MeasureContext) -> Result<Measured> {
    if s.is_empty() {
        return Err(Error::EmptyInput);
    }
    let plain = |value: f64, metadata: String| Ok(Measured { value, metadata });
    match m {
        Measure::Entropy => plain(shannon_entropy(s)?, String::new()),
        Measure::Huffman => {
            let h = huffman(s)?;
            plain(h.total_bits as f64, format!("levels={}", h.tree_levels))
        }
        Measure::Rle => {
            let (_, len) = rle_encode(s);
            plain(len as f64, String::new())
        }
        Measure::Lzw => {
            let l = lzw_encode(s)?;
            plain(l.bit_length as f64, format!("codes={};dict={}", l.codes.len(), l.dict_size_final))
        }
        Measure::MaExact => {
            let r = assembly_index_exact_with(s, Some(ctx.exact_guard), ctx.exec)?;
            plain(r.index as f64, String::new())
        }
        Measure::MaSplit => plain(assembly_index_split(s)?.index as f64, String::new()),
        Measure::Bdm1d => {
            let owned;
            let input = match bits {
                Some(b) => b,
                None => {
                    owned = text_to_bits(s);
                    &owned
                }
            };
            Ok(bdm_meta(&bdm_1d(input, table(&ctx.ctm_1d, m)?, &ctx.bdm)?))
        }
        Measure::Bdm2d => Err(Error::InvalidParam("bdm2d needs a matrix payload".into())),
    }
}

/// Measures a binarized matrix: `bdm2d` directly, everything else on the
/// row-major bit string.
fn measure_matrix(bm: &BinaryMatrix, m: Measure, ctx: &MeasureContext) -> Result<Measured> {
    if m == Measure::Bdm2d {
        return Ok(bdm_meta(&bdm_2d(bm, table(&ctx.ctm_2d, m)?, &ctx.bdm)?));
    }
    let bits = bm.to_bit_string();
    measure_str(&bits, Some(&bits), m, ctx)
}

pub fn measure_payload(payload: &Payload, m: Measure, ctx: &MeasureContext) -> Result<Measured> {
    match payload {
        Payload::Text(s) => measure_str(s, None, m, ctx),
        Payload::Matrix { data, .. } => {
            let t = ctx
                .threshold
                .ok_or_else(|| Error::InvalidParam("matrix payloads need a binarization threshold".into()))?;
            measure_matrix(&binarize_matrix(data, t), m, ctx)
        }
    }
}

/// Measures one record; rows follow the order of `measures`.
pub fn measure_record(rec: &DatasetRecord, measures: &[Measure], ctx: &MeasureContext) -> Result<Vec<MeasureResult>> {
    measures
        .iter()
        .map(|&m| {
            let v = measure_payload(&rec.payload, m, ctx).map_err(|e| match e {
                Error::InvalidParam(msg) => Error::InvalidParam(format!("record {:?}: {msg}", rec.id)),
                other => other,
            })?;
            Ok(MeasureResult {
                id: rec.id.clone(),
                category: rec.category.clone(),
                measure: m.name().to_string(),
                value: v.value,
                metadata: v.metadata,
            })
        })
        .collect()
}

/// Measures every record, possibly in parallel; rows come out in input
/// order × measure order. The first failing record (in input order) wins.
pub fn measure_dataset(records: &[DatasetRecord], measures: &[Measure], ctx: &MeasureContext) -> Result<Vec<MeasureResult>> {
    ctx.check(measures)?;
    let rows = exec::map_ordered(records, ctx.exec, |r| measure_record(r, measures, ctx));
    let mut out = Vec::with_capacity(records.len() * measures.len());
    for r in rows {
        out.extend(r?);
    }
    Ok(out)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::bdm::{toy_table_1d, toy_table_2d};
    use crate::matrix::Matrix;

    fn toy_ctx() -> MeasureContext {
        MeasureContext {
            ctm_1d: Some(toy_table_1d()),
            ctm_2d: Some(toy_table_2d()),
            threshold: Some(0.5),
            ..MeasureContext::default()
        }
    }

    #[test]
    fn names_round_trip() {
        for m in Measure::ALL {
            assert_eq!(m.name().parse::<Measure>().unwrap(), m);
        }
        assert_eq!(
            Measure::parse_list("huffman, ma_split").unwrap(),
            vec![Measure::Huffman, Measure::MaSplit]
        );
        assert!(Measure::parse_list("huffman,zip").is_err());
        assert!(Measure::parse_list(" , ").is_err());
    }

    #[test]
    fn abracadabra_values() {
        let ctx = toy_ctx();
        let p = Payload::Text("ABRACADABRA".into());
        let get = |m| measure_payload(&p, m, &ctx).unwrap().value;
        assert_eq!(get(Measure::MaExact), 7.0);
        assert_eq!(get(Measure::MaSplit), 7.0);
        assert_eq!(get(Measure::Huffman), 23.0);
        assert_eq!(get(Measure::Rle), 22.0);
        // 88 bits in 44 blocks of 2.
        let bdm = measure_payload(&p, Measure::Bdm1d, &ctx).unwrap();
        assert!(bdm.metadata.starts_with("blocks=44;"));
    }

    #[test]
    fn matrix_payloads_use_threshold() {
        let data = Matrix::from_rows(vec![vec![0.0; 5]; 5]).unwrap();
        let p = Payload::Matrix { path: "m.csv".into(), data };
        let v = measure_payload(&p, Measure::Bdm2d, &toy_ctx()).unwrap();
        assert_eq!(v.value, 6.0);
        let v = measure_payload(&p, Measure::Rle, &toy_ctx()).unwrap();
        assert_eq!(v.value, 3.0); // "025"
        let no_threshold = MeasureContext { threshold: None, ..toy_ctx() };
        assert!(matches!(
            measure_payload(&p, Measure::Rle, &no_threshold),
            Err(Error::InvalidParam(_))
        ));
    }

    #[test]
    fn missing_tables_are_reported_before_work() {
        let ctx = MeasureContext::default();
        assert!(ctx.check(&[Measure::Bdm1d]).is_err());
        assert!(ctx.check(&[Measure::Bdm2d]).is_err());
        assert!(ctx.check(&[Measure::Huffman, Measure::MaSplit]).is_ok());
    }

    #[test]
    fn dataset_rows_follow_input_and_measure_order() {
        let recs = vec![
            DatasetRecord::text("a", "x", "AAAA"),
            DatasetRecord::text("b", "y", "ABCD"),
            DatasetRecord::text("c", "x", "ABAB"),
        ];
        let ms = [Measure::Rle, Measure::Entropy];
        for exec in [Execution::Sequential, Execution::Parallel] {
            let ctx = MeasureContext { exec, ..MeasureContext::default() };
            let rows = measure_dataset(&recs, &ms, &ctx).unwrap();
            let keys: Vec<_> = rows.iter().map(|r| (r.id.as_str(), r.measure.as_str())).collect();
            assert_eq!(
                keys,
                [("a", "rle"), ("a", "entropy"), ("b", "rle"), ("b", "entropy"), ("c", "rle"), ("c", "entropy")]
            );
            assert_eq!(rows[0].value, 2.0);
            assert_eq!(rows[3].value, 2.0);
        }
    }

    #[test]
    fn exact_guard_applies() {
        let ctx = MeasureContext { exact_guard: 5, ..MeasureContext::default() };
        let p = Payload::Text("ABCDEF".into());
        assert!(matches!(
            measure_payload(&p, Measure::MaExact, &ctx),
            Err(Error::ExceedsGuard { .. })
        ));
    }
}
