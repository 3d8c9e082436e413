//! Block Decomposition Method over CTM tables.
//!
//! An input is cut into blocks; each distinct block contributes its CTM
//! value plus `log2` of its multiplicity.

pub mod ctm;

use std::collections::BTreeMap;

pub use ctm::{alphabet_symbol, ctm_enumerate, ctm_load, ctm_save, toy_table_1d, toy_table_2d, Block, CtmTable};

use crate::coding::shannon_entropy;
use crate::error::{Error, Result};
use crate::matrix::BinaryMatrix;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Boundary {
    /// Drop trailing partial blocks.
    Ignore,
    /// Complete trailing partial blocks with the pad symbol.
    Pad,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum MissingBlockPolicy {
    Error,
    /// Use `len × H(block) + 1` bits for blocks absent from the table.
    EntropySurrogate,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct BdmParams {
    /// Block length for 1D inputs.
    pub block_size: usize,
    /// Block shape `(rows, cols)` for 2D inputs.
    pub block_shape: (usize, usize),
    pub overlap: usize,
    pub boundary: Boundary,
    pub pad_symbol: char,
    pub missing_block: MissingBlockPolicy,
}

impl Default for BdmParams {
    fn default() -> Self {
        Self {
            block_size: 2,
            block_shape: (2, 2),
            overlap: 0,
            boundary: Boundary::Ignore,
            pad_symbol: '0',
            missing_block: MissingBlockPolicy::Error,
        }
    }
}

impl BdmParams {
    fn check(&self, table: &CtmTable, extents: &[usize]) -> Result<()> {
        for &e in extents {
            if e == 0 {
                return Err(Error::InvalidParam("block extent must be positive".into()));
            }
            if self.overlap >= e {
                return Err(Error::InvalidParam(format!("overlap {} must be below block extent {e}", self.overlap)));
            }
        }
        if self.boundary == Boundary::Pad && !table.in_alphabet(self.pad_symbol) {
            return Err(Error::Alphabet(format!("pad symbol {:?} is not in the table alphabet", self.pad_symbol)));
        }
        Ok(())
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct BdmValue {
    pub bits: f64,
    pub blocks: usize,
    pub distinct_blocks: usize,
    /// Distinct blocks valued by the entropy surrogate instead of the table.
    pub surrogate_blocks: usize,
}

/// Window start offsets along one axis of length `len`.
fn starts(len: usize, block: usize, overlap: usize, boundary: Boundary) -> Vec<usize> {
    let step = block - overlap;
    let mut out: Vec<usize> = (0..).map(|k| k * step).take_while(|&s| s + block <= len).collect();
    let covered = out.last().map_or(0, |&s| s + block);
    if boundary == Boundary::Pad && covered < len {
        out.push(out.last().map_or(0, |&s| s + step));
    }
    out
}

fn aggregate(counts: BTreeMap<Block, u64>, table: &CtmTable, policy: MissingBlockPolicy) -> Result<BdmValue> {
    let mut value = BdmValue {
        bits: 0.0,
        blocks: counts.values().sum::<u64>() as usize,
        distinct_blocks: counts.len(),
        surrogate_blocks: 0,
    };
    for (block, mult) in counts {
        let ctm = match (table.get(&block), policy) {
            (Some(v), _) => v,
            (None, MissingBlockPolicy::Error) => return Err(Error::MissingBlock(block.cells)),
            (None, MissingBlockPolicy::EntropySurrogate) => {
                value.surrogate_blocks += 1;
                block.cells.chars().count() as f64 * shannon_entropy(&block.cells)? + 1.0
            }
        };
        value.bits += ctm + (mult as f64).log2();
    }
    Ok(value)
}

/// One-dimensional BDM of `s` with `params.block_size` blocks.
pub fn bdm_1d(s: &str, table: &CtmTable, params: &BdmParams) -> Result<BdmValue> {
    if table.dimension() != 1 {
        return Err(Error::InvalidParam("bdm_1d needs a 1D table".into()));
    }
    params.check(table, &[params.block_size])?;
    let chars: Vec<char> = s.chars().collect();
    if let Some(c) = chars.iter().find(|&&c| !table.in_alphabet(c)) {
        return Err(Error::Alphabet(format!("symbol {c:?} is not in the table alphabet")));
    }
    let size = params.block_size;
    if chars.len() < size {
        return Err(Error::InvalidParam(format!("input length {} is shorter than block size {size}", chars.len())));
    }
    let mut counts: BTreeMap<Block, u64> = BTreeMap::new();
    for start in starts(chars.len(), size, params.overlap, params.boundary) {
        let cells: String = (start..start + size)
            .map(|i| chars.get(i).copied().unwrap_or(params.pad_symbol))
            .collect();
        *counts.entry(Block::line(&cells)).or_default() += 1;
    }
    aggregate(counts, table, params.missing_block)
}

/// Two-dimensional BDM of a binary matrix, tiled row-major with
/// `params.block_shape` windows.
pub fn bdm_2d(m: &BinaryMatrix, table: &CtmTable, params: &BdmParams) -> Result<BdmValue> {
    if table.dimension() != 2 {
        return Err(Error::InvalidParam("bdm_2d needs a 2D table".into()));
    }
    let (br, bc) = params.block_shape;
    params.check(table, &[br, bc])?;
    if m.as_slice().iter().any(|&v| v > 1) {
        return Err(Error::Alphabet("matrix is not binary".into()));
    }
    if m.rows() < br || m.cols() < bc {
        return Err(Error::InvalidParam(format!(
            "matrix {}x{} is smaller than block {br}x{bc}",
            m.rows(),
            m.cols()
        )));
    }
    let cell = |r: usize, c: usize| -> char {
        if r < m.rows() && c < m.cols() {
            if m[(r, c)] == 0 { '0' } else { '1' }
        } else {
            params.pad_symbol
        }
    };
    let mut counts: BTreeMap<Block, u64> = BTreeMap::new();
    let cols = starts(m.cols(), bc, params.overlap, params.boundary);
    for r0 in starts(m.rows(), br, params.overlap, params.boundary) {
        for &c0 in &cols {
            let cells: String = (r0..r0 + br).flat_map(|r| (c0..c0 + bc).map(move |c| (r, c))).map(|(r, c)| cell(r, c)).collect();
            *counts.entry(Block::grid(br, bc, &cells)).or_default() += 1;
        }
    }
    aggregate(counts, table, params.missing_block)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::matrix::Matrix;
    use proptest::prelude::*;

    fn zeros(n: usize, m: usize) -> BinaryMatrix {
        Matrix::filled(n, m, 0u8)
    }

    #[test]
    fn one_dimensional_examples() {
        let t = toy_table_1d();
        let p = BdmParams::default();
        assert_eq!(bdm_1d("0101", &t, &p).unwrap().bits, 4.0);
        assert_eq!(bdm_1d("0110", &t, &p).unwrap().bits, 5.5);
        assert_eq!(bdm_1d("01", &t, &p).unwrap().bits, 3.0);
        // trailing partial block dropped
        assert_eq!(bdm_1d("010", &t, &p).unwrap().bits, 3.0);
    }

    #[test]
    fn one_dimensional_errors() {
        let t = toy_table_1d();
        let p = BdmParams::default();
        assert!(matches!(bdm_1d("0", &t, &p), Err(Error::InvalidParam(_))));
        assert!(matches!(bdm_1d("0a", &t, &p), Err(Error::Alphabet(_))));
        let p3 = BdmParams { block_size: 3, ..BdmParams::default() };
        match bdm_1d("010", &t, &p3) {
            Err(Error::MissingBlock(b)) => assert_eq!(b, "010"),
            other => panic!("unexpected {other:?}"),
        }
        let bad_overlap = BdmParams { overlap: 2, ..BdmParams::default() };
        assert!(bdm_1d("0101", &t, &bad_overlap).is_err());
        assert!(bdm_1d("0101", &toy_table_2d(), &p).is_err());
    }

    #[test]
    fn padding_and_overlap() {
        let t = toy_table_1d();
        let pad = BdmParams { boundary: Boundary::Pad, ..BdmParams::default() };
        // 01 | 0_ -> 01, 00
        assert_eq!(bdm_1d("010", &t, &pad).unwrap().bits, 5.0);
        let overlap = BdmParams { overlap: 1, ..BdmParams::default() };
        // 01, 10, 01 -> 3 + 1 + 2.5
        assert_eq!(bdm_1d("0101", &t, &overlap).unwrap().bits, 6.5);
        let bad_pad = BdmParams { boundary: Boundary::Pad, pad_symbol: 'x', ..BdmParams::default() };
        assert!(matches!(bdm_1d("010", &t, &bad_pad), Err(Error::Alphabet(_))));
    }

    #[test]
    fn entropy_surrogate_is_marked() {
        let t = toy_table_1d();
        let p = BdmParams { block_size: 3, missing_block: MissingBlockPolicy::EntropySurrogate, ..BdmParams::default() };
        let v = bdm_1d("011011", &t, &p).unwrap();
        let h = shannon_entropy("011").unwrap();
        assert!((v.bits - (3.0 * h + 1.0 + 1.0)).abs() < 1e-12);
        assert_eq!(v.surrogate_blocks, 1);
    }

    #[test]
    fn two_dimensional_examples() {
        let t = toy_table_2d();
        let p = BdmParams::default();
        assert_eq!(bdm_2d(&zeros(4, 4), &t, &p).unwrap().bits, 6.0);
        assert_eq!(bdm_2d(&Matrix::filled(2, 2, 1u8), &t, &p).unwrap().bits, 4.0);
        assert_eq!(bdm_2d(&zeros(5, 5), &t, &p).unwrap().bits, 6.0);
        let stripes = Matrix::from_rows(vec![vec![0, 1, 0, 1], vec![0, 1, 0, 1]]).unwrap();
        // two copies of the column-striped block 0101
        assert_eq!(bdm_2d(&stripes, &t, &p).unwrap().bits, 6.0);
        assert!(bdm_2d(&zeros(1, 4), &t, &p).is_err());
        assert!(bdm_2d(&zeros(4, 4), &toy_table_1d(), &p).is_err());
        let padded = BdmParams { boundary: Boundary::Pad, ..BdmParams::default() };
        // 3x3 zeros padded with 0 to 4x4 zeros
        assert_eq!(bdm_2d(&zeros(3, 3), &t, &padded).unwrap().bits, 6.0);
    }

    fn toy_blocks() -> impl Strategy<Value = Vec<&'static str>> {
        prop::collection::vec(prop::sample::select(vec!["00", "01", "10", "11"]), 1..12)
    }

    proptest! {
        #[test]
        fn repetition_law(block in prop::sample::select(vec!["00", "01", "10", "11"]), m in 1usize..64) {
            let t = toy_table_1d();
            let v = bdm_1d(&block.repeat(m), &t, &BdmParams::default()).unwrap().bits;
            let expected = t.get_line(block).unwrap() + (m as f64).log2();
            prop_assert!((v - expected).abs() < 1e-12);
        }

        #[test]
        fn block_order_invariance(blocks in toy_blocks(), seed in any::<u64>()) {
            let t = toy_table_1d();
            let p = BdmParams::default();
            let mut shuffled = blocks.clone();
            let k = (seed as usize) % shuffled.len();
            shuffled.rotate_left(k);
            shuffled.reverse();
            let a = bdm_1d(&blocks.concat(), &t, &p).unwrap().bits;
            let b = bdm_1d(&shuffled.concat(), &t, &p).unwrap().bits;
            prop_assert!((a - b).abs() < 1e-9);
        }

        #[test]
        fn new_distinct_block_increases_value(blocks in toy_blocks(), extra in prop::sample::select(vec!["00", "01", "10", "11"])) {
            prop_assume!(!blocks.contains(&extra));
            let t = toy_table_1d();
            let p = BdmParams::default();
            let before = bdm_1d(&blocks.concat(), &t, &p).unwrap().bits;
            let after = bdm_1d(&format!("{}{extra}", blocks.concat()), &t, &p).unwrap().bits;
            prop_assert!(after > before);
        }

        #[test]
        fn at_least_the_largest_block_value(blocks in toy_blocks()) {
            let t = toy_table_1d();
            let v = bdm_1d(&blocks.concat(), &t, &BdmParams::default()).unwrap().bits;
            let max = blocks.iter().map(|b| t.get_line(b).unwrap()).fold(0.0, f64::max);
            prop_assert!(v >= max);
        }
    }
}
