//! CTM tables: block → estimated complexity in bits.
//!
//! Tables come from [`ctm_enumerate`] (exhaustive small Turing machines),
//! the bundled toy tables, or an external CSV via [`ctm_load`].

use std::collections::BTreeMap;
use std::fs::File;
use std::io::Write as _;
use std::path::Path;

use crate::error::{Error, Result};
use crate::exec::{self, Execution};
use crate::numfmt::{round12, sig12};

/// A block keyed by shape; 1D blocks have a single row.
#[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct Block {
    pub rows: usize,
    pub cols: usize,
    /// Symbols in row-major order.
    pub cells: String,
}

impl Block {
    pub fn line(cells: &str) -> Self {
        Self {
            rows: 1,
            cols: cells.chars().count(),
            cells: cells.to_string(),
        }
    }

    pub fn grid(rows: usize, cols: usize, cells: &str) -> Self {
        Self {
            rows,
            cols,
            cells: cells.to_string(),
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct CtmTable {
    dimension: u8,
    alphabet_size: u32,
    entries: BTreeMap<Block, f64>,
    pub provenance: String,
}

/// Symbol for digit `d` of an alphabet of up to 36 symbols (`0-9a-z`).
pub fn alphabet_symbol(d: u32) -> char {
    char::from_digit(d, 36).expect("alphabet of at most 36 symbols")
}

impl CtmTable {
    pub fn new(dimension: u8, alphabet_size: u32, provenance: impl Into<String>) -> Result<Self> {
        if !(1..=2).contains(&dimension) {
            return Err(Error::InvalidParam(format!("dimension must be 1 or 2, got {dimension}")));
        }
        if !(2..=36).contains(&alphabet_size) {
            return Err(Error::InvalidParam(format!("alphabet size must be in 2..=36, got {alphabet_size}")));
        }
        Ok(Self {
            dimension,
            alphabet_size,
            entries: BTreeMap::new(),
            provenance: provenance.into(),
        })
    }

    pub fn dimension(&self) -> u8 {
        self.dimension
    }

    pub fn alphabet_size(&self) -> u32 {
        self.alphabet_size
    }

    pub fn entries(&self) -> &BTreeMap<Block, f64> {
        &self.entries
    }

    pub fn len(&self) -> usize {
        self.entries.len()
    }

    pub fn is_empty(&self) -> bool {
        self.entries.is_empty()
    }

    pub fn in_alphabet(&self, c: char) -> bool {
        c.to_digit(36).is_some_and(|d| d < self.alphabet_size) && !c.is_ascii_uppercase()
    }

    /// Adds an entry. Values are kept at the 12 significant digits the CSV
    /// form carries, so saving and loading is lossless.
    pub fn insert(&mut self, block: Block, bits: f64) -> Result<()> {
        if block.cells.is_empty() || block.rows * block.cols != block.cells.chars().count() {
            return Err(Error::InvalidParam(format!("malformed block {:?}", block.cells)));
        }
        if self.dimension == 1 && block.rows != 1 {
            return Err(Error::InvalidParam("1D table entries must be single-row blocks".into()));
        }
        if let Some(c) = block.cells.chars().find(|&c| !self.in_alphabet(c)) {
            return Err(Error::Alphabet(format!("symbol {c:?} outside a {}-symbol alphabet", self.alphabet_size)));
        }
        if !(bits > 0.0 && bits.is_finite()) {
            return Err(Error::InvalidParam(format!("ctm value for {:?} must be positive, got {bits}", block.cells)));
        }
        self.entries.insert(block, round12(bits));
        Ok(())
    }

    pub fn get(&self, block: &Block) -> Option<f64> {
        self.entries.get(block).copied()
    }

    pub fn get_line(&self, cells: &str) -> Option<f64> {
        self.get(&Block::line(cells))
    }
}

/// The 1D toy table `{00: 2, 11: 2, 01: 3, 10: 2.5}` for formula checks.
pub fn toy_table_1d() -> CtmTable {
    let mut t = CtmTable::new(1, 2, "toy table for formula checks; not a CTM estimate").expect("valid");
    for (b, v) in [("00", 2.0), ("11", 2.0), ("01", 3.0), ("10", 2.5)] {
        t.insert(Block::line(b), v).expect("valid entry");
    }
    t
}

/// A 2×2 toy table covering all 16 binary blocks: uniform blocks 4 bits,
/// stripes 5, checkerboards 5.5, single odd cell 6.
pub fn toy_table_2d() -> CtmTable {
    let mut t = CtmTable::new(2, 2, "toy 2x2 table for formula checks; not a CTM estimate").expect("valid");
    for code in 0u32..16 {
        let cells: String = (0..4).map(|i| if code >> (3 - i) & 1 == 1 { '1' } else { '0' }).collect();
        let bits = match cells.as_str() {
            "0000" | "1111" => 4.0,
            "0101" | "1010" | "0011" | "1100" => 5.0,
            "0110" | "1001" => 5.5,
            _ => 6.0,
        };
        t.insert(Block::grid(2, 2, &cells), bits).expect("valid entry");
    }
    t
}

/// A binary Turing machine with `states` working states plus halt.
///
/// Each (state, read) entry is one of `4·states + 2` instructions: the first
/// `4·states` write a symbol, move, and switch state; the last two write a
/// symbol and halt without moving.
#[derive(Debug, Clone, Copy)]
struct Machine {
    states: u32,
    table: [u8; 4],
}

impl Machine {
    fn decode(states: u32, mut index: u64) -> Self {
        let base = u64::from(4 * states + 2);
        let mut table = [0u8; 4];
        for slot in table.iter_mut().take(2 * states as usize) {
            *slot = (index % base) as u8;
            index /= base;
        }
        Self { states, table }
    }

    /// Runs from a blank (all-0) tape; on halt returns the visited segment.
    fn run(&self, step_bound: u32) -> Option<Vec<u8>> {
        let moving = 4 * self.states as u8;
        let mut tape = vec![0u8; 2 * step_bound as usize + 1];
        let mut head = step_bound as usize;
        let (mut lo, mut hi) = (head, head);
        let mut state = 0usize;
        for _ in 0..step_bound {
            let read = tape[head] as usize;
            let instr = self.table[2 * state + read];
            if instr >= moving {
                tape[head] = instr - moving;
                return Some(tape[lo..=hi].to_vec());
            }
            tape[head] = instr & 1;
            if instr & 2 == 0 {
                head -= 1;
                lo = lo.min(head);
            } else {
                head += 1;
                hi = hi.max(head);
            }
            state = (instr / 4) as usize;
        }
        None
    }
}

/// Builds a 1D CTM table by running every machine in the
/// `(4·states+2)^(2·states)` rule space for at most `step_bound` steps.
///
/// Each halting output is counted together with its complement (the same
/// machine with 0 and 1 exchanged, run on the complementary blank tape),
/// and `ctm(b) = -log2(count(b) / total)`. Counts are aggregated as
/// integers, so the table does not depend on `exec`.
pub fn ctm_enumerate(states: u32, symbols: u32, step_bound: u32, exec: Execution) -> Result<CtmTable> {
    if symbols != 2 || !(1..=2).contains(&states) {
        return Err(Error::InvalidParam(format!(
            "unsupported machine space ({states}, {symbols}); supported: 1 or 2 states, 2 symbols"
        )));
    }
    if step_bound < 6 {
        return Err(Error::InvalidParam(format!(
            "step bound {step_bound} is below the (2,2) busy-beaver halting time of 6"
        )));
    }
    let machines = u64::from(4 * states + 2).pow(2 * states);
    let counts = exec::fold_range(
        machines,
        exec,
        BTreeMap::<Vec<u8>, u64>::new,
        |mut acc, index| {
            if let Some(out) = Machine::decode(states, index).run(step_bound) {
                let flipped: Vec<u8> = out.iter().map(|b| 1 - b).collect();
                *acc.entry(out).or_default() += 1;
                *acc.entry(flipped).or_default() += 1;
            }
            acc
        },
        |mut a, b| {
            for (k, v) in b {
                *a.entry(k).or_default() += v;
            }
            a
        },
    );
    let total: u64 = counts.values().sum();
    let mut table = CtmTable::new(
        1,
        2,
        format!("enumerated ({states},{symbols}), {step_bound}-step bound, {machines} machines, complement-completed"),
    )?;
    for (out, count) in counts {
        let cells: String = out.iter().map(|&b| if b == 0 { '0' } else { '1' }).collect();
        table.insert(Block::line(&cells), -(count as f64 / total as f64).log2())?;
    }
    Ok(table)
}

/// Writes a table as CSV: `block,ctm_bits` for 1D, `rows,cols,block,ctm_bits`
/// for 2D, preceded by a comment line
/// `# alphabet_size=<n>; provenance=<text>`.
pub fn ctm_save(table: &CtmTable, path: &Path) -> Result<()> {
    let mut file = File::create(path)?;
    writeln!(
        file,
        "# alphabet_size={}; provenance={}",
        table.alphabet_size,
        table.provenance.replace('\n', " ")
    )?;
    let mut w = csv::Writer::from_writer(file);
    if table.dimension == 1 {
        w.write_record(["block", "ctm_bits"])?;
        for (b, v) in &table.entries {
            w.write_record([b.cells.as_str(), &sig12(*v)])?;
        }
    } else {
        w.write_record(["rows", "cols", "block", "ctm_bits"])?;
        for (b, v) in &table.entries {
            w.write_record([b.rows.to_string().as_str(), &b.cols.to_string(), &b.cells, &sig12(*v)])?;
        }
    }
    w.flush()?;
    Ok(())
}

/// Reads a table written by [`ctm_save`] or any CSV with the same header.
/// Without a metadata comment the alphabet is inferred from the symbols
/// used (at least binary).
pub fn ctm_load(path: &Path) -> Result<CtmTable> {
    let text = std::fs::read_to_string(path)?;
    let mut alphabet: Option<u32> = None;
    let mut provenance = format!("loaded from {}", path.display());
    if let Some(meta) = text.lines().next().and_then(|l| l.strip_prefix('#')) {
        let (head, prov) = meta.split_once("provenance=").unwrap_or((meta, ""));
        if !prov.is_empty() {
            provenance = prov.trim().to_string();
        }
        alphabet = head
            .split(';')
            .filter_map(|f| f.trim().strip_prefix("alphabet_size="))
            .find_map(|v| v.trim().parse().ok());
    }
    let mut reader = csv::ReaderBuilder::new()
        .comment(Some(b'#'))
        .flexible(true)
        .from_reader(text.as_bytes());
    let header: Vec<String> = reader.headers()?.iter().map(|h| h.trim().to_string()).collect();
    let dimension = match header.iter().map(String::as_str).collect::<Vec<_>>().as_slice() {
        ["block", "ctm_bits"] => 1,
        ["rows", "cols", "block", "ctm_bits"] => 2,
        _ => {
            return Err(Error::Parse {
                line: 1,
                msg: format!("unexpected header {:?}", header.join(",")),
            })
        }
    };
    let mut rows: Vec<(usize, Block, f64)> = Vec::new();
    for record in reader.records() {
        let record = record?;
        let line = record.position().map_or(0, |p| p.line() as usize);
        let parse_err = |msg: String| Error::Parse { line, msg };
        if record.len() != header.len() {
            return Err(parse_err(format!("expected {} fields, got {}", header.len(), record.len())));
        }
        let num = |s: &str| -> Result<f64> {
            s.trim().parse::<f64>().map_err(|_| parse_err(format!("not a number: {s:?}")))
        };
        let int = |s: &str| -> Result<usize> {
            s.trim().parse::<usize>().map_err(|_| parse_err(format!("not a positive integer: {s:?}")))
        };
        let (block, bits) = if dimension == 1 {
            (Block::line(record[0].trim()), num(&record[1])?)
        } else {
            (Block::grid(int(&record[0])?, int(&record[1])?, record[2].trim()), num(&record[3])?)
        };
        rows.push((line, block, bits));
    }
    if rows.is_empty() {
        return Err(Error::EmptyTable);
    }
    let alphabet = alphabet.unwrap_or_else(|| {
        rows.iter()
            .flat_map(|(_, b, _)| b.cells.chars())
            .filter_map(|c| c.to_digit(36))
            .max()
            .map_or(2, |d| (d + 1).max(2))
    });
    let mut table = CtmTable::new(dimension, alphabet, provenance)?;
    for (line, block, bits) in rows {
        if table.entries.contains_key(&block) {
            return Err(Error::DuplicateBlock { block: block.cells, line });
        }
        table.insert(block, bits).map_err(|e| Error::Parse { line, msg: e.to_string() })?;
    }
    Ok(table)
}
