//! Baseline coding schemes: Shannon entropy, static Huffman, RLE and LZW.

use std::cmp::Reverse;
use std::collections::{BTreeMap, BinaryHeap, HashMap};
use std::fmt::Write as _;

use crate::error::{Error, Result};

/// Symbol frequencies in first-occurrence order.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct SymbolCounts {
    entries: Vec<(char, u64)>,
    total: u64,
}

impl SymbolCounts {
    pub fn of(s: &str) -> Result<Self> {
        let mut index: HashMap<char, usize> = HashMap::new();
        let mut entries: Vec<(char, u64)> = Vec::new();
        for c in s.chars() {
            match index.get(&c) {
                Some(&i) => entries[i].1 += 1,
                None => {
                    index.insert(c, entries.len());
                    entries.push((c, 1));
                }
            }
        }
        if entries.is_empty() {
            return Err(Error::EmptyInput);
        }
        let total = entries.iter().map(|e| e.1).sum();
        Ok(Self { entries, total })
    }

    pub fn entries(&self) -> &[(char, u64)] {
        &self.entries
    }

    pub fn total(&self) -> u64 {
        self.total
    }

    pub fn distinct(&self) -> usize {
        self.entries.len()
    }

    pub fn entropy(&self) -> f64 {
        let n = self.total as f64;
        self.entries
            .iter()
            .map(|&(_, c)| {
                let p = c as f64 / n;
                -p * p.log2()
            })
            .sum::<f64>()
            .max(0.0)
    }
}

/// Empirical Shannon entropy in bits per symbol.
pub fn shannon_entropy(s: &str) -> Result<f64> {
    Ok(SymbolCounts::of(s)?.entropy())
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub enum HuffmanNode {
    Leaf {
        symbol: char,
        count: u64,
    },
    Internal {
        count: u64,
        left: Box<HuffmanNode>,
        right: Box<HuffmanNode>,
    },
}

impl HuffmanNode {
    pub fn count(&self) -> u64 {
        match self {
            HuffmanNode::Leaf { count, .. } | HuffmanNode::Internal { count, .. } => *count,
        }
    }

    pub fn internal_nodes(&self) -> usize {
        match self {
            HuffmanNode::Leaf { .. } => 0,
            HuffmanNode::Internal { left, right, .. } => 1 + left.internal_nodes() + right.internal_nodes(),
        }
    }

    pub fn leaves(&self) -> usize {
        match self {
            HuffmanNode::Leaf { .. } => 1,
            HuffmanNode::Internal { left, right, .. } => left.leaves() + right.leaves(),
        }
    }

    fn depths(&self, depth: u32, out: &mut BTreeMap<char, u32>) {
        match self {
            HuffmanNode::Leaf { symbol, .. } => {
                out.insert(*symbol, depth);
            }
            HuffmanNode::Internal { left, right, .. } => {
                left.depths(depth + 1, out);
                right.depths(depth + 1, out);
            }
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct HuffmanResult {
    pub code_lengths: BTreeMap<char, u32>,
    pub total_bits: u64,
    /// Edge levels from the root to the deepest leaf.
    pub tree_levels: u32,
    pub tree: HuffmanNode,
}

impl HuffmanResult {
    pub fn bits_per_symbol(&self) -> f64 {
        let n = self.tree.count() as f64;
        self.total_bits as f64 / n
    }
}

/// Static Huffman code over whole-input frequencies.
///
/// Merge order is fully deterministic: lowest count first; on equal counts
/// the most recently merged internal node goes first, then leaves in order
/// of first occurrence. The first node taken becomes the `0` (left) child.
/// A single distinct symbol is coded with 1 bit per occurrence and a
/// zero-level tree.
pub fn huffman(s: &str) -> Result<HuffmanResult> {
    let counts = SymbolCounts::of(s)?;
    if counts.distinct() == 1 {
        let (symbol, count) = counts.entries()[0];
        return Ok(HuffmanResult {
            code_lengths: BTreeMap::from([(symbol, 1)]),
            total_bits: count,
            tree_levels: 0,
            tree: HuffmanNode::Leaf { symbol, count },
        });
    }

    // (count, tier, order): tier 0 = internal (order = newest first), 1 = leaf.
    type Key = (u64, u8, u64);
    let mut arena: Vec<Option<HuffmanNode>> = Vec::new();
    let mut heap: BinaryHeap<Reverse<(Key, usize)>> = BinaryHeap::new();
    for (i, &(symbol, count)) in counts.entries().iter().enumerate() {
        arena.push(Some(HuffmanNode::Leaf { symbol, count }));
        heap.push(Reverse(((count, 1, i as u64), arena.len() - 1)));
    }
    let mut merged: u64 = 0;
    while heap.len() > 1 {
        let Reverse((_, a)) = heap.pop().expect("two nodes");
        let Reverse((_, b)) = heap.pop().expect("two nodes");
        let left = arena[a].take().expect("live node");
        let right = arena[b].take().expect("live node");
        let count = left.count() + right.count();
        arena.push(Some(HuffmanNode::Internal {
            count,
            left: Box::new(left),
            right: Box::new(right),
        }));
        heap.push(Reverse(((count, 0, u64::MAX - merged), arena.len() - 1)));
        merged += 1;
    }
    let Reverse((_, root)) = heap.pop().expect("root");
    let tree = arena[root].take().expect("root node");

    let mut code_lengths = BTreeMap::new();
    tree.depths(0, &mut code_lengths);
    let total_bits = counts
        .entries()
        .iter()
        .map(|&(c, n)| n * u64::from(code_lengths[&c]))
        .sum();
    let tree_levels = code_lengths.values().copied().max().unwrap_or(0);
    Ok(HuffmanResult {
        code_lengths,
        total_bits,
        tree_levels,
        tree,
    })
}

/// Renders a Huffman tree as a DOT digraph: leaves labelled `symbol:count`,
/// internal nodes with their merged count, edges labelled `0`/`1`.
pub fn huffman_tree_dot(result: &HuffmanResult) -> String {
    fn walk(node: &HuffmanNode, next: &mut usize, out: &mut String) -> usize {
        let id = *next;
        *next += 1;
        match node {
            HuffmanNode::Leaf { symbol, count } => {
                let _ = writeln!(out, "  n{id} [shape=box, label=\"{}:{count}\"];", dot_escape(*symbol));
            }
            HuffmanNode::Internal { count, left, right } => {
                let _ = writeln!(out, "  n{id} [shape=circle, label=\"{count}\"];");
                let l = walk(left, next, out);
                let r = walk(right, next, out);
                let _ = writeln!(out, "  n{id} -> n{l} [label=\"0\"];");
                let _ = writeln!(out, "  n{id} -> n{r} [label=\"1\"];");
            }
        }
        id
    }
    let mut out = String::from("digraph huffman {\n");
    let mut next = 0;
    walk(&result.tree, &mut next, &mut out);
    out.push_str("}\n");
    out
}

pub(crate) fn dot_escape(c: char) -> String {
    match c {
        '"' => "\\\"".into(),
        '\\' => "\\\\".into(),
        _ => c.to_string(),
    }
}

/// Run-length encoding in character-then-count form, e.g. `AAAABBB` -> `A4B3`.
/// Returns the encoded text and its length in characters.
pub fn rle_encode(s: &str) -> (String, usize) {
    let mut out = String::new();
    let mut chars = s.chars().peekable();
    while let Some(c) = chars.next() {
        let mut run = 1usize;
        while chars.peek() == Some(&c) {
            chars.next();
            run += 1;
        }
        out.push(c);
        let _ = write!(out, "{run}");
    }
    let len = out.chars().count();
    (out, len)
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct LzwResult {
    pub codes: Vec<u32>,
    /// Distinct input symbols in first-occurrence order; code `i` is symbol `i`.
    pub initial_dictionary: Vec<char>,
    pub dict_size_final: u32,
    /// `codes.len() * ceil(log2(dict_size_final))`.
    pub bit_length: u64,
}

impl LzwResult {
    pub fn code_width(&self) -> u32 {
        ceil_log2(u64::from(self.dict_size_final))
    }
}

pub(crate) fn ceil_log2(n: u64) -> u32 {
    if n <= 1 {
        0
    } else {
        64 - (n - 1).leading_zeros()
    }
}

/// Greedy longest-match LZW with the input's own symbols as the initial
/// dictionary. Bits are accounted at a fixed width set by the final
/// dictionary size.
pub fn lzw_encode(s: &str) -> Result<LzwResult> {
    let chars: Vec<char> = s.chars().collect();
    if chars.is_empty() {
        return Err(Error::EmptyInput);
    }
    let mut initial = Vec::new();
    let mut dict: HashMap<Vec<char>, u32> = HashMap::new();
    for &c in &chars {
        if !dict.contains_key(&[c][..]) {
            dict.insert(vec![c], initial.len() as u32);
            initial.push(c);
        }
    }
    let mut codes = Vec::new();
    let mut current: Vec<char> = Vec::new();
    for &c in &chars {
        current.push(c);
        if !dict.contains_key(&current) {
            let next = dict.len() as u32;
            dict.insert(current.clone(), next);
            current.pop();
            codes.push(dict[&current]);
            current.clear();
            current.push(c);
        }
    }
    codes.push(dict[&current]);
    let dict_size_final = dict.len() as u32;
    let bit_length = codes.len() as u64 * u64::from(ceil_log2(u64::from(dict_size_final)));
    Ok(LzwResult {
        codes,
        initial_dictionary: initial,
        dict_size_final,
        bit_length,
    })
}

#[cfg(test)]
pub(crate) fn rle_decode(encoded: &str) -> String {
    let mut out = String::new();
    let mut chars = encoded.chars().peekable();
    while let Some(c) = chars.next() {
        let mut digits = String::new();
        while let Some(d) = chars.peek().filter(|d| d.is_ascii_digit()) {
            digits.push(*d);
            chars.next();
        }
        let run: usize = digits.parse().expect("run length");
        out.extend(std::iter::repeat_n(c, run));
    }
    out
}

#[cfg(test)]
pub(crate) fn lzw_decode(codes: &[u32], initial: &[char]) -> String {
    let mut dict: Vec<Vec<char>> = initial.iter().map(|&c| vec![c]).collect();
    let mut out: Vec<char> = Vec::new();
    let mut prev: Option<Vec<char>> = None;
    for &code in codes {
        let entry = match dict.get(code as usize) {
            Some(e) => e.clone(),
            None => {
                let mut p = prev.clone().expect("KwKwK needs a previous entry");
                p.push(p[0]);
                p
            }
        };
        if let Some(mut p) = prev.take() {
            p.push(entry[0]);
            dict.push(p);
        }
        out.extend(&entry);
        prev = Some(entry);
    }
    out.into_iter().collect()
}
