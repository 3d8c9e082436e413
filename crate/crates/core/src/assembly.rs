//! Assembly index of strings.
//!
//! Objects are strings; the only operation joins two available objects by
//! concatenation. Unit symbols are always available and every built object
//! may be reused freely, so the index is the number of distinct objects that
//! have to be built on the way to the target.
//!
//! Equivalently, the index is the size of the smallest set `S` of strings
//! (of length ≥ 2) that contains the target and in which every member splits
//! into two parts drawn from `S` or the unit symbols. [`assembly_index_exact`]
//! searches for that set; [`assembly_index_split`] gives a polynomial-time
//! upper bound by factoring repeated substrings.

use std::collections::{BTreeSet, HashMap, HashSet};
use std::fmt::Write as _;
use std::sync::atomic::{AtomicUsize, Ordering};

use crate::coding::dot_escape;
use crate::error::{Error, Result};
use crate::exec::{self, Execution};

pub const DEFAULT_EXACT_GUARD: usize = 25;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum ObjectRef {
    Basis(char),
    /// Result of an earlier step, by position in [`AssemblyPathway::steps`].
    Step(usize),
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct JoinStep {
    pub left: ObjectRef,
    pub right: ObjectRef,
    pub result: String,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct AssemblyPathway {
    pub basis: BTreeSet<char>,
    pub steps: Vec<JoinStep>,
    pub target: String,
}

impl AssemblyPathway {
    pub fn index(&self) -> usize {
        self.steps.len()
    }

    /// Builds a pathway from `(left, right)` string pairs, resolving each
    /// operand to a unit symbol or the most recent step with that result.
    pub fn from_joins<'a>(target: &str, joins: impl IntoIterator<Item = (&'a str, &'a str)>) -> Result<Self> {
        let basis: BTreeSet<char> = target.chars().collect();
        let mut built: HashMap<String, usize> = HashMap::new();
        let mut steps = Vec::new();
        let resolve = |s: &str, built: &HashMap<String, usize>| -> Result<ObjectRef> {
            let mut chars = s.chars();
            match (chars.next(), chars.next()) {
                (Some(c), None) => Ok(ObjectRef::Basis(c)),
                _ => built.get(s).map(|&i| ObjectRef::Step(i)).ok_or(Error::InvalidPathway),
            }
        };
        for (l, r) in joins {
            let left = resolve(l, &built)?;
            let right = resolve(r, &built)?;
            let result = format!("{l}{r}");
            built.insert(result.clone(), steps.len());
            steps.push(JoinStep { left, right, result });
        }
        Ok(Self {
            basis,
            steps,
            target: target.to_string(),
        })
    }

    fn resolve(&self, r: ObjectRef, before: usize) -> Option<String> {
        match r {
            ObjectRef::Basis(c) if self.basis.contains(&c) => Some(c.to_string()),
            ObjectRef::Step(i) if i < before => Some(self.steps[i].result.clone()),
            _ => None,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct AssemblyResult {
    pub index: usize,
    pub pathway: AssemblyPathway,
}

/// Checks every pathway invariant against `target`.
pub fn verify_pathway(p: &AssemblyPathway, target: &str) -> bool {
    if p.target != target || target.is_empty() {
        return false;
    }
    if !target.chars().all(|c| p.basis.contains(&c)) {
        return false;
    }
    for (i, step) in p.steps.iter().enumerate() {
        let (Some(l), Some(r)) = (p.resolve(step.left, i), p.resolve(step.right, i)) else {
            return false;
        };
        if step.result.len() != l.len() + r.len() || !step.result.starts_with(&l) || !step.result.ends_with(&r) {
            return false;
        }
    }
    match p.steps.last() {
        Some(last) => last.result == target,
        None => target.chars().count() == 1,
    }
}

/// Exact assembly index with the default execution mode.
pub fn assembly_index_exact(s: &str, guard: Option<usize>) -> Result<AssemblyResult> {
    assembly_index_exact_with(s, guard, Execution::default())
}

/// Exact assembly index by iterative deepening over the size of the built
/// set, with branch-and-bound pruning and per-depth memoisation.
///
/// The witness is the first minimal set in a fixed search order, with its
/// steps sorted by (length, string); it does not depend on `exec`.
pub fn assembly_index_exact_with(s: &str, guard: Option<usize>, exec: Execution) -> Result<AssemblyResult> {
    let n = s.chars().count();
    if n == 0 {
        return Err(Error::EmptyInput);
    }
    let guard = guard.unwrap_or(DEFAULT_EXACT_GUARD);
    if n > guard {
        return Err(Error::ExceedsGuard { len: n, guard });
    }
    if n == 1 {
        return Ok(AssemblyResult {
            index: 0,
            pathway: AssemblyPathway {
                basis: s.chars().collect(),
                steps: Vec::new(),
                target: s.to_string(),
            },
        });
    }

    let space = SubstringSpace::new(s);
    let root = Bits::single(space.words, 0);
    let floor = space.lower_bound(&root, &Bits::empty(space.words), 1).max(ceil_log2(n));
    // The split heuristic always succeeds, so the search terminates by then.
    let ceiling = assembly_index_split(s)?.index;
    let mut budget = floor;
    let set = loop {
        if let Some(set) = space.solve(budget, exec) {
            break set;
        }
        assert!(budget < ceiling, "a closed set within the heuristic bound exists");
        budget += 1;
    };
    let pathway = space.pathway(&space.ordered_steps(&set));
    Ok(AssemblyResult {
        index: pathway.index(),
        pathway,
    })
}

fn ceil_log2(n: usize) -> usize {
    crate::coding::ceil_log2(n as u64) as usize
}

#[derive(Clone, PartialEq, Eq, Hash)]
struct Bits(Vec<u64>);

impl Bits {
    fn empty(words: usize) -> Self {
        Bits(vec![0; words])
    }

    fn single(words: usize, i: usize) -> Self {
        let mut b = Self::empty(words);
        b.set(i);
        b
    }

    fn get(&self, i: usize) -> bool {
        self.0[i / 64] >> (i % 64) & 1 == 1
    }

    fn set(&mut self, i: usize) {
        self.0[i / 64] |= 1 << (i % 64);
    }

    fn count(&self) -> usize {
        self.0.iter().map(|w| w.count_ones() as usize).sum()
    }

    /// Members of `self` that are not in `other`, ascending.
    fn minus<'a>(&'a self, other: &'a Bits) -> impl Iterator<Item = usize> + 'a {
        self.0.iter().zip(&other.0).enumerate().flat_map(|(w, (&a, &b))| {
            let mut rest = a & !b;
            std::iter::from_fn(move || {
                if rest == 0 {
                    return None;
                }
                let bit = rest.trailing_zeros() as usize;
                rest &= rest - 1;
                Some(w * 64 + bit)
            })
        })
    }

    fn iter(&self) -> impl Iterator<Item = usize> + '_ {
        self.0.iter().enumerate().flat_map(|(w, &a)| {
            let mut rest = a;
            std::iter::from_fn(move || {
                if rest == 0 {
                    return None;
                }
                let bit = rest.trailing_zeros() as usize;
                rest &= rest - 1;
                Some(w * 64 + bit)
            })
        })
    }
}

/// Distinct substrings of the target, interned so that id 0 is the target
/// and ids ascend by (length descending, string ascending).
struct SubstringSpace {
    text: Vec<Vec<char>>,
    unit: Vec<bool>,
    /// All splits `(left, right)` of each substring, by left length.
    splits: Vec<Vec<(usize, usize)>>,
    /// `pieces[id][i][j]` = id of `text[id][i..j]`.
    pieces: Vec<Vec<Vec<usize>>>,
    /// `earlier[id][i][j]`: `text[id][i..j]` also occurs inside `text[id][..i]`.
    earlier: Vec<Vec<Vec<bool>>>,
    /// Substring ids contained in each substring.
    contains: Vec<Bits>,
    words: usize,
}

impl SubstringSpace {
    fn new(s: &str) -> Self {
        let chars: Vec<char> = s.chars().collect();
        let n = chars.len();
        let mut distinct: BTreeSet<(std::cmp::Reverse<usize>, Vec<char>)> = BTreeSet::new();
        for i in 0..n {
            for j in i + 1..=n {
                distinct.insert((std::cmp::Reverse(j - i), chars[i..j].to_vec()));
            }
        }
        let text: Vec<Vec<char>> = distinct.into_iter().map(|(_, t)| t).collect();
        let ids: HashMap<&[char], usize> = text.iter().enumerate().map(|(i, t)| (t.as_slice(), i)).collect();
        let pieces: Vec<Vec<Vec<usize>>> = text
            .iter()
            .map(|t| {
                (0..=t.len())
                    .map(|i| (0..=t.len()).map(|j| if j > i { ids[&t[i..j]] } else { usize::MAX }).collect())
                    .collect()
            })
            .collect();
        let splits = text
            .iter()
            .enumerate()
            .map(|(id, t)| (1..t.len()).map(|k| (pieces[id][0][k], pieces[id][k][t.len()])).collect())
            .collect();
        let unit = text.iter().map(|t| t.len() == 1).collect();
        let earlier = text
            .iter()
            .map(|t| {
                (0..=t.len())
                    .map(|i| {
                        (0..=t.len())
                            .map(|j| j > i && t[..i].windows(j - i).any(|w| w == &t[i..j]))
                            .collect()
                    })
                    .collect()
            })
            .collect();
        let words = text.len().div_ceil(64);
        let contains = pieces
            .iter()
            .map(|table| {
                let mut b = Bits::empty(words);
                for row in table {
                    for &id in row.iter().filter(|&&id| id != usize::MAX) {
                        b.set(id);
                    }
                }
                b
            })
            .collect();
        Self {
            text,
            unit,
            splits,
            pieces,
            earlier,
            contains,
            words,
        }
    }

    fn available(&self, set: &Bits, id: usize) -> bool {
        self.unit[id] || set.get(id)
    }

    /// Fewest phrases that concatenate to substring `id`, where a phrase is
    /// a member of `set` or a unit symbol (but not `id` itself), or, when
    /// `copies` is set, a string already seen earlier in `id` or inside one
    /// of the `before` substrings.
    fn phrases(&self, set: &Bits, id: usize, before: &[usize], copies: bool) -> usize {
        let len = self.text[id].len();
        let mut best = vec![usize::MAX; len + 1];
        best[0] = 0;
        for j in 1..=len {
            for i in 0..j {
                if best[i] == usize::MAX || (i == 0 && j == len) {
                    continue;
                }
                let piece = self.pieces[id][i][j];
                let ok = self.available(set, piece)
                    || (copies && (self.earlier[id][i][j] || before.iter().any(|&b| self.contains[b].get(piece))));
                if ok {
                    best[j] = best[j].min(best[i] + 1);
                }
            }
        }
        best[len]
    }

    /// Lower bound on the final set size, given the set built so far and
    /// the members whose split is already fixed.
    ///
    /// Take the build trees of the pending members (longest first) and cut
    /// every object below its first appearance. Each tree then has one more
    /// leaf than internal node, and every leaf is an available piece or a
    /// copy of something earlier, so a tree with `z` phrases needs at least
    /// `z - 2` objects that are not built yet. Across trees the cuts are
    /// shared, so the per-tree counts add up.
    fn lower_bound(&self, set: &Bits, resolved: &Bits, size: usize) -> usize {
        let pending: Vec<usize> = set.minus(resolved).collect();
        let mut joint = 0;
        let mut single = 0;
        for (k, &id) in pending.iter().enumerate() {
            joint += self.phrases(set, id, &pending[..k], true).saturating_sub(2);
            let own = self.phrases(set, id, &[], true).saturating_sub(2);
            // A chain of distinct, strictly shrinking objects leads from the
            // pending member down to its pieces.
            let chain = ceil_log2(self.phrases(set, id, &[], false)).saturating_sub(1);
            single = single.max(own).max(chain);
        }
        size + joint.max(single)
    }

    /// The first set of size ≤ `budget` that closes under splitting, in
    /// search order: pending members longest first, splits by increasing
    /// left length. Branches off the target are searched concurrently, but a
    /// branch is only abandoned once an earlier branch has succeeded, so the
    /// answer matches the sequential one.
    fn solve(&self, budget: usize, exec: Execution) -> Option<Bits> {
        let root = Bits::single(self.words, 0);
        let winner = AtomicUsize::new(usize::MAX);
        let branches: Vec<usize> = (0..self.splits[0].len()).collect();
        let found = exec::map_ordered(&branches, exec, |&branch| {
            if winner.load(Ordering::Relaxed) < branch {
                return None;
            }
            let (l, r) = self.splits[0][branch];
            let mut set = root.clone();
            for part in [l, r] {
                if !self.unit[part] {
                    set.set(part);
                }
            }
            let mut search = Search {
                space: self,
                budget,
                seen: HashSet::new(),
                branch,
                winner: &winner,
            };
            let size = set.count();
            let found = search.descend(set, root.clone(), size);
            if found.is_some() {
                winner.fetch_min(branch, Ordering::Relaxed);
            }
            found
        });
        found.into_iter().flatten().next()
    }

    /// Members of `set` ordered by (length, string).
    fn ordered_steps(&self, set: &Bits) -> Vec<usize> {
        let mut ids: Vec<usize> = set.iter().collect();
        ids.sort_by(|&a, &b| (self.text[a].len(), &self.text[a]).cmp(&(self.text[b].len(), &self.text[b])));
        ids
    }

    fn pathway(&self, ordered: &[usize]) -> AssemblyPathway {
        let mut set = Bits::empty(self.words);
        for &id in ordered {
            set.set(id);
        }
        let mut position: HashMap<usize, usize> = HashMap::new();
        let mut steps = Vec::with_capacity(ordered.len());
        let as_ref = |id: usize, position: &HashMap<usize, usize>| {
            if self.unit[id] {
                ObjectRef::Basis(self.text[id][0])
            } else {
                ObjectRef::Step(position[&id])
            }
        };
        for &id in ordered {
            let &(l, r) = self.splits[id]
                .iter()
                .find(|&&(l, r)| self.available(&set, l) && self.available(&set, r))
                .expect("closed set");
            steps.push(JoinStep {
                left: as_ref(l, &position),
                right: as_ref(r, &position),
                result: self.text[id].iter().collect(),
            });
            position.insert(id, steps.len() - 1);
        }
        let target: String = self.text[0].iter().collect();
        AssemblyPathway {
            basis: target.chars().collect(),
            steps,
            target,
        }
    }
}

struct Search<'a> {
    space: &'a SubstringSpace,
    budget: usize,
    seen: HashSet<(Bits, Bits)>,
    branch: usize,
    winner: &'a AtomicUsize,
}

impl Search<'_> {
    fn descend(&mut self, set: Bits, resolved: Bits, size: usize) -> Option<Bits> {
        let space = self.space;
        if space.lower_bound(&set, &resolved, size) > self.budget {
            return None;
        }
        let Some(next) = set.minus(&resolved).next() else {
            return Some(set);
        };
        if self.winner.load(Ordering::Relaxed) < self.branch || !self.seen.insert((set.clone(), resolved.clone())) {
            return None;
        }
        let mut resolved = resolved;
        resolved.set(next);
        for &(l, r) in &space.splits[next] {
            let mut child = set.clone();
            let mut grown = size;
            for part in [l, r] {
                if !space.unit[part] && !child.get(part) {
                    child.set(part);
                    grown += 1;
                }
            }
            if grown <= self.budget {
                if let Some(done) = self.descend(child, resolved.clone(), grown) {
                    return Some(done);
                }
            }
        }
        None
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
enum Tok {
    Unit(char),
    Rule(usize),
}

/// Upper bound on the assembly index by repeated-substring factoring.
///
/// A target of the form `u^k` is built as `u` followed by a shortest
/// addition chain for `k` (binary method above [`CHAIN_SEARCH_LIMIT`]).
/// For `u` itself, the longest token string with at least two
/// non-overlapping occurrences across all sequences (ties: more
/// occurrences, then earliest) becomes a new rule and its occurrences are
/// replaced by a reference, until nothing repeats. Each sequence is then
/// built by left-to-right joins, with every distinct object built once.
pub fn assembly_index_split(s: &str) -> Result<AssemblyResult> {
    let chars: Vec<char> = s.chars().collect();
    if chars.is_empty() {
        return Err(Error::EmptyInput);
    }
    let period = smallest_period(&chars);
    let unit = &chars[..period];
    let mut seqs: Vec<Vec<Tok>> = vec![unit.iter().map(|&c| Tok::Unit(c)).collect()];
    while let Some(pattern) = best_repeat(&seqs) {
        let rule = seqs.len();
        for seq in seqs.iter_mut() {
            *seq = replace_disjoint(seq, &pattern, Tok::Rule(rule));
        }
        seqs.push(pattern);
    }

    let mut builder = PathwayBuilder {
        seqs: &seqs,
        built: HashMap::new(),
        rule_refs: HashMap::new(),
        steps: Vec::new(),
    };
    let unit_obj = builder.build(0);
    builder.power(unit_obj, (chars.len() / period) as u64);
    let pathway = AssemblyPathway {
        basis: chars.iter().copied().collect(),
        steps: builder.steps,
        target: s.to_string(),
    };
    Ok(AssemblyResult {
        index: pathway.index(),
        pathway,
    })
}

/// Exponents above this use the binary method instead of a chain search.
pub const CHAIN_SEARCH_LIMIT: u64 = 4096;

/// Length of the shortest `p` with `s = p^(len/p)`.
fn smallest_period(s: &[char]) -> usize {
    (1..=s.len())
        .filter(|&p| s.len().is_multiple_of(p))
        .find(|&p| s[p..].iter().zip(s).all(|(a, b)| a == b))
        .unwrap_or(s.len())
}

/// An addition chain `1 = c0 < c1 < ... = n`: shortest when
/// `n <= CHAIN_SEARCH_LIMIT`, otherwise the binary method.
pub fn addition_chain(n: u64) -> Vec<u64> {
    assert!(n >= 1, "addition chains start at 1");
    if n > CHAIN_SEARCH_LIMIT {
        let mut chain = vec![1];
        let top = 63 - n.leading_zeros();
        for bit in (0..top).rev() {
            let last = *chain.last().expect("nonempty");
            chain.push(2 * last);
            if n >> bit & 1 == 1 {
                chain.push(2 * last + 1);
            }
        }
        return chain;
    }
    let mut chain = vec![1];
    let mut depth = 0;
    while !extend_chain(&mut chain, n, depth) {
        depth += 1;
    }
    chain
}

/// Depth-first search for a chain reaching `n` in `left` more elements,
/// trying larger sums first. Each new element exceeds the previous one.
fn extend_chain(chain: &mut Vec<u64>, n: u64, left: u32) -> bool {
    let last = *chain.last().expect("nonempty");
    if last == n {
        return true;
    }
    if left == 0 || last << left < n {
        return false;
    }
    let len = chain.len();
    let mut tried = Vec::new();
    for i in (0..len).rev() {
        for j in (0..=i).rev() {
            let next = chain[i] + chain[j];
            if next <= last {
                break;
            }
            if next > n || tried.contains(&next) {
                continue;
            }
            tried.push(next);
            chain.push(next);
            if extend_chain(chain, n, left - 1) {
                return true;
            }
            chain.pop();
        }
    }
    false
}

fn best_repeat(seqs: &[Vec<Tok>]) -> Option<Vec<Tok>> {
    let longest = seqs.iter().map(Vec::len).max().unwrap_or(0);
    // A length-k repeat implies a length-(k-1) one, so binary search on k.
    let (mut lo, mut hi) = (1usize, longest / 2);
    while lo < hi {
        let mid = (lo + hi).div_ceil(2);
        if repeats_of_len(seqs, mid).is_some() {
            lo = mid;
        } else {
            hi = mid - 1;
        }
    }
    repeats_of_len(seqs, lo)
}

/// The preferred length-`k` pattern with ≥ 2 non-overlapping occurrences
/// (greedy left-to-right within each sequence).
fn repeats_of_len(seqs: &[Vec<Tok>], k: usize) -> Option<Vec<Tok>> {
    struct Tally {
        count: usize,
        first: (usize, usize),
        end: Vec<usize>,
    }
    if k < 2 {
        return None;
    }
    let mut stats: HashMap<&[Tok], Tally> = HashMap::new();
    for (si, seq) in seqs.iter().enumerate() {
        for pos in 0..(seq.len() + 1).saturating_sub(k) {
            let tally = stats.entry(&seq[pos..pos + k]).or_insert_with(|| Tally {
                count: 0,
                first: (si, pos),
                end: vec![0; seqs.len()],
            });
            if pos >= tally.end[si] {
                tally.count += 1;
                tally.end[si] = pos + k;
            }
        }
    }
    stats
        .into_iter()
        .filter(|(_, t)| t.count >= 2)
        .min_by_key(|(_, t)| (std::cmp::Reverse(t.count), t.first))
        .map(|(p, _)| p.to_vec())
}

fn replace_disjoint(seq: &[Tok], pattern: &[Tok], with: Tok) -> Vec<Tok> {
    let mut out = Vec::with_capacity(seq.len());
    let mut i = 0;
    while i < seq.len() {
        if seq[i..].starts_with(pattern) {
            out.push(with);
            i += pattern.len();
        } else {
            out.push(seq[i]);
            i += 1;
        }
    }
    out
}

struct PathwayBuilder<'a> {
    seqs: &'a [Vec<Tok>],
    built: HashMap<String, usize>,
    rule_refs: HashMap<usize, (ObjectRef, String)>,
    steps: Vec<JoinStep>,
}

impl PathwayBuilder<'_> {
    fn operand(&mut self, tok: Tok) -> (ObjectRef, String) {
        match tok {
            Tok::Unit(c) => (ObjectRef::Basis(c), c.to_string()),
            Tok::Rule(r) => self.build(r),
        }
    }

    fn join(&mut self, left: &(ObjectRef, String), right: &(ObjectRef, String)) -> (ObjectRef, String) {
        let result = format!("{}{}", left.1, right.1);
        let at = match self.built.get(&result) {
            Some(&i) => i,
            None => {
                self.steps.push(JoinStep {
                    left: left.0,
                    right: right.0,
                    result: result.clone(),
                });
                self.built.insert(result.clone(), self.steps.len() - 1);
                self.steps.len() - 1
            }
        };
        (ObjectRef::Step(at), result)
    }

    /// Builds `unit^k` along an addition chain for `k`.
    fn power(&mut self, unit: (ObjectRef, String), k: u64) -> (ObjectRef, String) {
        let chain = addition_chain(k);
        let mut objs = vec![unit];
        for (i, &c) in chain.iter().enumerate().skip(1) {
            let (a, b) = (0..i)
                .rev()
                .find_map(|a| chain[..=a].iter().position(|&x| x + chain[a] == c).map(|b| (a, b)))
                .expect("every chain element is a sum of two earlier ones");
            let (left, right) = (objs[a].clone(), objs[b].clone());
            objs.push(self.join(&left, &right));
        }
        objs.pop().expect("nonempty")
    }

    fn build(&mut self, rule: usize) -> (ObjectRef, String) {
        if let Some(done) = self.rule_refs.get(&rule) {
            return done.clone();
        }
        let seqs = self.seqs;
        let seq = &seqs[rule];
        let mut acc = self.operand(seq[0]);
        for &tok in &seq[1..] {
            let next = self.operand(tok);
            acc = self.join(&acc, &next);
        }
        self.rule_refs.insert(rule, acc.clone());
        acc
    }
}

/// Renders a verified pathway as a DOT digraph: one node per unit symbol
/// used and per step, with a `left` and a `right` edge into each step.
pub fn assembly_tree_dot(p: &AssemblyPathway) -> Result<String> {
    if !verify_pathway(p, &p.target) {
        return Err(Error::InvalidPathway);
    }
    let mut used: BTreeSet<char> = BTreeSet::new();
    for step in &p.steps {
        for r in [step.left, step.right] {
            if let ObjectRef::Basis(c) = r {
                used.insert(c);
            }
        }
    }
    if p.steps.is_empty() {
        used.extend(p.target.chars());
    }
    let basis_ids: HashMap<char, usize> = used.iter().enumerate().map(|(i, &c)| (c, i)).collect();
    let node = |r: ObjectRef| match r {
        ObjectRef::Basis(c) => format!("b{}", basis_ids[&c]),
        ObjectRef::Step(i) => format!("s{i}"),
    };
    let mut out = String::from("digraph assembly {\n");
    for (&c, i) in used.iter().zip(0..) {
        let _ = writeln!(out, "  b{i} [shape=box, label=\"{}\"];", dot_escape(c));
    }
    for (i, step) in p.steps.iter().enumerate() {
        let label: String = step.result.chars().map(dot_escape).collect();
        let _ = writeln!(out, "  s{i} [shape=ellipse, label=\"{}: {label}\"];", i + 1);
    }
    for (i, step) in p.steps.iter().enumerate() {
        let _ = writeln!(out, "  {} -> s{i} [label=\"left\"];", node(step.left));
        let _ = writeln!(out, "  {} -> s{i} [label=\"right\"];", node(step.right));
    }
    out.push_str("}\n");
    Ok(out)
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    /// Breadth-first search over sets of built objects (bottom-up), the
    /// straightforward definition of the index. Only usable for tiny inputs.
    fn brute_force_index(s: &str) -> usize {
        let chars: Vec<char> = s.chars().collect();
        let n = chars.len();
        if n == 1 {
            return 0;
        }
        let mut subs: BTreeSet<String> = BTreeSet::new();
        for i in 0..n {
            for j in i + 2..=n {
                subs.insert(chars[i..j].iter().collect());
            }
        }
        let units: BTreeSet<String> = chars.iter().map(|c| c.to_string()).collect();
        let mut frontier: Vec<BTreeSet<String>> = vec![BTreeSet::new()];
        let mut seen: HashSet<BTreeSet<String>> = HashSet::new();
        for depth in 1.. {
            let mut next = Vec::new();
            for built in &frontier {
                let avail: Vec<&String> = units.iter().chain(built.iter()).collect();
                for a in &avail {
                    for b in &avail {
                        let joined = format!("{a}{b}");
                        if !subs.contains(&joined) || built.contains(&joined) {
                            continue;
                        }
                        if joined == s {
                            return depth;
                        }
                        let mut grown = built.clone();
                        grown.insert(joined);
                        if seen.insert(grown.clone()) {
                            next.push(grown);
                        }
                    }
                }
            }
            frontier = next;
        }
        unreachable!()
    }

    /// Shortest addition chain length, by iterative deepening over
    /// ascending chains. The index of a single repeated symbol.
    fn addition_chain_length(n: u64) -> usize {
        fn extend(chain: &mut Vec<u64>, n: u64, limit: usize) -> bool {
            let last = *chain.last().unwrap();
            if last == n {
                return true;
            }
            if chain.len() - 1 == limit || last << (limit + 1 - chain.len()) < n {
                return false;
            }
            for i in (0..chain.len()).rev() {
                for j in (0..=i).rev() {
                    let v = chain[i] + chain[j];
                    if v > last && v <= n {
                        chain.push(v);
                        if extend(chain, n, limit) {
                            return true;
                        }
                        chain.pop();
                    }
                }
            }
            false
        }
        (0..).find(|&limit| extend(&mut vec![1], n, limit)).unwrap()
    }

    fn all_binary(max_len: usize) -> Vec<String> {
        (2..=max_len)
            .flat_map(|n| {
                (0u32..1 << n).map(move |bits| (0..n).map(|i| if bits >> (n - 1 - i) & 1 == 1 { 'B' } else { 'A' }).collect())
            })
            .collect()
    }

    #[test]
    fn exact_examples() {
        assert_eq!(assembly_index_exact("A", None).unwrap().index, 0);
        let r = assembly_index_exact("ABRACADABRA", None).unwrap();
        assert_eq!(r.index, 7);
        assert!(verify_pathway(&r.pathway, "ABRACADABRA"));
        assert_eq!(assembly_index_exact("AAAAAAAA", None).unwrap().index, 3);
        assert_eq!(assembly_index_exact("ABCB", None).unwrap().index, 3);
        assert_eq!(brute_force_index("ABCB"), 3);
    }

    #[test]
    fn exact_errors() {
        assert!(matches!(assembly_index_exact("", None), Err(Error::EmptyInput)));
        let long = "AB".repeat(13);
        assert!(matches!(assembly_index_exact(&long, None), Err(Error::ExceedsGuard { len: 26, guard: 25 })));
        assert!(assembly_index_exact(&long, Some(26)).is_ok());
        assert!(matches!(assembly_index_exact("ABC", Some(2)), Err(Error::ExceedsGuard { .. })));
    }

    #[test]
    fn exact_matches_bottom_up_search() {
        for s in all_binary(8) {
            assert_eq!(assembly_index_exact(&s, None).unwrap().index, brute_force_index(&s), "{s}");
        }
        for s in ["ABCABC", "ABRACAD", "XYZXYZX", "ABCDAB", "AABBAABB"] {
            assert_eq!(assembly_index_exact(s, None).unwrap().index, brute_force_index(s), "{s}");
        }
    }

    #[test]
    fn repeated_symbol_follows_addition_chains() {
        assert_eq!(
            (1..=16).map(addition_chain_length).collect::<Vec<_>>(),
            vec![0, 1, 2, 2, 3, 3, 4, 3, 4, 4, 5, 4, 5, 5, 5, 4]
        );
        for n in 1..=16usize {
            let s = "A".repeat(n);
            let exact = assembly_index_exact(&s, None).unwrap().index;
            assert_eq!(exact, addition_chain_length(n as u64), "n = {n}");
            assert!(exact >= ceil_log2(n));
        }
    }

    #[test]
    fn addition_chains_are_valid_and_shortest() {
        // Smallest n needing l steps, l = 7..=14.
        for (n, l) in [(29, 7), (47, 8), (71, 9), (127, 10), (191, 11), (379, 12), (607, 13), (1087, 14)] {
            assert_eq!(addition_chain(n).len() - 1, l, "n = {n}");
        }
        for n in (1..=300).chain([4095, 4096, 4097, 1 << 20, (1 << 20) + 12345]) {
            let c = addition_chain(n);
            assert_eq!((c[0], *c.last().unwrap()), (1, n));
            for i in 1..c.len() {
                assert!(c[i] > c[i - 1]);
                assert!(c[..i].iter().any(|&a| c[..i].contains(&(c[i] - a))), "n = {n}");
            }
            if n <= 64 {
                assert_eq!(c.len() - 1, addition_chain_length(n), "n = {n}");
            }
        }
    }

    #[test]
    fn split_builds_powers_along_shortest_chains() {
        for n in 1..=64usize {
            let l = addition_chain_length(n as u64);
            assert_eq!(assembly_index_split(&"A".repeat(n)).unwrap().index, l, "n = {n}");
            let s = "ABC".repeat(n);
            let r = assembly_index_split(&s).unwrap();
            assert!(verify_pathway(&r.pathway, &s));
            assert_eq!(r.index, 2 + l, "n = {n}");
        }
    }

    #[test]
    fn witness_is_deterministic_across_execution_modes() {
        for s in ["ABRACADABRA", "ABABBABA", "AABAAB"] {
            let a = assembly_index_exact_with(s, None, Execution::Sequential).unwrap();
            let b = assembly_index_exact_with(s, None, Execution::Parallel).unwrap();
            assert_eq!(a, b);
        }
    }

    #[test]
    fn split_examples() {
        assert_eq!(assembly_index_split("AA").unwrap().index, 1);
        assert_eq!(assembly_index_split("A").unwrap().index, 0);
        assert_eq!(assembly_index_split(&"A".repeat(16)).unwrap().index, 4);
        let r = assembly_index_split("ABRACADABRA").unwrap();
        assert!(verify_pathway(&r.pathway, "ABRACADABRA"));
        assert_eq!(r.index, 7);
        assert!(assembly_index_split("").is_err());
    }

    #[test]
    fn split_dominates_exact_on_short_binary() {
        for s in all_binary(9) {
            let exact = assembly_index_exact(&s, None).unwrap();
            let split = assembly_index_split(&s).unwrap();
            assert!(split.index >= exact.index, "{s}");
            assert!(verify_pathway(&split.pathway, &s));
        }
    }

    #[test]
    fn verify_examples() {
        let p = AssemblyPathway::from_joins("AAAA", [("A", "A"), ("AA", "AA")]).unwrap();
        assert!(verify_pathway(&p, "AAAA"));
        let p = AssemblyPathway::from_joins("BA", [("A", "B")]).unwrap();
        assert!(!verify_pathway(&p, "BA"));
        let p = AssemblyPathway::from_joins(
            "ABRACADABRA",
            [
                ("A", "B"),
                ("AB", "R"),
                ("ABR", "A"),
                ("ABRA", "C"),
                ("ABRAC", "A"),
                ("ABRACA", "D"),
                ("ABRACAD", "ABRA"),
            ],
        )
        .unwrap();
        assert!(verify_pathway(&p, "ABRACADABRA"));
        assert_eq!(p.index(), 7);
    }

    #[test]
    fn verify_rejects_malformed_references() {
        let mut p = AssemblyPathway::from_joins("AAAA", [("A", "A"), ("AA", "AA")]).unwrap();
        p.steps[1].left = ObjectRef::Step(1);
        assert!(!verify_pathway(&p, "AAAA"));
        p.steps[1].left = ObjectRef::Basis('Z');
        assert!(!verify_pathway(&p, "AAAA"));
        let empty = AssemblyPathway { basis: BTreeSet::from(['A']), steps: vec![], target: "AA".into() };
        assert!(!verify_pathway(&empty, "AA"));
    }

    #[test]
    fn dot_examples() {
        let count = |dot: &str, pat: &str| dot.lines().filter(|l| l.contains(pat)).count();
        let p = AssemblyPathway::from_joins("AA", [("A", "A")]).unwrap();
        let dot = assembly_tree_dot(&p).unwrap();
        assert_eq!((count(&dot, "shape=ellipse"), count(&dot, "shape=box"), count(&dot, "->")), (1, 1, 2));

        let r = assembly_index_exact("ABRACADABRA", None).unwrap();
        let dot = assembly_tree_dot(&r.pathway).unwrap();
        assert_eq!(count(&dot, "shape=ellipse"), 7);
        assert_eq!(count(&dot, "->"), 14);

        let single = AssemblyPathway { basis: BTreeSet::from(['A']), steps: vec![], target: "A".into() };
        let dot = assembly_tree_dot(&single).unwrap();
        assert_eq!((count(&dot, "shape=ellipse"), count(&dot, "shape=box")), (0, 1));

        let bad = AssemblyPathway::from_joins("BA", [("A", "B")]).unwrap();
        assert!(assembly_tree_dot(&bad).is_err());
    }

    proptest! {
        #![proptest_config(ProptestConfig::with_cases(64))]

        #[test]
        fn bounds_and_witness(s in "[AB]{1,12}") {
            let n = s.len();
            let r = assembly_index_exact(&s, None).unwrap();
            prop_assert!(verify_pathway(&r.pathway, &s));
            prop_assert_eq!(r.index, r.pathway.index());
            prop_assert!(ceil_log2(n) <= r.index && r.index < n);
            prop_assert_eq!(r.index == 0, n == 1);
        }

        #[test]
        fn renaming_invariance(s in "[ABC]{1,10}") {
            let renamed: String = s.chars().map(|c| match c { 'A' => 'x', 'B' => 'A', _ => 'q' }).collect();
            prop_assert_eq!(
                assembly_index_exact(&s, None).unwrap().index,
                assembly_index_exact(&renamed, None).unwrap().index
            );
        }

        #[test]
        fn concatenation_laws(s in "[AB]{1,6}", t in "[AB]{1,6}") {
            let is = assembly_index_exact(&s, None).unwrap().index;
            let it = assembly_index_exact(&t, None).unwrap().index;
            let ss = assembly_index_exact(&format!("{s}{s}"), None).unwrap().index;
            let st = assembly_index_exact(&format!("{s}{t}"), None).unwrap().index;
            prop_assert!(ss <= is + 1);
            prop_assert!(st <= is + it + 1);
        }

        #[test]
        fn split_is_a_valid_upper_bound(s in "[A-D]{1,40}") {
            let r = assembly_index_split(&s).unwrap();
            prop_assert!(verify_pathway(&r.pathway, &s));
            prop_assert!(r.index < s.len());
            prop_assert!(r.index >= ceil_log2(s.len()));
        }
    }
}
