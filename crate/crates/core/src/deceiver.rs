//! Sequences with tiny generators and high measured complexity.
//!
//! A [`GeneratorSpec`] is written as JSON, e.g.
//! `{"kind":"champernowne","n":1000,"base":10}` or
//! `{"kind":"modular","seed":"A","period":2,"steps":3,"extension_symbols":["B"]}`.
//!
//! Its description length is the size of a fixed bit encoding:
//! 2 bits for the kind (`00` champernowne, `01` modular), then
//! - champernowne: `gamma(n + 1)`, `gamma(base)`;
//! - modular: `gamma(period)`, `gamma(steps)`, `gamma(seed bytes)`, the seed
//!   as 8-bit UTF-8 bytes, `gamma(extension bytes + 1)`, the extension
//!   symbols as 8-bit UTF-8 bytes.
//!
//! `gamma` is the Elias gamma code, `2·floor(log2 x) + 1` bits for `x ≥ 1`.

use rand::seq::SliceRandom;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use crate::coding::SymbolCounts;
use crate::error::{Error, Result};
use crate::ingest::{DatasetRecord, Payload};
use crate::measure::{measure_payload, Measure, MeasureContext, Measured};

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case", deny_unknown_fields)]
pub enum GeneratorSpec {
    Champernowne {
        n: usize,
        base: u32,
    },
    Modular {
        seed: String,
        period: usize,
        steps: usize,
        #[serde(default)]
        extension_symbols: Vec<char>,
    },
}

/// First `n` digits of `1, 2, 3, ...` written in `base` (digits `0-9a-z`).
pub fn champernowne(n: usize, base: u32) -> Result<String> {
    if !(2..=36).contains(&base) {
        return Err(Error::InvalidParam(format!("base must be in 2..=36, got {base}")));
    }
    let mut out = String::with_capacity(n);
    let mut digits = Vec::new();
    let mut k: u64 = 1;
    while out.len() < n {
        digits.clear();
        let mut v = k;
        while v > 0 {
            digits.push(char::from_digit((v % u64::from(base)) as u32, base).expect("digit below base"));
            v /= u64::from(base);
        }
        out.extend(digits.iter().rev().take(n - out.len()));
        k += 1;
    }
    Ok(out)
}

/// Output length of a modular spec without generating it.
pub fn modular_length(seed_len: usize, period: usize, steps: usize) -> usize {
    (1..=steps).map(|i| seed_len + (i - 1) / period).sum()
}

/// Appends the module once per step; after every `period` steps the module
/// grows by the next extension symbol, cycling through the list.
pub fn modular_generate(seed: &str, period: usize, steps: usize, extension_symbols: &[char]) -> Result<String> {
    if seed.is_empty() {
        return Err(Error::InvalidParam("modular generator needs a nonempty seed".into()));
    }
    if period == 0 || steps == 0 {
        return Err(Error::InvalidParam("period and steps must be positive".into()));
    }
    if extension_symbols.is_empty() && period < steps {
        return Err(Error::InvalidParam("module grows but no extension symbols were given".into()));
    }
    let mut module: Vec<char> = seed.chars().collect();
    let mut out = String::new();
    let mut next_ext = 0;
    for i in 1..=steps {
        out.extend(module.iter());
        if i % period == 0 && i < steps {
            module.push(extension_symbols[next_ext % extension_symbols.len()]);
            next_ext += 1;
        }
    }
    assert_eq!(
        out.chars().count(),
        modular_length(seed.chars().count(), period, steps),
        "modular output length"
    );
    Ok(out)
}

/// Elias gamma code of `x ≥ 1` as a `0`/`1` string.
pub fn elias_gamma(x: u64) -> String {
    assert!(x >= 1, "elias gamma needs x ≥ 1");
    let bin = format!("{x:b}");
    "0".repeat(bin.len() - 1) + &bin
}

fn bytes_as_bits(s: &str) -> String {
    s.bytes().map(|b| format!("{b:08b}")).collect()
}

impl GeneratorSpec {
    pub fn generate(&self) -> Result<String> {
        match self {
            GeneratorSpec::Champernowne { n, base } => champernowne(*n, *base),
            GeneratorSpec::Modular { seed, period, steps, extension_symbols } => {
                modular_generate(seed, *period, *steps, extension_symbols)
            }
        }
    }

    /// The canonical bit encoding described in the module docs.
    pub fn encode(&self) -> Result<String> {
        match self {
            GeneratorSpec::Champernowne { n, base } => {
                if *base < 2 {
                    return Err(Error::InvalidParam(format!("base must be ≥ 2, got {base}")));
                }
                Ok(format!("00{}{}", elias_gamma(*n as u64 + 1), elias_gamma(u64::from(*base))))
            }
            GeneratorSpec::Modular { seed, period, steps, extension_symbols } => {
                if seed.is_empty() || *period == 0 || *steps == 0 {
                    return Err(Error::InvalidParam("modular spec needs a seed and positive period/steps".into()));
                }
                let ext: String = extension_symbols.iter().collect();
                Ok(format!(
                    "01{}{}{}{}{}{}",
                    elias_gamma(*period as u64),
                    elias_gamma(*steps as u64),
                    elias_gamma(seed.len() as u64),
                    bytes_as_bits(seed),
                    elias_gamma(ext.len() as u64 + 1),
                    bytes_as_bits(&ext),
                ))
            }
        }
    }

    pub fn description_bits(&self) -> Result<u64> {
        Ok(self.encode()?.len() as u64)
    }

    pub fn from_json(text: &str) -> Result<Self> {
        serde_json::from_str(text).map_err(|e| Error::InvalidParam(format!("generator spec: {e}")))
    }

    pub fn to_json(&self) -> String {
        serde_json::to_string(self).expect("spec serializes")
    }
}

/// `H(s) / log2(distinct symbols)`; 0 for a single-symbol string.
pub fn normalized_entropy(s: &str) -> Result<f64> {
    let counts = SymbolCounts::of(s)?;
    if counts.distinct() < 2 {
        return Ok(0.0);
    }
    Ok(counts.entropy() / (counts.distinct() as f64).log2())
}

#[derive(Debug, Clone, PartialEq)]
pub struct DivergenceReport {
    pub length: usize,
    pub description_bits: u64,
    pub normalized_entropy: f64,
    pub values: Vec<(Measure, Measured)>,
}

/// Measures to report by default: everything cheap enough for long
/// payloads, plus `bdm1d` when a table is available.
pub fn default_divergence_measures(ctx: &MeasureContext) -> Vec<Measure> {
    let mut ms = vec![Measure::Entropy, Measure::Huffman, Measure::Rle, Measure::Lzw, Measure::MaSplit];
    if ctx.ctm_1d.is_some() {
        ms.push(Measure::Bdm1d);
    }
    ms
}

/// Puts the measured complexity of `s` next to its generator's size.
pub fn divergence_report(s: &str, spec: &GeneratorSpec, measures: &[Measure], ctx: &MeasureContext) -> Result<DivergenceReport> {
    if spec.generate()? != s {
        return Err(Error::PayloadMismatch);
    }
    ctx.check(measures)?;
    let payload = Payload::Text(s.to_string());
    let values = measures
        .iter()
        .map(|&m| Ok((m, measure_payload(&payload, m, ctx)?)))
        .collect::<Result<_>>()?;
    Ok(DivergenceReport {
        length: s.chars().count(),
        description_bits: spec.description_bits()?,
        normalized_entropy: normalized_entropy(s)?,
        values,
    })
}

/// The 16 corpus symbols `A..=P`.
pub const CORPUS_ALPHABET: [char; 16] = [
    'A', 'B', 'C', 'D', 'E', 'F', 'G', 'H', 'I', 'J', 'K', 'L', 'M', 'N', 'O', 'P',
];

pub const CORPUS_CATEGORIES: [&str; 4] = ["repetition", "modular", "champernowne", "random"];

/// Run lengths inside a repetition unit.
const RUN_LENGTHS: std::ops::RangeInclusive<usize> = 2..=8;

fn pick(rng: &mut ChaCha8Rng, k: usize) -> String {
    (0..k).map(|_| *CORPUS_ALPHABET.choose(rng).expect("nonempty")).collect()
}

fn truncate(s: String, len: usize) -> String {
    s.chars().take(len).collect()
}

/// A labelled corpus spanning pure repetition to uniform noise.
///
/// Record `i` belongs to category `i mod 4` and has a length drawn
/// uniformly from 20..=200:
/// - `repetition`: a unit of two runs (`AAAB`-like, run lengths 2–8 over
///   two distinct symbols) repeated;
/// - `modular`: a [`modular_generate`] output with a 1–2 symbol seed and
///   1–3 extension symbols not in the seed;
/// - `champernowne`: base-16 Champernowne digits mapped onto `A..=P`,
///   starting at a random offset;
/// - `random`: independent uniform symbols.
///
/// Generated strings are cut to the drawn length. The corpus depends only
/// on `seed`.
pub fn synthetic_corpus(seed: u64, size: usize) -> Vec<DatasetRecord> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    (0..size)
        .map(|i| {
            let category = CORPUS_CATEGORIES[i % 4];
            let len = rng.gen_range(20..=200usize);
            let payload = match category {
                "repetition" => {
                    let sym: Vec<char> = CORPUS_ALPHABET.choose_multiple(&mut rng, 2).copied().collect();
                    let (a, b) = (rng.gen_range(RUN_LENGTHS), rng.gen_range(RUN_LENGTHS));
                    let unit: String = std::iter::repeat_n(sym[0], a).chain(std::iter::repeat_n(sym[1], b)).collect();
                    truncate(unit.repeat(len.div_ceil(a + b)), len)
                }
                "modular" => {
                    let k = rng.gen_range(1..=2);
                    let e = rng.gen_range(1..=3);
                    // Extensions differ from the seed, so the module really grows.
                    let syms: Vec<char> = CORPUS_ALPHABET.choose_multiple(&mut rng, k + e).copied().collect();
                    let seed_str: String = syms[..k].iter().collect();
                    let period = rng.gen_range(2..=6);
                    let mut steps = 1;
                    while modular_length(k, period, steps) < len {
                        steps += 1;
                    }
                    let out = modular_generate(&seed_str, period, steps, &syms[k..]).expect("valid modular spec");
                    truncate(out, len)
                }
                "champernowne" => {
                    let offset = rng.gen_range(0..2000usize);
                    champernowne(offset + len, 16)
                        .expect("base 16")
                        .chars()
                        .skip(offset)
                        .map(|c| CORPUS_ALPHABET[c.to_digit(16).expect("hex digit") as usize])
                        .collect()
                }
                _ => pick(&mut rng, len),
            };
            DatasetRecord::text(format!("syn{i:03}"), category, payload)
        })
        .collect()
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::assembly::{assembly_index_exact, assembly_index_split};
    use crate::coding::shannon_entropy;
    use proptest::prelude::*;

    fn modular(seed: &str, period: usize, steps: usize, ext: &[char]) -> GeneratorSpec {
        GeneratorSpec::Modular {
            seed: seed.into(),
            period,
            steps,
            extension_symbols: ext.to_vec(),
        }
    }

    #[test]
    fn champernowne_examples() {
        assert_eq!(champernowne(20, 10).unwrap(), "12345678910111213141");
        assert_eq!(champernowne(0, 10).unwrap(), "");
        // 1, 10, 11, 100, 101 truncated to 10 digits.
        assert_eq!(champernowne(10, 2).unwrap(), "1101110010");
        assert_eq!(champernowne(12, 16).unwrap(), "123456789abc");
        assert!(champernowne(5, 1).is_err());
        assert!(champernowne(5, 37).is_err());
    }

    #[test]
    fn modular_examples() {
        assert_eq!(modular_generate("AB", 10, 4, &[]).unwrap(), "ABABABAB");
        assert_eq!(modular_generate("A", 2, 3, &['B']).unwrap(), "AAAB");
        assert_eq!(modular_generate("A", 1, 4, &['B', 'C']).unwrap(), "AABABCABCB");
        assert!(modular_generate("", 2, 3, &['B']).is_err());
        assert!(modular_generate("A", 2, 0, &['B']).is_err());
        assert!(modular_generate("A", 0, 3, &['B']).is_err());
        assert!(modular_generate("A", 2, 3, &[]).is_err());
    }

    #[test]
    fn elias_gamma_lengths() {
        assert_eq!(elias_gamma(1), "1");
        assert_eq!(elias_gamma(2), "010");
        assert_eq!(elias_gamma(5), "00101");
        for x in 1..2000u64 {
            assert_eq!(elias_gamma(x).len() as u32, 2 * (63 - x.leading_zeros()) + 1);
        }
    }

    #[test]
    fn description_bits_worked_examples() {
        // 2 + gamma(1001) (19 bits) + gamma(10) (7 bits)
        let c = GeneratorSpec::Champernowne { n: 1000, base: 10 };
        assert_eq!(c.description_bits().unwrap(), 28);
        // 2 + gamma(2) + gamma(3) + gamma(1) + 8 + gamma(2) + 8
        let m = modular("A", 2, 3, &['B']);
        assert_eq!(m.description_bits().unwrap(), 2 + 3 + 3 + 1 + 8 + 3 + 8);
    }

    #[test]
    fn description_bits_grow_logarithmically() {
        let bits = |n| GeneratorSpec::Champernowne { n, base: 10 }.description_bits().unwrap();
        for n in [10usize, 100, 1000, 10_000, 100_000] {
            let log = (n as f64 + 1.0).log2().floor() as u64;
            assert_eq!(bits(n), 2 + 2 * log + 1 + 7);
        }
    }

    #[test]
    fn json_round_trip() {
        let c = GeneratorSpec::from_json(r#"{"kind":"champernowne","n":1000,"base":10}"#).unwrap();
        assert_eq!(c, GeneratorSpec::Champernowne { n: 1000, base: 10 });
        let m = modular("A", 2, 3, &['B']);
        assert_eq!(
            m.to_json(),
            r#"{"kind":"modular","seed":"A","period":2,"steps":3,"extension_symbols":["B"]}"#
        );
        assert_eq!(GeneratorSpec::from_json(&m.to_json()).unwrap(), m);
        assert!(GeneratorSpec::from_json(r#"{"kind":"graph"}"#).is_err());
    }

    #[test]
    fn champernowne_divergence() {
        let s = champernowne(1000, 10).unwrap();
        let spec = GeneratorSpec::Champernowne { n: 1000, base: 10 };
        let ctx = MeasureContext::default();
        let r = divergence_report(&s, &spec, &default_divergence_measures(&ctx), &ctx).unwrap();
        assert!(r.normalized_entropy > 0.95, "{}", r.normalized_entropy);
        assert!(r.description_bits < 100);
        assert_eq!(r.length, 1000);
        assert_eq!(r.values.len(), 5);
    }

    #[test]
    fn repetition_divergence() {
        let spec = modular("A", 1000, 64, &[]);
        let s = spec.generate().unwrap();
        let ctx = MeasureContext::default();
        let r = divergence_report(&s, &spec, &[Measure::Rle, Measure::MaSplit], &ctx).unwrap();
        assert_eq!(r.values[0].1.value, 3.0);
        assert!(r.values[1].1.value <= 7.0);
        assert_eq!(r.normalized_entropy, 0.0);
    }

    #[test]
    fn mismatched_payload_is_rejected() {
        let spec = GeneratorSpec::Champernowne { n: 2, base: 10 };
        let ctx = MeasureContext::default();
        assert!(matches!(
            divergence_report("AB", &spec, &[Measure::Entropy], &ctx),
            Err(Error::PayloadMismatch)
        ));
    }

    #[test]
    fn champernowne_entropy_trend() {
        let h: Vec<f64> = [100, 1000, 10_000]
            .iter()
            .map(|&n| shannon_entropy(&champernowne(n, 10).unwrap()).unwrap())
            .collect();
        for w in h.windows(2) {
            assert!(w[1] >= w[0] - 0.05, "{h:?}");
        }
        assert!(h[2] < 10f64.log2());
    }

    #[test]
    fn corpus_shape_and_determinism() {
        let a = synthetic_corpus(42, 200);
        assert_eq!(a, synthetic_corpus(42, 200));
        assert_ne!(a, synthetic_corpus(43, 200));
        assert_eq!(a.len(), 200);
        for (i, r) in a.iter().enumerate() {
            assert_eq!(r.category, CORPUS_CATEGORIES[i % 4]);
            let Payload::Text(s) = &r.payload else { panic!("text payload") };
            assert!((20..=200).contains(&s.chars().count()));
            assert!(s.chars().all(|c| CORPUS_ALPHABET.contains(&c)));
        }
    }

    proptest! {
        #[test]
        fn champernowne_prefix_stable(n in 0usize..300, m in 0usize..300, base in 2u32..=36) {
            let long = champernowne(n + m, base).unwrap();
            prop_assert!(long.starts_with(&champernowne(n, base).unwrap()));
            prop_assert_eq!(long.chars().count(), n + m);
        }

        #[test]
        fn modular_length_matches(seed in "[A-D]{1,4}", period in 1usize..6, steps in 1usize..40, ext in proptest::collection::vec(proptest::char::range('A', 'F'), 1..4)) {
            let s = modular_generate(&seed, period, steps, &ext).unwrap();
            prop_assert_eq!(s.chars().count(), modular_length(seed.len(), period, steps));
            let spec = GeneratorSpec::Modular { seed, period, steps, extension_symbols: ext };
            prop_assert_eq!(spec.generate().unwrap(), s);
        }

        // ceil(log2 k) + 1 bounds the shortest addition chain only for
        // k < 29 (l(29) = 7), so the bound is checked below that.
        #[test]
        fn pure_repetition_split_bound(seed in "[A-C]{1,5}", steps in 1usize..29) {
            let s = modular_generate(&seed, steps + 1, steps, &[]).unwrap();
            let split = assembly_index_split(&s).unwrap().index;
            let seed_index = assembly_index_exact(&seed, None).unwrap().index;
            let bound = (steps as f64).log2().ceil() as usize + seed_index + 1;
            prop_assert!(split <= bound, "{s}: split {split} > bound {bound}");
        }
    }
}
