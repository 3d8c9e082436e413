//! The `complexity` command line: dataset in, measures, statistics and
//! tree renderings out. Every command is deterministic for fixed inputs.
//!
//! Exit codes: 0 success, 1 I/O or parse failure, 2 usage or configuration
//! error.

use std::collections::{BTreeMap, BTreeSet, HashMap};
use std::fs::File;
use std::io::{self, BufWriter, Write};
use std::path::{Path, PathBuf};

use clap::{Args, Parser, Subcommand, ValueEnum};
use complexity_core::assembly::{assembly_index_exact_with, assembly_index_split, assembly_tree_dot};
use complexity_core::bdm::{
    ctm_enumerate, ctm_load, ctm_save, toy_table_1d, toy_table_2d, BdmParams, Boundary, MissingBlockPolicy,
};
use complexity_core::coding::{huffman, huffman_tree_dot};
use complexity_core::deceiver::{champernowne, default_divergence_measures, divergence_report, synthetic_corpus, GeneratorSpec};
use complexity_core::ingest::{
    binarize_matrix, load_dataset, read_matrix_csv, read_results, sdf_distance_matrix, write_dataset, write_matrix_csv,
    write_results, MeasureResult,
};
use complexity_core::measure::{measure_dataset, Measure, MeasureContext};
use complexity_core::numfmt::sig12;
use complexity_core::stats::{ks_two_sample, pearson, spearman, welch_t, StatReport, DEFAULT_CI_LEVEL};
use complexity_core::{Error, Execution};

#[derive(Debug, thiserror::Error)]
pub enum CliError {
    #[error("{0}")]
    Usage(String),
    #[error("{0}")]
    Failure(String),
}

impl CliError {
    pub fn exit_code(&self) -> i32 {
        match self {
            CliError::Failure(_) => 1,
            CliError::Usage(_) => 2,
        }
    }
}

impl From<Error> for CliError {
    fn from(e: Error) -> Self {
        let msg = e.to_string();
        match e {
            Error::Io(_)
            | Error::Csv(_)
            | Error::Parse { .. }
            | Error::EmptyTable
            | Error::DuplicateBlock { .. }
            | Error::DuplicateId(_)
            | Error::UnknownPayloadKind { .. }
            | Error::MatrixPath { .. }
            | Error::EmptyInput
            | Error::InvalidPathway => CliError::Failure(msg),
            _ => CliError::Usage(msg),
        }
    }
}

impl From<io::Error> for CliError {
    fn from(e: io::Error) -> Self {
        CliError::Failure(e.to_string())
    }
}

impl From<csv::Error> for CliError {
    fn from(e: csv::Error) -> Self {
        CliError::Failure(e.to_string())
    }
}

type CliResult<T> = std::result::Result<T, CliError>;

#[derive(Debug, Parser)]
#[command(name = "complexity", version, about = "Assembly index, coding and BDM measures with a comparison pipeline")]
pub struct Cli {
    /// Run batch work on one thread.
    #[arg(long, global = true)]
    pub sequential: bool,
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Measure every record of a dataset CSV.
    Measure(MeasureArgs),
    /// Correlate two measures from a results CSV, paired by id.
    Correlate(CorrelateArgs),
    /// Compare groups per measure with Welch's t or two-sample KS.
    Classify(ClassifyArgs),
    /// Write the assembly pathway or Huffman tree of a string as DOT.
    Tree(TreeArgs),
    /// Enumerate small Turing machines into a 1D CTM table.
    CtmGen(CtmGenArgs),
    /// Threshold a matrix CSV (or an SDF distance matrix) to 0/1.
    Binarize(BinarizeArgs),
    /// Print the first N Champernowne digits.
    Champernowne(ChampernowneArgs),
    /// Write the seeded synthetic benchmark dataset.
    Synthetic(SyntheticArgs),
    /// Report measures of a generator's output next to its description size.
    Deceive(DeceiveArgs),
}

#[derive(Debug, Args)]
pub struct MeasureArgs {
    #[arg(long)]
    pub input: PathBuf,
    /// Output CSV (stdout when absent).
    #[arg(long)]
    pub out: Option<PathBuf>,
    /// Comma-separated: entropy,huffman,rle,lzw,ma_exact,ma_split,bdm1d,bdm2d.
    #[arg(long, default_value = "entropy,huffman,rle,lzw,ma_split")]
    pub measures: String,
    #[command(flatten)]
    pub bdm: BdmArgs,
    /// Binarization threshold for matrix payloads (strictly greater → 1).
    #[arg(long)]
    pub threshold: Option<f64>,
    /// Longest payload accepted by ma_exact.
    #[arg(long, default_value_t = complexity_core::assembly::DEFAULT_EXACT_GUARD)]
    pub exact_guard: usize,
}

#[derive(Debug, Clone, Copy, ValueEnum)]
pub enum BoundaryArg {
    Ignore,
    Pad,
}

#[derive(Debug, Clone, Copy, ValueEnum)]
pub enum MissingArg {
    Error,
    Entropy,
}

#[derive(Debug, Args)]
pub struct BdmArgs {
    /// CTM table CSV (1D or 2D).
    #[arg(long, conflicts_with = "toy_ctm")]
    pub ctm_table: Option<PathBuf>,
    /// Use the bundled toy tables (formula checks only, not CTM estimates).
    #[arg(long)]
    pub toy_ctm: bool,
    #[arg(long, conflicts_with = "block_shape")]
    pub block: Option<usize>,
    /// 2D block shape as RxC, e.g. 2x2.
    #[arg(long)]
    pub block_shape: Option<String>,
    #[arg(long, default_value_t = 0)]
    pub overlap: usize,
    #[arg(long, value_enum, default_value_t = BoundaryArg::Ignore)]
    pub boundary: BoundaryArg,
    #[arg(long, value_enum, default_value_t = MissingArg::Error)]
    pub missing_block: MissingArg,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum Method {
    Pearson,
    Spearman,
}

#[derive(Debug, Args)]
pub struct CorrelateArgs {
    /// Results CSV from `measure`.
    #[arg(long)]
    pub input: PathBuf,
    #[arg(long)]
    pub x: String,
    #[arg(long)]
    pub y: String,
    #[arg(long, value_enum, default_value_t = Method::Spearman)]
    pub method: Method,
    #[arg(long, default_value_t = DEFAULT_CI_LEVEL)]
    pub ci: f64,
    #[arg(long)]
    pub out: Option<PathBuf>,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum TestArg {
    #[value(name = "welch_t", alias = "welch-t")]
    WelchT,
    Ks,
}

#[derive(Debug, Args)]
pub struct ClassifyArgs {
    /// Results CSV from `measure`.
    #[arg(long)]
    pub input: PathBuf,
    /// Column holding the group label: category, id or metadata.
    #[arg(long, default_value = "category")]
    pub group_col: String,
    #[arg(long, value_enum, default_value_t = TestArg::WelchT)]
    pub test: TestArg,
    #[arg(long)]
    pub out: Option<PathBuf>,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum TreeMethod {
    Assembly,
    Huffman,
}

#[derive(Debug, Args)]
pub struct TreeArgs {
    pub string: String,
    #[arg(long, value_enum, default_value_t = TreeMethod::Assembly)]
    pub method: TreeMethod,
    /// Use the split heuristic instead of the exact search.
    #[arg(long)]
    pub split: bool,
    #[arg(long, default_value_t = complexity_core::assembly::DEFAULT_EXACT_GUARD)]
    pub exact_guard: usize,
    /// DOT output (stdout when absent).
    #[arg(long)]
    pub out: Option<PathBuf>,
}

#[derive(Debug, Args)]
pub struct CtmGenArgs {
    #[arg(long, default_value_t = 2)]
    pub states: u32,
    #[arg(long, default_value_t = 2)]
    pub symbols: u32,
    #[arg(long, default_value_t = 30)]
    pub steps: u32,
    #[arg(long)]
    pub out: PathBuf,
}

#[derive(Debug, Args)]
pub struct BinarizeArgs {
    /// Matrix CSV, or a V2000 SDF file with --sdf.
    #[arg(long)]
    pub input: PathBuf,
    #[arg(long)]
    pub threshold: f64,
    /// Read the input as SDF and binarize its distance matrix.
    #[arg(long)]
    pub sdf: bool,
    #[arg(long)]
    pub out: PathBuf,
}

#[derive(Debug, Args)]
pub struct ChampernowneArgs {
    pub n: usize,
    #[arg(long, default_value_t = 10)]
    pub base: u32,
}

#[derive(Debug, Args)]
pub struct SyntheticArgs {
    #[arg(long, default_value_t = 42)]
    pub seed: u64,
    #[arg(long, default_value_t = 200)]
    pub size: usize,
    #[arg(long)]
    pub out: Option<PathBuf>,
}

#[derive(Debug, Args)]
pub struct DeceiveArgs {
    /// Generator spec as JSON.
    #[arg(long)]
    pub spec: String,
    /// Measures to report; defaults to entropy,huffman,rle,lzw,ma_split
    /// (+bdm1d with a table).
    #[arg(long)]
    pub measures: Option<String>,
    #[arg(long)]
    pub toy_ctm: bool,
    #[arg(long)]
    pub ctm_table: Option<PathBuf>,
    #[arg(long)]
    pub out: Option<PathBuf>,
}

/// Parses `args` (including the program name) and runs the command.
pub fn run_from<I, T>(args: I) -> CliResult<()>
where
    I: IntoIterator<Item = T>,
    T: Into<std::ffi::OsString> + Clone,
{
    let cli = Cli::try_parse_from(args).map_err(|e| CliError::Usage(e.to_string()))?;
    run(cli)
}

pub fn run(cli: Cli) -> CliResult<()> {
    let exec = if cli.sequential { Execution::Sequential } else { Execution::default() };
    match cli.command {
        Command::Measure(a) => cmd_measure(&a, exec),
        Command::Correlate(a) => cmd_correlate(&a),
        Command::Classify(a) => cmd_classify(&a),
        Command::Tree(a) => cmd_tree(&a, exec),
        Command::CtmGen(a) => {
            let table = ctm_enumerate(a.states, a.symbols, a.steps, exec)?;
            ctm_save(&table, &a.out)?;
            Ok(())
        }
        Command::Binarize(a) => cmd_binarize(&a),
        Command::Champernowne(a) => {
            println!("{}", champernowne(a.n, a.base)?);
            Ok(())
        }
        Command::Synthetic(a) => {
            let records = synthetic_corpus(a.seed, a.size);
            write_dataset(&records, output(a.out.as_deref())?)?;
            Ok(())
        }
        Command::Deceive(a) => cmd_deceive(&a, exec),
    }
}

fn output(path: Option<&Path>) -> CliResult<Box<dyn Write>> {
    Ok(match path {
        Some(p) => Box::new(BufWriter::new(
            File::create(p).map_err(|e| CliError::Failure(format!("{}: {e}", p.display())))?,
        )),
        None => Box::new(BufWriter::new(io::stdout().lock())),
    })
}

fn open(path: &Path) -> CliResult<File> {
    File::open(path).map_err(|e| CliError::Failure(format!("{}: {e}", path.display())))
}

fn parse_shape(s: &str) -> CliResult<(usize, usize)> {
    let bad = || CliError::Usage(format!("block shape must look like 2x2, got {s:?}"));
    let (r, c) = s.split_once(['x', 'X']).ok_or_else(bad)?;
    let r: usize = r.trim().parse().map_err(|_| bad())?;
    let c: usize = c.trim().parse().map_err(|_| bad())?;
    if r == 0 || c == 0 {
        return Err(bad());
    }
    Ok((r, c))
}

fn load_tables(ctx: &mut MeasureContext, toy: bool, path: Option<&Path>) -> CliResult<()> {
    if toy {
        ctx.ctm_1d = Some(toy_table_1d());
        ctx.ctm_2d = Some(toy_table_2d());
    }
    if let Some(p) = path {
        let t = ctm_load(p)?;
        if t.dimension() == 1 {
            ctx.ctm_1d = Some(t);
        } else {
            ctx.ctm_2d = Some(t);
        }
    }
    Ok(())
}

fn bdm_params(a: &BdmArgs) -> CliResult<BdmParams> {
    let mut p = BdmParams::default();
    if let Some(b) = a.block {
        p.block_size = b;
    }
    if let Some(s) = &a.block_shape {
        p.block_shape = parse_shape(s)?;
    }
    p.overlap = a.overlap;
    p.boundary = match a.boundary {
        BoundaryArg::Ignore => Boundary::Ignore,
        BoundaryArg::Pad => Boundary::Pad,
    };
    p.missing_block = match a.missing_block {
        MissingArg::Error => MissingBlockPolicy::Error,
        MissingArg::Entropy => MissingBlockPolicy::EntropySurrogate,
    };
    Ok(p)
}

fn cmd_measure(a: &MeasureArgs, exec: Execution) -> CliResult<()> {
    let measures = Measure::parse_list(&a.measures)?;
    let mut ctx = MeasureContext {
        bdm: bdm_params(&a.bdm)?,
        threshold: a.threshold,
        exact_guard: a.exact_guard,
        exec,
        ..MeasureContext::default()
    };
    load_tables(&mut ctx, a.bdm.toy_ctm, a.bdm.ctm_table.as_deref())?;
    ctx.check(&measures)?;
    let records = load_dataset(&a.input)?;
    let rows = measure_dataset(&records, &measures, &ctx)?;
    write_results(&rows, output(a.out.as_deref())?)?;
    Ok(())
}

const REPORT_COLUMNS: [&str; 8] = [
    "statistic",
    "df",
    "p_one_tail",
    "p_two_tail",
    "ci_low",
    "ci_high",
    "ci_level",
    "notes",
];

fn report_fields(r: &StatReport) -> Vec<String> {
    let opt = |v: Option<f64>| v.map(sig12).unwrap_or_default();
    vec![
        sig12(r.statistic),
        opt(r.df),
        sig12(r.p_one_tail),
        sig12(r.p_two_tail),
        opt(r.ci_low),
        opt(r.ci_high),
        opt(r.ci_level),
        r.notes.join("; "),
    ]
}

fn read_results_file(path: &Path) -> CliResult<Vec<MeasureResult>> {
    Ok(read_results(open(path)?)?)
}

/// Values of `measure` by id, in file order.
fn measure_column(rows: &[MeasureResult], measure: &str) -> CliResult<Vec<(String, f64)>> {
    let mut seen = BTreeSet::new();
    let mut out = Vec::new();
    for r in rows.iter().filter(|r| r.measure == measure) {
        if !seen.insert(r.id.as_str()) {
            return Err(CliError::Failure(format!("duplicate {measure} row for id {:?}", r.id)));
        }
        out.push((r.id.clone(), r.value));
    }
    if out.is_empty() {
        return Err(CliError::Usage(format!("measure {measure:?} not found in results")));
    }
    Ok(out)
}

pub fn cmd_correlate(a: &CorrelateArgs) -> CliResult<()> {
    let rows = read_results_file(&a.input)?;
    let xs = measure_column(&rows, &a.x)?;
    let ys: HashMap<String, f64> = measure_column(&rows, &a.y)?.into_iter().collect();
    let (x, y): (Vec<f64>, Vec<f64>) = xs.iter().filter_map(|(id, v)| ys.get(id).map(|w| (*v, *w))).unzip();
    if x.len() < 3 {
        return Err(CliError::Usage(format!(
            "{} and {} share {} ids; correlation needs at least 3",
            a.x,
            a.y,
            x.len()
        )));
    }
    let (report, method) = match a.method {
        Method::Pearson => (pearson(&x, &y, a.ci)?, "pearson"),
        Method::Spearman => (spearman(&x, &y, a.ci)?, "spearman"),
    };
    let mut w = csv::Writer::from_writer(output(a.out.as_deref())?);
    let mut header = vec!["x", "y", "method", "n"];
    header.extend(REPORT_COLUMNS);
    w.write_record(&header)?;
    let mut row = vec![a.x.clone(), a.y.clone(), method.to_string(), x.len().to_string()];
    row.extend(report_fields(&report));
    w.write_record(&row)?;
    w.flush()?;
    Ok(())
}

pub fn cmd_classify(a: &ClassifyArgs) -> CliResult<()> {
    let rows = read_results_file(&a.input)?;
    let label = |r: &MeasureResult| -> CliResult<String> {
        Ok(match a.group_col.as_str() {
            "category" => r.category.clone(),
            "id" => r.id.clone(),
            "metadata" => r.metadata.clone(),
            other => {
                return Err(CliError::Usage(format!(
                    "group column {other:?} not available; use category, id or metadata"
                )))
            }
        })
    };
    // measure (file order) -> group -> values
    let mut measures: Vec<String> = Vec::new();
    let mut values: HashMap<String, BTreeMap<String, Vec<f64>>> = HashMap::new();
    for r in &rows {
        if !values.contains_key(&r.measure) {
            measures.push(r.measure.clone());
        }
        values
            .entry(r.measure.clone())
            .or_default()
            .entry(label(r)?)
            .or_default()
            .push(r.value);
    }
    let groups: BTreeSet<String> = values.values().flat_map(|g| g.keys().cloned()).collect();
    if groups.len() < 2 {
        return Err(CliError::Usage(format!(
            "need ≥ 2 groups in column {:?}, found {}",
            a.group_col,
            groups.len()
        )));
    }
    let test = match a.test {
        TestArg::WelchT => "welch_t",
        TestArg::Ks => "ks",
    };
    let mut w = csv::Writer::from_writer(output(a.out.as_deref())?);
    let mut header = vec!["measure", "group_a", "group_b", "n_a", "n_b", "test"];
    header.extend(REPORT_COLUMNS);
    w.write_record(&header)?;
    let groups: Vec<&String> = groups.iter().collect();
    let empty = Vec::new();
    for m in &measures {
        let by_group = &values[m];
        for (i, ga) in groups.iter().enumerate() {
            for gb in &groups[i + 1..] {
                let va = by_group.get(*ga).unwrap_or(&empty);
                let vb = by_group.get(*gb).unwrap_or(&empty);
                let mut row = vec![
                    m.clone(),
                    ga.to_string(),
                    gb.to_string(),
                    va.len().to_string(),
                    vb.len().to_string(),
                    test.to_string(),
                ];
                let min_size = if a.test == TestArg::WelchT { 2 } else { 1 };
                let result = if va.len() < min_size || vb.len() < min_size {
                    Err(format!("skipped: a group has fewer than {min_size} values"))
                } else {
                    match a.test {
                        TestArg::WelchT => welch_t(va, vb),
                        TestArg::Ks => ks_two_sample(va, vb),
                    }
                    .map_err(|e| format!("skipped: {e}"))
                };
                match result {
                    Ok(rep) => row.extend(report_fields(&rep)),
                    Err(note) => {
                        row.extend(std::iter::repeat_n(String::new(), REPORT_COLUMNS.len() - 1));
                        row.push(note);
                    }
                }
                w.write_record(&row)?;
            }
        }
    }
    w.flush()?;
    Ok(())
}

fn cmd_tree(a: &TreeArgs, exec: Execution) -> CliResult<()> {
    if a.string.is_empty() {
        return Err(CliError::Failure("empty input string".into()));
    }
    let dot = match a.method {
        TreeMethod::Huffman => huffman_tree_dot(&huffman(&a.string)?),
        TreeMethod::Assembly => {
            let result = if a.split {
                assembly_index_split(&a.string)?
            } else {
                assembly_index_exact_with(&a.string, Some(a.exact_guard), exec).map_err(|e| match e {
                    Error::ExceedsGuard { .. } => CliError::Usage(format!("{e}; pass --split")),
                    other => other.into(),
                })?
            };
            assembly_tree_dot(&result.pathway)?
        }
    };
    let mut out = output(a.out.as_deref())?;
    out.write_all(dot.as_bytes())?;
    out.flush()?;
    Ok(())
}

fn cmd_binarize(a: &BinarizeArgs) -> CliResult<()> {
    let m = if a.sdf {
        sdf_distance_matrix(&std::fs::read_to_string(&a.input)?)?
    } else {
        read_matrix_csv(&a.input)?
    };
    write_matrix_csv(&binarize_matrix(&m, a.threshold), &a.out)?;
    Ok(())
}

fn cmd_deceive(a: &DeceiveArgs, exec: Execution) -> CliResult<()> {
    let spec = GeneratorSpec::from_json(&a.spec)?;
    let mut ctx = MeasureContext { exec, ..MeasureContext::default() };
    load_tables(&mut ctx, a.toy_ctm, a.ctm_table.as_deref())?;
    let measures = match &a.measures {
        Some(list) => Measure::parse_list(list)?,
        None => default_divergence_measures(&ctx),
    };
    let s = spec.generate()?;
    let report = divergence_report(&s, &spec, &measures, &ctx)?;
    let mut w = csv::Writer::from_writer(output(a.out.as_deref())?);
    w.write_record(["quantity", "value", "metadata"])?;
    w.write_record(["length", &report.length.to_string(), ""])?;
    w.write_record(["description_bits", &report.description_bits.to_string(), ""])?;
    w.write_record(["normalized_entropy", &sig12(report.normalized_entropy), ""])?;
    for (m, v) in &report.values {
        w.write_record([m.name(), &sig12(v.value), &v.metadata])?;
    }
    w.flush()?;
    Ok(())
}
