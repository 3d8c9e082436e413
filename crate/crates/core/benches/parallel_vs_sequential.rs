//! Sequential vs rayon paths for the three data-parallel workloads.
//!
//! `cargo bench -p complexity-core`; build with `--no-default-features`
//! to see both variants fall back to one thread.

use criterion::{criterion_group, criterion_main, BenchmarkId, Criterion};

use complexity_core::assembly::assembly_index_exact_with;
use complexity_core::bdm::{ctm_enumerate, toy_table_1d};
use complexity_core::deceiver::synthetic_corpus;
use complexity_core::measure::{measure_dataset, Measure, MeasureContext};
use complexity_core::Execution;

const MODES: [(&str, Execution); 2] = [("sequential", Execution::Sequential), ("parallel", Execution::Parallel)];

fn ctm(c: &mut Criterion) {
    let mut group = c.benchmark_group("ctm_enumerate_2_2");
    for steps in [30u32, 200] {
        for (name, exec) in MODES {
            group.bench_with_input(BenchmarkId::new(name, steps), &steps, |b, &steps| {
                b.iter(|| ctm_enumerate(2, 2, steps, exec).unwrap())
            });
        }
    }
    group.finish();
}

fn corpus_measures(c: &mut Criterion) {
    let records = synthetic_corpus(42, 200);
    let measures = [Measure::Entropy, Measure::Huffman, Measure::Rle, Measure::Lzw, Measure::MaSplit, Measure::Bdm1d];
    let mut group = c.benchmark_group("measure_synthetic_corpus");
    for (name, exec) in MODES {
        let ctx = MeasureContext {
            ctm_1d: Some(toy_table_1d()),
            exec,
            ..MeasureContext::default()
        };
        group.bench_function(name, |b| b.iter(|| measure_dataset(&records, &measures, &ctx).unwrap()));
    }
    group.finish();
}

fn exact_assembly(c: &mut Criterion) {
    // Repeat-poor strings, where the top-level branches carry the work.
    let inputs = [("abracadabra", "ABRACADABRA"), ("mixed18", "ABCABDBCADCABDACBD"), ("binary20", "01101001100101101001")];
    let mut group = c.benchmark_group("assembly_index_exact");
    for (label, s) in inputs {
        for (name, exec) in MODES {
            group.bench_with_input(BenchmarkId::new(name, label), s, |b, s| {
                b.iter(|| assembly_index_exact_with(s, None, exec).unwrap())
            });
        }
    }
    group.finish();
}

criterion_group!(
    name = benches;
    config = Criterion::default().sample_size(10).configure_from_args();
    targets = ctm, corpus_measures, exact_assembly
);
criterion_main!(benches);
