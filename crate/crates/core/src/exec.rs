//! Data-parallel execution switch.
//!
//! Batch operations take an [`Execution`] so callers (and the benches) can
//! pick the rayon path or the sequential one at runtime. Without the
//! `parallel` feature both variants run sequentially.

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Execution {
    Sequential,
    Parallel,
}

impl Default for Execution {
    fn default() -> Self {
        if cfg!(feature = "parallel") {
            Execution::Parallel
        } else {
            Execution::Sequential
        }
    }
}

/// Maps `f` over `items`, preserving input order in the output.
pub fn map_ordered<T, R, F>(items: &[T], exec: Execution, f: F) -> Vec<R>
where
    T: Sync,
    R: Send,
    F: Fn(&T) -> R + Sync + Send,
{
    match exec {
        #[cfg(feature = "parallel")]
        Execution::Parallel => {
            use rayon::prelude::*;
            items.par_iter().map(f).collect()
        }
        _ => items.iter().map(f).collect(),
    }
}

/// Folds `f` over `0..n` into per-worker accumulators and merges them.
/// `merge` must be associative and commutative for results to be
/// independent of the execution mode.
pub fn fold_range<A, F, M>(n: u64, exec: Execution, init: impl Fn() -> A + Sync + Send, f: F, merge: M) -> A
where
    A: Send,
    F: Fn(A, u64) -> A + Sync + Send,
    M: Fn(A, A) -> A + Sync + Send,
{
    match exec {
        #[cfg(feature = "parallel")]
        Execution::Parallel => {
            use rayon::prelude::*;
            (0..n).into_par_iter().fold(&init, &f).reduce(&init, &merge)
        }
        _ => (0..n).fold(init(), f),
    }
}
