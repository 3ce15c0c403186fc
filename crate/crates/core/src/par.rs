//! Sequential / data-parallel execution switch.
//!
//! With the `parallel` feature (on by default) work is spread over rayon's
//! global pool; without it every call runs on the current thread. Results are
//! identical either way: chunks are combined in index order.

use std::ops::Range;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Execution {
    Sequential,
    /// Falls back to sequential when the `parallel` feature is disabled.
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

/// Splits `0..len` into chunks of at most `chunk` items, maps each chunk and
/// returns the results in chunk order.
pub(crate) fn map_chunks<T, F>(len: u64, chunk: u64, exec: Execution, f: F) -> Vec<T>
where
    T: Send,
    F: Fn(Range<u64>) -> T + Sync + Send,
{
    let chunk = chunk.max(1);
    let count = len.div_ceil(chunk);
    let bounds = move |i: u64| i * chunk..((i + 1) * chunk).min(len);
    match exec {
        #[cfg(feature = "parallel")]
        Execution::Parallel => {
            use rayon::prelude::*;
            (0..count).into_par_iter().map(|i| f(bounds(i))).collect()
        }
        _ => (0..count).map(|i| f(bounds(i))).collect(),
    }
}

/// Maps `items` in order, possibly in parallel.
pub(crate) fn map_items<I, T, F>(items: &[I], exec: Execution, f: F) -> Vec<T>
where
    I: Sync,
    T: Send,
    F: Fn(&I) -> T + Sync + Send,
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
