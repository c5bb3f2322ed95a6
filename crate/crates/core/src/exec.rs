//! Deterministic fan-out of independent work items.
//!
//! Work is cut into fixed-size chunks that do not depend on the thread count,
//! and chunk results come back in index order. Any reduction the caller
//! performs over the returned vector therefore sees the same operands in the
//! same order whether it ran on one thread or many.

use std::ops::Range;

#[cfg(feature = "parallel")]
use rayon::prelude::*;

/// How independent work items are scheduled.
///
/// `Parallel` uses the current rayon pool when the crate is built with the
/// `parallel` feature and silently falls back to sequential execution
/// otherwise.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum Execution {
    Sequential,
    #[default]
    Parallel,
}

impl Execution {
    /// True when this mode will actually run on more than one thread.
    pub fn is_parallel(self) -> bool {
        cfg!(feature = "parallel") && self == Execution::Parallel
    }
}

/// Applies `f` to consecutive ranges of length `chunk` covering `0..len`.
pub fn map_chunks<T, F>(len: usize, chunk: usize, exec: Execution, f: F) -> Vec<T>
where
    T: Send,
    F: Fn(Range<usize>) -> T + Sync + Send,
{
    let chunk = chunk.max(1);
    let n_chunks = len.div_ceil(chunk);
    let range = move |i: usize| (i * chunk)..((i + 1) * chunk).min(len);

    #[cfg(feature = "parallel")]
    if exec.is_parallel() {
        return (0..n_chunks).into_par_iter().map(|i| f(range(i))).collect();
    }
    let _ = exec;
    (0..n_chunks).map(|i| f(range(i))).collect()
}

/// Maps `f` over `items`, preserving order.
pub fn map_items<I, T, F>(items: &[I], exec: Execution, f: F) -> Vec<T>
where
    I: Sync,
    T: Send,
    F: Fn(&I) -> T + Sync + Send,
{
    #[cfg(feature = "parallel")]
    if exec.is_parallel() {
        return items.par_iter().map(&f).collect();
    }
    let _ = exec;
    items.iter().map(f).collect()
}
