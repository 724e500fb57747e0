//! Execution strategy for the data-parallel kernels.
//!
//! Every heavy loop in the crate (orbit enumeration, exterior-power counts,
//! transform rows) goes through [`map_range`] / [`sum_range`]. With the
//! `parallel` feature these dispatch to rayon; without it, or with
//! [`ExecMode::Sequential`], they run on the calling thread. Both paths
//! produce identical results.

use std::ops::Range;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum ExecMode {
    Sequential,
    #[default]
    Parallel,
}

impl ExecMode {
    /// Whether this mode will actually fan out on this build.
    pub fn is_parallel(self) -> bool {
        cfg!(feature = "parallel") && self == ExecMode::Parallel
    }
}

pub fn map_range<T, F>(mode: ExecMode, range: Range<usize>, f: F) -> Vec<T>
where
    T: Send,
    F: Fn(usize) -> T + Sync + Send,
{
    #[cfg(feature = "parallel")]
    if mode.is_parallel() {
        use rayon::prelude::*;
        return range.into_par_iter().map(f).collect();
    }
    let _ = mode;
    range.map(f).collect()
}

pub fn sum_range<F>(mode: ExecMode, range: Range<u64>, f: F) -> u64
where
    F: Fn(u64) -> u64 + Sync + Send,
{
    #[cfg(feature = "parallel")]
    if mode.is_parallel() {
        use rayon::prelude::*;
        return range.into_par_iter().map(f).sum();
    }
    let _ = mode;
    range.map(f).sum()
}

/// Histogram over `0..buckets` of `f(i)` for `i` in `range`.
pub fn histogram_range<F>(mode: ExecMode, range: Range<u64>, buckets: usize, f: F) -> Vec<u64>
where
    F: Fn(u64) -> usize + Sync + Send,
{
    let fold = |mut acc: Vec<u64>, i: u64| {
        acc[f(i)] += 1;
        acc
    };
    #[cfg(feature = "parallel")]
    if mode.is_parallel() {
        use rayon::prelude::*;
        return range
            .into_par_iter()
            .fold(|| vec![0u64; buckets], fold)
            .reduce(
                || vec![0u64; buckets],
                |mut a, b| {
                    a.iter_mut().zip(b).for_each(|(x, y)| *x += y);
                    a
                },
            );
    }
    let _ = mode;
    range.fold(vec![0u64; buckets], fold)
}
