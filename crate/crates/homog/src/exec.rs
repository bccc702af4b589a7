//! Data-parallel map helpers.
//!
//! Independent jobs (cell solves across radii and directions, Monte-Carlo
//! paths, epsilon sweeps) fan out through [`parallel_map`]. With the
//! `parallel` feature (default) the work runs on the rayon pool; without it
//! the same call degrades to a plain sequential loop. Results are collected
//! in input order either way, so reductions downstream are deterministic.

#[cfg(feature = "parallel")]
use rayon::prelude::*;

/// Maps `f` over `items`, in parallel when the `parallel` feature is enabled.
///
/// Output order always matches input order.
#[cfg(feature = "parallel")]
pub fn parallel_map<T, U, F>(items: Vec<T>, f: F) -> Vec<U>
where
    T: Send,
    U: Send,
    F: Fn(T) -> U + Sync + Send,
{
    items.into_par_iter().map(f).collect()
}

/// Maps `f` over `items`, in parallel when the `parallel` feature is enabled.
///
/// Output order always matches input order.
#[cfg(not(feature = "parallel"))]
pub fn parallel_map<T, U, F>(items: Vec<T>, f: F) -> Vec<U>
where
    T: Send,
    U: Send,
    F: Fn(T) -> U + Sync + Send,
{
    items.into_iter().map(f).collect()
}

/// Sequential reference path with the same signature as [`parallel_map`].
///
/// Used by benchmarks to compare the rayon fan-out against a plain loop, and
/// available to callers that need strictly single-threaded execution.
pub fn sequential_map<T, U, F>(items: Vec<T>, f: F) -> Vec<U>
where
    F: Fn(T) -> U,
{
    items.into_iter().map(f).collect()
}

/// Caps the global worker pool; call before any parallel work. A no-op
/// without the `parallel` feature.
#[cfg(feature = "parallel")]
pub fn configure_threads(n: usize) -> crate::Result<()> {
    rayon::ThreadPoolBuilder::new()
        .num_threads(n)
        .build_global()
        .map_err(|e| crate::Error::Argument(format!("thread pool: {e}")))
}

/// Caps the global worker pool; call before any parallel work. A no-op
/// without the `parallel` feature.
#[cfg(not(feature = "parallel"))]
pub fn configure_threads(_n: usize) -> crate::Result<()> {
    Ok(())
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn parallel_map_preserves_order() {
        let xs: Vec<u64> = (0..1000).collect();
        let par = parallel_map(xs.clone(), |x| x * x);
        let seq = sequential_map(xs, |x| x * x);
        assert_eq!(par, seq);
    }
}
