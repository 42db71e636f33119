//! Data-parallel helpers for batch evaluation and sweeps.
//!
//! With the `parallel` feature (default) [`map`] runs on the rayon pool;
//! without it, everything falls back to plain iterators. Both variants are
//! always exposed under their explicit names so benchmarks can compare them.

/// Environment variable capping the worker count.
pub const THREADS_ENV: &str = "EULER2C_THREADS";

pub fn map_seq<T, U, F>(items: &[T], f: F) -> Vec<U>
where
    F: Fn(&T) -> U,
{
    items.iter().map(f).collect()
}

#[cfg(feature = "parallel")]
pub fn map_par<T, U, F>(items: &[T], f: F) -> Vec<U>
where
    T: Sync,
    U: Send,
    F: Fn(&T) -> U + Sync + Send,
{
    use rayon::prelude::*;
    items.par_iter().map(f).collect()
}

/// Order-preserving map over `items`, parallel when the feature is enabled.
#[cfg(feature = "parallel")]
pub fn map<T, U, F>(items: &[T], f: F) -> Vec<U>
where
    T: Sync,
    U: Send,
    F: Fn(&T) -> U + Sync + Send,
{
    map_par(items, f)
}

#[cfg(not(feature = "parallel"))]
pub fn map<T, U, F>(items: &[T], f: F) -> Vec<U>
where
    T: Sync,
    U: Send,
    F: Fn(&T) -> U + Sync + Send,
{
    map_seq(items, f)
}

/// Thread cap requested through [`THREADS_ENV`], if set to a positive integer.
pub fn threads_from_env() -> Option<usize> {
    std::env::var(THREADS_ENV)
        .ok()
        .and_then(|v| v.trim().parse::<usize>().ok())
        .filter(|&n| n > 0)
}

/// Configure the global pool from [`THREADS_ENV`]. Returns the cap applied.
/// Calling it after the pool has started is harmless; the first
/// configuration wins.
#[cfg(feature = "parallel")]
pub fn init_from_env() -> Option<usize> {
    let n = threads_from_env()?;
    let _ = rayon::ThreadPoolBuilder::new().num_threads(n).build_global();
    Some(n)
}

#[cfg(not(feature = "parallel"))]
pub fn init_from_env() -> Option<usize> {
    threads_from_env()
}
