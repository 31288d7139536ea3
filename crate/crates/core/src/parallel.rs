//! Bounded data parallelism.
//!
//! `QCOUNT_THREADS` caps the worker count; `0` runs everything on the
//! calling thread. Unset means rayon's default. Results are always returned
//! in input order.

use rayon::prelude::*;

pub const THREADS_ENV: &str = "QCOUNT_THREADS";

/// Worker count requested through the environment, if any.
pub fn configured_threads() -> Option<usize> {
    std::env::var(THREADS_ENV).ok()?.trim().parse().ok()
}

/// Maps `f` over `0..len` in parallel, preserving order.
pub fn map_indexed<T, F>(len: usize, f: F) -> Vec<T>
where
    T: Send,
    F: Fn(usize) -> T + Sync + Send,
{
    match configured_threads() {
        Some(0) | Some(1) => (0..len).map(f).collect(),
        Some(n) => match rayon::ThreadPoolBuilder::new().num_threads(n).build() {
            Ok(pool) => pool.install(|| (0..len).into_par_iter().map(f).collect()),
            Err(_) => (0..len).map(f).collect(),
        },
        None => (0..len).into_par_iter().map(f).collect(),
    }
}
