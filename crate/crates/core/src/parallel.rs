//! Switch between rayon-backed and sequential evaluation.
//!
//! With the `parallel` feature disabled, [`Execution::Parallel`] degrades to
//! the sequential path. Every parallel reduction in this crate either sums
//! integers or collects into index order, so both paths produce identical
//! results.

use serde::{Deserialize, Serialize};

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
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

impl Execution {
    /// Maps `f` over `items`, preserving input order in the output.
    pub fn map_collect<T, R, F>(self, items: &[T], f: F) -> Vec<R>
    where
        T: Sync,
        R: Send,
        F: Fn(&T) -> R + Sync + Send,
    {
        match self {
            #[cfg(feature = "parallel")]
            Execution::Parallel => {
                use rayon::prelude::*;
                items.par_iter().map(f).collect()
            }
            _ => items.iter().map(f).collect(),
        }
    }

    /// Sums `f` over `items`. Integer addition keeps the result independent of
    /// reduction order.
    pub fn map_sum<T, F>(self, items: &[T], f: F) -> u64
    where
        T: Sync,
        F: Fn(&T) -> u64 + Sync + Send,
    {
        match self {
            #[cfg(feature = "parallel")]
            Execution::Parallel => {
                use rayon::prelude::*;
                items.par_iter().map(f).sum()
            }
            _ => items.iter().map(f).sum(),
        }
    }
}

/// Runs `f` on a dedicated pool of `threads` workers. One thread (or a build
/// without the `parallel` feature) runs sequentially.
pub fn with_threads<R, F>(threads: usize, f: F) -> R
where
    R: Send,
    F: FnOnce(Execution) -> R + Send,
{
    #[cfg(feature = "parallel")]
    if threads > 1 {
        if let Ok(pool) = rayon::ThreadPoolBuilder::new().num_threads(threads).build() {
            return pool.install(|| f(Execution::Parallel));
        }
    }
    let _ = threads;
    f(Execution::Sequential)
}
