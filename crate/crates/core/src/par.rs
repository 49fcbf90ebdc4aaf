//! Order-preserving data-parallel map with a sequential fallback.

use serde::{Deserialize, Serialize};

use crate::error::Result;

/// How per-prime work is scheduled. Results never depend on the choice.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum Exec {
    Sequential,
    /// A dedicated pool of this many threads; 0 means rayon's default.
    Parallel(usize),
}

impl Exec {
    pub fn workers(n: usize) -> Self {
        if n == 1 {
            Exec::Sequential
        } else {
            Exec::Parallel(n)
        }
    }

    /// Effective thread count, for report headers.
    pub fn thread_count(&self) -> usize {
        match *self {
            Exec::Sequential => 1,
            #[cfg(feature = "parallel")]
            Exec::Parallel(0) => rayon::current_num_threads(),
            #[cfg(feature = "parallel")]
            Exec::Parallel(n) => n,
            #[cfg(not(feature = "parallel"))]
            Exec::Parallel(_) => 1,
        }
    }

    /// `items.map(f)` in input order.
    pub fn map<T, R, F>(&self, items: &[T], f: F) -> Result<Vec<R>>
    where
        T: Sync,
        R: Send,
        F: Fn(&T) -> R + Sync + Send,
    {
        match *self {
            Exec::Sequential => Ok(items.iter().map(f).collect()),
            Exec::Parallel(n) => parallel_map(n, items, f),
        }
    }
}

impl Default for Exec {
    fn default() -> Self {
        Exec::Parallel(0)
    }
}

#[cfg(feature = "parallel")]
fn parallel_map<T, R, F>(workers: usize, items: &[T], f: F) -> Result<Vec<R>>
where
    T: Sync,
    R: Send,
    F: Fn(&T) -> R + Sync + Send,
{
    use rayon::prelude::*;
    let pool = rayon::ThreadPoolBuilder::new()
        .num_threads(workers)
        .build()
        .map_err(|e| crate::Error::InvalidArgument(format!("thread pool: {e}")))?;
    Ok(pool.install(|| items.par_iter().map(f).collect()))
}

#[cfg(not(feature = "parallel"))]
fn parallel_map<T, R, F>(_workers: usize, items: &[T], f: F) -> Result<Vec<R>>
where
    T: Sync,
    R: Send,
    F: Fn(&T) -> R + Sync + Send,
{
    Ok(items.iter().map(f).collect())
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn order_is_preserved() {
        let items: Vec<u64> = (0..10_000).collect();
        let seq = Exec::Sequential.map(&items, |x| x * x).unwrap();
        for w in [0, 2, 7] {
            assert_eq!(Exec::Parallel(w).map(&items, |x| x * x).unwrap(), seq);
        }
    }
}
