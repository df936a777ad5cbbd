//! Execution strategy for the data-parallel loops in this crate.
//!
//! With the `parallel` feature (on by default) [`Execution::Parallel`] uses the
//! global rayon pool. Without it every strategy runs on the calling thread, so
//! the same call sites build and behave identically in a single-threaded build.

#[cfg(feature = "parallel")]
use rayon::prelude::*;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
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
    /// True when work will actually be spread over several threads.
    pub fn is_parallel(self) -> bool {
        cfg!(feature = "parallel") && self == Execution::Parallel
    }

    /// Index of the first item (in slice order) satisfying `pred`.
    ///
    /// The parallel path returns the same index as the sequential one.
    pub fn find_first<T, F>(self, items: &[T], pred: F) -> Option<usize>
    where
        T: Sync,
        F: Fn(&T) -> bool + Sync + Send,
    {
        #[cfg(feature = "parallel")]
        if self == Execution::Parallel {
            return items.par_iter().position_first(pred);
        }
        items.iter().position(pred)
    }

    /// Order-preserving map.
    pub fn map<T, R, F>(self, items: &[T], f: F) -> Vec<R>
    where
        T: Sync,
        R: Send,
        F: Fn(&T) -> R + Sync + Send,
    {
        #[cfg(feature = "parallel")]
        if self == Execution::Parallel {
            return items.par_iter().map(f).collect();
        }
        items.iter().map(f).collect()
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn strategies_agree() {
        let xs: Vec<u64> = (0..10_000).collect();
        for exec in [Execution::Sequential, Execution::Parallel] {
            assert_eq!(exec.find_first(&xs, |&x| x > 0 && x % 977 == 0), Some(977));
            assert_eq!(exec.find_first(&xs, |&x| x > 20_000), None);
            let sq = exec.map(&xs, |&x| x * x);
            assert_eq!(sq[123], 123 * 123);
            assert_eq!(sq.len(), xs.len());
        }
    }
}
