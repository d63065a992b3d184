//! Case-level fan-out. With the `parallel` feature, [`Execution::Parallel`]
//! maps over a rayon pool; otherwise every mode runs sequentially. Results
//! always come back in input order.

use crate::error::{FockError, Result};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum Execution {
    Sequential,
    #[default]
    Parallel,
}

impl Execution {
    /// Whether this build can actually run in parallel.
    pub fn parallel_available() -> bool {
        cfg!(feature = "parallel")
    }
}

/// Order-preserving map.
pub fn map<T, R, F>(exec: Execution, items: Vec<T>, f: F) -> Vec<R>
where
    T: Send,
    R: Send,
    F: Fn(T) -> R + Sync + Send,
{
    match exec {
        #[cfg(feature = "parallel")]
        Execution::Parallel => {
            use rayon::prelude::*;
            items.into_par_iter().map(f).collect()
        }
        _ => items.into_iter().map(f).collect(),
    }
}

/// Runs `f` with at most `jobs` worker threads (`None`: machine default).
pub fn with_jobs<R: Send>(jobs: Option<usize>, f: impl FnOnce() -> R + Send) -> Result<R> {
    if jobs == Some(0) {
        return Err(FockError::Usage("--jobs must be at least 1".into()));
    }
    #[cfg(feature = "parallel")]
    if let Some(n) = jobs {
        let pool = rayon::ThreadPoolBuilder::new()
            .num_threads(n)
            .build()
            .map_err(|e| FockError::Internal(e.to_string()))?;
        return Ok(pool.install(f));
    }
    Ok(f())
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn order_is_preserved() {
        let items: Vec<u64> = (0..1000).collect();
        let seq = map(Execution::Sequential, items.clone(), |x| x * x);
        let par = map(Execution::Parallel, items, |x| x * x);
        assert_eq!(seq, par);
        assert_eq!(seq[999], 998001);
    }

    #[test]
    fn job_limits() {
        assert!(with_jobs(Some(0), || ()).is_err());
        assert_eq!(with_jobs(Some(2), || map(Execution::Parallel, vec![1, 2, 3], |x| x + 1)).unwrap(), vec![2, 3, 4]);
        assert_eq!(with_jobs(None, || 5).unwrap(), 5);
    }
}
