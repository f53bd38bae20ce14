//! Data-parallel helpers with a sequential fallback.
//!
//! With the `parallel` feature (default) [`ExecMode::Parallel`] runs on the
//! rayon global pool; without it every mode runs sequentially. Results are
//! always returned in input order, so outputs do not depend on scheduling.

#[cfg(feature = "parallel")]
use rayon::prelude::*;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Default)]
pub enum ExecMode {
    Sequential,
    #[default]
    Parallel,
}

impl ExecMode {
    /// Whether this mode actually fans out to worker threads.
    pub fn is_parallel(self) -> bool {
        cfg!(feature = "parallel") && self == ExecMode::Parallel
    }
}

/// `(0..n).map(f).collect()`, possibly in parallel.
pub fn map_range<T, F>(mode: ExecMode, n: usize, f: F) -> Vec<T>
where
    T: Send,
    F: Fn(usize) -> T + Sync + Send,
{
    #[cfg(feature = "parallel")]
    if mode.is_parallel() {
        return (0..n).into_par_iter().map(f).collect();
    }
    let _ = mode;
    (0..n).map(f).collect()
}

/// `items.iter().map(f).collect()`, possibly in parallel.
pub fn map_slice<S, T, F>(mode: ExecMode, items: &[S], f: F) -> Vec<T>
where
    S: Sync,
    T: Send,
    F: Fn(&S) -> T + Sync + Send,
{
    #[cfg(feature = "parallel")]
    if mode.is_parallel() {
        return items.par_iter().map(f).collect();
    }
    let _ = mode;
    items.iter().map(f).collect()
}

/// Fallible variant of [`map_range`]; returns the first error by index.
pub fn try_map_range<T, E, F>(mode: ExecMode, n: usize, f: F) -> Result<Vec<T>, E>
where
    T: Send,
    E: Send,
    F: Fn(usize) -> Result<T, E> + Sync + Send,
{
    map_range(mode, n, f).into_iter().collect()
}

/// Maximum of `f` over `0..n` (`f64::NEG_INFINITY` when empty).
pub fn max_range<F>(mode: ExecMode, n: usize, f: F) -> f64
where
    F: Fn(usize) -> f64 + Sync + Send,
{
    #[cfg(feature = "parallel")]
    if mode.is_parallel() {
        return (0..n).into_par_iter().map(f).reduce(|| f64::NEG_INFINITY, f64::max);
    }
    let _ = mode;
    (0..n).map(f).fold(f64::NEG_INFINITY, f64::max)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn modes_agree_and_keep_order() {
        let seq = map_range(ExecMode::Sequential, 1000, |i| i * i);
        let par = map_range(ExecMode::Parallel, 1000, |i| i * i);
        assert_eq!(seq, par);
        assert_eq!(par[31], 961);
    }

    #[test]
    fn max_of_empty_range() {
        assert_eq!(max_range(ExecMode::Parallel, 0, |_| 1.0), f64::NEG_INFINITY);
        assert_eq!(max_range(ExecMode::Sequential, 5, |i| i as f64), 4.0);
    }

    #[test]
    fn try_map_reports_first_error() {
        let r: Result<Vec<usize>, usize> =
            try_map_range(ExecMode::Parallel, 100, |i| if i % 40 == 39 { Err(i) } else { Ok(i) });
        assert_eq!(r, Err(39));
    }
}
