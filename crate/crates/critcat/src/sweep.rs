//! Grid dispatch for parameter sweeps. With the `parallel` feature (default)
//! points are evaluated on the rayon pool; the sequential path is always
//! compiled and exposed for comparison.

/// Evaluate one closure per item, in parallel when the `parallel` feature is
/// enabled.
#[cfg(feature = "parallel")]
pub fn map_points<T, U, F>(items: &[T], f: F) -> Vec<U>
where
    T: Sync,
    U: Send,
    F: Fn(&T) -> U + Sync + Send,
{
    use rayon::prelude::*;
    items.par_iter().map(f).collect()
}

#[cfg(not(feature = "parallel"))]
pub fn map_points<T, U, F>(items: &[T], f: F) -> Vec<U>
where
    T: Sync,
    U: Send,
    F: Fn(&T) -> U + Sync + Send,
{
    map_points_sequential(items, f)
}

/// Sequential evaluation, independent of the feature set.
pub fn map_points_sequential<T, U, F>(items: &[T], f: F) -> Vec<U>
where
    F: Fn(&T) -> U,
{
    items.iter().map(f).collect()
}

/// Worker count the parallel path will use (1 without the feature).
pub fn worker_count() -> usize {
    #[cfg(feature = "parallel")]
    {
        rayon::current_num_threads()
    }
    #[cfg(not(feature = "parallel"))]
    {
        1
    }
}

/// Pin the global worker pool size. Must run before any parallel work; later
/// calls are ignored (rayon's global pool builds once).
#[cfg(feature = "parallel")]
pub fn configure_workers(n: usize) {
    if n > 0 {
        let _ = rayon::ThreadPoolBuilder::new().num_threads(n).build_global();
    }
}

#[cfg(not(feature = "parallel"))]
pub fn configure_workers(_n: usize) {}

/// Uniform inclusive grid with `count` points.
pub fn linspace(start: f64, stop: f64, count: usize) -> Vec<f64> {
    assert!(count >= 1, "grids must be non-empty");
    if count == 1 {
        return vec![start];
    }
    let step = (stop - start) / (count - 1) as f64;
    (0..count).map(|i| start + step * i as f64).collect()
}
