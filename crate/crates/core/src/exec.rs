//! Replica execution with reproducibility as the contract: results are
//! collected in replica order and every reduction happens serially over that
//! ordering, so output bits never depend on the parallelism degree.

/// Maps `f` over replica indices 0..replicas, returning results in index
/// order. With the `parallel` feature the map runs on the rayon pool;
/// ordering of the returned vector is identical either way.
#[cfg(feature = "parallel")]
pub fn map_replicas<T, F>(replicas: usize, f: F) -> Vec<T>
where
    T: Send,
    F: Fn(usize) -> T + Sync + Send,
{
    use rayon::prelude::*;
    (0..replicas).into_par_iter().map(f).collect()
}

/// Serial fallback used when the `parallel` feature is off.
#[cfg(not(feature = "parallel"))]
pub fn map_replicas<T, F>(replicas: usize, f: F) -> Vec<T>
where
    F: Fn(usize) -> T,
{
    (0..replicas).map(f).collect()
}

/// Runs `f` inside a dedicated thread pool of `jobs` threads (parallel
/// builds), or directly when `jobs` is None or the feature is off. Used by
/// the CLI `--jobs` flag and by the determinism checks that compare runs at
/// different parallelism degrees.
#[cfg(feature = "parallel")]
pub fn run_with_threads<R: Send>(jobs: Option<usize>, f: impl FnOnce() -> R + Send) -> R {
    match jobs {
        Some(j) if j > 0 => rayon::ThreadPoolBuilder::new()
            .num_threads(j)
            .build()
            .expect("thread pool construction")
            .install(f),
        _ => f(),
    }
}

#[cfg(not(feature = "parallel"))]
pub fn run_with_threads<R>(jobs: Option<usize>, f: impl FnOnce() -> R) -> R {
    let _ = jobs;
    f()
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn order_is_replica_order() {
        let out = map_replicas(100, |i| i * i);
        for (i, v) in out.iter().enumerate() {
            assert_eq!(*v, i * i);
        }
    }

    #[test]
    fn run_with_threads_passthrough() {
        assert_eq!(run_with_threads(None, || 7), 7);
        assert_eq!(run_with_threads(Some(2), || 7), 7);
    }
}
