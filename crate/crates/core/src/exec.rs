//! Replica execution. Every Monte Carlo driver maps a replica index to an
//! independent result; outputs are always returned in index order, so the
//! parallel and sequential paths produce identical results.

/// Run `f(0..count)` on the calling thread.
pub fn map_replicas_seq<T, F>(count: usize, f: F) -> Vec<T>
where
    F: Fn(usize) -> T,
{
    (0..count).map(f).collect()
}

/// Run `f(0..count)` on the rayon pool.
#[cfg(feature = "parallel")]
pub fn map_replicas_par<T, F>(count: usize, f: F) -> Vec<T>
where
    T: Send,
    F: Fn(usize) -> T + Sync + Send,
{
    use rayon::prelude::*;
    (0..count).into_par_iter().map(f).collect()
}

/// Parallel when the `parallel` feature is on, sequential otherwise.
pub fn map_replicas<T, F>(count: usize, f: F) -> Vec<T>
where
    T: Send,
    F: Fn(usize) -> T + Sync + Send,
{
    #[cfg(feature = "parallel")]
    {
        map_replicas_par(count, f)
    }
    #[cfg(not(feature = "parallel"))]
    {
        map_replicas_seq(count, f)
    }
}
