//! Execution strategy for independent work items (replicates, table rows).
//!
//! Every combinator here returns results in input order, and reductions are
//! only used with associative and commutative merges, so outputs do not
//! depend on the strategy or on scheduling.

/// How independent work items are executed.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum Execution {
    Sequential,
    /// Rayon's global pool. Falls back to sequential execution when the
    /// crate is built without the `parallel` feature.
    #[default]
    Parallel,
}

impl Execution {
    /// Whether this strategy actually runs on more than one thread.
    pub fn is_parallel(self) -> bool {
        cfg!(feature = "parallel") && self == Execution::Parallel
    }
}

/// Maps `f` over `items`, preserving order.
pub fn map_ordered<T, R, F>(items: &[T], exec: Execution, f: F) -> Vec<R>
where
    T: Sync,
    R: Send,
    F: Fn(&T) -> R + Sync + Send,
{
    #[cfg(feature = "parallel")]
    if exec.is_parallel() {
        use rayon::prelude::*;
        return items.par_iter().map(f).collect();
    }
    let _ = exec;
    items.iter().map(f).collect()
}

/// Runs `replicate(i)` for `i in 0..count` and folds the successes into an
/// accumulator with `merge`, which must be associative and commutative.
/// Stops at the first error in sequential mode; in parallel mode some error
/// is returned if any replicate fails.
pub fn fold_replicates<A, E, F, M>(
    count: u64,
    exec: Execution,
    identity: impl Fn() -> A + Sync + Send,
    replicate: F,
    merge: M,
) -> Result<A, E>
where
    A: Send,
    E: Send,
    F: Fn(&mut A, u64) -> Result<(), E> + Sync + Send,
    M: Fn(A, A) -> A + Sync + Send,
{
    #[cfg(feature = "parallel")]
    if exec.is_parallel() {
        use rayon::prelude::*;
        return (0..count)
            .into_par_iter()
            .try_fold(&identity, |mut acc, i| replicate(&mut acc, i).map(|()| acc))
            .try_reduce(&identity, |a, b| Ok(merge(a, b)));
    }
    let _ = (exec, &merge);
    let mut acc = identity();
    for i in 0..count {
        replicate(&mut acc, i)?;
    }
    Ok(acc)
}

/// Caps the size of the global worker pool. A no-op without the `parallel`
/// feature, and after the pool has been initialised.
pub fn configure_threads(threads: usize) -> bool {
    #[cfg(feature = "parallel")]
    {
        rayon::ThreadPoolBuilder::new()
            .num_threads(threads)
            .build_global()
            .is_ok()
    }
    #[cfg(not(feature = "parallel"))]
    {
        let _ = threads;
        false
    }
}
