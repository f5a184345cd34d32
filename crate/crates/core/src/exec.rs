//! Trial-level parallelism.
//!
//! Independent trials are mapped either on the rayon pool or sequentially.
//! Results always come back in index order, so output never depends on
//! scheduling. Without the `parallel` feature both modes run sequentially.

#[derive(Clone, Copy, Debug, Default, PartialEq, Eq)]
pub enum Execution {
    Sequential,
    #[default]
    Parallel,
}

impl Execution {
    /// `(0..count).map(f)`, possibly in parallel, collected in index order.
    pub fn map<T, F>(self, count: u64, f: F) -> Vec<T>
    where
        T: Send,
        F: Fn(u64) -> T + Sync + Send,
    {
        match self {
            Execution::Sequential => (0..count).map(f).collect(),
            Execution::Parallel => parallel_map(count, f),
        }
    }

    /// Fallible variant of [`Execution::map`]; the first error by index wins.
    pub fn try_map<T, E, F>(self, count: u64, f: F) -> Result<Vec<T>, E>
    where
        T: Send,
        E: Send,
        F: Fn(u64) -> Result<T, E> + Sync + Send,
    {
        self.map(count, f).into_iter().collect()
    }

    pub fn is_parallel_available() -> bool {
        cfg!(feature = "parallel")
    }
}

#[cfg(feature = "parallel")]
fn parallel_map<T, F>(count: u64, f: F) -> Vec<T>
where
    T: Send,
    F: Fn(u64) -> T + Sync + Send,
{
    use rayon::prelude::*;
    (0..count).into_par_iter().map(f).collect()
}

#[cfg(not(feature = "parallel"))]
fn parallel_map<T, F>(count: u64, f: F) -> Vec<T>
where
    T: Send,
    F: Fn(u64) -> T + Sync + Send,
{
    (0..count).map(f).collect()
}
