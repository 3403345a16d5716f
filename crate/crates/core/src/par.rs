//! Data-parallel helpers. With the `parallel` feature off everything runs
//! sequentially with the same signatures.

#[cfg(feature = "parallel")]
use rayon::prelude::*;

pub fn map<T, U, F>(items: &[T], f: F) -> Vec<U>
where
    T: Sync,
    U: Send,
    F: Fn(&T) -> U + Sync + Send,
{
    #[cfg(feature = "parallel")]
    {
        items.par_iter().map(f).collect()
    }
    #[cfg(not(feature = "parallel"))]
    {
        items.iter().map(f).collect()
    }
}

pub fn is_parallel() -> bool {
    cfg!(feature = "parallel")
}
