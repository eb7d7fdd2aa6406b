//! Data-parallel helpers. With the `parallel` feature, work is spread over a
//! rayon pool; `jobs == 1` (or the feature disabled) runs sequentially.
//! `jobs == 0` means "use every available core".

#[cfg(feature = "parallel")]
use rayon::prelude::*;

#[cfg(feature = "parallel")]
fn with_pool<R: Send>(jobs: usize, f: impl FnOnce() -> R + Send) -> R {
    if jobs == 0 {
        return f();
    }
    match rayon::ThreadPoolBuilder::new().num_threads(jobs).build() {
        Ok(pool) => pool.install(f),
        Err(e) => {
            log::warn!("could not build a {jobs}-thread pool ({e}); using the global pool");
            f()
        }
    }
}

/// Order-preserving parallel map.
pub fn map<T, R, F>(items: &[T], jobs: usize, f: F) -> Vec<R>
where
    T: Sync,
    R: Send,
    F: Fn(&T) -> R + Sync + Send,
{
    #[cfg(feature = "parallel")]
    if jobs != 1 && items.len() > 1 {
        return with_pool(jobs, || items.par_iter().map(&f).collect());
    }
    let _ = jobs;
    items.iter().map(f).collect()
}

/// Like `Iterator::find_map`, returning the hit with the smallest index.
pub fn find_map_first<T, R, F>(items: &[T], jobs: usize, f: F) -> Option<R>
where
    T: Sync,
    R: Send,
    F: Fn(&T) -> Option<R> + Sync + Send,
{
    #[cfg(feature = "parallel")]
    if jobs != 1 && items.len() > 1 {
        return with_pool(jobs, || items.par_iter().find_map_first(&f));
    }
    let _ = jobs;
    items.iter().find_map(f)
}

/// Whether this build can run work in parallel at all.
pub const fn parallel_enabled() -> bool {
    cfg!(feature = "parallel")
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn map_preserves_order() {
        let v: Vec<u32> = (0..100).collect();
        for jobs in [0, 1, 3] {
            assert_eq!(map(&v, jobs, |x| x * 2), v.iter().map(|x| x * 2).collect::<Vec<_>>());
        }
    }

    #[test]
    fn find_first_is_deterministic() {
        let v: Vec<u32> = (0..1000).collect();
        for jobs in [0, 1, 2] {
            assert_eq!(find_map_first(&v, jobs, |&x| (x % 7 == 3).then_some(x)), Some(3));
        }
    }
}
