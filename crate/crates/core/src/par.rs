//! Data-parallel helpers. With the `parallel` feature these dispatch to rayon,
//! otherwise they run sequentially with identical results.

use std::sync::atomic::{AtomicBool, Ordering};

#[cfg(feature = "parallel")]
use rayon::prelude::*;

static FORCE_SEQUENTIAL: AtomicBool = AtomicBool::new(false);

/// Below this many elements a chunked kernel is not worth splitting.
#[cfg(feature = "parallel")]
const MIN_PARALLEL_LEN: usize = 4096;

/// Route every helper through the sequential path at runtime (for benchmarks).
pub fn set_sequential(on: bool) {
    FORCE_SEQUENTIAL.store(on, Ordering::Relaxed);
}

/// True when the helpers currently dispatch to rayon.
pub fn is_parallel() -> bool {
    cfg!(feature = "parallel") && !FORCE_SEQUENTIAL.load(Ordering::Relaxed)
}

/// Run `g(index, chunk)` over consecutive chunks of `data` of length `len`.
pub fn for_each_chunk_mut<T, G>(data: &mut [T], len: usize, g: G)
where
    T: Send,
    G: Fn(usize, &mut [T]) + Sync + Send,
{
    if len == 0 {
        return;
    }
    #[cfg(feature = "parallel")]
    if is_parallel() && data.len() >= MIN_PARALLEL_LEN {
        data.par_chunks_mut(len).enumerate().for_each(|(i, c)| g(i, c));
        return;
    }
    data.chunks_mut(len).enumerate().for_each(|(i, c)| g(i, c));
}

/// Map over a slice, preserving order.
pub fn map<T, U, G>(items: &[T], g: G) -> Vec<U>
where
    T: Sync,
    U: Send,
    G: Fn(&T) -> U + Sync + Send,
{
    #[cfg(feature = "parallel")]
    if is_parallel() {
        return items.par_iter().map(g).collect();
    }
    items.iter().map(g).collect()
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn order_is_preserved() {
        let v: Vec<u32> = (0..1000).collect();
        assert_eq!(map(&v, |x| x * 2), v.iter().map(|x| x * 2).collect::<Vec<_>>());
        let mut d = vec![0usize; 40];
        for_each_chunk_mut(&mut d, 4, |i, c| c.iter_mut().for_each(|x| *x = i));
        assert_eq!(d[39], 9);
    }
}
