//! Data-parallel helpers. With the `parallel` feature these fan out over rayon; without it they
//! run the same closures sequentially. Reductions always combine fixed chunks in index order so
//! floating-point results do not depend on the thread count.

#[cfg(feature = "parallel")]
use rayon::prelude::*;

/// Fixed chunk length for deterministic reductions.
pub const CHUNK: usize = 1 << 14;

pub fn map_range<T, F>(n: usize, f: F) -> Vec<T>
where
    T: Send,
    F: Fn(usize) -> T + Sync + Send,
{
    #[cfg(feature = "parallel")]
    {
        (0..n).into_par_iter().map(f).collect()
    }
    #[cfg(not(feature = "parallel"))]
    {
        (0..n).map(f).collect()
    }
}

pub fn map_slice<S, T, F>(items: &[S], f: F) -> Vec<T>
where
    S: Sync,
    T: Send,
    F: Fn(&S) -> T + Sync + Send,
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

/// Splits `0..n` into `CHUNK`-sized ranges, maps each range, and returns results in order.
pub fn map_chunks<T, F>(n: usize, f: F) -> Vec<T>
where
    T: Send,
    F: Fn(std::ops::Range<usize>) -> T + Sync + Send,
{
    let chunks = n.div_ceil(CHUNK);
    map_range(chunks, |c| f(c * CHUNK..((c + 1) * CHUNK).min(n)))
}

/// Deterministic sum of `f(i)` over `0..n`.
pub fn sum_f64<F>(n: usize, f: F) -> f64
where
    F: Fn(usize) -> f64 + Sync + Send,
{
    map_chunks(n, |r| r.map(&f).sum::<f64>()).into_iter().sum()
}

/// Whether this build fans out across threads.
pub fn is_parallel() -> bool {
    cfg!(feature = "parallel")
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn chunked_sum_is_order_stable() {
        let n = 3 * CHUNK + 17;
        let a = sum_f64(n, |i| 1.0 / (i as f64 + 1.0));
        let b: f64 = map_chunks(n, |r| r.map(|i| 1.0 / (i as f64 + 1.0)).sum::<f64>())
            .into_iter()
            .sum();
        assert_eq!(a.to_bits(), b.to_bits());
    }

    #[test]
    fn map_range_preserves_order() {
        assert_eq!(map_range(5, |i| i * i), vec![0, 1, 4, 9, 16]);
    }
}
