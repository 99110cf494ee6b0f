//! Deterministic summation. Parallel maps collect into index order and are
//! reduced with a fixed binary tree, so results do not depend on the number
//! of worker threads.

use std::ops::Add;

use rayon::prelude::*;

const LEAF: usize = 8;

/// Pairwise (cascade) sum with a fixed split rule.
pub fn pairwise_sum<T>(xs: &[T]) -> T
where
    T: Copy + Default + Add<Output = T>,
{
    if xs.len() <= LEAF {
        let mut acc = T::default();
        for &x in xs {
            acc = acc + x;
        }
        return acc;
    }
    let mid = xs.len() / 2;
    pairwise_sum(&xs[..mid]) + pairwise_sum(&xs[mid..])
}

/// Maps `f` over `lo..hi` in parallel, keeping index order.
pub fn par_map_range<T, F>(lo: u64, hi: u64, f: F) -> Vec<T>
where
    T: Send,
    F: Fn(u64) -> T + Sync + Send,
{
    (lo..hi).into_par_iter().map(f).collect()
}

/// Parallel map followed by a deterministic pairwise reduction.
pub fn par_sum_range<T, F>(lo: u64, hi: u64, f: F) -> T
where
    T: Copy + Default + Add<Output = T> + Send,
    F: Fn(u64) -> T + Sync + Send,
{
    pairwise_sum(&par_map_range(lo, hi, f))
}

/// Fallible variant of [`par_sum_range`]; the first error by index wins.
pub fn try_par_sum_range<T, E, F>(lo: u64, hi: u64, f: F) -> Result<T, E>
where
    T: Copy + Default + Add<Output = T> + Send,
    E: Send,
    F: Fn(u64) -> Result<T, E> + Sync + Send,
{
    let terms: Vec<Result<T, E>> = par_map_range(lo, hi, f);
    let mut ok = Vec::with_capacity(terms.len());
    for t in terms {
        ok.push(t?);
    }
    Ok(pairwise_sum(&ok))
}

#[cfg(test)]
mod tests {
    use super::*;
    use num_complex::Complex64;

    #[test]
    fn pairwise_matches_exact_integer_sums() {
        let xs: Vec<f64> = (1..=10_000).map(|k| k as f64).collect();
        assert_eq!(pairwise_sum(&xs), 50_005_000.0);
        assert_eq!(pairwise_sum::<f64>(&[]), 0.0);
    }

    #[test]
    fn parallel_sum_is_thread_count_independent() {
        let f = |k: u64| Complex64::new((k as f64).sqrt().sin(), 1.0 / (k as f64 + 1.0));
        let a = par_sum_range(0, 100_000, f);
        let pool = rayon::ThreadPoolBuilder::new().num_threads(3).build().unwrap();
        let b = pool.install(|| par_sum_range(0, 100_000, f));
        assert_eq!(a.re.to_bits(), b.re.to_bits());
        assert_eq!(a.im.to_bits(), b.im.to_bits());
    }
}
