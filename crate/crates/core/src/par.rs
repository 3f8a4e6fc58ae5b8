//! Fixed-partition map over index ranges.
//!
//! Work is split into chunks whose boundaries depend only on the problem
//! size, never on the number of workers, and partial results come back in
//! chunk order. Callers reduce them sequentially, so outputs are identical
//! for any thread count (including the sequential `no_std` path).

use alloc::vec::Vec;
use core::ops::Range;

/// Chunk boundaries covering `0..len`.
pub fn chunks(len: usize, chunk: usize) -> Vec<Range<usize>> {
    let chunk = chunk.max(1);
    (0..len.div_ceil(chunk))
        .map(|c| c * chunk..((c + 1) * chunk).min(len))
        .collect()
}

/// Applies `f` to every chunk of `0..len`, returning results in chunk order.
#[cfg(feature = "std")]
pub fn map_chunks<T, F>(len: usize, chunk: usize, f: F) -> Vec<T>
where
    T: Send,
    F: Fn(Range<usize>) -> T + Sync + Send,
{
    use rayon::prelude::*;
    chunks(len, chunk).into_par_iter().map(f).collect()
}

#[cfg(not(feature = "std"))]
pub fn map_chunks<T, F>(len: usize, chunk: usize, f: F) -> Vec<T>
where
    T: Send,
    F: Fn(Range<usize>) -> T + Sync + Send,
{
    chunks(len, chunk).into_iter().map(f).collect()
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn chunks_cover_range_exactly() {
        let c = chunks(10, 4);
        assert_eq!(c, alloc::vec![0..4, 4..8, 8..10]);
        assert!(chunks(0, 4).is_empty());
    }

    #[test]
    fn map_chunks_preserves_order() {
        let sums = map_chunks(1000, 7, |r| r.sum::<usize>());
        assert_eq!(sums.iter().sum::<usize>(), 999 * 1000 / 2);
        assert_eq!(sums[0], (0..7).sum::<usize>());
    }
}
