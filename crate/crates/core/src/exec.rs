//! Deterministic execution helpers for lattice scans and sweeps.
//!
//! Work is split into fixed-size index chunks; partial results are merged in
//! chunk order, so the outcome does not depend on thread scheduling or on the
//! number of workers. The sequential fallback (feature `parallel` disabled)
//! uses the same chunking and therefore produces bit-identical results.

#[cfg(feature = "parallel")]
use rayon::prelude::*;

/// Chunk size for fold-style scans (2^14 indices per chunk).
const CHUNK_BITS: u32 = 14;

/// Apply `f` to every index in `0..len`, returning results in index order.
pub fn map_indexed<T, F>(len: usize, f: F) -> Vec<T>
where
    T: Send,
    F: Fn(usize) -> T + Sync + Send,
{
    #[cfg(feature = "parallel")]
    {
        (0..len).into_par_iter().map(f).collect()
    }
    #[cfg(not(feature = "parallel"))]
    {
        (0..len).map(f).collect()
    }
}

/// Sequential twin of [`map_indexed`], kept for benchmarking the rayon path
/// against.
pub fn map_indexed_seq<T, F>(len: usize, f: F) -> Vec<T>
where
    F: Fn(usize) -> T,
{
    (0..len).map(f).collect()
}

fn chunk_ranges(len: usize) -> Vec<std::ops::Range<usize>> {
    let chunk = 1usize << CHUNK_BITS;
    (0..len.div_ceil(chunk))
        .map(|c| (c * chunk)..((c + 1) * chunk).min(len))
        .collect()
}

/// Fold every index range chunk with `fold_chunk`, then merge the per-chunk
/// accumulators in chunk order.
pub fn fold_chunked<A, F, M>(len: usize, fold_chunk: F, merge: M) -> Option<A>
where
    A: Send,
    F: Fn(std::ops::Range<usize>) -> A + Sync + Send,
    M: Fn(A, A) -> A,
{
    let partials: Vec<A>;
    #[cfg(feature = "parallel")]
    {
        partials = chunk_ranges(len).into_par_iter().map(&fold_chunk).collect();
    }
    #[cfg(not(feature = "parallel"))]
    {
        partials = chunk_ranges(len).into_iter().map(&fold_chunk).collect();
    }
    partials.into_iter().reduce(merge)
}

/// Sequential twin of [`fold_chunked`]; same chunking, same merge order.
pub fn fold_chunked_seq<A, F, M>(len: usize, fold_chunk: F, merge: M) -> Option<A>
where
    F: Fn(std::ops::Range<usize>) -> A,
    M: Fn(A, A) -> A,
{
    chunk_ranges(len).into_iter().map(fold_chunk).reduce(merge)
}

/// Return the first `Some` produced by `find_chunk` over index chunks, in
/// chunk order. Later chunks may be skipped once a match is known.
pub fn find_first_chunked<T, F>(len: usize, find_chunk: F) -> Option<T>
where
    T: Send,
    F: Fn(std::ops::Range<usize>) -> Option<T> + Sync + Send,
{
    #[cfg(feature = "parallel")]
    {
        chunk_ranges(len).into_par_iter().find_map_first(find_chunk)
    }
    #[cfg(not(feature = "parallel"))]
    {
        chunk_ranges(len).into_iter().find_map(|r| find_chunk(r))
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn map_indexed_preserves_order() {
        let v = map_indexed(100_000, |i| i * 2);
        assert_eq!(v[0], 0);
        assert_eq!(v[99_999], 199_998);
        assert_eq!(v, map_indexed_seq(100_000, |i| i * 2));
    }

    #[test]
    fn fold_matches_sequential_bitwise() {
        // Floating accumulation must not depend on the execution strategy.
        let f = |r: std::ops::Range<usize>| r.map(|i| (i as f64).sin()).sum::<f64>();
        let a = fold_chunked(1 << 17, f, |x, y| x + y).unwrap();
        let b = fold_chunked_seq(1 << 17, f, |x, y| x + y).unwrap();
        assert_eq!(a.to_bits(), b.to_bits());
    }

    #[test]
    fn find_first_returns_lowest_chunk_match() {
        let hit = find_first_chunked(1 << 16, |r| r.clone().find(|&i| i >= 40_000));
        assert_eq!(hit, Some(40_000));
        let none = find_first_chunked(100, |r| r.clone().find(|&i| i > 1_000));
        assert_eq!(none, None);
    }
}
