//! Order-preserving data parallelism. Results never depend on the thread count.

use std::ops::Range;

/// Splits `0..n` into contiguous ranges of roughly `grain` items.
pub(crate) fn chunks(n: usize, grain: usize) -> Vec<Range<usize>> {
    let grain = grain.max(1);
    (0..n.div_ceil(grain)).map(|c| c * grain..((c + 1) * grain).min(n)).collect()
}

/// Applies `f` to every item, possibly concurrently, returning results in
/// input order.
#[cfg(feature = "parallel")]
pub(crate) fn map<I, T, F>(items: Vec<I>, f: F) -> Vec<T>
where
    I: Send,
    T: Send,
    F: Fn(I) -> T + Sync + Send,
{
    use rayon::prelude::*;
    items.into_par_iter().map(f).collect()
}

#[cfg(not(feature = "parallel"))]
pub(crate) fn map<I, T, F>(items: Vec<I>, f: F) -> Vec<T>
where
    F: Fn(I) -> T,
{
    items.into_iter().map(f).collect()
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn chunks_cover_range() {
        let c = chunks(10, 4);
        assert_eq!(c, vec![0..4, 4..8, 8..10]);
        assert!(chunks(0, 4).is_empty());
    }

    #[test]
    fn map_keeps_order() {
        let out = map((0..100).collect(), |i: i32| i * 2);
        assert_eq!(out, (0..100).map(|i| i * 2).collect::<Vec<_>>());
    }
}
