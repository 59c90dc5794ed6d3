//! Ranked enumeration of k-subsets with deterministic parallel reductions.

use rayon::prelude::*;

use crate::sampling::{pick_max, pick_min, Candidate};

const BLOCK: u128 = 4096;

pub fn binomial(n: usize, k: usize) -> u128 {
    if k > n {
        return 0;
    }
    let k = k.min(n - k);
    let mut acc: u128 = 1;
    for i in 0..k {
        acc = acc * (n - i) as u128 / (i + 1) as u128;
    }
    acc
}

/// Number of subsets whose size lies in `sizes`.
pub fn count_sizes(n: usize, sizes: impl IntoIterator<Item = usize>) -> u128 {
    sizes.into_iter().map(|k| binomial(n, k)).sum()
}

/// The `rank`-th k-subset of `{0..n}` in lexicographic order.
pub fn unrank(n: usize, k: usize, mut rank: u128) -> Vec<usize> {
    let mut out = Vec::with_capacity(k);
    let mut next = 0;
    for slot in 0..k {
        let remaining = k - slot - 1;
        loop {
            let c = binomial(n - next - 1, remaining);
            if rank < c {
                break;
            }
            rank -= c;
            next += 1;
        }
        out.push(next);
        next += 1;
    }
    out
}

/// Advances to the next k-subset in lexicographic order; `false` at the end.
pub fn next_combination(set: &mut [usize], n: usize) -> bool {
    let k = set.len();
    let mut i = k;
    while i > 0 {
        i -= 1;
        if set[i] < n - k + i {
            set[i] += 1;
            for j in i + 1..k {
                set[j] = set[j - 1] + 1;
            }
            return true;
        }
    }
    false
}

/// Inverse of the global index used by [`best_subset`]: sizes in order, then
/// lexicographic rank within each size.
pub fn unrank_global(n: usize, sizes: &[usize], mut index: u128) -> Vec<usize> {
    for &k in sizes {
        let total = binomial(n, k);
        if index < total {
            return unrank(n, k, index);
        }
        index -= total;
    }
    panic!("index out of range for the given sizes");
}

/// Best subset over all sizes in `sizes` (ascending), ranked by size then
/// lexicographic order; ties resolve to the lowest rank.
pub(crate) fn best_subset<W, F>(n: usize, sizes: &[usize], maximize: bool, eval: F) -> Option<Candidate<W>>
where
    W: Send,
    F: Fn(&[usize]) -> Option<(f64, W)> + Sync + Send,
{
    let pick = if maximize { pick_max::<W> } else { pick_min::<W> };
    let mut offset: u128 = 0;
    let mut jobs: Vec<(usize, u128, u128, u128)> = Vec::new();
    for &k in sizes {
        let total = binomial(n, k);
        let mut start = 0;
        while start < total {
            let end = (start + BLOCK).min(total);
            jobs.push((k, start, end, offset));
            start = end;
        }
        offset += total;
    }
    jobs.into_par_iter()
        .filter_map(|(k, start, end, offset)| {
            let mut set = unrank(n, k, start);
            let mut best: Option<Candidate<W>> = None;
            let mut rank = start;
            loop {
                if let Some((value, witness)) = eval(&set).filter(|(v, _)| v.is_finite()) {
                    let cand = Candidate { index: (offset + rank) as u64, value, witness };
                    best = Some(match best {
                        None => cand,
                        Some(b) => pick(b, cand),
                    });
                }
                rank += 1;
                if rank >= end || !next_combination(&mut set, n) {
                    break;
                }
            }
            best
        })
        .reduce_with(pick)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn binomials() {
        assert_eq!(binomial(8, 3), 56);
        assert_eq!(binomial(5, 0), 1);
        assert_eq!(binomial(3, 5), 0);
        assert_eq!(count_sizes(4, 0..=4), 16);
    }

    #[test]
    fn unrank_agrees_with_iteration() {
        let mut set = unrank(6, 3, 0);
        let mut rank = 0;
        loop {
            assert_eq!(unrank(6, 3, rank), set);
            rank += 1;
            if !next_combination(&mut set, 6) {
                break;
            }
        }
        assert_eq!(rank, 20);
    }

    #[test]
    fn best_subset_visits_everything() {
        // maximize Σ of elements over all subsets of size ≤ 3 of {0..9}
        let best =
            best_subset(10, &[0, 1, 2, 3], true, |s| Some((s.iter().sum::<usize>() as f64, s.to_vec()))).unwrap();
        assert_eq!(best.witness, vec![7, 8, 9]);
        let worst = best_subset(10, &[2], false, |s| Some((s.iter().sum::<usize>() as f64, s.to_vec()))).unwrap();
        assert_eq!(worst.witness, vec![0, 1]);
        let empty = best_subset(3, &[0], true, |s| Some((s.len() as f64, s.to_vec()))).unwrap();
        assert!(empty.witness.is_empty());
    }
}
