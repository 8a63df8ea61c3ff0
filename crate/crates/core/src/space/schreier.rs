//! Norm of the Schreier-type space `X_f`:
//! `‖x‖ = sup_{A ∈ 𝒜} Σ_{n∈A} |x_n|` where `A ∈ 𝒜` iff `A ≠ ∅` and
//! `f(min A) / f(1) ≥ |A|`.

use crate::error::{Error, Result};
use crate::funcf::FuncF;

/// Largest admissible cardinality for a set whose minimum is `i`.
pub fn admissible_size(f: &FuncF, i: usize) -> usize {
    (f.at(i) / f.at(1)).floor() as usize
}

pub fn is_admissible(f: &FuncF, set: &[usize]) -> bool {
    match set.iter().min() {
        None => false,
        Some(&min) => (set.len() as f64) <= f.at(min) / f.at(1),
    }
}

/// Fenwick tree over value ranks holding counts and sums.
struct RankTree {
    count: Vec<usize>,
    sum: Vec<f64>,
    top: usize,
}

impl RankTree {
    fn new(n: usize) -> Self {
        RankTree { count: vec![0; n + 1], sum: vec![0.0; n + 1], top: n.next_power_of_two() }
    }

    fn insert(&mut self, rank: usize, value: f64) {
        let mut i = rank + 1;
        while i < self.count.len() {
            self.count[i] += 1;
            self.sum[i] += value;
            i += i & i.wrapping_neg();
        }
    }

    /// Sum of the `k` smallest ranks currently inserted (ranks sort values descending).
    fn top_k_sum(&self, k: usize, by_rank: &[f64]) -> f64 {
        let n = self.count.len() - 1;
        let mut pos = 0;
        let mut rem = k;
        let mut acc = 0.0;
        let mut step = self.top;
        while step > 0 {
            let next = pos + step;
            if next <= n && self.count[next] < rem {
                pos = next;
                rem -= self.count[next];
                acc += self.sum[next];
            }
            step >>= 1;
        }
        if pos < n && rem > 0 {
            acc += by_rank[pos];
        }
        acc
    }
}

/// Suffix formula: `max_i` (sum of the `k_i` largest `|x_n|`, `n ≥ i`), `k_i = ⌊f(i)/f(1)⌋`.
/// `entries` must be sorted by index.
pub fn norm(f: &FuncF, entries: &[(usize, f64)]) -> f64 {
    let n = entries.len();
    if n == 0 {
        return 0.0;
    }
    let mut order: Vec<usize> = (0..n).collect();
    order.sort_by(|&a, &b| entries[b].1.abs().total_cmp(&entries[a].1.abs()).then(a.cmp(&b)));
    let mut rank = vec![0; n];
    let mut by_rank = vec![0.0; n];
    for (r, &pos) in order.iter().enumerate() {
        rank[pos] = r;
        by_rank[r] = entries[pos].1.abs();
    }
    let f1 = f.at(1);
    let mut tree = RankTree::new(n);
    let mut inserted = 0;
    let mut best: f64 = 0.0;
    for pos in (0..n).rev() {
        tree.insert(rank[pos], by_rank[rank[pos]]);
        inserted += 1;
        let k = ((f.at(entries[pos].0) / f1).floor() as usize).min(inserted);
        best = best.max(tree.top_k_sum(k, &by_rank));
    }
    best
}

/// Exhaustive supremum over all admissible subsets of the support.
pub fn norm_by_enumeration(f: &FuncF, entries: &[(usize, f64)]) -> Result<f64> {
    let n = entries.len();
    if n > 24 {
        return Err(Error::Capacity(format!("enumeration over {n} coordinates (limit 24)")));
    }
    let f1 = f.at(1);
    let ratio: Vec<f64> = entries.iter().map(|&(i, _)| f.at(i) / f1).collect();
    let abs: Vec<f64> = entries.iter().map(|&(_, v)| v.abs()).collect();
    let mut sums = vec![0.0f64; 1 << n];
    let mut best: f64 = 0.0;
    for mask in 1usize..(1 << n) {
        let low = mask.trailing_zeros() as usize;
        sums[mask] = sums[mask & (mask - 1)] + abs[low];
        if (mask.count_ones() as f64) <= ratio[low] {
            best = best.max(sums[mask]);
        }
    }
    Ok(best)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn prefix(n: usize) -> Vec<(usize, f64)> {
        (1..=n).map(|i| (i, 1.0)).collect()
    }

    #[test]
    fn prefix_hundred_is_nine() {
        let f = FuncF::sqrt();
        assert_eq!(norm(&f, &prefix(100)), 9.0);
    }

    #[test]
    fn first_two_units() {
        let f = FuncF::sqrt();
        assert!(!is_admissible(&f, &[1, 2]));
        assert!(is_admissible(&f, &[2]));
        assert_eq!(norm(&f, &prefix(2)), 1.0);
        assert_eq!(norm_by_enumeration(&f, &prefix(2)).unwrap(), 1.0);
    }

    #[test]
    fn far_block_is_admissible() {
        let f = FuncF::sqrt();
        let block: Vec<(usize, f64)> = (10_000..10_100).map(|i| (i, 1.0)).collect();
        assert_eq!(norm(&f, &block), 100.0);
    }

    #[test]
    fn matches_enumeration_small() {
        let f = FuncF::sqrt();
        let entries = vec![(1, 0.5), (4, -3.0), (5, 1.0), (9, 2.0), (10, 2.5), (16, -0.25), (17, 1.0)];
        assert_eq!(norm(&f, &entries), norm_by_enumeration(&f, &entries).unwrap());
    }
}
