//! Searched democracy functions `φ_u(m) = max ‖1_{εA}‖` and `φ_l(m) = min ‖1_{εA}‖`.
//!
//! The search covers a fixed list of structured families plus random sets,
//! so `phi_upper` is a lower bound for the true supremum and `phi_lower` an
//! upper bound for the true infimum.

use std::collections::BTreeSet;

use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::space::{Space, SpaceKind};
use crate::vector::{signed_ones, SparseVector};

use super::sampler::{random_set, random_sign};

pub const RANDOM_SETS: usize = 32;
pub const RANDOM_SIGNS: usize = 64;
/// Sizes up to this get every sign pattern.
pub const ALL_SIGNS_UP_TO: usize = 10;

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct DemocracyProfile {
    pub m: usize,
    pub horizon: usize,
    pub phi_upper: f64,
    pub phi_lower: f64,
    pub upper_witness: SparseVector,
    pub lower_witness: SparseVector,
    pub sets_examined: usize,
    pub signed: bool,
}

/// Smallest `s` such that every set of `size` indices starting at `s` is
/// admissible in the Schreier-type space; `None` for other spaces or when
/// `f` is bounded below the required level.
pub fn far_block_start(space: &Space, size: usize) -> Option<usize> {
    let SpaceKind::SchreierF { f } = space.kind() else { return None };
    let f1 = f.at(1);
    let ok = |s: usize| f.at(s) / f1 >= size as f64;
    let mut hi = 1usize;
    while !ok(hi) {
        hi = hi.checked_mul(2)?;
        if hi > 1 << 50 {
            return None;
        }
    }
    let mut lo = hi / 2;
    if lo == 0 {
        return Some(1);
    }
    // invariant: !ok(lo), ok(hi)
    while hi - lo > 1 {
        let mid = lo + (hi - lo) / 2;
        if ok(mid) {
            hi = mid;
        } else {
            lo = mid;
        }
    }
    Some(hi)
}

fn take_avoiding<I: Iterator<Item = usize>>(it: I, size: usize, avoid: &BTreeSet<usize>, cap: usize) -> Option<Vec<usize>> {
    let v: Vec<usize> = it.take_while(|&n| n <= cap).filter(|n| !avoid.contains(n)).take(size).collect();
    (v.len() == size).then_some(v)
}

/// Structured and random index sets of `size` elements that avoid `avoid`.
///
/// Families: prefix, suffix ending at `horizon`, far block starting at
/// `horizon` (or at the Schreier admissibility start, whichever is later),
/// odd and even indices, the progression `1, 4, 7, …`, and `random` uniform
/// sets from `1..=horizon`.
pub fn candidate_sets(
    space: &Space,
    size: usize,
    horizon: usize,
    avoid: &BTreeSet<usize>,
    random: usize,
    rng: &mut ChaCha8Rng,
) -> Vec<(String, Vec<usize>)> {
    let cap = space.capacity().unwrap_or(usize::MAX);
    let mut out = Vec::new();
    if size == 0 {
        return out;
    }
    let mut push = |name: &str, set: Option<Vec<usize>>| {
        if let Some(s) = set {
            if !out.iter().any(|(_, t): &(String, Vec<usize>)| *t == s) {
                out.push((name.to_string(), s));
            }
        }
    };
    push("prefix", take_avoiding(1.., size, avoid, cap));
    let suffix_start = (horizon + 1).saturating_sub(size + avoid.range(..=horizon).count()).max(1);
    push("suffix", take_avoiding(suffix_start.., size, avoid, cap.min(horizon)));
    let mut far = horizon.max(far_block_start(space, size).unwrap_or(1));
    if far.saturating_add(size + avoid.len()) > cap {
        far = cap.saturating_sub(size + avoid.len()) + 1;
    }
    push("far_block", take_avoiding(far.., size, avoid, cap));
    push("odd", take_avoiding((1..).step_by(2), size, avoid, cap));
    push("even", take_avoiding((2..).step_by(2), size, avoid, cap));
    push("step3", take_avoiding((1..).step_by(3), size, avoid, cap));
    let pool_top = horizon.min(cap);
    let free = pool_top.saturating_sub(avoid.range(..=pool_top).count());
    if free >= size {
        for _ in 0..random {
            let mut set: Vec<usize> = Vec::with_capacity(size);
            let mut picked = BTreeSet::new();
            while set.len() < size {
                let n = random_set(rng, pool_top, 1)[0];
                if !avoid.contains(&n) && picked.insert(n) {
                    set.push(n);
                }
            }
            set.sort_unstable();
            push("random", Some(set));
        }
    }
    out
}

/// Sign patterns for a set of `size` elements.
pub fn sign_patterns(size: usize, with_signs: bool, rng: &mut ChaCha8Rng) -> Vec<Vec<f64>> {
    if !with_signs || size == 0 {
        return vec![vec![1.0; size]];
    }
    if size <= ALL_SIGNS_UP_TO {
        return (0..1u32 << size)
            .map(|mask| (0..size).map(|i| if mask & (1 << i) != 0 { -1.0 } else { 1.0 }).collect())
            .collect();
    }
    let mut out = vec![vec![1.0; size], (0..size).map(|i| if i % 2 == 0 { 1.0 } else { -1.0 }).collect()];
    for _ in 0..RANDOM_SIGNS {
        out.push((0..size).map(|_| random_sign(rng)).collect());
    }
    out
}

pub fn democracy_profile(space: &Space, m: usize, horizon: usize, with_signs: bool, seed: u64) -> Result<DemocracyProfile> {
    if m == 0 || m > horizon {
        return Err(Error::Precondition(format!("democracy profile needs 1 ≤ m ≤ horizon, got m={m}, horizon={horizon}")));
    }
    if let Some(cap) = space.capacity() {
        if m > cap {
            return Err(Error::Precondition(format!("m = {m} exceeds the dimension {cap}")));
        }
    }
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let sets = candidate_sets(space, m, horizon, &BTreeSet::new(), RANDOM_SETS, &mut rng);
    let signs = sign_patterns(m, with_signs, &mut rng);
    let mut upper = (f64::NEG_INFINITY, SparseVector::zero());
    let mut lower = (f64::INFINITY, SparseVector::zero());
    let mut examined = 0;
    for (_, set) in &sets {
        for eps in &signs {
            let v = signed_ones(set, eps);
            let n = space.norm(&v)?;
            examined += 1;
            if n > upper.0 {
                upper = (n, v.clone());
            }
            if n < lower.0 {
                lower = (n, v);
            }
        }
    }
    Ok(DemocracyProfile {
        m,
        horizon,
        phi_upper: upper.0,
        phi_lower: lower.0,
        upper_witness: upper.1,
        lower_witness: lower.1,
        sets_examined: examined,
        signed: with_signs,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::funcf::FuncF;

    #[test]
    fn c0_flat() {
        for m in [1, 5, 12] {
            let p = democracy_profile(&Space::c0(), m, 100, true, 1).unwrap();
            assert_eq!((p.phi_upper, p.phi_lower), (1.0, 1.0));
        }
    }

    #[test]
    fn direct_sum_counts() {
        let p = democracy_profile(&Space::direct_sum(1.0, 2.0).unwrap(), 3, 50, false, 1).unwrap();
        assert_eq!(p.phi_upper, 3.0);
        assert!((p.phi_lower - 3f64.sqrt()).abs() < 1e-15);
    }

    #[test]
    fn schreier_far_block() {
        let s = Space::schreier(FuncF::sqrt());
        assert_eq!(far_block_start(&s, 100), Some(10_000));
        assert_eq!(far_block_start(&s, 1), Some(1));
        let p = democracy_profile(&s, 100, 10_000, false, 3).unwrap();
        assert_eq!(p.phi_upper, 100.0);
        assert_eq!(p.phi_lower, 9.0);
    }

    #[test]
    fn disjoint_candidates() {
        let s = Space::lp(2.0).unwrap();
        let avoid: BTreeSet<usize> = (1..=10).collect();
        let mut rng = ChaCha8Rng::seed_from_u64(0);
        for (_, set) in candidate_sets(&s, 5, 40, &avoid, 8, &mut rng) {
            assert_eq!(set.len(), 5);
            assert!(set.iter().all(|n| !avoid.contains(n)));
        }
    }
}
