//! Best `m`-term errors by exhaustive support enumeration.
//!
//! `σ̃_m(x) = min_{|A| ≤ m} ‖x − P_A x‖` is exact. For `σ_m(x)` each candidate
//! support is optimized by cyclic coordinate descent with a golden-section
//! line search, started from the projection coefficients, so the reported
//! value never exceeds `σ̃_m(x)`.

use crate::error::{Error, Result};
use crate::greedy::combinations;
use crate::space::Space;
use crate::vector::SparseVector;

pub const MAX_TILDE_SUPPORT: usize = 20;
pub const MAX_SIGMA_SUPPORT: usize = 14;
/// Indices outside the support considered as candidate approximation terms.
pub const FRESH_INDICES: usize = 2;
pub const MAX_SWEEPS: usize = 200;
/// Default accuracy of [`sigma`].
pub const DEFAULT_TOL: f64 = 1e-9;

fn norm_masked(space: &Space, entries: &[(usize, f64)], keep: u32, scratch: &mut Vec<(usize, f64)>) -> Result<f64> {
    scratch.clear();
    scratch.extend(entries.iter().enumerate().filter(|(i, _)| keep & (1 << i) != 0).map(|(_, e)| *e));
    space.norm_entries(scratch)
}

/// `min_{|A| ≤ k} ‖x − P_A x‖` for every `k = 0..=m`, sharing one pass over subsets.
pub fn sigma_tilde_profile(x: &SparseVector, m: usize, space: &Space) -> Result<Vec<f64>> {
    let entries = x.pairs();
    let s = entries.len();
    if s > MAX_TILDE_SUPPORT {
        return Err(Error::Capacity(format!(
            "σ̃ enumeration over a support of {s} (limit {MAX_TILDE_SUPPORT}); use a sampled estimate"
        )));
    }
    let full: u32 = (1u32 << s) - 1;
    let mut best = vec![f64::INFINITY; m + 1];
    let mut scratch = Vec::with_capacity(s);
    for removed in 0..=full {
        let k = removed.count_ones() as usize;
        if k > m {
            continue;
        }
        let v = norm_masked(space, &entries, full & !removed, &mut scratch)?;
        if v < best[k] {
            best[k] = v;
        }
    }
    for k in 1..=m {
        if best[k] > best[k - 1] || best[k].is_infinite() {
            best[k] = best[k - 1].min(best[k]);
        }
    }
    Ok(best)
}

/// `σ̃_m(x)`
pub fn sigma_tilde(x: &SparseVector, m: usize, space: &Space) -> Result<f64> {
    Ok(*sigma_tilde_profile(x, m, space)?.last().expect("nonempty profile"))
}

/// `min_{|A| = m} ‖x − P_A x‖` where `A` ranges over subsets of
/// `supp(x) ∪ {m fresh indices}`; equals [`sigma_tilde`] since the fresh
/// indices absorb any slack in the cardinality.
pub fn sigma_tilde_exact_size(x: &SparseVector, m: usize, space: &Space) -> Result<f64> {
    let s = x.nnz();
    if s > MAX_TILDE_SUPPORT {
        return Err(Error::Capacity(format!("σ̃ enumeration over a support of {s} (limit {MAX_TILDE_SUPPORT})")));
    }
    let mut pool: Vec<usize> = x.support().collect();
    pool.extend(fresh_indices(x, m, None));
    let mut best = f64::INFINITY;
    for set in combinations(&pool, m.min(pool.len())) {
        let set = set.into_iter().collect();
        best = best.min(space.norm(&x.project_complement(&set))?);
    }
    Ok(best)
}

/// The `count` smallest indices outside `supp(x)`, staying within `capacity`.
fn fresh_indices(x: &SparseVector, count: usize, capacity: Option<usize>) -> Vec<usize> {
    let cap = capacity.unwrap_or(usize::MAX);
    (1..=cap).filter(|&n| x.get(n) == 0.0).take(count).collect()
}

/// State of the coordinate descent on one candidate support: the residual
/// `x − Σ a_n e_n` over the union of `supp(x)` and the candidates.
struct Residual<'a> {
    space: &'a Space,
    entries: Vec<(usize, f64)>,
}

impl Residual<'_> {
    fn value(&self) -> Result<f64> {
        self.space.norm_entries(&self.entries)
    }

    fn value_with(&mut self, pos: usize, v: f64) -> Result<f64> {
        let old = self.entries[pos].1;
        self.entries[pos].1 = v;
        let r = self.space.norm_entries(&self.entries);
        self.entries[pos].1 = old;
        r
    }
}

const INV_PHI: f64 = 0.618_033_988_749_894_9;

/// Minimizes the convex map `t ↦ ‖residual with coordinate pos = t‖` on `[lo, hi]`.
fn golden(res: &mut Residual<'_>, pos: usize, mut lo: f64, mut hi: f64, tol: f64) -> Result<(f64, f64)> {
    let mut c = hi - INV_PHI * (hi - lo);
    let mut d = lo + INV_PHI * (hi - lo);
    let mut fc = res.value_with(pos, c)?;
    let mut fd = res.value_with(pos, d)?;
    while hi - lo > tol {
        if fc <= fd {
            hi = d;
            d = c;
            fd = fc;
            c = hi - INV_PHI * (hi - lo);
            fc = res.value_with(pos, c)?;
        } else {
            lo = c;
            c = d;
            fc = fd;
            d = lo + INV_PHI * (hi - lo);
            fd = res.value_with(pos, d)?;
        }
    }
    Ok(if fc <= fd { (c, fc) } else { (d, fd) })
}

/// Coordinate descent over the residual positions `coords`; returns the final value.
fn descend(res: &mut Residual<'_>, coords: &[usize], tol: f64) -> Result<f64> {
    let mut current = res.value()?;
    for _ in 0..MAX_SWEEPS {
        let start = current;
        for &pos in coords {
            let r0 = res.entries[pos].1;
            // A probe on either side: if neither helps, convexity puts the
            // coordinate minimizer within `tol` of the current point.
            let up = res.value_with(pos, r0 + tol)?;
            let down = res.value_with(pos, r0 - tol)?;
            if up >= current && down >= current {
                continue;
            }
            // |e_n^*(z)| ≤ ‖z‖ in every zoo space, so the optimal residual
            // coordinate lies within `current` of zero.
            let (t, v) = golden(res, pos, -current, current, tol)?;
            if v < current {
                res.entries[pos].1 = t;
                current = v;
            }
        }
        if start - current < tol {
            return Ok(current);
        }
    }
    Err(Error::NonConvergence { sweeps: MAX_SWEEPS, best: current })
}

/// `σ_k(x)` for every `k = 0..=m`, nonincreasing in `k`.
pub fn sigma_profile(x: &SparseVector, m: usize, space: &Space, tol: f64) -> Result<Vec<f64>> {
    let s = x.nnz();
    if s > MAX_SIGMA_SUPPORT {
        return Err(Error::Capacity(format!("σ enumeration over a support of {s} (limit {MAX_SIGMA_SUPPORT})")));
    }
    if !(tol > 0.0) {
        return Err(Error::Domain(format!("tolerance must be positive, got {tol}")));
    }
    let tilde = sigma_tilde_profile(x, m, space)?;
    let fresh = fresh_indices(x, FRESH_INDICES, space.capacity());
    let mut union: Vec<(usize, f64)> = x.pairs();
    union.extend(fresh.iter().map(|&n| (n, 0.0)));
    union.sort_by_key(|e| e.0);
    let candidates: Vec<usize> = (0..union.len()).collect();

    let mut out = Vec::with_capacity(m + 1);
    let mut prev = f64::INFINITY;
    for k in 0..=m {
        let mut best = tilde[k].min(prev);
        if k >= s {
            best = 0.0;
        } else if k > 0 {
            // Larger supports contain the smaller ones, so only |S| = k matters.
            for support in combinations(&candidates, k.min(union.len())) {
                let mut res = Residual { space, entries: union.clone() };
                // start from the projection: residual coordinates on S are zero
                for &pos in &support {
                    res.entries[pos].1 = 0.0;
                }
                let v = descend(&mut res, &support, tol)?;
                best = best.min(v);
            }
        }
        out.push(best);
        prev = best;
    }
    Ok(out)
}

/// `σ_m(x)` to accuracy `tol`.
pub fn sigma(x: &SparseVector, m: usize, space: &Space, tol: f64) -> Result<f64> {
    Ok(*sigma_profile(x, m, space, tol)?.last().expect("nonempty profile"))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::funcf::FuncF;

    #[test]
    fn tilde_examples() {
        let ones = SparseVector::from_dense(&[1.0; 4]);
        assert_eq!(sigma_tilde(&ones, 4, &Space::c0()).unwrap(), 0.0);
        let x = SparseVector::from_dense(&[3.0, 2.0, 1.0]);
        let l2 = Space::lp(2.0).unwrap();
        assert_eq!(sigma_tilde(&x, 0, &l2).unwrap(), l2.norm(&x).unwrap());
        assert!((sigma_tilde(&x, 1, &l2).unwrap() - 5f64.sqrt()).abs() < 1e-15);
    }

    #[test]
    fn exact_size_agrees() {
        let x = SparseVector::from_dense(&[0.5, -2.0, 1.5, 0.25, 3.0]);
        for space in [Space::lp(1.0).unwrap(), Space::kt(), Space::schreier(FuncF::sqrt())] {
            for m in 0..=5 {
                let a = sigma_tilde(&x, m, &space).unwrap();
                let b = sigma_tilde_exact_size(&x, m, &space).unwrap();
                assert!((a - b).abs() < 1e-15, "{} m={m}", space.describe());
            }
        }
    }

    #[test]
    fn sigma_matches_tilde_on_lp() {
        let x = SparseVector::from_dense(&[0.5, -2.0, 1.5, 0.25, 3.0, -0.75]);
        for p in [1.0, 2.0, 4.0] {
            let space = Space::lp(p).unwrap();
            let s = sigma_profile(&x, 6, &space, DEFAULT_TOL).unwrap();
            let t = sigma_tilde_profile(&x, 6, &space).unwrap();
            for k in 0..=6 {
                assert!((s[k] - t[k]).abs() < 1e-6, "p={p} k={k}: {} vs {}", s[k], t[k]);
            }
        }
    }

    #[test]
    fn sigma_can_beat_projections() {
        // In KT, x = e_1 + e_2 approximated by one term: shrinking the kept
        // coefficient lowers the summing part.
        let x = SparseVector::from_dense(&[1.0, 1.0]);
        let kt = Space::kt();
        let free = sigma(&x, 1, &kt, DEFAULT_TOL).unwrap();
        let proj = sigma_tilde(&x, 1, &kt).unwrap();
        assert!(free <= proj + 1e-12);
        assert_eq!(sigma(&x, 2, &kt, DEFAULT_TOL).unwrap(), 0.0);
    }

    #[test]
    fn capacity_errors() {
        let big = SparseVector::from_dense(&[1.0; 21]);
        assert!(matches!(sigma_tilde(&big, 2, &Space::c0()), Err(Error::Capacity(_))));
        let mid = SparseVector::from_dense(&[1.0; 15]);
        assert!(matches!(sigma(&mid, 2, &Space::c0(), 1e-9), Err(Error::Capacity(_))));
    }
}
