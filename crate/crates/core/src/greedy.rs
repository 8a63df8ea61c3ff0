//! Greedy sets, `f`-greedy sets, truncation and TGA traces.
//!
//! `Λ` is a greedy set of `x` of order `m` when `|Λ| = m` and
//! `min_{n∈Λ} |x_n| ≥ max_{n∉Λ} |x_n|`. Ties are compared with exact
//! floating-point equality. When `m` exceeds the support, greedy sets are
//! padded with zero coordinates, smallest indices first.

use std::collections::BTreeSet;
use std::io::Write;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::funcf::FuncF;
use crate::numeric::format_significant;
use crate::schema::{csv_preamble, TRACE_COLUMNS};
use crate::space::Space;
use crate::vector::SparseVector;

pub type IndexSet = BTreeSet<usize>;

/// Largest number of sets [`greedy_sets`] will enumerate.
pub const MAX_ENUMERATED: u128 = 1 << 20;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub enum TiePolicy {
    /// The unique set that prefers smaller indices at every modulus tie.
    LowestIndex,
    /// Every element of `G(x, m)`.
    EnumerateAll,
}

/// `A = E ⊔ F` with `|E| ≤ f(|A|)` and `|x_n| ≥ ‖x − P_A x‖_∞` on `F`.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct GreedyDecomposition {
    pub e: IndexSet,
    pub f: IndexSet,
    pub parent: IndexSet,
}

impl GreedyDecomposition {
    /// Re-checks the defining conditions against `x` and `f`.
    pub fn is_valid(&self, x: &SparseVector, func: &FuncF) -> bool {
        let union: IndexSet = self.e.union(&self.f).copied().collect();
        let r = outside_sup(x, &self.parent);
        union == self.parent
            && self.e.is_disjoint(&self.f)
            && (self.e.len() as f64) <= func.at(self.parent.len())
            && self.f.iter().all(|&n| x.get(n).abs() >= r)
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub enum FGreedyVerdict {
    No,
    Yes(GreedyDecomposition),
}

impl FGreedyVerdict {
    pub fn is_yes(&self) -> bool {
        matches!(self, FGreedyVerdict::Yes(_))
    }
}

/// Support of `x` sorted by decreasing modulus, ties by increasing index.
pub fn greedy_order(x: &SparseVector) -> Vec<usize> {
    let mut order: Vec<(usize, f64)> = x.iter().collect();
    order.sort_by(|a, b| b.1.abs().total_cmp(&a.1.abs()).then(a.0.cmp(&b.0)));
    order.into_iter().map(|(n, _)| n).collect()
}

/// `‖x − P_A x‖_∞`
pub fn outside_sup(x: &SparseVector, set: &IndexSet) -> f64 {
    x.iter().filter(|(n, _)| !set.contains(n)).fold(0.0, |m, (_, v)| m.max(v.abs()))
}

/// The `count` smallest indices in `1..=dim` outside the support of `x`.
fn padding(x: &SparseVector, count: usize, dim: usize) -> Vec<usize> {
    (1..=dim).filter(|n| x.get(*n) == 0.0).take(count).collect()
}

fn check_order(x: &SparseVector, m: usize, dim: usize) -> Result<()> {
    if m > dim {
        return Err(Error::Precondition(format!("greedy set of order {m} exceeds the dimension bound {dim}")));
    }
    if let Some(top) = x.max_index() {
        if top > dim {
            return Err(Error::Precondition(format!("support reaches index {top} beyond the dimension bound {dim}")));
        }
    }
    Ok(())
}

/// The `LowestIndex` greedy set of order `m` inside `1..=dim`.
pub fn greedy_set(x: &SparseVector, m: usize, dim: usize) -> Result<IndexSet> {
    check_order(x, m, dim)?;
    let order = greedy_order(x);
    let mut set: IndexSet = order.iter().take(m).copied().collect();
    if m > order.len() {
        set.extend(padding(x, m - order.len(), dim));
    }
    Ok(set)
}

fn binomial(n: usize, k: usize) -> u128 {
    let k = k.min(n - k);
    let mut acc: u128 = 1;
    for i in 0..k {
        acc = acc * (n - i) as u128 / (i + 1) as u128;
        if acc > MAX_ENUMERATED {
            return acc;
        }
    }
    acc
}

/// All `k`-subsets of `pool`, lexicographic.
pub fn combinations(pool: &[usize], k: usize) -> Vec<Vec<usize>> {
    let mut out = Vec::new();
    let mut pick = Vec::with_capacity(k);
    fn rec(pool: &[usize], start: usize, k: usize, pick: &mut Vec<usize>, out: &mut Vec<Vec<usize>>) {
        if pick.len() == k {
            out.push(pick.clone());
            return;
        }
        let need = k - pick.len();
        for i in start..=pool.len().saturating_sub(need) {
            if i >= pool.len() {
                break;
            }
            pick.push(pool[i]);
            rec(pool, i + 1, k, pick, out);
            pick.pop();
        }
    }
    rec(pool, 0, k, &mut pick, &mut out);
    out
}

/// Greedy sets of order `m` under `policy`.
pub fn greedy_sets(x: &SparseVector, m: usize, policy: TiePolicy, dim: usize) -> Result<Vec<IndexSet>> {
    if policy == TiePolicy::LowestIndex {
        return Ok(vec![greedy_set(x, m, dim)?]);
    }
    check_order(x, m, dim)?;
    let order = greedy_order(x);
    let (mandatory, pool, need): (Vec<usize>, Vec<usize>, usize) = if m <= order.len() {
        if m == 0 {
            return Ok(vec![IndexSet::new()]);
        }
        let threshold = x.get(order[m - 1]).abs();
        let mandatory: Vec<usize> = order.iter().copied().filter(|&n| x.get(n).abs() > threshold).collect();
        let pool: Vec<usize> = order.iter().copied().filter(|&n| x.get(n).abs() == threshold).collect();
        let need = m - mandatory.len();
        (mandatory, pool, need)
    } else {
        let zeros: Vec<usize> = (1..=dim).filter(|&n| x.get(n) == 0.0).collect();
        (order.clone(), zeros, m - order.len())
    };
    let count = binomial(pool.len(), need);
    if count > MAX_ENUMERATED {
        return Err(Error::Capacity(format!("{count} greedy sets of order {m}; use LowestIndex")));
    }
    Ok(combinations(&pool, need)
        .into_iter()
        .map(|extra| mandatory.iter().copied().chain(extra).collect())
        .collect())
}

/// `min_{n∈A} |x_n| ≥ max_{n∉A} |x_n|`
pub fn is_greedy_set(x: &SparseVector, set: &IndexSet) -> bool {
    let inside = set.iter().map(|&n| x.get(n).abs()).fold(f64::INFINITY, f64::min);
    inside >= outside_sup(x, set)
}

/// `P_A x`
pub fn project(x: &SparseVector, set: &IndexSet) -> SparseVector {
    x.project(set)
}

/// Definitional test: the largest admissible `F` is every `n ∈ A` with
/// `|x_n| ≥ ‖x − P_A x‖_∞`, so `A` is `f`-greedy iff the rest fits in `f(|A|)`.
pub fn f_greedy_by_definition(x: &SparseVector, set: &IndexSet, f: &FuncF) -> FGreedyVerdict {
    let r = outside_sup(x, set);
    let (big, small): (IndexSet, IndexSet) = set.iter().partition(|&&n| x.get(n).abs() >= r);
    if (small.len() as f64) <= f.at(set.len()) {
        FGreedyVerdict::Yes(GreedyDecomposition { e: small, f: big, parent: set.clone() })
    } else {
        FGreedyVerdict::No
    }
}

/// Greedy-subset test: `A` is `f`-greedy iff it contains a greedy set `B` of
/// `x` with `|B| ≥ |A| − f(|A|)`. Among `k`-subsets of `A` only the `k`
/// largest can be greedy, so sizes are scanned from `|A|` downwards.
pub fn f_greedy_by_subset(x: &SparseVector, set: &IndexSet, f: &FuncF) -> FGreedyVerdict {
    let mut inside: Vec<usize> = set.iter().copied().collect();
    inside.sort_by(|&a, &b| x.get(b).abs().total_cmp(&x.get(a).abs()).then(a.cmp(&b)));
    let bound = set.len() as f64 - f.at(set.len());
    let beyond = outside_sup(x, set);
    for k in (0..=inside.len()).rev() {
        if (k as f64) < bound {
            break;
        }
        // the k-prefix is greedy iff its smallest modulus beats everything after it
        let low = if k == 0 { f64::INFINITY } else { x.get(inside[k - 1]).abs() };
        let rest = if k < inside.len() { beyond.max(x.get(inside[k]).abs()) } else { beyond };
        if low >= rest {
            let b: IndexSet = inside[..k].iter().copied().collect();
            debug_assert!(is_greedy_set(x, &b));
            let e = set.difference(&b).copied().collect();
            return FGreedyVerdict::Yes(GreedyDecomposition { e, f: b, parent: set.clone() });
        }
    }
    FGreedyVerdict::No
}

/// Runs both criteria and insists they agree.
pub fn is_f_greedy_set(x: &SparseVector, set: &IndexSet, f: &FuncF) -> Result<FGreedyVerdict> {
    if set.contains(&0) {
        return Err(Error::Domain("indices start at 1".into()));
    }
    let a = f_greedy_by_definition(x, set, f);
    let b = f_greedy_by_subset(x, set, f);
    if a.is_yes() != b.is_yes() {
        return Err(Error::InvariantViolation(format!(
            "f-greedy criteria disagree for A = {set:?}: definition {}, greedy subset {}",
            a.is_yes(),
            b.is_yes()
        )));
    }
    Ok(a)
}

/// `T_α x`: coefficients with `|x_n| > α` become `α sgn(x_n)`.
pub fn truncate(x: &SparseVector, alpha: f64) -> Result<SparseVector> {
    if !(alpha > 0.0) || !alpha.is_finite() {
        return Err(Error::Domain(format!("truncation level must be positive and finite, got {alpha}")));
    }
    let mut out = x.clone();
    for (n, v) in x.iter() {
        if v.abs() > alpha {
            out.set(n, alpha.copysign(v));
        }
    }
    Ok(out)
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct TraceRow {
    pub m: usize,
    pub indices: Vec<usize>,
    pub residual: f64,
}

/// Residual norms `‖x − P_{Λ_m} x‖` along the `LowestIndex` TGA, `m = 1..=m_max`.
pub fn tga_trace(x: &SparseVector, space: &Space, m_max: usize, dim: usize) -> Result<Vec<TraceRow>> {
    check_order(x, m_max, dim)?;
    let order = greedy_order(x);
    let pad = padding(x, m_max.saturating_sub(order.len()), dim);
    let mut chosen = IndexSet::new();
    let mut rows = Vec::with_capacity(m_max);
    for (i, n) in order.into_iter().chain(pad).take(m_max).enumerate() {
        chosen.insert(n);
        let residual = space.norm(&x.project_complement(&chosen))?;
        rows.push(TraceRow { m: i + 1, indices: chosen.iter().copied().collect(), residual });
    }
    Ok(rows)
}

pub fn write_trace_csv<W: Write>(rows: &[TraceRow], mut out: W) -> std::io::Result<()> {
    out.write_all(csv_preamble().as_bytes())?;
    let mut w = csv::Writer::from_writer(out);
    w.write_record(TRACE_COLUMNS)?;
    for row in rows {
        let indices: Vec<String> = row.indices.iter().map(|n| n.to_string()).collect();
        w.write_record([row.m.to_string(), indices.join(";"), format_significant(row.residual, 12)])?;
    }
    w.flush()
}

#[cfg(test)]
mod tests {
    use super::*;

    fn set(v: &[usize]) -> IndexSet {
        v.iter().copied().collect()
    }

    fn dec() -> SparseVector {
        SparseVector::from_dense(&[5.0, 4.0, 3.0, 2.0, 1.0])
    }

    #[test]
    fn greedy_set_examples() {
        assert_eq!(greedy_set(&dec(), 2, 100).unwrap(), set(&[1, 2]));
        let x = SparseVector::from_dense(&[-3.0, 2.0]);
        assert_eq!(greedy_set(&x, 1, 100).unwrap(), set(&[1]));
        let ones = SparseVector::from_dense(&[1.0; 4]);
        let all = greedy_sets(&ones, 3, TiePolicy::EnumerateAll, 100).unwrap();
        assert_eq!(all.len(), 4);
        assert!(all.contains(&set(&[1, 2, 3])));
        assert!(all.iter().all(|s| is_greedy_set(&ones, s)));
    }

    #[test]
    fn padding_beyond_support() {
        let x = SparseVector::from_pairs([(2, 1.0)]).unwrap();
        assert_eq!(greedy_set(&x, 3, 10).unwrap(), set(&[1, 2, 3]));
        assert_eq!(greedy_sets(&x, 2, TiePolicy::EnumerateAll, 4).unwrap().len(), 3);
        assert!(greedy_set(&x, 11, 10).is_err());
    }

    #[test]
    fn f_greedy_examples() {
        let f = FuncF::sqrt();
        match is_f_greedy_set(&dec(), &set(&[1, 2, 5]), &f).unwrap() {
            FGreedyVerdict::Yes(d) => {
                assert_eq!(d.e, set(&[5]));
                assert_eq!(d.f, set(&[1, 2]));
                assert!(d.is_valid(&dec(), &f));
            }
            FGreedyVerdict::No => panic!("expected f-greedy"),
        }
        assert_eq!(is_f_greedy_set(&dec(), &set(&[4, 5]), &f).unwrap(), FGreedyVerdict::No);
        assert!(is_f_greedy_set(&dec(), &set(&[1, 2, 3]), &f).unwrap().is_yes());
    }

    #[test]
    fn truncation() {
        let x = SparseVector::from_dense(&[3.0, 2.0, 0.5]);
        assert_eq!(truncate(&x, 1.0).unwrap(), SparseVector::from_dense(&[1.0, 1.0, 0.5]));
        let y = SparseVector::from_dense(&[-3.0, 0.5]);
        assert_eq!(truncate(&y, 1.0).unwrap(), SparseVector::from_dense(&[-1.0, 0.5]));
        assert_eq!(truncate(&x, 3.0).unwrap(), x);
        assert!(truncate(&x, 0.0).is_err());
    }

    #[test]
    fn traces() {
        let rows = tga_trace(&SparseVector::from_dense(&[2.0, 1.0]), &Space::lp(2.0).unwrap(), 2, 10).unwrap();
        assert_eq!(rows[0], TraceRow { m: 1, indices: vec![1], residual: 1.0 });
        assert_eq!(rows[1], TraceRow { m: 2, indices: vec![1, 2], residual: 0.0 });
        let rows = tga_trace(&SparseVector::from_dense(&[1.0; 4]), &Space::c0(), 4, 10).unwrap();
        let res: Vec<f64> = rows.iter().map(|r| r.residual).collect();
        assert_eq!(res, vec![1.0, 1.0, 1.0, 0.0]);
    }

    #[test]
    fn trace_csv() {
        let rows = tga_trace(&SparseVector::from_dense(&[2.0, 1.0]), &Space::lp(2.0).unwrap(), 2, 10).unwrap();
        let mut buf = Vec::new();
        write_trace_csv(&rows, &mut buf).unwrap();
        assert_eq!(String::from_utf8(buf).unwrap(), "# schema: tgalab/1\nm,indices,residual\n1,1,1\n2,1;2,0\n");
    }
}
