use std::collections::{BTreeMap, BTreeSet};
use std::ops::{Add, Mul, Neg, Sub};

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// A finitely supported real sequence indexed by positive integers.
///
/// Zero coefficients are never stored, so the key set is exactly `supp(x)`.
#[derive(Clone, Debug, Default, PartialEq, Serialize, Deserialize)]
#[serde(try_from = "RawVectorIn", into = "RawVector")]
pub struct SparseVector {
    entries: BTreeMap<usize, f64>,
}

#[derive(Serialize)]
struct RawVector {
    coeffs: BTreeMap<usize, f64>,
}

/// JSON object keys are strings; they are parsed here so that reading from
/// text and from an in-memory `Value` behave the same.
#[derive(Deserialize)]
struct RawVectorIn {
    coeffs: BTreeMap<String, f64>,
}

impl TryFrom<RawVectorIn> for SparseVector {
    type Error = Error;

    fn try_from(raw: RawVectorIn) -> Result<Self> {
        let mut pairs = Vec::with_capacity(raw.coeffs.len());
        for (k, v) in raw.coeffs {
            let n = k.trim().parse::<usize>().map_err(|_| Error::Parse(format!("`{k}` is not a positive index")))?;
            pairs.push((n, v));
        }
        SparseVector::from_pairs(pairs)
    }
}

impl From<SparseVector> for RawVector {
    fn from(v: SparseVector) -> Self {
        RawVector { coeffs: v.entries }
    }
}

impl SparseVector {
    pub fn zero() -> Self {
        Self::default()
    }

    /// `e_n`
    pub fn unit(n: usize) -> Self {
        assert!(n >= 1, "indices start at 1");
        let mut entries = BTreeMap::new();
        entries.insert(n, 1.0);
        SparseVector { entries }
    }

    pub fn from_pairs<I: IntoIterator<Item = (usize, f64)>>(pairs: I) -> Result<Self> {
        let mut entries = BTreeMap::new();
        for (n, v) in pairs {
            if n == 0 {
                return Err(Error::Domain("vector indices start at 1".into()));
            }
            if !v.is_finite() {
                return Err(Error::Domain(format!("non-finite coefficient at index {n}")));
            }
            if v != 0.0 {
                entries.insert(n, v);
            } else {
                entries.remove(&n);
            }
        }
        Ok(SparseVector { entries })
    }

    /// `(v[0], v[1], …)` placed at indices `1, 2, …`.
    pub fn from_dense(values: &[f64]) -> Self {
        Self::from_pairs(values.iter().enumerate().map(|(i, &v)| (i + 1, v)))
            .expect("dense input must be finite")
    }

    pub fn get(&self, n: usize) -> f64 {
        self.entries.get(&n).copied().unwrap_or(0.0)
    }

    pub fn set(&mut self, n: usize, v: f64) {
        assert!(n >= 1 && v.is_finite());
        if v == 0.0 {
            self.entries.remove(&n);
        } else {
            self.entries.insert(n, v);
        }
    }

    pub fn nnz(&self) -> usize {
        self.entries.len()
    }

    pub fn is_zero(&self) -> bool {
        self.entries.is_empty()
    }

    pub fn support(&self) -> impl Iterator<Item = usize> + '_ {
        self.entries.keys().copied()
    }

    pub fn support_set(&self) -> BTreeSet<usize> {
        self.entries.keys().copied().collect()
    }

    pub fn iter(&self) -> impl Iterator<Item = (usize, f64)> + '_ {
        self.entries.iter().map(|(&n, &v)| (n, v))
    }

    /// Entries sorted by index, the layout expected by [`crate::Space::norm_entries`].
    pub fn pairs(&self) -> Vec<(usize, f64)> {
        self.iter().collect()
    }

    pub fn max_index(&self) -> Option<usize> {
        self.entries.keys().next_back().copied()
    }

    /// `‖x‖_∞ = max |e_n^*(x)|`
    pub fn sup_norm(&self) -> f64 {
        self.entries.values().fold(0.0, |m, v| m.max(v.abs()))
    }

    pub fn scale(&self, alpha: f64) -> Self {
        if alpha == 0.0 {
            return Self::zero();
        }
        SparseVector { entries: self.entries.iter().map(|(&n, &v)| (n, alpha * v)).collect() }
    }

    /// `P_A(x)`
    pub fn project(&self, set: &BTreeSet<usize>) -> Self {
        SparseVector {
            entries: self.entries.iter().filter(|(n, _)| set.contains(n)).map(|(&n, &v)| (n, v)).collect(),
        }
    }

    /// `x − P_A(x)`
    pub fn project_complement(&self, set: &BTreeSet<usize>) -> Self {
        SparseVector {
            entries: self.entries.iter().filter(|(n, _)| !set.contains(n)).map(|(&n, &v)| (n, v)).collect(),
        }
    }

    fn combine(&self, other: &Self, sign: f64) -> Self {
        let mut out = self.entries.clone();
        for (&n, &v) in &other.entries {
            let e = out.entry(n).or_insert(0.0);
            *e += sign * v;
            if *e == 0.0 {
                out.remove(&n);
            }
        }
        SparseVector { entries: out }
    }
}

impl Add for &SparseVector {
    type Output = SparseVector;
    fn add(self, rhs: &SparseVector) -> SparseVector {
        self.combine(rhs, 1.0)
    }
}

impl Sub for &SparseVector {
    type Output = SparseVector;
    fn sub(self, rhs: &SparseVector) -> SparseVector {
        self.combine(rhs, -1.0)
    }
}

impl Neg for &SparseVector {
    type Output = SparseVector;
    fn neg(self) -> SparseVector {
        self.scale(-1.0)
    }
}

impl Mul<&SparseVector> for f64 {
    type Output = SparseVector;
    fn mul(self, rhs: &SparseVector) -> SparseVector {
        rhs.scale(self)
    }
}

/// `1_{εA} = Σ_{n∈A} ε_n e_n`; indices missing from `signs` get `+1`.
pub fn indicator(set: &BTreeSet<usize>, signs: &BTreeMap<usize, f64>) -> SparseVector {
    let mut entries = BTreeMap::new();
    for &n in set {
        assert!(n >= 1, "indices start at 1");
        let s = signs.get(&n).copied().unwrap_or(1.0);
        assert!(s == 1.0 || s == -1.0, "signs must be ±1");
        entries.insert(n, s);
    }
    SparseVector { entries }
}

/// `1_A` with all signs `+1`.
pub fn ones(set: &BTreeSet<usize>) -> SparseVector {
    indicator(set, &BTreeMap::new())
}

/// `1_A` for sets given as a slice, with signs given positionally.
pub fn signed_ones(indices: &[usize], signs: &[f64]) -> SparseVector {
    debug_assert_eq!(indices.len(), signs.len());
    SparseVector::from_pairs(indices.iter().copied().zip(signs.iter().copied())).expect("valid indicator")
}

#[cfg(test)]
mod tests {
    use super::*;

    fn set(v: &[usize]) -> BTreeSet<usize> {
        v.iter().copied().collect()
    }

    #[test]
    fn indicator_examples() {
        let v = ones(&set(&[1, 3]));
        assert_eq!(v, SparseVector::from_pairs([(1, 1.0), (3, 1.0)]).unwrap());
        assert!(ones(&BTreeSet::new()).is_zero());
        let mut signs = BTreeMap::new();
        signs.insert(2, -1.0);
        assert_eq!(indicator(&set(&[2]), &signs), SparseVector::from_pairs([(2, -1.0)]).unwrap());
    }

    #[test]
    fn no_stored_zeros() {
        let v = SparseVector::from_dense(&[1.0, 0.0, 3.0]);
        assert_eq!(v.nnz(), 2);
        let w = &v - &v;
        assert!(w.is_zero());
        assert!(SparseVector::from_pairs([(0, 1.0)]).is_err());
        assert!(SparseVector::from_pairs([(1, f64::NAN)]).is_err());
    }

    #[test]
    fn projection() {
        let x = SparseVector::from_dense(&[1.0, 2.0, 3.0]);
        assert_eq!(x.project(&set(&[2])), SparseVector::from_pairs([(2, 2.0)]).unwrap());
        assert!(x.project(&BTreeSet::new()).is_zero());
        assert_eq!(x.project(&x.support_set()), x);
        assert_eq!(&x.project(&set(&[1])) + &x.project_complement(&set(&[1])), x);
    }

    #[test]
    fn json_shape() {
        let x = SparseVector::from_pairs([(1, 0.5), (10, -2.0), (2, 1.0)]).unwrap();
        let s = serde_json::to_string(&x).unwrap();
        assert_eq!(s, r#"{"coeffs":{"1":0.5,"2":1.0,"10":-2.0}}"#);
        let back: SparseVector = serde_json::from_str(&s).unwrap();
        assert_eq!(back, x);
        assert!(serde_json::from_str::<SparseVector>(r#"{"coeffs":{"0":1.0}}"#).is_err());
        assert!(serde_json::from_str::<SparseVector>(r#"{"coeffs":{"x":1.0}}"#).is_err());
        let via_value: SparseVector = serde_json::from_value(serde_json::to_value(&x).unwrap()).unwrap();
        assert_eq!(via_value, x);
    }
}
