//! Norm evaluators for the space zoo.
//!
//! Every space has the unit vectors as a normalized basis (`c1 = c2 = 1`).
//! Norms are evaluated exactly on finitely supported vectors: the suprema over
//! `N` in the summing-type norms are attained inside the support, so they are
//! computed by scanning it.

pub mod haar;
pub mod schreier;
pub mod weights;

use std::sync::Arc;

use serde::{Deserialize, Serialize};
use serde_json::{json, Map, Value};

use crate::error::{Error, Result};
use crate::funcf::FuncF;
use crate::numeric::{abs_pow, KahanSum};
use crate::vector::SparseVector;

pub use haar::HaarSystem;
pub use weights::WeightSequence;

#[derive(Clone, Debug, PartialEq)]
pub enum SpaceKind {
    Lp { p: f64 },
    C0,
    /// Odd indices carry `ℓp`, even indices carry `ℓq`; the two parts are
    /// combined as an `ℓp`-sum.
    DirectSumInterleaved { p: f64, q: f64 },
    SchreierF { f: FuncF },
    /// `max{‖x‖₂, sup_N |Σ_{n≤N} x_n/√n|}`
    Kt,
    /// `max{sup_N |Σ_{n≥N} w_n x_n|, ‖x‖₂}`
    WeightedSumming { weights: Arc<WeightSequence> },
    HaarLp { system: Arc<HaarSystem> },
    /// `max{‖x‖_KT, ‖v‖_∞}` with index `2k−1` the `k`-th KT coordinate and
    /// index `2k` the `k`-th `c0` coordinate.
    KtC0Sum,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(try_from = "RawSpace", into = "RawSpace")]
pub struct Space {
    kind: SpaceKind,
    c1: f64,
    c2: f64,
}

impl Space {
    fn with_kind(kind: SpaceKind) -> Self {
        Space { kind, c1: 1.0, c2: 1.0 }
    }

    pub fn lp(p: f64) -> Result<Self> {
        if !(p >= 1.0) || !p.is_finite() {
            return Err(Error::Config(format!("ℓp needs 1 ≤ p < ∞, got {p}")));
        }
        Ok(Self::with_kind(SpaceKind::Lp { p }))
    }

    pub fn c0() -> Self {
        Self::with_kind(SpaceKind::C0)
    }

    pub fn direct_sum(p: f64, q: f64) -> Result<Self> {
        if !(p >= 1.0 && p < q) || !q.is_finite() {
            return Err(Error::Config(format!("direct sum needs 1 ≤ p < q < ∞, got p={p}, q={q}")));
        }
        Ok(Self::with_kind(SpaceKind::DirectSumInterleaved { p, q }))
    }

    pub fn schreier(f: FuncF) -> Self {
        Self::with_kind(SpaceKind::SchreierF { f })
    }

    pub fn kt() -> Self {
        Self::with_kind(SpaceKind::Kt)
    }

    pub fn weighted(j_max: usize) -> Result<Self> {
        Ok(Self::with_kind(SpaceKind::WeightedSumming { weights: Arc::new(WeightSequence::new(j_max)?) }))
    }

    pub fn haar(p: f64, d: u32, resolution: u32) -> Result<Self> {
        Ok(Self::with_kind(SpaceKind::HaarLp { system: Arc::new(HaarSystem::new(p, d, resolution)?) }))
    }

    pub fn kt_c0_sum() -> Self {
        Self::with_kind(SpaceKind::KtC0Sum)
    }

    pub fn kind(&self) -> &SpaceKind {
        &self.kind
    }

    /// Lower basis bound `inf ‖e_n‖`.
    pub fn c1(&self) -> f64 {
        self.c1
    }

    /// Upper basis bound `sup ‖e_n‖`.
    pub fn c2(&self) -> f64 {
        self.c2
    }

    /// Largest admissible index, if the space is finite-dimensional.
    pub fn capacity(&self) -> Option<usize> {
        match &self.kind {
            SpaceKind::WeightedSumming { weights } => Some(weights.len()),
            SpaceKind::HaarLp { system } => Some(system.len()),
            _ => None,
        }
    }

    /// Whether the unit vector basis is 1-unconditional (so `C_ℓ = 1`).
    pub fn is_one_unconditional(&self) -> bool {
        match &self.kind {
            SpaceKind::Lp { .. } | SpaceKind::C0 | SpaceKind::DirectSumInterleaved { .. } | SpaceKind::SchreierF { .. } => true,
            SpaceKind::HaarLp { system } => system.p() == 2.0,
            SpaceKind::Kt | SpaceKind::WeightedSumming { .. } | SpaceKind::KtC0Sum => false,
        }
    }

    /// Short human-readable name.
    pub fn describe(&self) -> String {
        match &self.kind {
            SpaceKind::Lp { p } => format!("lp(p={p})"),
            SpaceKind::C0 => "c0".into(),
            SpaceKind::DirectSumInterleaved { p, q } => format!("direct_sum_interleaved(p={p},q={q})"),
            SpaceKind::SchreierF { f } => format!("schreier({})", f.label()),
            SpaceKind::Kt => "kt".into(),
            SpaceKind::WeightedSumming { weights } => format!("weighted_summing(j_max={})", weights.j_max()),
            SpaceKind::HaarLp { system } => {
                format!("haar(p={},d={},J={})", system.p(), system.d(), system.resolution())
            }
            SpaceKind::KtC0Sum => "kt_c0_sum".into(),
        }
    }

    pub fn norm(&self, x: &SparseVector) -> Result<f64> {
        self.norm_entries(&x.pairs())
    }

    /// Norm of `Σ v e_n` over `entries`, which must be sorted by index.
    /// Zero coefficients are allowed.
    pub fn norm_entries(&self, entries: &[(usize, f64)]) -> Result<f64> {
        debug_assert!(entries.windows(2).all(|w| w[0].0 < w[1].0), "entries must be sorted");
        if let Some(&(0, _)) = entries.first() {
            return Err(Error::Domain("vector indices start at 1".into()));
        }
        Ok(match &self.kind {
            SpaceKind::Lp { p } => lp_norm(entries.iter().map(|e| e.1), *p),
            SpaceKind::C0 => sup(entries.iter().map(|e| e.1)),
            SpaceKind::DirectSumInterleaved { p, q } => {
                let u = lp_norm(entries.iter().filter(|e| e.0 % 2 == 1).map(|e| e.1), *p);
                let v = lp_norm(entries.iter().filter(|e| e.0 % 2 == 0).map(|e| e.1), *q);
                if *p == 1.0 {
                    u + v
                } else {
                    (abs_pow(u, *p) + abs_pow(v, *p)).powf(1.0 / p)
                }
            }
            SpaceKind::SchreierF { f } => schreier::norm(f, entries),
            SpaceKind::Kt => kt_norm(entries.iter().copied()),
            SpaceKind::WeightedSumming { weights } => {
                let mut tail = KahanSum::new();
                let mut best: f64 = 0.0;
                for &(n, v) in entries.iter().rev() {
                    tail.add(weights.weight(n)? * v);
                    best = best.max(tail.value().abs());
                }
                best.max(lp_norm(entries.iter().map(|e| e.1), 2.0))
            }
            SpaceKind::HaarLp { system } => system.norm(entries)?,
            SpaceKind::KtC0Sum => {
                let kt = kt_norm(entries.iter().filter(|e| e.0 % 2 == 1).map(|&(n, v)| (n.div_ceil(2), v)));
                let c0 = sup(entries.iter().filter(|e| e.0 % 2 == 0).map(|e| e.1));
                kt.max(c0)
            }
        })
    }
}

fn sup<I: Iterator<Item = f64>>(values: I) -> f64 {
    values.fold(0.0, |m, v| m.max(v.abs()))
}

fn lp_norm<I: Iterator<Item = f64>>(values: I, p: f64) -> f64 {
    let mut acc = KahanSum::new();
    for v in values {
        acc.add(abs_pow(v, p));
    }
    let s = acc.value();
    if p == 1.0 {
        s
    } else if p == 2.0 {
        s.sqrt()
    } else {
        s.powf(1.0 / p)
    }
}

/// KT norm of entries sorted by index.
pub fn kt_norm<I: Iterator<Item = (usize, f64)>>(entries: I) -> f64 {
    let mut squares = KahanSum::new();
    let mut partial = KahanSum::new();
    let mut best: f64 = 0.0;
    for (n, v) in entries {
        squares.add(v * v);
        partial.add(v / (n as f64).sqrt());
        best = best.max(partial.value().abs());
    }
    best.max(squares.value().sqrt())
}

#[derive(Serialize, Deserialize)]
struct RawSpace {
    kind: String,
    #[serde(default)]
    params: Map<String, Value>,
}

fn num(params: &Map<String, Value>, key: &str) -> Result<f64> {
    params
        .get(key)
        .and_then(Value::as_f64)
        .ok_or_else(|| Error::Parse(format!("space parameter `{key}` missing or not a number")))
}

fn uint(params: &Map<String, Value>, key: &str) -> Result<u64> {
    params
        .get(key)
        .and_then(Value::as_u64)
        .ok_or_else(|| Error::Parse(format!("space parameter `{key}` missing or not a nonnegative integer")))
}

impl TryFrom<RawSpace> for Space {
    type Error = Error;

    fn try_from(raw: RawSpace) -> Result<Self> {
        let p = &raw.params;
        match raw.kind.as_str() {
            "lp" => Space::lp(num(p, "p")?),
            "c0" => Ok(Space::c0()),
            "direct_sum_interleaved" => Space::direct_sum(num(p, "p")?, num(p, "q")?),
            "schreier" => {
                let f = p.get("f").ok_or_else(|| Error::Parse("space parameter `f` missing".into()))?;
                let f: FuncF = serde_json::from_value(f.clone()).map_err(|e| Error::Parse(format!("`f`: {e}")))?;
                Ok(Space::schreier(f))
            }
            "kt" => Ok(Space::kt()),
            "weighted_summing" => Space::weighted(uint(p, "j_max")? as usize),
            "haar" => Space::haar(num(p, "p")?, uint(p, "d")? as u32, uint(p, "resolution")? as u32),
            "kt_c0_sum" => Ok(Space::kt_c0_sum()),
            other => Err(Error::Parse(format!("unknown space kind `{other}`"))),
        }
    }
}

impl From<Space> for RawSpace {
    fn from(s: Space) -> Self {
        let (kind, params) = match s.kind {
            SpaceKind::Lp { p } => ("lp", json!({ "p": p })),
            SpaceKind::C0 => ("c0", json!({})),
            SpaceKind::DirectSumInterleaved { p, q } => ("direct_sum_interleaved", json!({ "p": p, "q": q })),
            SpaceKind::SchreierF { f } => ("schreier", json!({ "f": f })),
            SpaceKind::Kt => ("kt", json!({})),
            SpaceKind::WeightedSumming { weights } => ("weighted_summing", json!({ "j_max": weights.j_max() })),
            SpaceKind::HaarLp { system } => {
                ("haar", json!({ "p": system.p(), "d": system.d(), "resolution": system.resolution() }))
            }
            SpaceKind::KtC0Sum => ("kt_c0_sum", json!({})),
        };
        let params = match params {
            Value::Object(m) => m,
            _ => unreachable!(),
        };
        RawSpace { kind: kind.to_string(), params }
    }
}
