//! The function class `𝓕`: continuous, increasing, concave `f` on `[0, ∞)`
//! with `f(0) = 0`, `f(1) ≤ 1` and `f(x) > 0` for `x > 0`.
//!
//! Members are drawn from a closed set of closed-form kinds so that
//! membership can be checked on a grid to a fixed tolerance. Non-members
//! (for example `x²`) can still be built with [`FuncF::unchecked`]; they are
//! useful for exercising failure paths.

use serde::{Deserialize, Serialize};
use serde_json::{json, Map, Value};

use crate::error::{Error, Result};
use crate::report::{CheckReport, CheckStatus};

const TOL: f64 = 1e-12;

#[derive(Clone, Debug, PartialEq)]
pub enum FuncKind {
    Identity,
    /// `c · x^γ`
    Power { c: f64, gamma: f64 },
    /// `x / λ`
    Scaled { lambda: f64 },
    /// `c · x / (c + x)`, bounded above by `c`.
    Bounded { c: f64 },
    /// `outer(inner(x))`
    Composition { outer: Box<FuncF>, inner: Box<FuncF> },
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(try_from = "RawFunc", into = "RawFunc")]
pub struct FuncF {
    kind: FuncKind,
    label: String,
}

/// Outcome of [`FuncF::classify_dichotomy`].
#[derive(Clone, Debug, PartialEq)]
pub enum Dichotomy {
    Identity,
    /// `f(x) ≤ x / lambda` was verified on every integer of `[x0, horizon]`.
    Sublinear { lambda: f64, x0: u64 },
    Inconclusive { reason: String },
}

impl FuncF {
    pub fn identity() -> Self {
        FuncF { kind: FuncKind::Identity, label: "x".into() }
    }

    pub fn power(c: f64, gamma: f64) -> Result<Self> {
        if !(c > 0.0 && c <= 1.0) || !(gamma > 0.0 && gamma <= 1.0) {
            return Err(Error::Domain(format!("power needs c, gamma in (0, 1], got c={c}, gamma={gamma}")));
        }
        let label = if c == 1.0 { format!("x^{gamma}") } else { format!("{c}*x^{gamma}") };
        Ok(FuncF { kind: FuncKind::Power { c, gamma }, label })
    }

    pub fn sqrt() -> Self {
        FuncF { kind: FuncKind::Power { c: 1.0, gamma: 0.5 }, label: "sqrt(x)".into() }
    }

    pub fn scaled(lambda: f64) -> Result<Self> {
        if !(lambda > 1.0) || !lambda.is_finite() {
            return Err(Error::Domain(format!("scaled needs lambda > 1, got {lambda}")));
        }
        Ok(FuncF { kind: FuncKind::Scaled { lambda }, label: format!("x/{lambda}") })
    }

    pub fn bounded(c: f64) -> Result<Self> {
        if !(c > 0.0) || !c.is_finite() {
            return Err(Error::Domain(format!("bounded needs c > 0, got {c}")));
        }
        Ok(FuncF { kind: FuncKind::Bounded { c }, label: format!("{c}x/({c}+x)") })
    }

    /// `f ∘ g`, i.e. `x ↦ f(g(x))`.
    pub fn compose(f: &FuncF, g: &FuncF) -> Self {
        FuncF {
            label: format!("({})∘({})", f.label, g.label),
            kind: FuncKind::Composition { outer: Box::new(f.clone()), inner: Box::new(g.clone()) },
        }
    }

    /// Builds a function without range validation. The result need not be in `𝓕`.
    pub fn unchecked(kind: FuncKind, label: impl Into<String>) -> Self {
        FuncF { kind, label: label.into() }
    }

    pub fn with_label(mut self, label: impl Into<String>) -> Self {
        self.label = label.into();
        self
    }

    pub fn kind(&self) -> &FuncKind {
        &self.kind
    }

    pub fn label(&self) -> &str {
        &self.label
    }

    pub fn is_identity(&self) -> bool {
        match &self.kind {
            FuncKind::Identity => true,
            FuncKind::Power { c, gamma } => *c == 1.0 && *gamma == 1.0,
            FuncKind::Composition { outer, inner } => outer.is_identity() && inner.is_identity(),
            _ => false,
        }
    }

    pub fn eval(&self, x: f64) -> Result<f64> {
        if !(x >= 0.0) {
            return Err(Error::Domain(format!("{} evaluated at {x}", self.label)));
        }
        Ok(self.value(x))
    }

    /// Evaluation at a set size; infallible since sizes are nonnegative.
    pub fn at(&self, n: usize) -> f64 {
        self.value(n as f64)
    }

    fn value(&self, x: f64) -> f64 {
        match &self.kind {
            FuncKind::Identity => x,
            FuncKind::Power { c, gamma } => {
                if x == 0.0 {
                    0.0
                } else if *gamma == 0.5 {
                    c * x.sqrt()
                } else {
                    c * x.powf(*gamma)
                }
            }
            FuncKind::Scaled { lambda } => x / lambda,
            FuncKind::Bounded { c } => c * x / (c + x),
            FuncKind::Composition { outer, inner } => outer.value(inner.value(x)),
        }
    }

    /// Evaluates the defining conditions of `𝓕` on a sorted grid.
    ///
    /// Checked: `f(0) = 0`, `f(1) ≤ 1`, positivity, monotonicity, midpoint
    /// concavity (tolerance `1e-12`) and that `f(x)/x` is nonincreasing.
    pub fn verify_membership(&self, grid: &[f64]) -> CheckReport {
        let mut report = CheckReport::new(
            format!("membership[{}]", self.label),
            "f(0)=0, f(1)<=1, f>0 on (0,inf), nondecreasing, midpoint concave, f(x)/x nonincreasing",
        );
        let mut counts = [0usize; 6];
        const NAMES: [&str; 6] = ["zero", "unit", "positive", "monotone", "concavity", "ratio"];
        let mut flag = |report: &mut CheckReport, which: usize, detail: Value| {
            counts[which] += 1;
            report.fail(json!({ "condition": NAMES[which], "at": detail }));
        };

        let sorted = grid.windows(2).all(|w| w[0] <= w[1]);
        if !sorted || grid.iter().any(|x| !(*x >= 0.0)) {
            report.fail(json!({ "condition": "grid", "at": "grid must be sorted and nonnegative" }));
        }

        if self.value(0.0).abs() > 1e-15 {
            flag(&mut report, 0, json!([0.0]));
        }
        if self.value(1.0) > 1.0 + TOL {
            flag(&mut report, 1, json!([1.0]));
        }
        let vals: Vec<f64> = grid.iter().map(|&x| self.value(x.max(0.0))).collect();
        for (&x, &v) in grid.iter().zip(&vals) {
            if x > 0.0 && !(v > 0.0) {
                flag(&mut report, 2, json!([x]));
            }
        }
        for i in 1..grid.len() {
            if vals[i] < vals[i - 1] - TOL {
                flag(&mut report, 3, json!([grid[i - 1], grid[i]]));
            }
            let (a, b) = (grid[i - 1], grid[i]);
            if a > 0.0 && vals[i - 1] / a < vals[i] / b - TOL {
                flag(&mut report, 5, json!([a, b]));
            }
        }
        // All pairs for moderate grids, a band of neighbours otherwise.
        let band = if grid.len() <= 1000 { grid.len() } else { 64 };
        for i in 0..grid.len() {
            for j in (i + 1)..grid.len().min(i + 1 + band) {
                let (a, b) = (grid[i], grid[j]);
                let mid = self.value(0.5 * (a + b));
                if mid < 0.5 * (vals[i] + vals[j]) - TOL {
                    flag(&mut report, 4, json!([a, 0.5 * (a + b), b]));
                }
            }
        }
        for (name, c) in NAMES.iter().zip(counts) {
            report.measure(format!("violations_{name}"), c as f64);
        }
        report.measure("grid_points", grid.len() as f64);
        report
    }

    /// Certificate search for the identity / sublinear dichotomy on the
    /// integer grid `0..=horizon`.
    pub fn classify_dichotomy(&self, horizon: u64) -> Dichotomy {
        if horizon < 2 {
            return Dichotomy::Inconclusive { reason: "horizon must be at least 2".into() };
        }
        let f = |m: u64| self.value(m as f64);
        if (1..=horizon).all(|m| (f(m) - m as f64).abs() <= TOL * (m as f64).max(1.0)) {
            return Dichotomy::Identity;
        }

        let certify = |lambda: f64| -> Option<u64> {
            let mut x0 = 0;
            for m in (0..=horizon).rev() {
                let bound = m as f64 / lambda;
                if f(m) > bound + TOL * bound.max(1.0) {
                    x0 = m + 1;
                    break;
                }
            }
            (x0 <= horizon).then_some(x0)
        };

        // Linear below the identity: one λ works on the whole grid.
        let r_max = (1..=horizon).map(|m| f(m) / m as f64).fold(f64::MIN, f64::max);
        if r_max < 1.0 - TOL {
            let lambda = 1.0 / r_max;
            if let Some(x0) = certify(lambda) {
                return Dichotomy::Sublinear { lambda, x0 };
            }
        }

        let s = f(horizon) / horizon as f64;
        if s >= 1.0 - TOL {
            return Dichotomy::Inconclusive {
                reason: format!("f(x)/x has not dropped below 1 by x = {horizon}"),
            };
        }
        let lambda = if s <= 0.5 { 2.0 } else { 2.0 / (1.0 + s) };
        match certify(lambda) {
            Some(x0) => Dichotomy::Sublinear { lambda, x0 },
            None => Dichotomy::Inconclusive { reason: format!("no certificate for lambda = {lambda}") },
        }
    }

    /// `n ≤ f(m) ⇒ n − k ≤ f(m − k)`.
    pub fn check_shift_property(&self, m: u64, n: u64, k: u64) -> Result<bool> {
        if k > n {
            return Err(Error::Precondition(format!("shift k={k} exceeds n={n}")));
        }
        if (n as f64) > self.value(m as f64) {
            return Ok(true);
        }
        if k > m {
            return Ok(false);
        }
        Ok(((n - k) as f64) <= self.value((m - k) as f64))
    }
}

/// Evenly spaced grid `start, start+step, …, ≤ end`.
pub fn grid(start: f64, end: f64, step: f64) -> Vec<f64> {
    let n = ((end - start) / step + 1e-9).floor() as usize;
    (0..=n).map(|i| start + i as f64 * step).collect()
}

/// A grid that always contains 0 and 1, suitable for membership checks.
pub fn standard_grid(end: f64) -> Vec<f64> {
    let mut g = grid(0.0, 1.0, 0.0625);
    g.extend(grid(1.25, end, 0.25));
    g
}

/// True when the membership report found no violations.
pub fn is_member(f: &FuncF, grid: &[f64]) -> bool {
    f.verify_membership(grid).status == CheckStatus::Pass
}

#[derive(Serialize, Deserialize)]
struct RawFunc {
    kind: String,
    #[serde(default, skip_serializing_if = "Map::is_empty")]
    params: Map<String, Value>,
    #[serde(default)]
    label: Option<String>,
}

fn param(params: &Map<String, Value>, key: &str) -> Result<f64> {
    params
        .get(key)
        .and_then(Value::as_f64)
        .ok_or_else(|| Error::Parse(format!("missing numeric parameter `{key}`")))
}

fn nested(params: &Map<String, Value>, key: &str) -> Result<FuncF> {
    let v = params.get(key).ok_or_else(|| Error::Parse(format!("missing parameter `{key}`")))?;
    serde_json::from_value(v.clone()).map_err(|e| Error::Parse(format!("`{key}`: {e}")))
}

impl TryFrom<RawFunc> for FuncF {
    type Error = Error;

    fn try_from(raw: RawFunc) -> Result<Self> {
        let p = &raw.params;
        let f = match raw.kind.as_str() {
            "identity" => FuncF::identity(),
            "power" => FuncF::power(param(p, "c").unwrap_or(1.0), param(p, "gamma")?)?,
            "scaled" => FuncF::scaled(param(p, "lambda")?)?,
            "bounded" => FuncF::bounded(param(p, "c")?)?,
            "composition" => FuncF::compose(&nested(p, "outer")?, &nested(p, "inner")?),
            other => return Err(Error::Parse(format!("unknown function kind `{other}`"))),
        };
        Ok(match raw.label {
            Some(label) => f.with_label(label),
            None => f,
        })
    }
}

impl From<FuncF> for RawFunc {
    fn from(f: FuncF) -> Self {
        let mut params = Map::new();
        let kind = match f.kind {
            FuncKind::Identity => "identity",
            FuncKind::Power { c, gamma } => {
                params.insert("c".into(), json!(c));
                params.insert("gamma".into(), json!(gamma));
                "power"
            }
            FuncKind::Scaled { lambda } => {
                params.insert("lambda".into(), json!(lambda));
                "scaled"
            }
            FuncKind::Bounded { c } => {
                params.insert("c".into(), json!(c));
                "bounded"
            }
            FuncKind::Composition { outer, inner } => {
                params.insert("outer".into(), serde_json::to_value(*outer).expect("serializable"));
                params.insert("inner".into(), serde_json::to_value(*inner).expect("serializable"));
                "composition"
            }
        };
        RawFunc { kind: kind.to_string(), params, label: Some(f.label) }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn square() -> FuncF {
        FuncF::unchecked(FuncKind::Power { c: 1.0, gamma: 2.0 }, "x^2")
    }

    #[test]
    fn eval_examples() {
        assert_eq!(FuncF::power(1.0, 0.5).unwrap().eval(4.0).unwrap(), 2.0);
        assert_eq!(FuncF::identity().eval(7.0).unwrap(), 7.0);
        let quarter = FuncF::compose(&FuncF::sqrt(), &FuncF::sqrt());
        assert_eq!(quarter.eval(16.0).unwrap(), 2.0);
        assert!(matches!(FuncF::sqrt().eval(-1.0), Err(Error::Domain(_))));
    }

    #[test]
    fn constructor_ranges() {
        assert!(FuncF::power(1.5, 0.5).is_err());
        assert!(FuncF::power(1.0, 0.0).is_err());
        assert!(FuncF::scaled(1.0).is_err());
        assert!(FuncF::bounded(0.0).is_err());
    }

    #[test]
    fn membership_examples() {
        let g = grid(0.0, 100.0, 0.5);
        assert_eq!(FuncF::sqrt().verify_membership(&g).status, CheckStatus::Pass);

        let sq = square().verify_membership(&grid(0.0, 10.0, 0.5));
        assert_eq!(sq.status, CheckStatus::Fail);
        assert!(sq.measured["violations_concavity"] > 0.0);

        // 2x/(2+x): f(0)=0, f(1)=2/3, f' = 4/(2+x)^2 > 0, f'' = -8/(2+x)^3 < 0,
        // f(x)/x = 2/(2+x) decreasing.
        let b = FuncF::bounded(2.0).unwrap();
        assert_eq!(b.verify_membership(&grid(0.0, 100.0, 0.5)).status, CheckStatus::Pass);
    }

    #[test]
    fn dichotomy_examples() {
        assert_eq!(FuncF::identity().classify_dichotomy(1000), Dichotomy::Identity);
        match FuncF::sqrt().classify_dichotomy(1000) {
            Dichotomy::Sublinear { lambda, x0 } => {
                assert_eq!(lambda, 2.0);
                assert_eq!(x0, 4);
            }
            other => panic!("unexpected {other:?}"),
        }
        match FuncF::scaled(3.0).unwrap().classify_dichotomy(1000) {
            Dichotomy::Sublinear { lambda, x0 } => {
                assert!((lambda - 3.0).abs() < 1e-12);
                assert_eq!(x0, 0);
            }
            other => panic!("unexpected {other:?}"),
        }
    }

    #[test]
    fn dichotomy_never_identity_below_two() {
        for f in [FuncF::bounded(2.0).unwrap(), FuncF::power(1.0, 0.9).unwrap(), FuncF::power(0.5, 1.0).unwrap()] {
            assert!(f.at(2) < 2.0);
            assert_ne!(f.classify_dichotomy(500), Dichotomy::Identity);
        }
    }

    #[test]
    fn shift_examples() {
        let s = FuncF::sqrt();
        assert!(s.check_shift_property(36, 6, 2).unwrap());
        assert!(FuncF::identity().check_shift_property(10, 10, 3).unwrap());
        assert!(s.check_shift_property(36, 7, 0).unwrap());
        assert!(matches!(s.check_shift_property(36, 2, 3), Err(Error::Precondition(_))));
    }

    #[test]
    fn compose_examples() {
        let g = standard_grid(100.0);
        let q = FuncF::compose(&FuncF::sqrt(), &FuncF::sqrt());
        assert!(is_member(&q, &g));
        let b = FuncF::bounded(2.0).unwrap();
        let id_b = FuncF::compose(&FuncF::identity(), &b);
        for &x in &g {
            assert_eq!(id_b.eval(x).unwrap(), b.eval(x).unwrap());
        }
        let sb = FuncF::compose(&FuncF::sqrt(), &b);
        assert!(is_member(&sb, &g));
        let sup = g.iter().map(|&x| sb.eval(x).unwrap()).fold(0.0, f64::max);
        assert!(sup <= 2f64.sqrt());
    }

    #[test]
    fn json_round_trip() {
        let f = FuncF::compose(&FuncF::power(1.0, 0.9).unwrap(), &FuncF::sqrt());
        let s = serde_json::to_string(&f).unwrap();
        let back: FuncF = serde_json::from_str(&s).unwrap();
        assert_eq!(back, f);
        let parsed: FuncF = serde_json::from_str(r#"{"kind":"power","params":{"gamma":0.5}}"#).unwrap();
        assert_eq!(parsed.eval(9.0).unwrap(), 3.0);
        assert!(serde_json::from_str::<FuncF>(r#"{"kind":"power","params":{"gamma":2}}"#).is_err());
        assert!(serde_json::from_str::<FuncF>(r#"{"kind":"cubic"}"#).is_err());
    }
}
