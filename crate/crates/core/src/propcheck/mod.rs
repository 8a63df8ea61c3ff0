//! The check catalog: each entry turns one statement about greedy-type
//! bases into a numerical experiment and a [`CheckReport`].
//!
//! Checks come in three tiers. Exact checks fail on any counterexample.
//! Banded checks compare measured quantities with explicit curves or
//! proof constants. Report-only checks measure constants that are defined
//! by a supremum and so can only be bounded from below; they fail only
//! when an identity that holds configuration by configuration breaks.

mod democracy;
mod examples;
mod fgreedy;
mod funcs;
mod quasi;
mod schreier;
mod util;

use std::cell::RefCell;
use std::collections::BTreeSet;
use std::fmt::Write as _;

use rayon::prelude::*;
use serde::{Deserialize, Serialize};
use serde_json::{json, Map, Value};

use crate::error::{Error, Result};
use crate::funcf::FuncF;
use crate::numeric::format_significant;
use crate::report::{CheckReport, CheckStatus};

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Tier {
    Fast,
    Full,
}

impl std::str::FromStr for Tier {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "fast" => Ok(Tier::Fast),
            "full" => Ok(Tier::Full),
            other => Err(Error::Parse(format!("unknown tier `{other}` (expected fast or full)"))),
        }
    }
}

/// Check parameters: a JSON object whose keys override the tier defaults.
pub struct Params {
    map: Map<String, Value>,
    tier: Tier,
    used: RefCell<BTreeSet<String>>,
}

impl Params {
    pub fn new(tier: Tier) -> Self {
        Params { map: Map::new(), tier, used: RefCell::new(BTreeSet::new()) }
    }

    /// Reads `{"tier": "fast"|"full", ...overrides}`; `null` means all defaults.
    pub fn from_value(value: &Value) -> Result<Self> {
        let mut map = match value {
            Value::Null => Map::new(),
            Value::Object(m) => m.clone(),
            other => return Err(Error::Config(format!("check parameters must be a JSON object, got {other}"))),
        };
        let tier = match map.remove("tier") {
            None => Tier::Fast,
            Some(Value::String(s)) => s.parse()?,
            Some(other) => return Err(Error::Config(format!("`tier` must be a string, got {other}"))),
        };
        Ok(Params { map, tier, used: RefCell::new(BTreeSet::new()) })
    }

    pub fn tier(&self) -> Tier {
        self.tier
    }

    fn pick<T>(&self, fast: T, full: T) -> T {
        match self.tier {
            Tier::Fast => fast,
            Tier::Full => full,
        }
    }

    fn raw(&self, key: &str) -> Option<&Value> {
        self.used.borrow_mut().insert(key.to_string());
        self.map.get(key)
    }

    pub fn usize(&self, key: &str, fast: usize, full: usize) -> Result<usize> {
        match self.raw(key) {
            None => Ok(self.pick(fast, full)),
            Some(v) => v
                .as_u64()
                .map(|n| n as usize)
                .ok_or_else(|| Error::Config(format!("parameter `{key}` must be a nonnegative integer, got {v}"))),
        }
    }

    pub fn bool(&self, key: &str, fast: bool, full: bool) -> Result<bool> {
        match self.raw(key) {
            None => Ok(self.pick(fast, full)),
            Some(v) => v.as_bool().ok_or_else(|| Error::Config(format!("parameter `{key}` must be a boolean, got {v}"))),
        }
    }

    pub fn usizes(&self, key: &str, fast: &[usize], full: &[usize]) -> Result<Vec<usize>> {
        match self.raw(key) {
            None => Ok(self.pick(fast, full).to_vec()),
            Some(v) => serde_json::from_value(v.clone())
                .map_err(|e| Error::Config(format!("parameter `{key}` must be a list of integers: {e}"))),
        }
    }

    pub fn f64s(&self, key: &str, fast: &[f64], full: &[f64]) -> Result<Vec<f64>> {
        match self.raw(key) {
            None => Ok(self.pick(fast, full).to_vec()),
            Some(v) => serde_json::from_value(v.clone())
                .map_err(|e| Error::Config(format!("parameter `{key}` must be a list of numbers: {e}"))),
        }
    }

    pub fn funcs(&self, key: &str, default: Vec<FuncF>) -> Result<Vec<FuncF>> {
        match self.raw(key) {
            None => Ok(default),
            Some(v) => serde_json::from_value(v.clone())
                .map_err(|e| Error::Config(format!("parameter `{key}` must be a list of functions: {e}"))),
        }
    }

    fn unknown_keys(&self) -> Vec<String> {
        let used = self.used.borrow();
        self.map.keys().filter(|k| !used.contains(*k)).cloned().collect()
    }
}

type Runner = fn(&Params, u64) -> Result<CheckReport>;

/// One catalog entry.
pub struct CheckInfo {
    pub id: &'static str,
    pub statement: &'static str,
    /// How the outcome is decided.
    pub assertion: &'static str,
    run: Runner,
}

pub const CATALOG: &[CheckInfo] = &[
    CheckInfo {
        id: "f_class_properties",
        statement: funcs::CLASS_STATEMENT,
        assertion: "exact: grid and randomized triples",
        run: funcs::class_properties,
    },
    CheckInfo {
        id: "f_class_dichotomy",
        statement: funcs::DICHOTOMY_STATEMENT,
        assertion: "certificate search; report-only when a certificate is missing",
        run: funcs::dichotomy,
    },
    CheckInfo {
        id: "ul_property",
        statement: quasi::UL_STATEMENT,
        assertion: "exact on 1-unconditional spaces, measured on KT and weighted",
        run: quasi::ul_property,
    },
    CheckInfo {
        id: "truncation_bound",
        statement: quasi::TRUNCATION_STATEMENT,
        assertion: "exact on 1-unconditional spaces",
        run: quasi::truncation_bound,
    },
    CheckInfo {
        id: "lebesgue_bound",
        statement: quasi::LEBESGUE_STATEMENT,
        assertion: "exact over every greedy set of small vectors",
        run: quasi::lebesgue_bound,
    },
    CheckInfo {
        id: "almost_greedy_implies_f_greedy",
        statement: quasi::AG_STATEMENT,
        assertion: "report-only trend",
        run: quasi::almost_greedy_implies_f_greedy,
    },
    CheckInfo {
        id: "democracy_variants",
        statement: democracy::VARIANTS_STATEMENT,
        assertion: "proof-constant bands with 10% slack",
        run: democracy::variants,
    },
    CheckInfo {
        id: "property_a_reformulation",
        statement: democracy::REFORMULATION_STATEMENT,
        assertion: "exact per configuration",
        run: democracy::reformulation,
    },
    CheckInfo {
        id: "f_greedy_set_criteria",
        statement: fgreedy::CRITERIA_STATEMENT,
        assertion: "exact: three independent tests agree on every set",
        run: fgreedy::criteria,
    },
    CheckInfo {
        id: "greedy_sets_are_f_greedy",
        statement: fgreedy::NESTING_STATEMENT,
        assertion: "exact over every greedy set",
        run: fgreedy::nesting,
    },
    CheckInfo {
        id: "f_unconditional_characterization",
        statement: fgreedy::CHARACTERIZATION_STATEMENT,
        assertion: "report-only constant bands",
        run: fgreedy::characterization,
    },
    CheckInfo {
        id: "constant_relations",
        statement: fgreedy::RELATIONS_STATEMENT,
        assertion: "report-only bands; exact ordering of constants on shared draws",
        run: fgreedy::relations,
    },
    CheckInfo {
        id: "f_greedy_iff_f_almost_greedy",
        statement: fgreedy::EQUIVALENCE_STATEMENT,
        assertion: "report-only trend across a dimension sweep",
        run: fgreedy::equivalence,
    },
    CheckInfo {
        id: "schreier_prefix_sandwich",
        statement: schreier::SANDWICH_STATEMENT,
        assertion: "exact",
        run: schreier::sandwich,
    },
    CheckInfo {
        id: "schreier_separation",
        statement: schreier::SEPARATION_STATEMENT,
        assertion: "banded: explicit lower-bound curve and democracy band",
        run: schreier::separation,
    },
    CheckInfo {
        id: "schreier_comparison",
        statement: schreier::COMPARISON_STATEMENT,
        assertion: "exact bounds and curves",
        run: schreier::comparison,
    },
    CheckInfo {
        id: "bounded_f_almost_greedy",
        statement: schreier::BOUNDED_STATEMENT,
        assertion: "banded by a proof constant",
        run: schreier::bounded_f,
    },
    CheckInfo {
        id: "interleaved_sum_democracy",
        statement: democracy::INTERLEAVED_STATEMENT,
        assertion: "banded over enumerated pairs",
        run: democracy::interleaved,
    },
    CheckInfo {
        id: "haar_growth_bands",
        statement: examples::HAAR_STATEMENT,
        assertion: "banded log-log slopes",
        run: examples::haar_bands,
    },
    CheckInfo {
        id: "kt_conditionality",
        statement: examples::KT_CONDITIONAL_STATEMENT,
        assertion: "banded witness growth",
        run: examples::kt_conditionality,
    },
    CheckInfo {
        id: "kt_property_f",
        statement: examples::KT_PROPERTY_STATEMENT,
        assertion: "exact over sampled configurations",
        run: examples::kt_property_f,
    },
    CheckInfo {
        id: "weighted_property_f",
        statement: examples::WEIGHTED_STATEMENT,
        assertion: "exact over sampled configurations and weight conditions",
        run: examples::weighted_property_f,
    },
    CheckInfo {
        id: "z_space_not_f_unconditional",
        statement: examples::Z_STATEMENT,
        assertion: "exact structure; achieved levels reported",
        run: examples::z_space,
    },
    CheckInfo {
        id: "democracy_transfer",
        statement: democracy::TRANSFER_STATEMENT,
        assertion: "report-only band",
        run: democracy::transfer,
    },
];

pub fn catalog_ids() -> Vec<&'static str> {
    CATALOG.iter().map(|c| c.id).collect()
}

fn lookup(id: &str) -> Result<&'static CheckInfo> {
    CATALOG
        .iter()
        .find(|c| c.id == id)
        .ok_or_else(|| Error::UnknownCheck { id: id.to_string(), catalog: catalog_ids().join(", ") })
}

fn execute(info: &CheckInfo, params: &Params, seed: u64) -> Result<CheckReport> {
    let mut report = (info.run)(params, seed)?;
    let unknown = params.unknown_keys();
    if !unknown.is_empty() {
        return Err(Error::Config(format!("check `{}` does not take parameter(s) {}", info.id, unknown.join(", "))));
    }
    report.check_id = info.id.to_string();
    report.statement = info.statement.to_string();
    Ok(report)
}

/// Runs one check. `params` is `null` or an object with an optional
/// `"tier"` and per-check overrides; unknown keys are rejected.
pub fn run_check(id: &str, params: &Value, seed: u64) -> Result<CheckReport> {
    let info = lookup(id)?;
    let params = Params::from_value(params)?;
    execute(info, &params, seed)
}

/// Runs the whole catalog at the given tier. Checks run in parallel and the
/// reports come back in catalog order. A check that errors is reported as
/// failed with the error text as its witness.
pub fn run_suite(tier: Tier, seed: u64) -> Vec<CheckReport> {
    CATALOG
        .par_iter()
        .map(|info| {
            execute(info, &Params::new(tier), seed).unwrap_or_else(|e| {
                let mut r = CheckReport::new(info.id, info.statement);
                r.fail(json!({ "error": e.to_string(), "seed": seed, "tier": tier }));
                r
            })
        })
        .collect()
}

/// `1` when any check failed, `0` otherwise.
pub fn suite_exit_code(reports: &[CheckReport]) -> i32 {
    i32::from(reports.iter().any(|r| r.status == CheckStatus::Fail))
}

/// A fixed-width summary, one line per report.
pub fn render_table(reports: &[CheckReport]) -> String {
    let width = reports.iter().map(|r| r.check_id.len()).max().unwrap_or(8).max(8);
    let mut out = String::new();
    let _ = writeln!(out, "{:<width$}  {:<10}  measured", "check", "status");
    for r in reports {
        let shown: Vec<String> = r
            .measured
            .iter()
            .take(4)
            .map(|(k, v)| format!("{k}={}", format_significant(*v, 6)))
            .collect();
        let more = if r.measured.len() > 4 { format!(" (+{})", r.measured.len() - 4) } else { String::new() };
        let _ = writeln!(out, "{:<width$}  {:<10}  {}{more}", r.check_id, r.status.to_string(), shown.join(" "));
    }
    out
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn unknown_id_lists_catalog() {
        let err = run_check("nope", &Value::Null, 1).unwrap_err();
        let msg = err.to_string();
        assert!(msg.contains("schreier_prefix_sandwich"), "{msg}");
    }

    #[test]
    fn unknown_parameter_rejected() {
        let err = run_check("f_class_dichotomy", &json!({"horizon": 100, "bogus": 1}), 1).unwrap_err();
        assert!(err.to_string().contains("bogus"));
    }

    #[test]
    fn ids_unique() {
        let ids: BTreeSet<_> = catalog_ids().into_iter().collect();
        assert_eq!(ids.len(), CATALOG.len());
    }
}
