//! Approximation-error oracles, democracy profiles and empirical constants.
//!
//! Every constant estimate is a lower bound on the true (supremum-defined)
//! constant: it is the largest ratio seen over the sampled configurations.

pub mod constants;
pub mod democracy;
pub mod sampler;
pub mod sigma;

use std::fmt;

use serde::{Deserialize, Deserializer, Serialize, Serializer};

use crate::error::{Error, Result};
use crate::greedy::IndexSet;
use crate::space::Space;
use crate::vector::SparseVector;

pub use constants::estimate_constant;
pub use democracy::{democracy_profile, far_block_start, DemocracyProfile};
pub use sampler::Sampler;
pub use sigma::{sigma, sigma_profile, sigma_tilde, sigma_tilde_exact_size, sigma_tilde_profile, DEFAULT_TOL};

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum ConstantName {
    /// Suppression quasi-greedy: `‖x − P_Λ x‖ ≤ C‖x‖`.
    #[serde(rename = "C_ell")]
    CEll,
    /// Quasi-greedy: `‖P_Λ x‖ ≤ C‖x‖`.
    #[serde(rename = "C_q")]
    CQ,
    /// `f`-disjoint democracy.
    #[serde(rename = "Delta_d_f")]
    DeltaD,
    /// `f`-disjoint superdemocracy.
    #[serde(rename = "Delta_sd_f")]
    DeltaSd,
    /// Property (A, f).
    #[serde(rename = "Delta_A_f")]
    DeltaA,
    /// Suppression `f`-unconditionality.
    #[serde(rename = "K_su")]
    KSu,
    /// `f`-unconditionality: `‖P_A x‖ ≤ C‖x‖` over `f`-greedy `A`.
    #[serde(rename = "K_u")]
    KU,
    /// `f`-almost greedy: `‖x − P_Λ x‖ ≤ C σ̃_{f(m)}(x)`.
    #[serde(rename = "C_af")]
    CAf,
    /// `f`-greedy: `‖x − P_Λ x‖ ≤ C σ_{f(m)}(x)`.
    #[serde(rename = "C_gf")]
    CGf,
}

impl ConstantName {
    pub const ALL: [ConstantName; 9] = [
        ConstantName::CEll,
        ConstantName::CQ,
        ConstantName::DeltaD,
        ConstantName::DeltaSd,
        ConstantName::DeltaA,
        ConstantName::KSu,
        ConstantName::KU,
        ConstantName::CAf,
        ConstantName::CGf,
    ];

    pub fn as_str(&self) -> &'static str {
        match self {
            ConstantName::CEll => "C_ell",
            ConstantName::CQ => "C_q",
            ConstantName::DeltaD => "Delta_d_f",
            ConstantName::DeltaSd => "Delta_sd_f",
            ConstantName::DeltaA => "Delta_A_f",
            ConstantName::KSu => "K_su",
            ConstantName::KU => "K_u",
            ConstantName::CAf => "C_af",
            ConstantName::CGf => "C_gf",
        }
    }

    /// Whether the definition involves a threshold function `f`.
    pub fn needs_func(&self) -> bool {
        !matches!(self, ConstantName::CEll | ConstantName::CQ)
    }
}

impl fmt::Display for ConstantName {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

impl std::str::FromStr for ConstantName {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        ConstantName::ALL
            .into_iter()
            .find(|c| c.as_str() == s)
            .ok_or_else(|| Error::Parse(format!("unknown constant `{s}`")))
    }
}

/// A configuration realizing an estimated ratio.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(tag = "type", rename_all = "snake_case")]
pub enum Witness {
    /// `‖numerator‖ / ‖denominator‖`
    Ratio { numerator: SparseVector, denominator: SparseVector },
    /// `‖x − P_Λ x‖ / σ̃_budget(x)`, or `σ_budget` when `free_coefficients`.
    Approximation { x: SparseVector, lambda: Vec<usize>, budget: usize, free_coefficients: bool },
}

/// `a / b` with `+∞` for a positive numerator over zero and `None` for `0/0`.
pub fn ratio(a: f64, b: f64) -> Option<f64> {
    if b > 0.0 {
        Some(a / b)
    } else if a > 0.0 {
        Some(f64::INFINITY)
    } else {
        None
    }
}

impl Witness {
    /// Recomputes the ratio this witness stands for.
    pub fn reevaluate(&self, space: &Space) -> Result<f64> {
        let (a, b) = match self {
            Witness::Ratio { numerator, denominator } => (space.norm(numerator)?, space.norm(denominator)?),
            Witness::Approximation { x, lambda, budget, free_coefficients } => {
                let set: IndexSet = lambda.iter().copied().collect();
                let num = space.norm(&x.project_complement(&set))?;
                let den = if *free_coefficients {
                    sigma(x, *budget, space, DEFAULT_TOL)?
                } else {
                    sigma_tilde(x, *budget, space)?
                };
                (num, den)
            }
        };
        ratio(a, b).ok_or_else(|| Error::Domain("witness evaluates to 0/0".into()))
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct ConstantEstimate {
    pub name: ConstantName,
    /// Reported lower bound, `max(1, observed)`.
    #[serde(with = "extended_real")]
    pub value: f64,
    /// Largest ratio realized by a sampled configuration; the witness reproduces it.
    #[serde(with = "extended_real")]
    pub observed: f64,
    pub witness: Option<Witness>,
    pub seed: u64,
    pub trials: usize,
    /// Configurations of the form `0/0`, which carry no information.
    pub skipped: usize,
    pub sampler: Sampler,
    pub space: Space,
    pub func: Option<crate::funcf::FuncF>,
}

/// Serializes `±∞` as the strings `"+inf"` / `"-inf"`, other values as numbers.
pub mod extended_real {
    use super::*;

    pub fn serialize<S: Serializer>(v: &f64, s: S) -> std::result::Result<S::Ok, S::Error> {
        if v.is_infinite() {
            s.serialize_str(if *v > 0.0 { "+inf" } else { "-inf" })
        } else {
            s.serialize_f64(*v)
        }
    }

    pub fn deserialize<'de, D: Deserializer<'de>>(d: D) -> std::result::Result<f64, D::Error> {
        #[derive(Deserialize)]
        #[serde(untagged)]
        enum Repr {
            Num(f64),
            Text(String),
        }
        match Repr::deserialize(d)? {
            Repr::Num(v) => Ok(v),
            Repr::Text(t) => match t.as_str() {
                "+inf" | "inf" => Ok(f64::INFINITY),
                "-inf" => Ok(f64::NEG_INFINITY),
                other => Err(serde::de::Error::custom(format!("expected a number or \"+inf\", got `{other}`"))),
            },
        }
    }
}
