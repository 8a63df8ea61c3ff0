//! Seeded configuration families for the constant estimators.

use rand::seq::index::sample;
use rand::Rng;
use rand_chacha::ChaCha8Rng;
use rand_distr::StandardNormal;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::vector::SparseVector;

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(tag = "family", rename_all = "snake_case")]
pub enum Sampler {
    /// `support` random positions in `1..=horizon` with standard normal coefficients.
    Gaussian { support: usize, horizon: usize },
    /// Random positions with `±1` coefficients, so greedy sets tie everywhere.
    SignComb { support: usize, horizon: usize },
    /// Random positions with coefficients `± ratio^k`, `k = 0, 1, …`.
    GeometricComb { support: usize, horizon: usize, ratio: f64 },
    /// Structured set pairs of sizes up to `max_size`: prefixes, parity
    /// classes and far blocks placed where the space makes them largest.
    FarBlock { max_size: usize, horizon: usize },
    /// `y = Σ_{n≤N} (−1)^n n^{−1/2} e_n` with the odd/even split, `N = dimension`.
    KtAlternating { dimension: usize },
}

impl Sampler {
    pub fn horizon(&self) -> usize {
        match self {
            Sampler::Gaussian { horizon, .. }
            | Sampler::SignComb { horizon, .. }
            | Sampler::GeometricComb { horizon, .. }
            | Sampler::FarBlock { horizon, .. } => *horizon,
            Sampler::KtAlternating { dimension } => *dimension,
        }
    }

    pub fn validate(&self) -> Result<()> {
        let ok = match self {
            Sampler::Gaussian { support, horizon } | Sampler::SignComb { support, horizon } => {
                *support >= 1 && support <= horizon
            }
            Sampler::GeometricComb { support, horizon, ratio } => {
                *support >= 1 && support <= horizon && *ratio > 0.0 && *ratio < 1.0
            }
            Sampler::FarBlock { max_size, horizon } => *max_size >= 1 && max_size <= horizon,
            Sampler::KtAlternating { dimension } => *dimension >= 2,
        };
        if ok {
            Ok(())
        } else {
            Err(Error::Config(format!("invalid sampler {self:?}")))
        }
    }

    /// Draws a random vector for the vector families.
    pub fn draw_vector(&self, rng: &mut ChaCha8Rng) -> Result<SparseVector> {
        let (support, horizon) = match self {
            Sampler::Gaussian { support, horizon }
            | Sampler::SignComb { support, horizon }
            | Sampler::GeometricComb { support, horizon, .. } => (*support, *horizon),
            Sampler::KtAlternating { dimension } => return Ok(kt_alternating(*dimension)),
            Sampler::FarBlock { .. } => {
                return Err(Error::Config("the far-block family produces set pairs, not vectors".into()))
            }
        };
        let positions = random_set(rng, horizon, support);
        let pairs = positions.into_iter().enumerate().map(|(k, n)| {
            let v = match self {
                Sampler::Gaussian { .. } => loop {
                    let g: f64 = rng.sample(StandardNormal);
                    if g != 0.0 {
                        break g;
                    }
                },
                Sampler::SignComb { .. } => random_sign(rng),
                Sampler::GeometricComb { ratio, .. } => random_sign(rng) * ratio.powi(k as i32),
                _ => unreachable!(),
            };
            (n, v)
        });
        let pairs: Vec<(usize, f64)> = pairs.collect();
        SparseVector::from_pairs(pairs)
    }
}

pub fn random_sign(rng: &mut ChaCha8Rng) -> f64 {
    if rng.gen::<bool>() {
        1.0
    } else {
        -1.0
    }
}

/// `size` distinct indices drawn uniformly from `1..=horizon`, in draw order.
pub fn random_set(rng: &mut ChaCha8Rng, horizon: usize, size: usize) -> Vec<usize> {
    sample(rng, horizon, size.min(horizon)).into_iter().map(|i| i + 1).collect()
}

/// `Σ_{n≤N} (−1)^n n^{−1/2} e_n`
pub fn kt_alternating(dimension: usize) -> SparseVector {
    let pairs = (1..=dimension).map(|n| (n, if n % 2 == 0 { 1.0 } else { -1.0 } / (n as f64).sqrt()));
    SparseVector::from_pairs(pairs).expect("finite coefficients")
}

#[cfg(test)]
mod tests {
    use super::*;
    use rand::SeedableRng;

    #[test]
    fn deterministic_draws() {
        let s = Sampler::Gaussian { support: 6, horizon: 40 };
        let a = s.draw_vector(&mut ChaCha8Rng::seed_from_u64(7)).unwrap();
        let b = s.draw_vector(&mut ChaCha8Rng::seed_from_u64(7)).unwrap();
        assert_eq!(a, b);
        assert_eq!(a.nnz(), 6);
        assert!(a.max_index().unwrap() <= 40);
    }

    #[test]
    fn geometric_moduli() {
        let s = Sampler::GeometricComb { support: 4, horizon: 10, ratio: 0.5 };
        let x = s.draw_vector(&mut ChaCha8Rng::seed_from_u64(1)).unwrap();
        let mut moduli: Vec<f64> = x.iter().map(|(_, v)| v.abs()).collect();
        moduli.sort_by(|a, b| b.total_cmp(a));
        assert_eq!(moduli, vec![1.0, 0.5, 0.25, 0.125]);
    }

    #[test]
    fn json_shape() {
        let s = Sampler::GeometricComb { support: 4, horizon: 10, ratio: 0.5 };
        let j = serde_json::to_string(&s).unwrap();
        assert_eq!(j, r#"{"family":"geometric_comb","support":4,"horizon":10,"ratio":0.5}"#);
        assert!(Sampler::SignComb { support: 11, horizon: 10 }.validate().is_err());
    }
}
