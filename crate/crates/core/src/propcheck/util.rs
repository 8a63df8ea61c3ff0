use rand::Rng;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

use crate::funcf::FuncF;
use crate::numeric::derive_seed;
use crate::space::Space;
use crate::vector::SparseVector;

/// Relative slack for inequalities between computed norms.
pub const REL: f64 = 1e-12;
/// Proof-constant bands get this much room for estimator looseness.
pub const SLACK: f64 = 1.1;

pub fn rng(seed: u64, stream: u64) -> ChaCha8Rng {
    ChaCha8Rng::seed_from_u64(derive_seed(seed, stream))
}

/// `a ≤ b` up to rounding.
pub fn le(a: f64, b: f64) -> bool {
    a <= b + REL * (1.0 + b.abs())
}

/// identity, `√x`, `x^0.9`, `x/2` and the bounded `2x/(2+x)`.
pub fn standard_funcs() -> Vec<FuncF> {
    vec![
        FuncF::identity(),
        FuncF::sqrt(),
        FuncF::power(1.0, 0.9).expect("member"),
        FuncF::scaled(2.0).expect("member"),
        FuncF::bounded(2.0).expect("member"),
    ]
}

/// Spaces whose canonical basis is 1-unconditional, so `C_ℓ = C_q = 1`.
pub fn lattice_spaces() -> Vec<Space> {
    vec![
        Space::lp(1.0).expect("valid"),
        Space::lp(2.0).expect("valid"),
        Space::lp(4.0).expect("valid"),
        Space::c0(),
        Space::direct_sum(1.0, 2.0).expect("valid"),
        Space::schreier(FuncF::sqrt()),
        Space::haar(2.0, 1, 6).expect("valid"),
    ]
}

/// Largest index a random configuration may use in `space`.
pub fn horizon(space: &Space, wanted: usize) -> usize {
    space.capacity().map_or(wanted, |c| c.min(wanted))
}

/// Uniform in `[-1, 1]`, with exact `±1` one time in four.
pub fn unit_coefficient(rng: &mut ChaCha8Rng) -> f64 {
    if rng.gen_ratio(1, 4) {
        if rng.gen::<bool>() {
            1.0
        } else {
            -1.0
        }
    } else {
        rng.gen_range(-1.0..=1.0)
    }
}

pub fn with_coefficients(indices: &[usize], rng: &mut ChaCha8Rng) -> SparseVector {
    let mut v = SparseVector::zero();
    for &n in indices {
        let mut c = unit_coefficient(rng);
        if c == 0.0 {
            c = 0.5;
        }
        v.set(n, c);
    }
    v
}
