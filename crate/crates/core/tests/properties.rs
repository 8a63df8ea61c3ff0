use proptest::collection::btree_map;
use proptest::prelude::*;

use tgalab::greedy::{greedy_sets, is_f_greedy_set, is_greedy_set, truncate};
use tgalab::{FuncF, IndexSet, Space, SparseVector, TiePolicy};

fn spaces() -> Vec<Space> {
    vec![
        Space::lp(1.0).unwrap(),
        Space::lp(2.5).unwrap(),
        Space::c0(),
        Space::direct_sum(1.0, 2.0).unwrap(),
        Space::schreier(FuncF::sqrt()),
        Space::kt(),
        Space::weighted(2).unwrap(),
        Space::haar(3.0, 1, 5).unwrap(),
        Space::kt_c0_sum(),
    ]
}

fn funcs() -> Vec<FuncF> {
    vec![
        FuncF::identity(),
        FuncF::sqrt(),
        FuncF::power(1.0, 0.9).unwrap(),
        FuncF::scaled(2.0).unwrap(),
        FuncF::bounded(2.0).unwrap(),
    ]
}

/// Sparse vectors on `1..=32` with at most `max` nonzero entries.
fn vector(max: usize) -> impl Strategy<Value = SparseVector> {
    btree_map(1usize..=32, prop_oneof![-4.0f64..4.0, Just(1.0), Just(-1.0)], 0..=max)
        .prop_map(|m| SparseVector::from_pairs(m.into_iter().filter(|(_, v)| *v != 0.0)).unwrap())
}

fn close(a: f64, b: f64) -> bool {
    (a - b).abs() <= 1e-9 * (1.0 + a.abs().max(b.abs()))
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(128))]

    #[test]
    fn norm_axioms(x in vector(10), y in vector(10), alpha in -3.0f64..3.0) {
        for space in spaces() {
            let nx = space.norm(&x).unwrap();
            let ny = space.norm(&y).unwrap();
            prop_assert!(nx >= 0.0);
            prop_assert_eq!(nx == 0.0, x.is_zero());
            prop_assert!(close(space.norm(&x.scale(alpha)).unwrap(), alpha.abs() * nx));
            prop_assert!(space.norm(&(&x + &y)).unwrap() <= nx + ny + 1e-12 * (1.0 + nx + ny));
            for n in x.support() {
                // the basis is normalized, and coordinate functionals have norm c2 = 1
                prop_assert!(x.get(n).abs() <= space.c2() * nx * (1.0 + 1e-12));
            }
        }
    }

    #[test]
    fn truncation_is_idempotent(x in vector(12), frac in 0.01f64..1.5) {
        prop_assume!(!x.is_zero());
        let alpha = frac * x.sup_norm();
        let t = truncate(&x, alpha).unwrap();
        prop_assert_eq!(truncate(&t, alpha).unwrap(), t.clone());
        prop_assert!(t.sup_norm() <= alpha);
        for (n, v) in x.iter() {
            prop_assert_eq!(t.get(n).signum(), v.signum());
        }
    }

    #[test]
    fn f_greedy_criteria_agree(x in vector(8), mask in any::<u16>()) {
        let support: Vec<usize> = x.support().collect();
        let set: IndexSet = support.iter().enumerate().filter(|(i, _)| mask & (1 << i) != 0).map(|(_, &n)| n).collect();
        for f in funcs() {
            // errors only when the two criteria disagree
            prop_assert!(is_f_greedy_set(&x, &set, &f).is_ok());
        }
    }

    #[test]
    fn greedy_sets_are_f_greedy(x in vector(8), extra in 0usize..10) {
        let m = extra.min(x.nnz() + 1);
        let dim = x.max_index().unwrap_or(1).max(m).max(1);
        for set in greedy_sets(&x, m, TiePolicy::EnumerateAll, dim).unwrap() {
            prop_assert_eq!(set.len(), m);
            prop_assert!(is_greedy_set(&x, &set));
            for f in funcs() {
                prop_assert!(is_f_greedy_set(&x, &set, &f).unwrap().is_yes());
            }
        }
    }

    #[test]
    fn space_json_round_trip(x in vector(8)) {
        for space in spaces() {
            let back: Space = serde_json::from_str(&serde_json::to_string(&space).unwrap()).unwrap();
            prop_assert_eq!(back.norm(&x).unwrap(), space.norm(&x).unwrap());
        }
        let back: SparseVector = serde_json::from_str(&serde_json::to_string(&x).unwrap()).unwrap();
        prop_assert_eq!(back, x);
    }
}
