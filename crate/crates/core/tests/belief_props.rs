mod common;

use evifuse::belief::{
    combine_all, conflict_mass, conjunctive_combine, decide_pignistic, pignistic, MassFunction,
};
use evifuse::{Decision, FocalSet};
use proptest::prelude::*;

use common::{dense, dense_conjunctive, random_mass, rng};

fn close(a: &[f64], b: &[f64], tol: f64) -> bool {
    a.iter().zip(b).all(|(x, y)| (x - y).abs() <= tol)
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(256))]

    #[test]
    fn combination_is_commutative(seed in any::<u64>(), n in 1usize..=5) {
        let mut r = rng(seed);
        let a = random_mass(&mut r, n, true);
        let b = random_mass(&mut r, n, true);
        let ab = dense(&conjunctive_combine(&a, &b).unwrap());
        let ba = dense(&conjunctive_combine(&b, &a).unwrap());
        prop_assert!(close(&ab, &ba, 1e-12));
    }

    #[test]
    fn combination_is_associative(seed in any::<u64>(), n in 1usize..=5) {
        let mut r = rng(seed);
        let (a, b, c) = (random_mass(&mut r, n, true), random_mass(&mut r, n, true), random_mass(&mut r, n, true));
        let left = conjunctive_combine(&conjunctive_combine(&a, &b).unwrap(), &c).unwrap();
        let right = conjunctive_combine(&a, &conjunctive_combine(&b, &c).unwrap()).unwrap();
        prop_assert!(close(&dense(&left), &dense(&right), 1e-9));
    }

    #[test]
    fn combination_matches_dense_rule(seed in any::<u64>(), n in 1usize..=6) {
        let mut r = rng(seed);
        let a = random_mass(&mut r, n, true);
        let b = random_mass(&mut r, n, true);
        let fast = dense(&conjunctive_combine(&a, &b).unwrap());
        prop_assert!(close(&fast, &dense_conjunctive(&dense(&a), &dense(&b)), 1e-9));
    }

    #[test]
    fn combined_mass_stays_normalized(seed in any::<u64>(), n in 1usize..=6, len in 1usize..=6) {
        let mut r = rng(seed);
        let masses: Vec<MassFunction> = (0..len).map(|_| random_mass(&mut r, n, true)).collect();
        let fused = combine_all(n, &masses).unwrap();
        prop_assert!((fused.total() - 1.0).abs() <= 1e-9);
        prop_assert!(fused.focal_elements().all(|(_, v)| v > 0.0));
    }

    #[test]
    fn conflict_never_shrinks(seed in any::<u64>(), n in 1usize..=5) {
        let mut r = rng(seed);
        let a = random_mass(&mut r, n, true);
        let b = random_mass(&mut r, n, true);
        let ab = conjunctive_combine(&a, &b).unwrap();
        prop_assert!(conflict_mass(&ab) + 1e-12 >= conflict_mass(&a).max(conflict_mass(&b)));
    }

    #[test]
    fn pignistic_of_bayesian_is_identity(weights in prop::collection::vec(0.01f64..1.0, 1..=8)) {
        let n = weights.len();
        let sum: f64 = weights.iter().sum();
        let m = MassFunction::new(
            n,
            weights.iter().enumerate().map(|(c, w)| (FocalSet::singleton(c, n).unwrap(), w / sum)),
        ).unwrap();
        let betp = pignistic(&m).unwrap();
        for (c, w) in weights.iter().enumerate() {
            prop_assert!((betp[c] - w / sum).abs() <= 1e-12);
        }
    }
}

#[test]
fn vacuous_is_neutral() {
    let mut r = rng(11);
    for n in 1..=6 {
        let m = random_mass(&mut r, n, true);
        let v = combine_all(n, std::iter::empty()).unwrap();
        assert_eq!(dense(&conjunctive_combine(&m, &v).unwrap()), dense(&m));
    }
}

#[test]
fn fully_conflicting_sources_decide_conflict() {
    let a = MassFunction::categorical(FocalSet::singleton(0, 3).unwrap());
    let b = MassFunction::categorical(FocalSet::singleton(1, 3).unwrap());
    let ab = conjunctive_combine(&a, &b).unwrap();
    assert_eq!(conflict_mass(&ab), 1.0);
    assert_eq!(decide_pignistic(&ab), Decision::Conflict);
}
