mod common;

use num_bigint::BigInt;
use num_traits::ToPrimitive;
use proptest::prelude::*;

use common::{case, load, pruned, sorted, symbolic, CASES};
use target_core::bench::{candidate_count, enumerate_filter};
use target_core::logic::Value;
use target_core::spec::{RefType, SpecModule};

fn naive(m: &SpecModule, params: &[(String, RefType)], d: u32, n: i64) -> Vec<Vec<Value>> {
    let mut out = Vec::new();
    enumerate_filter(m, params, d, &BigInt::from(n), None, &mut |a| out.push(a.to_vec())).unwrap();
    out
}

#[test]
fn ordlist_rng3_counts() {
    // sorted lists over {0,1,2} of length <= d (and elements <= d)
    let (m, p) = load("ordlist", "f :: OrdList (Rng 3) -> Bool");
    let expected = [1, 3, 10, 20, 35];
    for (d, want) in expected.iter().enumerate() {
        let d = d as u32;
        let sym = symbolic(&m, &p, d, d as i64);
        assert_eq!(sym.len(), *want, "depth {d}");
        assert_eq!(sorted(sym), sorted(naive(&m, &p, d, d as i64)), "depth {d}");
    }
}

#[test]
fn empty_range_has_only_nil() {
    let (m, p) = load("ordlist", "f :: OrdList (Rng 0) -> Bool");
    let sym = symbolic(&m, &p, 3, 3);
    assert_eq!(sym.len(), 1);
    assert_eq!(sym[0][0].as_list().map(|l| l.len()), Some(0));
}

#[test]
fn rbt_matches_brute_force() {
    let (m, p) = load("rbt", "f :: OkRBT Int -> Bool");
    for d in 0..=2 {
        let sym = symbolic(&m, &p, d, d as i64);
        assert_eq!(sorted(sym), sorted(naive(&m, &p, d, d as i64)), "depth {d}");
    }
}

#[test]
fn map_matches_brute_force() {
    let (m, p) = load("map", "f :: OkMap Int Bool -> Bool");
    for d in 0..=2 {
        let sym = symbolic(&m, &p, d, d as i64);
        assert_eq!(sorted(sym), sorted(naive(&m, &p, d, d as i64)), "depth {d}");
    }
}

#[test]
fn dependent_parameters_match_brute_force() {
    for i in [1, 6, 7, 8] {
        let (m, p) = case(i);
        for d in 0..=2 {
            assert_eq!(sorted(symbolic(&m, &p, d, 2)), sorted(naive(&m, &p, d, 2)), "{} depth {d}", CASES[i].sig);
        }
    }
}

proptest! {
    #![proptest_config(ProptestConfig { cases: 48, failure_persistence: None, ..ProptestConfig::default() })]

    #[test]
    fn pruning_preserves_the_filtered_set(i in 0..CASES.len(), d in 0u32..3, n in 0i64..3) {
        let (m, p) = case(i);
        let d = d.min(CASES[i].max_depth);
        let total = candidate_count(&m, &p, d, &BigInt::from(n)).unwrap();
        prop_assume!(total.to_u64().is_some_and(|t| t <= 200_000));
        prop_assert_eq!(sorted(pruned(&m, &p, d, n)), sorted(naive(&m, &p, d, n)));
    }
}
