//! Structural properties under randomized input: rewrites preserve free
//! indices, normal forms are idempotent, and printing round-trips through
//! the parser.

mod common;

use common::structural::*;
use proptest::prelude::*;

const CASES: u32 = 1_000;

proptest! {
    #![proptest_config(ProptestConfig { cases: CASES, ..ProptestConfig::default() })]

    #[test]
    fn rewrites_preserve_free_indices(seed in any::<u64>()) {
        let r = free_indices_preserved(seed);
        prop_assert!(r.is_ok(), "{}", r.unwrap_err());
    }

    #[test]
    fn normalize_and_canonicalise_are_idempotent(seed in any::<u64>()) {
        let r = normal_forms_idempotent(seed);
        prop_assert!(r.is_ok(), "{}", r.unwrap_err());
    }

    #[test]
    fn scalar_simplify_is_idempotent(seed in any::<u64>()) {
        let r = simplify_idempotent(seed);
        prop_assert!(r.is_ok(), "{}", r.unwrap_err());
    }

    #[test]
    fn printing_round_trips(seed in any::<u64>()) {
        let r = round_trip(seed);
        prop_assert!(r.is_ok(), "{}", r.unwrap_err());
    }
}

#[test]
fn golden_corpus_round_trips_in_both_notations() {
    assert_eq!(golden_corpus_round_trips().unwrap_or_else(|e| panic!("{}", e)), 38);
}
