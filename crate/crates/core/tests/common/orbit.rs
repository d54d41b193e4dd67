//! Kernel canonicalisation versus the brute-force orbit oracle.

use std::collections::BTreeSet;

use tensorkernel_core::properties::PropertyTable;
use tensorkernel_core::rational::to_i64;
use tensorkernel_core::symmetry::{canonicalise, DEFAULT_MAX_ORBIT};
use tensorkernel_core::Expr;
use tensorkernel_oracles::orbit::{canonical, MAX_SLOTS};

use super::exprgen::{oracle_factors, random_monomial, slot_data};

/// Compares the kernel with the oracle on one random monomial.
pub fn agrees_with_oracle(seed: u64, with_metric: bool, p: &PropertyTable) -> Result<(), String> {
    let mut rng = super::rng(seed);
    let term = random_monomial(&mut rng, MAX_SLOTS);
    let pool: Vec<String> = "abcdefgh".chars().map(String::from).collect();
    let flippable: BTreeSet<String> =
        if with_metric { term.dummy_names().into_iter().collect() } else { BTreeSet::new() };
    let want = canonical(&oracle_factors(&term, p), &pool, &flippable).map_err(|e| format!("{:?}", e))?;
    let e = Expr::from_term(term.clone());
    let got = canonicalise(&e, p, DEFAULT_MAX_ORBIT).map_err(|e| e.to_string())?;
    let got = match got.terms.as_slice() {
        [] => None,
        [t] => Some((to_i64(&t.coeff).unwrap() as i8, slot_data(t))),
        _ => return Err(format!("{:?} canonicalised to several terms", term)),
    };
    if got == want {
        Ok(())
    } else {
        Err(format!("{:?} (metric: {}): kernel {:?}, oracle {:?}", term, with_metric, got, want))
    }
}

