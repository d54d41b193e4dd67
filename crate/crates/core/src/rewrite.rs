//! Expression rewrites parameterised by the property table: distribution,
//! product sorting, rule substitution, metric and Kronecker-delta
//! elimination and term collection.
//!
//! Every function here maps an expression to an expression with the same
//! free indices; none of them touches the register state of a session.

use alloc::collections::{BTreeMap, BTreeSet};
use alloc::string::{String, ToString};
use alloc::vec::Vec;

use num_traits::One;
use thiserror::Error;

use crate::expr::{merge_terms, Expr, ExprError, Factor, Rule, Tensor, Term};
use crate::index::Index;
use crate::properties::{Commutation, PropertyTable};
use crate::rational::int;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum RewriteError {
    #[error("invalid substitution rule: {0}")]
    InvalidRule(String),
    #[error(transparent)]
    Expr(#[from] ExprError),
}

/// Applies `f` to every term, after first rewriting the terms of each
/// nested group with `f`.
fn map_terms<F>(e: &Expr, f: &mut F) -> Result<Expr, RewriteError>
where
    F: FnMut(Term) -> Result<Vec<Term>, RewriteError>,
{
    let mut out = Vec::new();
    for t in &e.terms {
        let mut t = t.clone();
        for fac in &mut t.factors {
            if let Factor::Group(g) = fac {
                *g = map_terms(g, f)?;
            }
        }
        out.extend(f(t)?);
    }
    Ok(Expr::from_terms(out).flatten())
}

// ----- distribute -----------------------------------------------------------

/// Multiplies out every product containing a parenthesised sum.
pub fn distribute(e: &Expr, props: &PropertyTable) -> Result<Expr, RewriteError> {
    map_terms(e, &mut |t| distribute_term(t, props))
}

fn distribute_term(t: Term, props: &PropertyTable) -> Result<Vec<Term>, RewriteError> {
    if !t.has_groups() {
        return Ok(alloc::vec![t]);
    }
    let outer_names = t.all_names();
    let mut partial: Vec<Term> = alloc::vec![Term::number(t.coeff.clone())];
    for f in t.factors {
        match f {
            Factor::Tensor(x) => {
                for p in &mut partial {
                    p.factors.push(Factor::Tensor(x.clone()));
                }
            }
            Factor::Group(g) => {
                let mut next = Vec::new();
                for p in &partial {
                    for inner in &g.terms {
                        let mut piece = inner.clone();
                        let mut avoid = outer_names.clone();
                        avoid.extend(p.all_names());
                        // Only the group's own dummies may clash; its free
                        // indices are shared with the product by design.
                        let free: BTreeSet<String> = piece.free_indices().into_iter().map(|i| i.name).collect();
                        avoid.retain(|n| !free.contains(n));
                        piece.freshen_dummies(&avoid, props.index_sets())?;
                        let mut q = p.clone();
                        q.coeff *= piece.coeff;
                        q.factors.extend(piece.factors);
                        next.push(q);
                    }
                }
                partial = next;
            }
        }
    }
    Ok(partial)
}

// ----- prodsort -------------------------------------------------------------

/// Sorts the factors of every product into declaration order of their
/// heads, moving a factor only past neighbours it commutes or anticommutes
/// with (the latter flips the sign). Parenthesised sums never move.
pub fn prodsort(e: &Expr, props: &PropertyTable) -> Expr {
    map_terms(e, &mut |t| Ok(alloc::vec![prodsort_term(t, props)])).expect("prodsort cannot fail")
}

fn sort_key(t: &Tensor, props: &PropertyTable) -> (usize, String) {
    props.head_rank(&t.head)
}

fn prodsort_term(mut t: Term, props: &PropertyTable) -> Term {
    let n = t.factors.len();
    let mut changed = true;
    while changed {
        changed = false;
        for i in 0..n.saturating_sub(1) {
            let (a, b) = match (&t.factors[i], &t.factors[i + 1]) {
                (Factor::Tensor(a), Factor::Tensor(b)) => (a, b),
                _ => continue,
            };
            let ka = sort_key(a, props);
            let kb = sort_key(b, props);
            let out_of_order = ka > kb || (ka == kb && a.head == b.head && a > b);
            if !out_of_order {
                continue;
            }
            let sign = match props.commutation(&a.head, &b.head) {
                Commutation::NoCommute => continue,
                Commutation::Commute => 1,
                Commutation::AntiCommute => -1,
            };
            t.factors.swap(i, i + 1);
            if sign < 0 {
                t.coeff = -t.coeff.clone();
            }
            changed = true;
        }
    }
    t
}

// ----- substitute -----------------------------------------------------------

/// The single-tensor left side of a rule, checked for distinct indices.
fn rule_pattern(rule: &Rule) -> Result<&Tensor, RewriteError> {
    let bad = |m: &str| RewriteError::InvalidRule(m.to_string());
    let [term] = rule.lhs.terms.as_slice() else {
        return Err(bad("the left side must be a single tensor"));
    };
    if !term.coeff.is_one() {
        return Err(bad("the left side must not carry a coefficient"));
    }
    let [Factor::Tensor(t)] = term.factors.as_slice() else {
        return Err(bad("the left side must be a single tensor"));
    };
    let mut seen = BTreeSet::new();
    for i in t.iter_slots() {
        if !seen.insert(i.name.as_str()) {
            return Err(bad("the left side must use distinct indices"));
        }
    }
    Ok(t)
}

/// Matches `pat` against `t` and returns the renaming of pattern index names
/// onto the names found in `t`.
fn match_tensor(pat: &Tensor, t: &Tensor) -> Option<BTreeMap<String, String>> {
    if pat.head != t.head || pat.wrappers.len() != t.wrappers.len() || pat.arity() != t.arity() {
        return None;
    }
    for (p, w) in pat.wrappers.iter().zip(&t.wrappers) {
        if p.op != w.op || p.slots.len() != w.slots.len() {
            return None;
        }
    }
    let mut map = BTreeMap::new();
    for (p, x) in pat.iter_slots().zip(t.iter_slots()) {
        if p.variance != x.variance {
            return None;
        }
        map.insert(p.name.clone(), x.name.clone());
    }
    Some(map)
}

/// Replaces every factor matching the rule's left side by its right side,
/// with the matched index names substituted and the right side's dummies
/// renamed away from every name already in the product.
pub fn substitute(e: &Expr, rule: &Rule, props: &PropertyTable) -> Result<Expr, RewriteError> {
    let pat = rule_pattern(rule)?.clone();
    map_terms(e, &mut |t| Ok(alloc::vec![substitute_term(t, &pat, &rule.rhs, props)?]))
}

fn substitute_term(t: Term, pat: &Tensor, rhs: &Expr, props: &PropertyTable) -> Result<Term, RewriteError> {
    let mut out = Term::number(t.coeff.clone());
    for (k, f) in t.factors.iter().enumerate() {
        let map = match f {
            Factor::Tensor(x) => match_tensor(pat, x),
            Factor::Group(_) => None,
        };
        let Some(map) = map else {
            out.factors.push(f.clone());
            continue;
        };
        // Names visible in the product: what has been built so far, the
        // factors still to come and the images of the pattern indices.
        let mut avoid = out.all_names();
        for rest in &t.factors[k + 1..] {
            avoid.extend(Term::new(int(1), alloc::vec![rest.clone()]).all_names());
        }
        avoid.extend(map.values().cloned());
        let mut pieces = Vec::new();
        for rt in &rhs.terms {
            let mut used = avoid.clone();
            used.extend(rt.all_names());
            let mut renaming = map.clone();
            for name in rt.all_names() {
                if map.contains_key(&name) {
                    continue;
                }
                if avoid.contains(&name) {
                    let fresh = props
                        .index_sets()
                        .fresh(Some(&name), &used)
                        .ok_or(ExprError::IndexSetExhausted)?;
                    used.insert(fresh.clone());
                    renaming.insert(name, fresh);
                }
            }
            let mut piece = rt.clone();
            piece.rename(&renaming);
            pieces.push(piece);
        }
        match pieces.len() {
            0 => return Ok(Term::number(int(0))),
            1 => {
                let piece = pieces.pop().unwrap();
                out.coeff *= piece.coeff;
                out.factors.extend(piece.factors);
            }
            _ => out.factors.push(Factor::Group(Expr::from_terms(pieces))),
        }
    }
    Ok(out)
}

// ----- metric and delta elimination ----------------------------------------

/// Finds the other occurrence of `name` among the tensor factors of `t`,
/// skipping slot `skip` of factor `own`.
fn find_partner(t: &Term, name: &str, own: usize, skip: usize) -> Option<(usize, usize)> {
    for (k, f) in t.factors.iter().enumerate() {
        if let Factor::Tensor(x) = f {
            for (s, i) in x.iter_slots().enumerate() {
                if i.name == name && !(k == own && s == skip) {
                    return Some((k, s));
                }
            }
        }
    }
    None
}

/// Contracts the two-slot factor at `k` with the partner of one of its
/// slots: the partner slot takes over the factor's other slot, and the
/// factor disappears. A self-contracted factor becomes the dimension of its
/// index set when that is known. Returns whether anything changed.
fn contract_identity(t: &mut Term, k: usize, props: &PropertyTable) -> bool {
    let Factor::Tensor(x) = &t.factors[k] else { return false };
    let slots: [Index; 2] = [x.slots[0].clone(), x.slots[1].clone()];
    if slots[0].name == slots[1].name {
        return match props.dimension_of(&slots[0].name) {
            Some(d) => {
                t.coeff *= int(d);
                t.factors.remove(k);
                true
            }
            None => false,
        };
    }
    for s in 0..2 {
        if let Some((pk, ps)) = find_partner(t, &slots[s].name, k, s) {
            let other = slots[1 - s].clone();
            if let Factor::Tensor(p) = &mut t.factors[pk] {
                *p.slot_mut(ps) = other;
            }
            t.factors.remove(k);
            return true;
        }
    }
    false
}

/// One pass over the factors selected by `is_target`, each contracted at
/// most once.
fn eliminate_pass(mut t: Term, props: &PropertyTable, is_target: &dyn Fn(&Tensor) -> bool) -> (Term, bool) {
    let mut changed = false;
    let mut k = 0;
    while k < t.factors.len() {
        let hit = matches!(&t.factors[k], Factor::Tensor(x) if is_target(x));
        if hit && contract_identity(&mut t, k, props) {
            changed = true;
            continue;
        }
        k += 1;
    }
    (t, changed)
}

fn eliminate(e: &Expr, props: &PropertyTable, repeat: bool, is_target: &dyn Fn(&Tensor) -> bool) -> Expr {
    map_terms(e, &mut |t| {
        let (mut t, mut changed) = eliminate_pass(t, props, is_target);
        while repeat && changed {
            (t, changed) = eliminate_pass(t, props, is_target);
        }
        Ok(alloc::vec![t])
    })
    .expect("elimination cannot fail")
}

/// Uses bare metric factors to raise and lower the indices they are
/// contracted with. Metrics under a derivative are left alone. With
/// `repeat`, passes continue until no metric can be eliminated.
pub fn eliminate_metric(e: &Expr, props: &PropertyTable, repeat: bool) -> Expr {
    eliminate(e, props, repeat, &|x: &Tensor| x.is_bare() && props.is_metric(&x.head) && x.slots.len() == 2)
}

/// Removes Kronecker deltas (and metrics in mixed position) contracted with
/// other factors; a delta trace becomes the dimension of its index set.
/// A head declared both Metric and KroneckerDelta is one tensor seen in
/// different positions, so its contracted occurrences are removed in any
/// position.
pub fn eliminate_kr(e: &Expr, props: &PropertyTable, repeat: bool) -> Expr {
    eliminate(e, props, repeat, &|x: &Tensor| {
        props.is_mixed_delta(x)
            || (x.is_bare() && x.slots.len() == 2 && props.is_delta(&x.head) && props.is_metric(&x.head))
    })
}

// ----- collect_terms --------------------------------------------------------

/// Merges terms equal up to their coefficient, keeping first-occurrence
/// order, and drops zero terms. Sums inside products are collected too.
pub fn collect_terms(e: &Expr) -> Expr {
    let mut inner = e.clone();
    for t in &mut inner.terms {
        for f in &mut t.factors {
            if let Factor::Group(g) = f {
                *g = collect_terms(g);
            }
        }
    }
    Expr::from_terms(merge_terms(inner.flatten().terms)).flatten()
}
