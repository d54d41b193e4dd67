//! Tensor expression trees and their structural algebra.
//!
//! An [`Expr`] is a sum of [`Term`]s; a term is an exact rational coefficient
//! times an ordered list of [`Factor`]s. A factor is either a tensor (a head
//! with index slots, possibly wrapped in derivative operators) or a
//! parenthesised sum kept as a unit until it is distributed.
//!
//! Sums are kept in the order they were produced: merging of equal terms and
//! sorting only happen through [`Expr::normalize`] or the `collect_terms`
//! algorithm.

use alloc::collections::{BTreeMap, BTreeSet};
use alloc::string::String;
use alloc::vec::Vec;
use core::cmp::Ordering;

use num_traits::{One, Zero};
use thiserror::Error;

use crate::index::{Index, IndexSets, Variance};
use crate::rational::Rational;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum ExprError {
    #[error("free indices differ between terms: {left} vs {right}")]
    FreeIndexMismatch { left: String, right: String },
    #[error("no upper/lower slot pair left to contract")]
    NoContractibleSlots,
    #[error("index {0} repeated with the same variance")]
    RepeatedIndex(String),
    #[error("index {0} appears more than twice in one term")]
    IndexOverused(String),
    #[error("ran out of fresh index names")]
    IndexSetExhausted,
}

/// Derivative operator applied around a tensor, e.g. `\partial_{c}{...}`.
#[derive(Clone, Debug, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct Wrapper {
    pub op: String,
    pub slots: Vec<Index>,
}

/// A tensor factor. Slots are addressed in flat order: wrapper slots
/// outermost first, then the head's own slots.
#[derive(Clone, Debug, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct Tensor {
    pub wrappers: Vec<Wrapper>,
    pub head: String,
    pub slots: Vec<Index>,
}

impl Tensor {
    pub fn new(head: impl Into<String>, slots: Vec<Index>) -> Self {
        Tensor { wrappers: Vec::new(), head: head.into(), slots }
    }

    /// Wraps `self` in one more (outermost) derivative.
    pub fn wrapped(mut self, op: impl Into<String>, slots: Vec<Index>) -> Self {
        self.wrappers.insert(0, Wrapper { op: op.into(), slots });
        self
    }

    pub fn is_bare(&self) -> bool {
        self.wrappers.is_empty()
    }

    pub fn wrapper_slot_count(&self) -> usize {
        self.wrappers.iter().map(|w| w.slots.len()).sum()
    }

    pub fn arity(&self) -> usize {
        self.wrapper_slot_count() + self.slots.len()
    }

    pub fn iter_slots(&self) -> impl Iterator<Item = &Index> {
        self.wrappers.iter().flat_map(|w| w.slots.iter()).chain(self.slots.iter())
    }

    pub fn flat_slots(&self) -> Vec<Index> {
        self.iter_slots().cloned().collect()
    }

    pub fn slot(&self, i: usize) -> &Index {
        let mut i = i;
        for w in &self.wrappers {
            if i < w.slots.len() {
                return &w.slots[i];
            }
            i -= w.slots.len();
        }
        &self.slots[i]
    }

    pub fn slot_mut(&mut self, i: usize) -> &mut Index {
        let mut i = i;
        for w in &mut self.wrappers {
            if i < w.slots.len() {
                return &mut w.slots[i];
            }
            i -= w.slots.len();
        }
        &mut self.slots[i]
    }

    /// Replaces all slots, keeping the wrapper structure. `flat.len()` must
    /// equal [`Tensor::arity`].
    pub fn set_flat_slots(&mut self, flat: Vec<Index>) {
        debug_assert_eq!(flat.len(), self.arity());
        let mut it = flat.into_iter();
        for w in &mut self.wrappers {
            for s in &mut w.slots {
                *s = it.next().unwrap();
            }
        }
        for s in &mut self.slots {
            *s = it.next().unwrap();
        }
    }

    fn rename(&mut self, map: &BTreeMap<String, String>) {
        for w in &mut self.wrappers {
            for s in &mut w.slots {
                if let Some(n) = map.get(&s.name) {
                    s.name = n.clone();
                }
            }
        }
        for s in &mut self.slots {
            if let Some(n) = map.get(&s.name) {
                s.name = n.clone();
            }
        }
    }
}

#[derive(Clone, Debug, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum Factor {
    Tensor(Tensor),
    /// A parenthesised sum inside a product.
    Group(Expr),
}

impl Factor {
    pub fn as_tensor(&self) -> Option<&Tensor> {
        match self {
            Factor::Tensor(t) => Some(t),
            Factor::Group(_) => None,
        }
    }

    pub fn as_tensor_mut(&mut self) -> Option<&mut Tensor> {
        match self {
            Factor::Tensor(t) => Some(t),
            Factor::Group(_) => None,
        }
    }
}

/// Coefficient times an ordered product of factors.
#[derive(Clone, Debug, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct Term {
    pub coeff: Rational,
    pub factors: Vec<Factor>,
}

impl Term {
    pub fn new(coeff: Rational, factors: Vec<Factor>) -> Self {
        Term { coeff, factors }
    }

    pub fn number(coeff: Rational) -> Self {
        Term { coeff, factors: Vec::new() }
    }

    pub fn tensor(t: Tensor) -> Self {
        Term { coeff: Rational::one(), factors: alloc::vec![Factor::Tensor(t)] }
    }

    pub fn tensors(&self) -> impl Iterator<Item = &Tensor> {
        self.factors.iter().filter_map(Factor::as_tensor)
    }

    pub fn has_groups(&self) -> bool {
        self.factors.iter().any(|f| matches!(f, Factor::Group(_)))
    }

    /// Every index occurrence visible at this level: tensor slots in order,
    /// then the free indices of each group.
    pub fn occurrences(&self) -> Vec<Index> {
        let mut out = Vec::new();
        for f in &self.factors {
            match f {
                Factor::Tensor(t) => out.extend(t.iter_slots().cloned()),
                Factor::Group(g) => out.extend(g.free_indices()),
            }
        }
        out
    }

    /// Indices occurring once, in order of appearance.
    pub fn free_indices(&self) -> Vec<Index> {
        let occ = self.occurrences();
        let mut counts: BTreeMap<&str, usize> = BTreeMap::new();
        for i in &occ {
            *counts.entry(i.name.as_str()).or_default() += 1;
        }
        occ.iter().filter(|i| counts[i.name.as_str()] == 1).cloned().collect()
    }

    /// Names of dummy pairs, in order of first appearance.
    pub fn dummy_names(&self) -> Vec<String> {
        let occ = self.occurrences();
        let mut counts: BTreeMap<&str, usize> = BTreeMap::new();
        for i in &occ {
            *counts.entry(i.name.as_str()).or_default() += 1;
        }
        let mut seen = BTreeSet::new();
        let mut out = Vec::new();
        for i in &occ {
            if counts[i.name.as_str()] >= 2 && seen.insert(i.name.clone()) {
                out.push(i.name.clone());
            }
        }
        out
    }

    /// All index names used anywhere in the term, including inside groups.
    pub fn all_names(&self) -> BTreeSet<String> {
        let mut out = BTreeSet::new();
        collect_names_term(self, &mut out);
        out
    }

    /// Checks the pairing rules: a name occurs at most twice, and a repeated
    /// name pairs an upper with a lower slot.
    pub fn check_pairing(&self) -> Result<(), ExprError> {
        let occ = self.occurrences();
        let mut by_name: BTreeMap<&str, Vec<Variance>> = BTreeMap::new();
        for i in &occ {
            by_name.entry(i.name.as_str()).or_default().push(i.variance);
        }
        for (name, vs) in by_name {
            match vs.len() {
                1 => {}
                2 if vs[0] != vs[1] => {}
                2 => return Err(ExprError::RepeatedIndex(name.into())),
                _ => return Err(ExprError::IndexOverused(name.into())),
            }
        }
        for f in &self.factors {
            if let Factor::Group(g) = f {
                for t in &g.terms {
                    t.check_pairing()?;
                }
            }
        }
        Ok(())
    }

    /// Renames indices everywhere in the term, groups included.
    pub fn rename(&mut self, map: &BTreeMap<String, String>) {
        if map.is_empty() {
            return;
        }
        for f in &mut self.factors {
            match f {
                Factor::Tensor(t) => t.rename(map),
                Factor::Group(g) => {
                    for t in &mut g.terms {
                        t.rename(map);
                    }
                }
            }
        }
    }

    /// Renames the dummies of `self` that collide with `avoid` to fresh names.
    pub fn freshen_dummies(&mut self, avoid: &BTreeSet<String>, sets: &IndexSets) -> Result<(), ExprError> {
        let mut used: BTreeSet<String> = avoid.clone();
        used.extend(self.all_names());
        let mut map = BTreeMap::new();
        for d in self.dummy_names() {
            if avoid.contains(&d) {
                let fresh = sets.fresh(Some(&d), &used).ok_or(ExprError::IndexSetExhausted)?;
                used.insert(fresh.clone());
                map.insert(d, fresh);
            }
        }
        self.rename(&map);
        Ok(())
    }

    /// Product of two terms with dummy collisions resolved by renaming the
    /// right operand's dummies (then the left's, if a free index of the
    /// right operand hits one of them).
    pub fn times(&self, rhs: &Term, sets: &IndexSets) -> Result<Term, ExprError> {
        let mut left = self.clone();
        let mut right = rhs.clone();
        right.freshen_dummies(&left.all_names(), sets)?;
        let right_free: BTreeSet<String> = right.free_indices().into_iter().map(|i| i.name).collect();
        let mut avoid = right.all_names();
        avoid.retain(|n| right_free.contains(n));
        let clash: BTreeSet<String> = left.dummy_names().into_iter().filter(|d| avoid.contains(d)).collect();
        if !clash.is_empty() {
            let mut all = right.all_names();
            all.extend(left.all_names());
            let mut map = BTreeMap::new();
            for d in clash {
                let fresh = sets.fresh(Some(&d), &all).ok_or(ExprError::IndexSetExhausted)?;
                all.insert(fresh.clone());
                map.insert(d, fresh);
            }
            left.rename(&map);
        }
        left.coeff *= right.coeff;
        left.factors.extend(right.factors);
        Ok(left)
    }
}

fn collect_names_term(t: &Term, out: &mut BTreeSet<String>) {
    for f in &t.factors {
        match f {
            Factor::Tensor(x) => out.extend(x.iter_slots().map(|i| i.name.clone())),
            Factor::Group(g) => {
                for t in &g.terms {
                    collect_names_term(t, out);
                }
            }
        }
    }
}

/// A sum of terms. The empty sum is zero.
#[derive(Clone, Debug, Default, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct Expr {
    pub terms: Vec<Term>,
}

impl Expr {
    pub fn zero() -> Self {
        Expr { terms: Vec::new() }
    }

    pub fn number(r: Rational) -> Self {
        if r.is_zero() {
            Expr::zero()
        } else {
            Expr { terms: alloc::vec![Term::number(r)] }
        }
    }

    pub fn from_term(t: Term) -> Self {
        Expr { terms: alloc::vec![t] }
    }

    pub fn from_tensor(t: Tensor) -> Self {
        Expr::from_term(Term::tensor(t))
    }

    pub fn from_terms(terms: Vec<Term>) -> Self {
        Expr { terms }
    }

    pub fn is_zero(&self) -> bool {
        self.terms.iter().all(|t| t.coeff.is_zero())
    }

    /// Free indices of the sum (those of its first term), sorted.
    pub fn free_indices(&self) -> Vec<Index> {
        let mut v = self.terms.first().map(Term::free_indices).unwrap_or_default();
        v.sort();
        v
    }

    /// Verifies that all terms carry the same free indices and that every
    /// term obeys the dummy pairing rules.
    pub fn check(&self) -> Result<(), ExprError> {
        let mut reference: Option<Vec<Index>> = None;
        for t in &self.terms {
            t.check_pairing()?;
            for f in &t.factors {
                if let Factor::Group(g) = f {
                    g.check()?;
                }
            }
            let mut free = t.free_indices();
            free.sort();
            match &reference {
                None => reference = Some(free),
                Some(r) if *r == free => {}
                Some(r) => {
                    return Err(ExprError::FreeIndexMismatch {
                        left: render_indices(r),
                        right: render_indices(&free),
                    })
                }
            }
        }
        Ok(())
    }

    pub fn scaled(mut self, r: &Rational) -> Self {
        for t in &mut self.terms {
            t.coeff *= r;
        }
        if r.is_zero() {
            self.terms.clear();
        }
        self
    }

    /// Concatenates the terms of two sums without merging.
    pub fn plus_raw(mut self, other: Expr) -> Self {
        self.terms.extend(other.terms);
        self
    }

    /// Removes redundant grouping: one-term groups are spliced into their
    /// product, a term that is nothing but a group becomes several terms, and
    /// zero terms are dropped. Term order is preserved.
    pub fn flatten(self) -> Expr {
        let mut out = Vec::new();
        for t in self.terms {
            flatten_term(t, &mut out);
        }
        Expr { terms: out }
    }

    /// Normal form: flattened, equal terms merged, zero terms dropped and
    /// terms sorted. Idempotent.
    pub fn normalize(self) -> Expr {
        let flat = self.flatten();
        let mut terms: Vec<Term> = flat
            .terms
            .into_iter()
            .map(|mut t| {
                for f in &mut t.factors {
                    if let Factor::Group(g) = f {
                        *g = core::mem::take(g).normalize();
                    }
                }
                t
            })
            .collect();
        // Normalizing groups may have produced splice-able groups.
        terms = Expr { terms }.flatten().terms;
        let mut merged = merge_terms(terms);
        merged.sort_by(term_order);
        Expr { terms: merged }
    }
}

fn render_indices(v: &[Index]) -> String {
    let mut s = String::from("{");
    for (k, i) in v.iter().enumerate() {
        if k > 0 {
            s.push(',');
        }
        s.push_str(&alloc::format!("{}", i));
    }
    s.push('}');
    s
}

fn flatten_term(mut t: Term, out: &mut Vec<Term>) {
    if t.coeff.is_zero() {
        return;
    }
    let mut factors = Vec::with_capacity(t.factors.len());
    for f in core::mem::take(&mut t.factors) {
        match f {
            Factor::Group(g) => {
                let g = g.flatten();
                match g.terms.len() {
                    0 => return,
                    1 => {
                        let inner = g.terms.into_iter().next().unwrap();
                        t.coeff *= inner.coeff;
                        factors.extend(inner.factors);
                    }
                    _ => factors.push(Factor::Group(g)),
                }
            }
            f => factors.push(f),
        }
    }
    if factors.len() == 1 {
        if let Factor::Group(g) = &factors[0] {
            for inner in &g.terms {
                let mut x = inner.clone();
                x.coeff *= &t.coeff;
                flatten_term(x, out);
            }
            return;
        }
    }
    t.factors = factors;
    out.push(t);
}

/// Merges terms that agree up to coefficient, keeping first-occurrence order,
/// and drops zeros.
pub fn merge_terms(terms: Vec<Term>) -> Vec<Term> {
    let mut out: Vec<Term> = Vec::new();
    let mut slot: BTreeMap<Vec<Factor>, usize> = BTreeMap::new();
    for t in terms {
        if let Some(&k) = slot.get(&t.factors) {
            out[k].coeff += t.coeff;
        } else {
            slot.insert(t.factors.clone(), out.len());
            out.push(t);
        }
    }
    out.retain(|t| !t.coeff.is_zero());
    out
}

fn factor_order(a: &Factor, b: &Factor) -> Ordering {
    match (a, b) {
        (Factor::Tensor(x), Factor::Tensor(y)) => {
            let vx: Vec<Variance> = x.iter_slots().map(|i| i.variance).collect();
            let vy: Vec<Variance> = y.iter_slots().map(|i| i.variance).collect();
            let nx: Vec<&str> = x.iter_slots().map(|i| i.name.as_str()).collect();
            let ny: Vec<&str> = y.iter_slots().map(|i| i.name.as_str()).collect();
            let wx: Vec<&str> = x.wrappers.iter().map(|w| w.op.as_str()).collect();
            let wy: Vec<&str> = y.wrappers.iter().map(|w| w.op.as_str()).collect();
            (x.head.as_str(), wx, vx, nx).cmp(&(y.head.as_str(), wy, vy, ny))
        }
        (Factor::Tensor(_), Factor::Group(_)) => Ordering::Less,
        (Factor::Group(_), Factor::Tensor(_)) => Ordering::Greater,
        (Factor::Group(x), Factor::Group(y)) => x.cmp(y),
    }
}

/// Order used by [`Expr::normalize`]: factor by factor on (head, variances,
/// names), shorter products first, then coefficient.
pub fn term_order(a: &Term, b: &Term) -> Ordering {
    for (x, y) in a.factors.iter().zip(&b.factors) {
        match factor_order(x, y) {
            Ordering::Equal => {}
            o => return o,
        }
    }
    a.factors.len().cmp(&b.factors.len()).then_with(|| a.coeff.cmp(&b.coeff))
}

/// A substitution rule `lhs -> rhs`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Rule {
    pub lhs: Expr,
    pub rhs: Expr,
}

/// Free indices of `e`, as a sorted multiset.
pub fn free_indices(e: &Expr) -> Vec<Index> {
    e.free_indices()
}

/// Sum of two expressions in normal form. Fails when the operands carry
/// different free indices (zero is compatible with anything).
pub fn add(a: &Expr, b: &Expr) -> Result<Expr, ExprError> {
    let sum = a.clone().plus_raw(b.clone()).flatten();
    if !a.is_zero() && !b.is_zero() && a.free_indices() != b.free_indices() {
        return Err(ExprError::FreeIndexMismatch {
            left: render_indices(&a.free_indices()),
            right: render_indices(&b.free_indices()),
        });
    }
    sum.check()?;
    Ok(sum.normalize())
}

/// Tensor product, distributed over both sums. Dummy name collisions are
/// resolved by renaming; a free name shared with the same variance is an error.
pub fn tensor_product(a: &Expr, b: &Expr, sets: &IndexSets) -> Result<Expr, ExprError> {
    let mut terms = Vec::new();
    for x in &a.clone().flatten().terms {
        for y in &b.clone().flatten().terms {
            let t = x.times(y, sets)?;
            t.check_pairing()?;
            terms.push(t);
        }
    }
    Ok(Expr { terms }.flatten())
}

/// Contracts the last upper slot with the last lower slot of every term,
/// turning them into a dummy pair with a fresh name.
pub fn contract_last(e: &Expr, sets: &IndexSets) -> Result<Expr, ExprError> {
    let mut out = Vec::new();
    for t in &e.clone().flatten().terms {
        let mut t = t.clone();
        let free = t.free_indices();
        let up = free.iter().rev().find(|i| i.variance == Variance::Upper).cloned();
        let down = free.iter().rev().find(|i| i.variance == Variance::Lower).cloned();
        let (up, down) = match (up, down) {
            (Some(u), Some(d)) => (u, d),
            _ => return Err(ExprError::NoContractibleSlots),
        };
        let used = t.all_names();
        let fresh = sets.fresh(Some(&up.name), &used).ok_or(ExprError::IndexSetExhausted)?;
        let mut map = BTreeMap::new();
        map.insert(up.name.clone(), fresh.clone());
        map.insert(down.name.clone(), fresh);
        t.rename(&map);
        out.push(t);
    }
    Ok(Expr { terms: out })
}

/// Number of upper and lower free slots, `[p, q]`.
pub fn valence(e: &Expr) -> (usize, usize) {
    let free = e.free_indices();
    let p = free.iter().filter(|i| i.variance == Variance::Upper).count();
    (p, free.len() - p)
}
