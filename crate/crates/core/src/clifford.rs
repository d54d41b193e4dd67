//! Gamma-matrix algebra on abstract indices.
//!
//! A gamma factor `\gamma_{a1 ... ap}` denotes the totally antisymmetrised
//! product `γ_{[a1} ... γ_{ap]}`. Products of two such factors are expanded
//! back into the antisymmetrised basis with metric coefficients, using the
//! Clifford relation `γ_a γ_b + γ_b γ_a = 2 g_{ab}`.

use alloc::string::String;
use alloc::vec::Vec;
use core::cmp::Reverse;

use num_traits::{One, Zero};
use thiserror::Error;

use crate::expr::{merge_terms, Expr, Factor, Tensor, Term};
use crate::index::{Index, NameRank};
use crate::properties::PropertyTable;
use crate::rational::{int, Rational};
use crate::rewrite::eliminate_metric;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum CliffordError {
    #[error("gamma matrix '{0}' has no declared metric")]
    MissingGammaMetric(String),
}

/// One term of an expanded gamma product: coefficient, metric index pairs
/// and the slots of the remaining antisymmetrised gamma (empty for the
/// identity).
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct CliffordTerm {
    pub coeff: Rational,
    pub metrics: Vec<(Index, Index)>,
    pub gamma: Vec<Index>,
}

fn has_repeat(slots: &[Index]) -> bool {
    slots.iter().enumerate().any(|(k, i)| slots[..k].iter().any(|j| j.name == i.name))
}

/// `γ_a γ_{b1..bq} = γ_{a b1..bq} + Σ_j (−1)^{j+1} g_{a bj} γ_{b1..(no bj)..bq}`
/// with `j` counted from 1.
pub fn clifford_step(a: &Index, b: &[Index]) -> Vec<CliffordTerm> {
    let mut out = Vec::with_capacity(b.len() + 1);
    let mut top = Vec::with_capacity(b.len() + 1);
    top.push(a.clone());
    top.extend(b.iter().cloned());
    out.push(CliffordTerm { coeff: Rational::one(), metrics: Vec::new(), gamma: top });
    for j in 0..b.len() {
        let mut rest = b.to_vec();
        let bj = rest.remove(j);
        let sign = if j % 2 == 0 { 1 } else { -1 };
        out.push(CliffordTerm { coeff: int(sign), metrics: alloc::vec![(a.clone(), bj)], gamma: rest });
    }
    out
}

/// Expansion of `γ_A γ_B` for antisymmetrised factors of any rank. The left
/// factor is split recursively through the inverted Clifford step
/// `γ_{a A'} = γ_a γ_{A'} − Σ_j (−1)^{j+1} g_{a a'_j} γ_{A' \ a'_j}`.
pub fn gamma_product(a: &[Index], b: &[Index]) -> Vec<CliffordTerm> {
    if has_repeat(a) || has_repeat(b) {
        return Vec::new();
    }
    let Some((first, rest)) = a.split_first() else {
        return alloc::vec![CliffordTerm { coeff: Rational::one(), metrics: Vec::new(), gamma: b.to_vec() }];
    };
    let mut out = Vec::new();
    for t in gamma_product(rest, b) {
        for s in clifford_step(first, &t.gamma) {
            let mut metrics = t.metrics.clone();
            metrics.extend(s.metrics);
            out.push(CliffordTerm { coeff: &t.coeff * &s.coeff, metrics, gamma: s.gamma });
        }
    }
    for j in 0..rest.len() {
        let mut shorter = rest.to_vec();
        let aj = shorter.remove(j);
        let sign = if j % 2 == 0 { -1 } else { 1 };
        for t in gamma_product(&shorter, b) {
            let mut metrics = alloc::vec![(first.clone(), aj.clone())];
            metrics.extend(t.metrics);
            out.push(CliffordTerm { coeff: t.coeff * int(sign), metrics, gamma: t.gamma });
        }
    }
    out.retain(|t| !t.coeff.is_zero() && !has_repeat(&t.gamma));
    out
}

/// Dimension of the spinor space for an `n`-dimensional Clifford algebra:
/// `2^⌊n/2⌋`. `None` if `n` is zero or the result overflows.
pub fn spinor_dimension(n: u32) -> Option<u64> {
    if n == 0 {
        return None;
    }
    1u64.checked_shl(n / 2)
}

fn is_gamma_factor(f: &Factor, props: &PropertyTable) -> bool {
    matches!(f, Factor::Tensor(t) if t.is_bare() && props.is_gamma(&t.head))
}

/// Expands one product of two adjacent gamma factors into a sum of terms.
/// Metrics created by the expansion are contracted with the product's own
/// slots (a trace becomes the dimension); like terms are merged and ordered
/// by decreasing gamma rank, then by the gamma's indices.
fn join_pair(head: &str, a: &[Index], b: &[Index], props: &PropertyTable) -> Result<Expr, CliffordError> {
    let metric = props
        .gamma_metric(head)
        .filter(|m| props.is_metric(m))
        .map(String::from)
        .ok_or_else(|| CliffordError::MissingGammaMetric(head.into()))?;
    let sets = props.index_sets();
    let dim = a.first().or(b.first()).and_then(|i| props.dimension_of(&i.name));
    let mut terms: Vec<(usize, Vec<(NameRank, bool)>, Term)> = Vec::new();
    for t in gamma_product(a, b) {
        if let Some(d) = dim {
            if t.gamma.len() as i64 > d {
                continue;
            }
        }
        let mut factors = Vec::new();
        if !t.gamma.is_empty() {
            factors.push(Factor::Tensor(Tensor::new(head, t.gamma.clone())));
        }
        for (x, y) in &t.metrics {
            let (x, y) = if sets.rank(&y.name) < sets.rank(&x.name) { (y, x) } else { (x, y) };
            factors.push(Factor::Tensor(Tensor::new(metric.clone(), alloc::vec![x.clone(), y.clone()])));
        }
        let contracted = eliminate_metric(&Expr::from_term(Term::new(t.coeff, factors)), props, true);
        for term in contracted.terms {
            let slots: Vec<Index> = term
                .tensors()
                .find(|x| x.head == head)
                .map(|x| x.slots.clone())
                .unwrap_or_default();
            let key: Vec<(NameRank, bool)> =
                slots.iter().map(|i| (sets.rank(&i.name), i.variance == crate::index::Variance::Lower)).collect();
            terms.push((slots.len(), key, term));
        }
    }
    terms.sort_by(|x, y| (Reverse(x.0), &x.1).cmp(&(Reverse(y.0), &y.1)));
    Ok(Expr::from_terms(merge_terms(terms.into_iter().map(|t| t.2).collect())))
}

/// One pass: adjacent gamma pairs are joined from the left, each factor
/// taking part in at most one join. Returns whether anything changed.
fn join_term(t: Term, props: &PropertyTable) -> Result<(Term, bool), CliffordError> {
    let mut out = Term::number(t.coeff.clone());
    let mut changed = false;
    let mut k = 0;
    while k < t.factors.len() {
        let f = &t.factors[k];
        if let Factor::Group(g) = f {
            let (g, c) = join_expr(g, props)?;
            changed |= c;
            out.factors.push(Factor::Group(g));
            k += 1;
            continue;
        }
        let pair = k + 1 < t.factors.len()
            && is_gamma_factor(f, props)
            && is_gamma_factor(&t.factors[k + 1], props)
            && f.as_tensor().map(|x| &x.head) == t.factors[k + 1].as_tensor().map(|x| &x.head);
        if pair {
            let a = f.as_tensor().unwrap();
            let b = t.factors[k + 1].as_tensor().unwrap();
            let sum = join_pair(&a.head, &a.slots, &b.slots, props)?;
            if sum.terms.is_empty() {
                return Ok((Term::number(int(0)), true));
            }
            out.factors.push(Factor::Group(sum));
            changed = true;
            k += 2;
        } else {
            out.factors.push(f.clone());
            k += 1;
        }
    }
    Ok((out, changed))
}

fn join_expr(e: &Expr, props: &PropertyTable) -> Result<(Expr, bool), CliffordError> {
    let mut out = Vec::new();
    let mut changed = false;
    for t in &e.terms {
        let (t, c) = join_term(t.clone(), props)?;
        changed |= c;
        out.push(t);
    }
    Ok((Expr::from_terms(out).flatten(), changed))
}

/// Expands products of adjacent gamma matrices into the antisymmetrised
/// basis. With `repeat`, passes continue while some product changes.
/// Results of a join stay parenthesised when other factors share the
/// product; `distribute` multiplies them out.
pub fn join(e: &Expr, props: &PropertyTable, repeat: bool) -> Result<Expr, CliffordError> {
    let (mut cur, mut changed) = join_expr(e, props)?;
    let mut rounds = 0;
    while repeat && changed && rounds < 64 {
        (cur, changed) = join_expr(&cur, props)?;
        rounds += 1;
    }
    Ok(cur)
}
