//! Random well-formed tensor expressions and monomials.

use std::collections::BTreeSet;

use rand::rngs::StdRng;
use rand::seq::{IndexedRandom, SliceRandom};
use rand::Rng;
use tensorkernel_core::properties::PropertyTable;
use tensorkernel_core::rational::ratio;
use tensorkernel_core::{Expr, Factor, Index, Rational, Tensor, Term, Variance};
use tensorkernel_oracles::orbit::OracleFactor;

/// Index names the generators draw from, in declaration order.
pub const POOL: [&str; 12] = ["a", "b", "c", "d", "e", "f", "g", "h", "i", "j", "k", "l"];

/// Declarations shared by the random suites.
pub const DECLS: &[&str] = &[
    "{a,b,c,d,e,f,g,h,i,j,k,l,m,n,o,p,q,r,s,t,u#}::Indices.",
    "g_{a b}::Metric.",
    "g_{a}^{b}::KroneckerDelta.",
    r"\partial_{#}::PartialDerivative.",
    "R_{a b c d}::RiemannTensor.",
    "F_{a b}::TableauSymmetry(shape={1,1}, indices={0,1}).",
    "S_{a b}::TableauSymmetry(shape={2}, indices={0,1}).",
    "W_{a b c}::TableauSymmetry(shape={1,1,1}, indices={0,1,2}).",
];

/// Declarations for the orbit comparison: only the index set and the
/// symmetric heads; `with_metric` adds a metric so dummies may flip.
pub fn orbit_decls(with_metric: bool) -> Vec<&'static str> {
    let mut d = vec![
        "{a,b,c,d,e,f,g,h}::Indices.",
        "R_{a b c d}::RiemannTensor.",
        "F_{a b}::TableauSymmetry(shape={1,1}, indices={0,1}).",
        "S_{a b}::TableauSymmetry(shape={2}, indices={0,1}).",
        "W_{a b c}::TableauSymmetry(shape={1,1,1}, indices={0,1,2}).",
        "Y_{a b c}::TableauSymmetry(shape={2,1}, indices={0,2,1}).",
    ];
    if with_metric {
        d.push("g_{a b}::Metric.");
    }
    d
}

fn heads_of_arity(k: usize) -> &'static [&'static str] {
    match k {
        1 => &["V", "A"],
        2 => &["F", "S", "U"],
        3 => &["W", "T", "Y"],
        _ => &["R"],
    }
}

fn variance(rng: &mut StdRng) -> Variance {
    if rng.random_bool(0.5) {
        Variance::Upper
    } else {
        Variance::Lower
    }
}

pub fn coefficient(rng: &mut StdRng) -> Rational {
    let (n, d) = *[(1, 1), (-1, 1), (2, 1), (-3, 1), (1, 2), (-2, 3), (5, 4)].choose(rng).unwrap();
    ratio(n, d)
}

/// `count` distinct names from `pool` avoiding `used`.
fn pick_names(rng: &mut StdRng, pool: &[&str], used: &BTreeSet<String>, count: usize) -> Vec<String> {
    let mut avail: Vec<String> = pool.iter().map(|s| s.to_string()).filter(|s| !used.contains(s)).collect();
    avail.shuffle(rng);
    avail.truncate(count);
    avail
}

/// Slots for one term: the free indices plus `pairs` dummy pairs, shuffled.
fn term_slots(rng: &mut StdRng, free: &[Index], pairs: usize) -> Vec<Index> {
    let used: BTreeSet<String> = free.iter().map(|i| i.name.clone()).collect();
    let mut slots = free.to_vec();
    for n in pick_names(rng, &POOL, &used, pairs) {
        let v = variance(rng);
        slots.push(Index::new(n.clone(), v));
        slots.push(Index::new(n, v.flip()));
    }
    slots.shuffle(rng);
    slots
}

fn has_pair(slots: &[Index]) -> bool {
    slots.iter().enumerate().any(|(k, i)| slots[..k].iter().any(|j| j.name == i.name))
}

/// A tensor on exactly `slots`, sometimes behind a partial derivative.
fn tensor_on(rng: &mut StdRng, slots: Vec<Index>, allow_metric: bool) -> Tensor {
    let k = slots.len();
    if k >= 2 && rng.random_bool(0.2) {
        let (d, rest) = slots.split_at(1);
        let head = *heads_of_arity(rest.len()).choose(rng).unwrap();
        return Tensor::new(head, rest.to_vec()).wrapped(r"\partial", d.to_vec());
    }
    if k == 2 && allow_metric && !has_pair(&slots) && rng.random_bool(0.3) {
        return Tensor::new("g", slots);
    }
    Tensor::new(*heads_of_arity(k).choose(rng).unwrap(), slots)
}

/// Splits `slots` into factors of arity 1..=4, occasionally as groups.
fn factors_on(rng: &mut StdRng, slots: Vec<Index>, allow_groups: bool, allow_metric: bool) -> Vec<Factor> {
    let mut out = Vec::new();
    let mut rest = slots;
    while !rest.is_empty() {
        let k = rng.random_range(1..=rest.len().min(4));
        let chunk: Vec<Index> = rest.drain(..k).collect();
        if allow_groups && rng.random_bool(0.15) {
            let n = rng.random_range(2..=3);
            let terms = (0..n)
                .map(|_| {
                    let mut s = chunk.clone();
                    s.shuffle(rng);
                    Term::new(coefficient(rng), vec![Factor::Tensor(tensor_on(rng, s, allow_metric))])
                })
                .collect();
            out.push(Factor::Group(Expr::from_terms(terms)));
        } else {
            out.push(Factor::Tensor(tensor_on(rng, chunk, allow_metric)));
        }
    }
    out
}

/// Options for [`random_expr`].
#[derive(Clone, Copy, Debug)]
pub struct GenOptions {
    pub max_terms: usize,
    pub max_free: usize,
    pub max_pairs: usize,
    pub groups: bool,
    pub metric: bool,
}

impl Default for GenOptions {
    fn default() -> Self {
        GenOptions { max_terms: 3, max_free: 3, max_pairs: 2, groups: true, metric: true }
    }
}

/// A random sum whose terms share one set of free indices.
pub fn random_expr(rng: &mut StdRng, o: GenOptions) -> Expr {
    let nfree = rng.random_range(0..=o.max_free);
    let free: Vec<Index> =
        pick_names(rng, &POOL, &BTreeSet::new(), nfree).into_iter().map(|n| Index::new(n, variance(rng))).collect();
    let nterms = rng.random_range(1..=o.max_terms);
    let terms = (0..nterms)
        .map(|_| {
            let min_pairs = usize::from(free.is_empty());
            let pairs = rng.random_range(min_pairs..=o.max_pairs.max(min_pairs));
            let slots = term_slots(rng, &free, pairs);
            Term::new(coefficient(rng), factors_on(rng, slots, o.groups, o.metric))
        })
        .collect();
    let e = Expr::from_terms(terms);
    e.check().unwrap_or_else(|err| panic!("generator produced an invalid expression {:?}: {}", e, err));
    e
}

/// A random product of bare tensors with symmetries, at most `max_slots`
/// slots, names drawn from the first eight pool entries.
pub fn random_monomial(rng: &mut StdRng, max_slots: usize) -> Term {
    let mut arities = Vec::new();
    let mut total = 0;
    loop {
        let k = rng.random_range(1..=4usize);
        if total + k > max_slots {
            break;
        }
        arities.push(k);
        total += k;
        if rng.random_bool(0.3) {
            break;
        }
    }
    if arities.is_empty() {
        arities.push(1);
        total = 1;
    }
    let pairs = rng.random_range(0..=total / 2);
    let nfree = total - 2 * pairs;
    let names = pick_names(rng, &POOL[..8], &BTreeSet::new(), pairs + nfree);
    let mut slots = Vec::new();
    for (k, n) in names.iter().enumerate() {
        let v = variance(rng);
        slots.push(Index::new(n.clone(), v));
        if k < pairs {
            slots.push(Index::new(n.clone(), v.flip()));
        }
    }
    slots.shuffle(rng);
    let mut factors = Vec::new();
    for k in arities {
        let chunk: Vec<Index> = slots.drain(..k).collect();
        let head = match k {
            1 => "V",
            2 => *["F", "S", "U"].choose(rng).unwrap(),
            3 => *["W", "T", "Y"].choose(rng).unwrap(),
            _ => "R",
        };
        factors.push(Factor::Tensor(Tensor::new(head, chunk)));
    }
    Term::new(Rational::from_integer(1.into()), factors)
}

/// The oracle's view of a monomial: slots and generators per factor.
pub fn oracle_factors(t: &Term, props: &PropertyTable) -> Vec<OracleFactor> {
    t.tensors()
        .map(|x| OracleFactor {
            slots: x.flat_slots().iter().map(|i| (i.name.clone(), i.variance == Variance::Upper)).collect(),
            generators: props.slot_generators(x).into_iter().map(|g| (g.perm, g.sign)).collect(),
        })
        .collect()
}

/// Slots of every factor of a canonicalised monomial as oracle data.
pub fn slot_data(t: &Term) -> Vec<Vec<(String, bool)>> {
    t.tensors()
        .map(|x| x.flat_slots().iter().map(|i| (i.name.clone(), i.variance == Variance::Upper)).collect())
        .collect()
}
