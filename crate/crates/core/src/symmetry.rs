//! Slot symmetries: signed permutations, Young tableaux, monoterm
//! canonicalisation and Young projection.

use alloc::collections::{BTreeMap, BTreeSet, VecDeque};
use alloc::string::String;
use alloc::vec;
use alloc::vec::Vec;

use num_traits::{One, Zero};
use thiserror::Error;

use crate::expr::{Expr, Factor, Tensor, Term};
use crate::index::{Index, IndexSets, NameRank, Variance};
use crate::properties::PropertyTable;
use crate::rational::{int, ratio, Rational};

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum SymmetryError {
    #[error("symmetry orbit has {size} elements, above the limit of {limit}")]
    OrbitTooLarge { size: u128, limit: u64 },
    #[error("ran out of fresh index names")]
    IndexSetExhausted,
    #[error("'{0}' carries no tableau symmetry")]
    NoSymmetry(String),
}

/// A permutation of slot positions with a sign. Acting on a tensor, the
/// content of old position `perm[i]` moves to position `i`.
#[derive(Clone, Debug, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct SignedPermutation {
    pub perm: Vec<usize>,
    pub sign: i8,
}

impl SignedPermutation {
    pub fn identity(n: usize) -> Self {
        SignedPermutation { perm: (0..n).collect(), sign: 1 }
    }

    /// The transposition of positions `i` and `j` on `n` points.
    pub fn swap(n: usize, i: usize, j: usize, sign: i8) -> Self {
        let mut p = Self::identity(n);
        p.perm.swap(i, j);
        p.sign = sign;
        p
    }

    pub fn len(&self) -> usize {
        self.perm.len()
    }

    pub fn is_empty(&self) -> bool {
        self.perm.is_empty()
    }

    pub fn is_identity(&self) -> bool {
        self.perm.iter().enumerate().all(|(i, &p)| i == p)
    }

    /// Acting with `self` first and `other` second.
    pub fn then(&self, other: &SignedPermutation) -> SignedPermutation {
        SignedPermutation { perm: other.perm.iter().map(|&i| self.perm[i]).collect(), sign: self.sign * other.sign }
    }

    pub fn apply<T: Clone>(&self, items: &[T]) -> Vec<T> {
        self.perm.iter().map(|&i| items[i].clone()).collect()
    }

    /// Lifts a permutation of `self.len()` points to `n` points, acting on
    /// positions `offset..offset + self.len()`.
    pub fn shifted(&self, offset: usize, n: usize) -> SignedPermutation {
        let mut p = Self::identity(n);
        for (i, &j) in self.perm.iter().enumerate() {
            p.perm[offset + i] = offset + j;
        }
        p.sign = self.sign;
        p
    }

    /// Parity of the underlying permutation, as ±1.
    pub fn parity(&self) -> i8 {
        let mut seen = vec![false; self.perm.len()];
        let mut s = 1i8;
        for start in 0..self.perm.len() {
            if seen[start] {
                continue;
            }
            let mut len = 0;
            let mut k = start;
            while !seen[k] {
                seen[k] = true;
                k = self.perm[k];
                len += 1;
            }
            if len % 2 == 0 {
                s = -s;
            }
        }
        s
    }
}

/// The group generated by `gens` on `n` points. Returns the elements (each
/// permutation once) and whether the identity is reachable with sign −1,
/// in which case anything with this symmetry vanishes.
pub fn close_group(n: usize, gens: &[SignedPermutation]) -> (Vec<SignedPermutation>, bool) {
    let mut seen: BTreeMap<Vec<usize>, i8> = BTreeMap::new();
    let id = SignedPermutation::identity(n);
    seen.insert(id.perm.clone(), 1);
    let mut queue = VecDeque::from([id]);
    let mut degenerate = false;
    while let Some(p) = queue.pop_front() {
        for g in gens {
            let q = p.then(g);
            match seen.get(&q.perm) {
                Some(&s) => {
                    if s != q.sign {
                        degenerate = true;
                    }
                }
                None => {
                    seen.insert(q.perm.clone(), q.sign);
                    queue.push_back(q);
                }
            }
        }
    }
    (seen.into_iter().map(|(perm, sign)| SignedPermutation { perm, sign }).collect(), degenerate)
}

/// A Young diagram with an assignment of tensor slots to its cells.
/// `indices` lists slots row by row: the first `shape[0]` entries fill the
/// first row, and so on.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Tableau {
    pub shape: Vec<usize>,
    pub indices: Vec<usize>,
}

impl Tableau {
    pub fn new(shape: Vec<usize>, indices: Vec<usize>) -> Result<Self, String> {
        if shape.iter().any(|&r| r == 0) || shape.windows(2).any(|w| w[0] < w[1]) {
            return Err(alloc::format!("shape {:?} is not a weakly decreasing list of positive rows", shape));
        }
        let n: usize = shape.iter().sum();
        let mut sorted = indices.clone();
        sorted.sort_unstable();
        if sorted != (0..n).collect::<Vec<_>>() {
            return Err(alloc::format!("indices {:?} are not a permutation of 0..{}", indices, n));
        }
        Ok(Tableau { shape, indices })
    }

    /// The tableau of the Riemann tensor, `young(ac,bd)`.
    pub fn riemann() -> Self {
        Tableau { shape: vec![2, 2], indices: vec![0, 2, 1, 3] }
    }

    /// The tableau of `\nabla_{e}{R_{a b c d}}`, `young(ace,bd)`; slot 0 is
    /// the derivative index.
    pub fn bianchi() -> Self {
        Tableau { shape: vec![3, 2], indices: vec![1, 3, 0, 2, 4] }
    }

    pub fn size(&self) -> usize {
        self.indices.len()
    }

    pub fn rows(&self) -> Vec<Vec<usize>> {
        let mut out = Vec::new();
        let mut k = 0;
        for &r in &self.shape {
            out.push(self.indices[k..k + r].to_vec());
            k += r;
        }
        out
    }

    pub fn columns(&self) -> Vec<Vec<usize>> {
        let rows = self.rows();
        (0..self.shape[0]).map(|c| rows.iter().filter(|r| r.len() > c).map(|r| r[c]).collect()).collect()
    }

    /// Monoterm generators: antisymmetry inside each column (adjacent
    /// transpositions, sign −1) and exchange of adjacent columns of equal
    /// length (sign +1).
    pub fn generators(&self) -> Vec<SignedPermutation> {
        let n = self.size();
        let cols = self.columns();
        let mut out = Vec::new();
        for col in &cols {
            for w in col.windows(2) {
                out.push(SignedPermutation::swap(n, w[0], w[1], -1));
            }
        }
        for w in cols.windows(2) {
            if w[0].len() == w[1].len() {
                let mut p = SignedPermutation::identity(n);
                for (&x, &y) in w[0].iter().zip(&w[1]) {
                    p.perm.swap(x, y);
                }
                out.push(p);
            }
        }
        out
    }

    /// Number of standard tableaux of this shape (hook-length formula).
    pub fn standard_count(&self) -> u64 {
        let n = self.size() as u64;
        let num: u64 = (1..=n).product();
        let mut hooks: u64 = 1;
        for (i, &len) in self.shape.iter().enumerate() {
            for j in 0..len {
                let arm = len - j - 1;
                let leg = self.shape[i + 1..].iter().filter(|&&l| l > j).count();
                hooks *= (arm + leg + 1) as u64;
            }
        }
        num / hooks
    }

    /// The normalised Young projector as an element of the group algebra:
    /// `c · Σ_{col} Σ_{row} sign(col) · (col ∘ row)` with `c = f/n!`, where
    /// `f` is the number of standard tableaux. A tensor occurrence with slots
    /// `x` projects to `Σ c_g T(x ∘ g)`, so the column antisymmetrizer stands
    /// on the left: any sum of occurrences that antisymmetrizes more slots
    /// than a column holds is annihilated.
    pub fn projector(&self) -> GroupAlgebra {
        let n = self.size();
        let row_group = product_group(n, &self.rows(), false);
        let col_group = product_group(n, &self.columns(), true);
        let mut terms: BTreeMap<Vec<usize>, Rational> = BTreeMap::new();
        for s in &row_group {
            for a in &col_group {
                let p = a.then(s);
                *terms.entry(p.perm).or_insert_with(Rational::zero) += int(p.sign as i64);
            }
        }
        let fact: u64 = (1..=n as u64).product();
        let c = ratio(self.standard_count() as i64, fact as i64);
        let mut alg = GroupAlgebra { n, terms };
        alg.scale(&c);
        alg
    }
}

/// All permutations of `n` points that permute each block among itself;
/// signed by parity when `signed`.
fn product_group(n: usize, blocks: &[Vec<usize>], signed: bool) -> Vec<SignedPermutation> {
    let mut gens = Vec::new();
    for b in blocks {
        for w in b.windows(2) {
            gens.push(SignedPermutation::swap(n, w[0], w[1], if signed { -1 } else { 1 }));
        }
    }
    close_group(n, &gens).0
}

/// Formal linear combination of permutations with rational coefficients.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct GroupAlgebra {
    pub n: usize,
    pub terms: BTreeMap<Vec<usize>, Rational>,
}

impl GroupAlgebra {
    pub fn scale(&mut self, c: &Rational) {
        for v in self.terms.values_mut() {
            *v *= c;
        }
        self.terms.retain(|_, v| !v.is_zero());
    }

    /// `self` acting first, then `other`.
    pub fn then(&self, other: &GroupAlgebra) -> GroupAlgebra {
        let mut terms: BTreeMap<Vec<usize>, Rational> = BTreeMap::new();
        for (p, x) in &self.terms {
            for (q, y) in &other.terms {
                let r: Vec<usize> = q.iter().map(|&i| p[i]).collect();
                *terms.entry(r).or_insert_with(Rational::zero) += x * y;
            }
        }
        terms.retain(|_, v| !v.is_zero());
        GroupAlgebra { n: self.n, terms }
    }

    /// Number of permutations with a nonzero coefficient.
    pub fn support(&self) -> usize {
        self.terms.len()
    }
}

// ----- canonicalisation ---------------------------------------------------

/// Default cap on the number of orbit elements examined per monomial.
pub const DEFAULT_MAX_ORBIT: u64 = 1_000_000;

/// Brings every monomial to its canonical representative: the minimum,
/// over all slot symmetries of every factor, all admissible dummy variance
/// exchanges and dummy renamings, of the slot sequence ordered by variance
/// (upper first) then index-name rank. A monomial equal to its own negative
/// is dropped. Factor order is not changed.
pub fn canonicalise(e: &Expr, props: &PropertyTable, max_orbit: u64) -> Result<Expr, SymmetryError> {
    let mut out = Vec::new();
    for t in &e.terms {
        if let Some(t) = canonicalise_term(t, props, max_orbit, true)? {
            out.push(t);
        }
    }
    Ok(Expr::from_terms(out))
}

type SlotKey = Vec<(Variance, NameRank)>;

fn canonicalise_term(
    t: &Term,
    props: &PropertyTable,
    max_orbit: u64,
    rename: bool,
) -> Result<Option<Term>, SymmetryError> {
    let mut term = t.clone();
    // Groups: canonicalise their own terms, names held fixed.
    let has_groups = term.has_groups();
    for f in &mut term.factors {
        if let Factor::Group(g) = f {
            let mut inner = Vec::new();
            for it in &g.terms {
                if let Some(x) = canonicalise_term(it, props, max_orbit, false)? {
                    inner.push(x);
                }
            }
            if inner.is_empty() {
                return Ok(None);
            }
            g.terms = inner;
        }
    }
    let rename = rename && !has_groups;
    let positions: Vec<usize> =
        term.factors.iter().enumerate().filter(|(_, f)| matches!(f, Factor::Tensor(_))).map(|(k, _)| k).collect();
    let tensors: Vec<Tensor> = positions.iter().map(|&k| term.factors[k].as_tensor().unwrap().clone()).collect();
    let mut groups: Vec<Vec<SignedPermutation>> = Vec::new();
    let mut size: u128 = 1;
    for x in &tensors {
        let gens = props.slot_generators(x);
        let (g, degenerate) = close_group(x.arity(), &gens);
        if degenerate {
            return Ok(None);
        }
        size = size.saturating_mul(g.len() as u128);
        groups.push(g);
    }
    let sets = props.index_sets();
    let free: BTreeSet<String> = term.free_indices().into_iter().map(|i| i.name).collect();
    let dummies: Vec<String> = if rename { term.dummy_names() } else { Vec::new() };
    let flippable: Vec<String> =
        dummies.iter().filter(|d| props.metric_for_index(d).is_some()).cloned().collect();
    size = size.saturating_mul(1u128 << flippable.len().min(100));
    if size > max_orbit as u128 {
        return Err(SymmetryError::OrbitTooLarge { size, limit: max_orbit });
    }
    let dummy_set: BTreeSet<&str> = dummies.iter().map(String::as_str).collect();

    let mut best: Option<(SlotKey, BTreeSet<i8>, Vec<Vec<Index>>)> = None;
    let mut choice = vec![0usize; tensors.len()];
    loop {
        let mut sign = 1i8;
        let mut permuted: Vec<Vec<Index>> = Vec::with_capacity(tensors.len());
        for (k, x) in tensors.iter().enumerate() {
            let g = &groups[k][choice[k]];
            sign *= g.sign;
            permuted.push(g.apply(&x.flat_slots()));
        }
        for mask in 0..(1u64 << flippable.len()) {
            let mut image = permuted.clone();
            if mask != 0 {
                for slots in &mut image {
                    for s in slots.iter_mut() {
                        if let Some(b) = flippable.iter().position(|d| *d == s.name) {
                            if mask >> b & 1 == 1 {
                                s.variance = s.variance.flip();
                            }
                        }
                    }
                }
            }
            if rename {
                relabel(&mut image, &dummy_set, &free, sets)?;
            }
            let key: SlotKey =
                image.iter().flatten().map(|i| (i.variance, sets.rank(&i.name))).collect();
            match &mut best {
                Some((k, signs, _)) if *k == key => {
                    signs.insert(sign);
                }
                Some((k, _, _)) if *k < key => {}
                _ => best = Some((key, BTreeSet::from([sign]), image)),
            }
        }
        let mut k = 0;
        loop {
            if k == tensors.len() {
                let (_, signs, image) = best.expect("orbit contains the monomial itself");
                if signs.len() > 1 {
                    return Ok(None);
                }
                let sign = *signs.iter().next().unwrap();
                for ((pos, x), slots) in positions.iter().zip(tensors).zip(image) {
                    let mut x = x;
                    x.set_flat_slots(slots);
                    term.factors[*pos] = Factor::Tensor(x);
                }
                if sign < 0 {
                    term.coeff = -term.coeff;
                }
                return Ok(Some(term));
            }
            choice[k] += 1;
            if choice[k] < groups[k].len() {
                break;
            }
            choice[k] = 0;
            k += 1;
        }
    }
}

/// Renames dummies in order of first appearance to the first names of
/// their index set that are not free in the monomial.
fn relabel(
    image: &mut [Vec<Index>],
    dummies: &BTreeSet<&str>,
    free: &BTreeSet<String>,
    sets: &IndexSets,
) -> Result<(), SymmetryError> {
    let mut map: BTreeMap<String, String> = BTreeMap::new();
    let mut used: BTreeSet<String> = free.clone();
    for slots in image.iter() {
        for s in slots {
            if dummies.contains(s.name.as_str()) && !map.contains_key(&s.name) {
                let fresh = sets.fresh(Some(&s.name), &used).ok_or(SymmetryError::IndexSetExhausted)?;
                used.insert(fresh.clone());
                map.insert(s.name.clone(), fresh);
            }
        }
    }
    for slots in image.iter_mut() {
        for s in slots.iter_mut() {
            if let Some(n) = map.get(&s.name) {
                s.name = n.clone();
            }
        }
    }
    Ok(())
}

// ----- Young projection -----------------------------------------------------

/// Replaces every tensor carrying a tableau symmetry by its Young
/// projection, expanded into a sum of slot-permuted copies.
pub fn young_project(e: &Expr, props: &PropertyTable) -> Expr {
    let mut out = Vec::new();
    for t in &e.terms {
        let mut partial = vec![Term::new(t.coeff.clone(), Vec::new())];
        for f in &t.factors {
            let images: Vec<(Rational, Factor)> = match f {
                Factor::Tensor(x) => match props.tableau_for(x) {
                    Some(tab) => project_tensor(x, &tab),
                    None => vec![(Rational::one(), f.clone())],
                },
                Factor::Group(g) => vec![(Rational::one(), Factor::Group(young_project(g, props)))],
            };
            let mut next = Vec::with_capacity(partial.len() * images.len());
            for p in &partial {
                for (c, img) in &images {
                    let mut q = p.clone();
                    q.coeff *= c;
                    q.factors.push(img.clone());
                    next.push(q);
                }
            }
            partial = next;
        }
        out.extend(partial);
    }
    Expr::from_terms(out)
}

fn project_tensor(x: &Tensor, tab: &Tableau) -> Vec<(Rational, Factor)> {
    let slots = x.flat_slots();
    tab.projector()
        .terms
        .into_iter()
        .map(|(perm, c)| {
            let mut y = x.clone();
            y.set_flat_slots(perm.iter().map(|&i| slots[i].clone()).collect());
            (c, Factor::Tensor(y))
        })
        .collect()
}
