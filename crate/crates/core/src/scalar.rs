//! A small exact scalar algebra for component calculations.
//!
//! A [`Scalar`] is a sum of monomials with rational coefficients. A monomial
//! is a product of [`Atom`]s raised to nonzero integer powers. Atoms are
//! symbols, unknown functions (with the coordinates they depend on), formal
//! partial derivatives of unknown functions, and opaque applications:
//! `abs`, `sqrt`, `sin`, `cos`, `exp`, `log` and the reciprocal of a sum.
//!
//! Every constructor returns the normal form, so structural equality is the
//! equality test. Normalisation rules:
//! * `abs(u)^(2k) = u^(2k)` and `sqrt(u)^(2k) = u^k`;
//! * `abs` of a monomial splits into factors, even powers lose the `abs`;
//! * `sqrt` of a monomial extracts perfect squares, through `abs`
//!   (`sqrt(r^2) = abs(r)`: no sign is ever assumed);
//! * the reciprocal of a monomial negates exponents; the reciprocal of a
//!   sum is an atom, stored with its first coefficient scaled to one.
//!
//! [`Scalar::simplify`] additionally cancels a reciprocal against an exact
//! multiple of its own sum.

use alloc::boxed::Box;
use alloc::collections::{BTreeMap, BTreeSet};
use alloc::string::{String, ToString};
use alloc::vec::Vec;
use core::fmt;

use num_traits::{One, Signed, Zero};
use thiserror::Error;

use crate::rational::{int, is_integer, sqrt_exact, to_f64, Rational};

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum ScalarError {
    #[error("scalar syntax error at offset {pos}: {message}")]
    Parse { message: String, pos: usize },
    #[error("no value bound for '{0}'")]
    UnboundSymbol(String),
    #[error("division by zero")]
    DivisionByZero,
    #[error("exponent must be an integer or a half-integer")]
    BadExponent,
}

/// Elementary functions kept as opaque atoms.
#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum Func1 {
    Sin,
    Cos,
    Exp,
    Log,
}

impl Func1 {
    fn name(self) -> &'static str {
        match self {
            Func1::Sin => "sin",
            Func1::Cos => "cos",
            Func1::Exp => "exp",
            Func1::Log => "log",
        }
    }
}

#[derive(Clone, Debug, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum Atom {
    Sym(String),
    /// Unknown function of the listed symbols, printed by name alone.
    Func { name: String, deps: Vec<String> },
    /// Partial derivative of an unknown function; `wrt` is ordered by
    /// position in `deps`.
    Deriv { name: String, deps: Vec<String>, wrt: Vec<String> },
    Apply(Func1, Box<Scalar>),
    Abs(Box<Scalar>),
    Sqrt(Box<Scalar>),
    /// `1 / sum`, for sums of two or more terms.
    Recip(Box<Scalar>),
}

/// Product of atoms with nonzero integer exponents.
pub type Monomial = BTreeMap<Atom, i32>;

/// Sum of monomials with nonzero rational coefficients.
#[derive(Clone, Debug, Default, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct Scalar {
    terms: BTreeMap<Monomial, Rational>,
}

/// A leaf value requested by [`Scalar::eval`].
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Leaf<'a> {
    Sym(&'a str),
    Func(&'a str),
    Deriv(&'a str, &'a [String]),
}

impl Scalar {
    pub fn zero() -> Self {
        Scalar::default()
    }

    pub fn one() -> Self {
        Scalar::constant(Rational::one())
    }

    pub fn constant(c: Rational) -> Self {
        Scalar::raw(c, Monomial::new())
    }

    pub fn int(n: i64) -> Self {
        Scalar::constant(int(n))
    }

    pub fn symbol(name: &str) -> Self {
        Scalar::atom(Atom::Sym(name.to_string()))
    }

    pub fn function(name: &str, deps: &[String]) -> Self {
        Scalar::atom(Atom::Func { name: name.to_string(), deps: deps.to_vec() })
    }

    pub fn atom(a: Atom) -> Self {
        Scalar::term(Rational::one(), [(a, 1)].into_iter().collect())
    }

    /// A single term, assumed already normal.
    fn raw(c: Rational, m: Monomial) -> Self {
        let mut terms = BTreeMap::new();
        if !c.is_zero() {
            terms.insert(m, c);
        }
        Scalar { terms }
    }

    /// A single term, normalised.
    fn term(c: Rational, m: Monomial) -> Self {
        if c.is_zero() {
            return Scalar::zero();
        }
        let mut plain = Monomial::new();
        let mut extra: Option<Scalar> = None;
        let mut denominators: Vec<(Box<Scalar>, i32)> = Vec::new();
        let absorb = |s: Scalar, extra: &mut Option<Scalar>| {
            *extra = Some(match extra.take() {
                Some(e) => e.mul(&s),
                None => s,
            });
        };
        for (a, k) in m {
            if k == 0 {
                continue;
            }
            match a {
                Atom::Abs(u) if k % 2 == 0 => absorb(u.powi_unchecked(k), &mut extra),
                Atom::Sqrt(u) if k.abs() >= 2 => {
                    absorb(u.powi_unchecked(k / 2), &mut extra);
                    if k % 2 != 0 {
                        plain.insert(Atom::Sqrt(u), k % 2);
                    }
                }
                Atom::Recip(p) if k < 0 => absorb(p.powi_unchecked(-k), &mut extra),
                Atom::Recip(p) => denominators.push((p, k)),
                a => {
                    plain.insert(a, k);
                }
            }
        }
        // At most one reciprocal per monomial, over the expanded product of
        // all denominators, so that `1/(p^2)` and `1/p * 1/p` agree.
        match denominators.len() {
            0 => {}
            1 if denominators[0].1 == 1 => {
                let (p, k) = denominators.pop().unwrap();
                plain.insert(Atom::Recip(p), k);
            }
            _ => {
                let product =
                    denominators.into_iter().fold(Scalar::one(), |acc, (p, k)| acc.mul(&p.powi_unchecked(k)));
                absorb(product.recip().unwrap_or_default(), &mut extra);
            }
        }
        let base = Scalar::raw(c, plain);
        match extra {
            Some(e) => base.mul(&e),
            None => base,
        }
    }

    pub fn is_zero(&self) -> bool {
        self.terms.is_empty()
    }

    /// The value if the scalar is a rational constant.
    pub fn as_constant(&self) -> Option<Rational> {
        match self.terms.len() {
            0 => Some(Rational::zero()),
            1 => {
                let (m, c) = self.terms.iter().next().unwrap();
                m.is_empty().then(|| c.clone())
            }
            _ => None,
        }
    }

    pub fn terms(&self) -> impl Iterator<Item = (&Monomial, &Rational)> {
        self.terms.iter()
    }

    fn single(&self) -> Option<(&Monomial, &Rational)> {
        if self.terms.len() == 1 {
            self.terms.iter().next()
        } else {
            None
        }
    }

    pub fn add(&self, o: &Scalar) -> Scalar {
        let mut terms = self.terms.clone();
        for (m, c) in &o.terms {
            let slot = terms.entry(m.clone()).or_insert_with(Rational::zero);
            *slot += c;
            if slot.is_zero() {
                terms.remove(m);
            }
        }
        Scalar { terms }
    }

    pub fn neg(&self) -> Scalar {
        Scalar { terms: self.terms.iter().map(|(m, c)| (m.clone(), -c)).collect() }
    }

    pub fn sub(&self, o: &Scalar) -> Scalar {
        self.add(&o.neg())
    }

    pub fn scale(&self, r: &Rational) -> Scalar {
        if r.is_zero() {
            return Scalar::zero();
        }
        Scalar { terms: self.terms.iter().map(|(m, c)| (m.clone(), c * r)).collect() }
    }

    pub fn mul(&self, o: &Scalar) -> Scalar {
        let mut acc = Scalar::zero();
        for (m1, c1) in &self.terms {
            for (m2, c2) in &o.terms {
                let mut m = m1.clone();
                let mut needs_norm = false;
                for (a, k) in m2 {
                    let e = m.entry(a.clone()).or_insert(0);
                    *e += k;
                    needs_norm |= *e == 0 || matches!(a, Atom::Abs(_) | Atom::Sqrt(_) | Atom::Recip(_));
                    if *e == 0 {
                        m.remove(a);
                    }
                }
                let t = if needs_norm { Scalar::term(c1 * c2, m) } else { Scalar::raw(c1 * c2, m) };
                acc = acc.add(&t);
            }
        }
        acc
    }

    fn powi_unchecked(&self, k: i32) -> Scalar {
        self.powi(k).unwrap_or_else(|_| Scalar::zero())
    }

    /// Integer power; negative powers fail on zero.
    pub fn powi(&self, k: i32) -> Result<Scalar, ScalarError> {
        if k < 0 {
            return self.recip()?.powi(-k);
        }
        if let Some((m, c)) = self.single() {
            let m: Monomial = m.iter().map(|(a, e)| (a.clone(), e * k)).collect();
            let mut p = Rational::one();
            for _ in 0..k {
                p *= c;
            }
            return Ok(Scalar::term(p, m));
        }
        let mut result = Scalar::one();
        let mut base = self.clone();
        let mut k = k as u32;
        while k > 0 {
            if k & 1 == 1 {
                result = result.mul(&base);
            }
            k >>= 1;
            if k > 0 {
                base = base.mul(&base);
            }
        }
        Ok(result)
    }

    pub fn recip(&self) -> Result<Scalar, ScalarError> {
        if self.is_zero() {
            return Err(ScalarError::DivisionByZero);
        }
        if let Some((m, c)) = self.single() {
            let m: Monomial = m.iter().map(|(a, e)| (a.clone(), -e)).collect();
            return Ok(Scalar::term(c.recip(), m));
        }
        // Pull out the monomial content (each atom to its smallest exponent
        // over the terms, absent atoms counting as exponent 0) so that a
        // denominator has one representation however it was built.
        let mut content = Monomial::new();
        for a in self.terms.keys().flat_map(|m| m.keys()) {
            if content.contains_key(a) {
                continue;
            }
            let e = self.terms.keys().map(|m| m.get(a).copied().unwrap_or(0)).min().unwrap_or(0);
            if e != 0 {
                content.insert(a.clone(), e);
            }
        }
        let mut reduced = Scalar::zero();
        for (m, c) in &self.terms {
            let mut q = m.clone();
            for (a, e) in &content {
                let k = q.entry(a.clone()).or_insert(0);
                *k -= e;
                if *k == 0 {
                    q.remove(a);
                }
            }
            reduced = reduced.add(&Scalar::term(c.clone(), q));
        }
        if reduced.single().is_some() {
            return reduced.recip()?.div_monomial(&content);
        }
        let lead = reduced.terms.values().next().unwrap().clone();
        let monic = reduced.scale(&lead.recip());
        let mut m: Monomial = content.into_iter().map(|(a, e)| (a, -e)).collect();
        m.insert(Atom::Recip(Box::new(monic)), 1);
        Ok(Scalar::term(lead.recip(), m))
    }

    fn div_monomial(&self, m: &Monomial) -> Result<Scalar, ScalarError> {
        let inv: Monomial = m.iter().map(|(a, e)| (a.clone(), -e)).collect();
        Ok(self.mul(&Scalar::term(Rational::one(), inv)))
    }

    pub fn div(&self, o: &Scalar) -> Result<Scalar, ScalarError> {
        Ok(self.mul(&o.recip()?))
    }

    /// Absolute value; no sign is assumed for symbols or functions.
    pub fn abs(&self) -> Scalar {
        if self.is_zero() {
            return Scalar::zero();
        }
        if let Some((m, c)) = self.single() {
            let mut out = Monomial::new();
            for (a, &k) in m {
                let nonneg = matches!(a, Atom::Abs(_) | Atom::Sqrt(_) | Atom::Apply(Func1::Exp, _));
                if nonneg || k % 2 == 0 {
                    *out.entry(a.clone()).or_insert(0) += k;
                } else {
                    let inner = match a {
                        Atom::Recip(p) => (**p).clone(),
                        a => Scalar::atom(a.clone()),
                    };
                    let k = if matches!(a, Atom::Recip(_)) { -k } else { k };
                    *out.entry(Atom::Abs(Box::new(inner.abs_inner()))).or_insert(0) += k;
                }
            }
            return Scalar::term(c.abs(), out);
        }
        Scalar::atom(Atom::Abs(Box::new(self.abs_inner())))
    }

    /// Sign-normalised argument for an `abs` atom.
    fn abs_inner(&self) -> Scalar {
        match self.terms.values().next() {
            Some(c) if c.is_negative() => self.neg(),
            _ => self.clone(),
        }
    }

    /// Square root with perfect squares extracted through `abs`.
    pub fn sqrt(&self) -> Scalar {
        if self.is_zero() {
            return Scalar::zero();
        }
        let Some((m, c)) = self.single() else {
            return Scalar::atom(Atom::Sqrt(Box::new(self.clone())));
        };
        let (outer_c, inner_c) = match sqrt_exact(c) {
            Some(r) => (r, Rational::one()),
            None => (Rational::one(), c.clone()),
        };
        let mut outer = Scalar::constant(outer_c);
        let mut inner = Monomial::new();
        for (a, &k) in m {
            let q = k.div_euclid(2);
            let rem = k.rem_euclid(2);
            if q != 0 {
                let nonneg = matches!(a, Atom::Abs(_) | Atom::Sqrt(_) | Atom::Apply(Func1::Exp, _));
                let base = Scalar::atom(a.clone());
                let base = if nonneg { base } else { base.abs() };
                outer = outer.mul(&base.powi_unchecked(q));
            }
            if rem != 0 {
                inner.insert(a.clone(), rem);
            }
        }
        if inner.is_empty() && inner_c.is_one() {
            outer
        } else {
            outer.mul(&Scalar::atom(Atom::Sqrt(Box::new(Scalar::raw(inner_c, inner)))))
        }
    }

    pub fn apply(f: Func1, u: &Scalar) -> Scalar {
        if let Some(v) = u.as_constant() {
            match f {
                Func1::Sin if v.is_zero() => return Scalar::zero(),
                Func1::Cos | Func1::Exp if v.is_zero() => return Scalar::one(),
                Func1::Log if v.is_one() => return Scalar::zero(),
                _ => {}
            }
        }
        Scalar::atom(Atom::Apply(f, Box::new(u.clone())))
    }

    /// Partial derivative with respect to the symbol `x`.
    pub fn diff(&self, x: &str) -> Scalar {
        let mut acc = Scalar::zero();
        for (m, c) in &self.terms {
            for (a, &k) in m {
                let da = diff_atom(a, x);
                if da.is_zero() {
                    continue;
                }
                let mut rest = m.clone();
                if k == 1 {
                    rest.remove(a);
                } else {
                    rest.insert(a.clone(), k - 1);
                }
                acc = acc.add(&Scalar::term(c * int(i64::from(k)), rest).mul(&da));
            }
        }
        acc
    }

    /// Normal form plus cancellation of reciprocals against exact multiples
    /// of their sums. Idempotent.
    pub fn simplify(&self) -> Scalar {
        let mut cur = self.clone();
        'outer: loop {
            let recips: BTreeSet<Atom> = cur
                .terms
                .keys()
                .flat_map(|m| m.iter().filter(|(a, k)| matches!(a, Atom::Recip(_)) && **k > 0).map(|(a, _)| a.clone()))
                .collect();
            for r in recips {
                let Atom::Recip(p) = &r else { unreachable!() };
                let mut rest = Scalar::zero();
                let mut over = Scalar::zero();
                for (m, c) in &cur.terms {
                    match m.get(&r) {
                        Some(&k) if k > 0 => {
                            let mut m = m.clone();
                            if k == 1 {
                                m.remove(&r);
                            } else {
                                m.insert(r.clone(), k - 1);
                            }
                            over = over.add(&Scalar::raw(c.clone(), m));
                        }
                        _ => rest = rest.add(&Scalar::raw(c.clone(), m.clone())),
                    }
                }
                if let Some(q) = exact_quotient(&over, p) {
                    cur = rest.add(&q);
                    continue 'outer;
                }
            }
            return cur;
        }
    }

    /// Numeric value; `env` supplies symbols, functions and derivatives.
    pub fn eval(&self, env: &dyn Fn(Leaf) -> Option<f64>) -> Result<f64, ScalarError> {
        let mut acc = 0.0;
        for (m, c) in &self.terms {
            let mut v = to_f64(c);
            for (a, &k) in m {
                v *= libm::pow(eval_atom(a, env)?, f64::from(k));
            }
            acc += v;
        }
        Ok(acc)
    }

    /// Rebuilds the scalar with atoms replaced where `f` returns a value;
    /// other atoms are rebuilt from their (mapped) arguments.
    pub fn map_atoms(&self, f: &dyn Fn(&Atom) -> Option<Scalar>) -> Result<Scalar, ScalarError> {
        let mut acc = Scalar::zero();
        for (m, c) in &self.terms {
            let mut t = Scalar::constant(c.clone());
            for (a, &k) in m {
                let v = match f(a) {
                    Some(v) => v,
                    None => match a {
                        Atom::Apply(g, u) => Scalar::apply(*g, &u.map_atoms(f)?),
                        Atom::Abs(u) => u.map_atoms(f)?.abs(),
                        Atom::Sqrt(u) => u.map_atoms(f)?.sqrt(),
                        Atom::Recip(p) => p.map_atoms(f)?.recip()?,
                        a => Scalar::atom(a.clone()),
                    },
                };
                t = t.mul(&v.powi(k)?);
            }
            acc = acc.add(&t);
        }
        Ok(acc.simplify())
    }

    /// Replaces the unknown function or symbol `name` by `value`, and its
    /// formal derivatives by the corresponding derivatives of `value`.
    pub fn substitute(&self, name: &str, value: &Scalar) -> Result<Scalar, ScalarError> {
        self.map_atoms(&|a| match a {
            Atom::Sym(n) | Atom::Func { name: n, .. } if n == name => Some(value.clone()),
            Atom::Deriv { name: n, wrt, .. } if n == name => {
                Some(wrt.iter().fold(value.clone(), |v, x| v.diff(x)))
            }
            _ => None,
        })
    }

    /// Names of all symbols, unknown functions and differentiated functions.
    pub fn names(&self) -> BTreeSet<String> {
        let mut out = BTreeSet::new();
        for m in self.terms.keys() {
            for a in m.keys() {
                match a {
                    Atom::Sym(n) | Atom::Func { name: n, .. } | Atom::Deriv { name: n, .. } => {
                        out.insert(n.clone());
                    }
                    Atom::Apply(_, u) | Atom::Abs(u) | Atom::Sqrt(u) | Atom::Recip(u) => out.extend(u.names()),
                }
            }
        }
        out
    }

    pub fn to_plain(&self) -> String {
        print(self, false)
    }

    pub fn to_tex(&self) -> String {
        print(self, true)
    }
}

impl fmt::Display for Scalar {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&self.to_plain())
    }
}

fn dep_position(deps: &[String], x: &str) -> usize {
    deps.iter().position(|d| d == x).unwrap_or(usize::MAX)
}

fn diff_atom(a: &Atom, x: &str) -> Scalar {
    match a {
        Atom::Sym(y) => {
            if y == x {
                Scalar::one()
            } else {
                Scalar::zero()
            }
        }
        Atom::Func { name, deps } => {
            if deps.iter().any(|d| d == x) {
                Scalar::atom(Atom::Deriv { name: name.clone(), deps: deps.clone(), wrt: alloc::vec![x.to_string()] })
            } else {
                Scalar::zero()
            }
        }
        Atom::Deriv { name, deps, wrt } => {
            if deps.iter().any(|d| d == x) {
                let mut wrt = wrt.clone();
                wrt.push(x.to_string());
                wrt.sort_by_key(|w| dep_position(deps, w));
                Scalar::atom(Atom::Deriv { name: name.clone(), deps: deps.clone(), wrt })
            } else {
                Scalar::zero()
            }
        }
        Atom::Apply(f, u) => {
            let du = u.diff(x);
            if du.is_zero() {
                return Scalar::zero();
            }
            let outer = match f {
                Func1::Sin => Scalar::apply(Func1::Cos, u),
                Func1::Cos => Scalar::apply(Func1::Sin, u).neg(),
                Func1::Exp => Scalar::apply(Func1::Exp, u),
                Func1::Log => u.recip().unwrap_or_default(),
            };
            outer.mul(&du)
        }
        Atom::Abs(u) => {
            let du = u.diff(x);
            if du.is_zero() {
                return Scalar::zero();
            }
            let inv = Scalar::term(Rational::one(), [(a.clone(), -1)].into_iter().collect());
            (**u).mul(&inv).mul(&du)
        }
        Atom::Sqrt(u) => {
            let du = u.diff(x);
            if du.is_zero() {
                return Scalar::zero();
            }
            let inv = Scalar::term(crate::rational::ratio(1, 2), [(a.clone(), -1)].into_iter().collect());
            inv.mul(&du)
        }
        Atom::Recip(p) => {
            let dp = p.diff(x);
            if dp.is_zero() {
                return Scalar::zero();
            }
            let sq = Scalar::term(int(-1), [(a.clone(), 2)].into_iter().collect());
            sq.mul(&dp)
        }
    }
}

fn monomial_quotient(a: &Monomial, b: &Monomial) -> Monomial {
    let mut out = a.clone();
    for (x, k) in b {
        let e = out.entry(x.clone()).or_insert(0);
        *e -= k;
        if *e == 0 {
            out.remove(x);
        }
    }
    out
}

/// `q` with `q · p = s`, if `q` is a single term.
fn exact_quotient(s: &Scalar, p: &Scalar) -> Option<Scalar> {
    let (pm, pc) = p.terms.iter().next()?;
    for (sm, sc) in &s.terms {
        let q = Scalar::term(sc / pc, monomial_quotient(sm, pm));
        if &q.mul(p) == s {
            return Some(q);
        }
    }
    None
}

fn eval_atom(a: &Atom, env: &dyn Fn(Leaf) -> Option<f64>) -> Result<f64, ScalarError> {
    let need = |l: Leaf, n: &str| env(l).ok_or_else(|| ScalarError::UnboundSymbol(n.to_string()));
    Ok(match a {
        Atom::Sym(n) => need(Leaf::Sym(n), n)?,
        Atom::Func { name, .. } => need(Leaf::Func(name), name)?,
        Atom::Deriv { name, wrt, .. } => need(Leaf::Deriv(name, wrt), name)?,
        Atom::Apply(f, u) => {
            let v = u.eval(env)?;
            match f {
                Func1::Sin => libm::sin(v),
                Func1::Cos => libm::cos(v),
                Func1::Exp => libm::exp(v),
                Func1::Log => libm::log(v),
            }
        }
        Atom::Abs(u) => libm::fabs(u.eval(env)?),
        Atom::Sqrt(u) => libm::sqrt(u.eval(env)?),
        Atom::Recip(p) => 1.0 / p.eval(env)?,
    })
}

// ----- printing -------------------------------------------------------------

const GREEK: &[&str] = &[
    "alpha", "beta", "gamma", "delta", "epsilon", "zeta", "eta", "theta", "iota", "kappa", "lambda", "mu", "nu",
    "xi", "pi", "rho", "sigma", "tau", "upsilon", "phi", "chi", "psi", "omega",
];

fn tex_name(n: &str) -> String {
    if GREEK.contains(&n) {
        alloc::format!("\\{} ", n).trim_end().to_string()
    } else {
        n.replace('_', "\\_")
    }
}

fn print_atom(a: &Atom, tex: bool) -> String {
    match a {
        Atom::Sym(n) | Atom::Func { name: n, .. } => {
            if tex {
                tex_name(n)
            } else {
                n.clone()
            }
        }
        Atom::Deriv { name, wrt, .. } => {
            if tex {
                let order = wrt.len();
                let top = if order == 1 { String::from("\\partial") } else { alloc::format!("\\partial^{{{}}}", order) };
                let bottom: Vec<String> = wrt.iter().map(|w| alloc::format!("\\partial {}", tex_name(w))).collect();
                alloc::format!("\\frac{{{}}}{{{}}}\\,{}", top, bottom.join("\\,"), tex_name(name))
            } else {
                alloc::format!("diff({},{})", name, wrt.join(","))
            }
        }
        Atom::Apply(f, u) => {
            if tex {
                alloc::format!("\\{}\\left({}\\right)", f.name(), print(u, true))
            } else {
                alloc::format!("{}({})", f.name(), print(u, false))
            }
        }
        Atom::Abs(u) => {
            if tex {
                alloc::format!("\\left| {}\\right|", print(u, true))
            } else {
                alloc::format!("abs({})", print(u, false))
            }
        }
        Atom::Sqrt(u) => {
            if tex {
                alloc::format!("\\sqrt{{{}}}", print(u, true))
            } else {
                alloc::format!("sqrt({})", print(u, false))
            }
        }
        Atom::Recip(p) => {
            if tex {
                alloc::format!("\\left({}\\right)", print(p, true))
            } else {
                alloc::format!("({})", print(p, false))
            }
        }
    }
}

fn power(base: String, k: i32, tex: bool) -> String {
    if k == 1 {
        base
    } else if tex {
        alloc::format!("{{{}}}^{{{}}}", base, k)
    } else {
        alloc::format!("{}^{}", base, k)
    }
}

/// Unsigned text of one term.
fn print_term(m: &Monomial, c: &Rational, tex: bool) -> String {
    let mut num: Vec<String> = Vec::new();
    let mut den: Vec<String> = Vec::new();
    for (a, &k) in m {
        let s = print_atom(a, tex);
        match a {
            Atom::Recip(_) => den.push(power(s, k, tex)),
            _ if k > 0 => num.push(power(s, k, tex)),
            _ => den.push(power(s, -k, tex)),
        }
    }
    let n = c.numer().abs();
    let d = c.denom().clone();
    if !n.is_one() || num.is_empty() {
        num.insert(0, n.to_string());
    }
    if !d.is_one() {
        den.insert(0, d.to_string());
    }
    let sep = if tex { "\\," } else { "*" };
    let top = num.join(sep);
    if den.is_empty() {
        return top;
    }
    let bottom = den.join(sep);
    if tex {
        alloc::format!("\\frac{{{}}}{{{}}}", top, bottom)
    } else if den.len() > 1 {
        alloc::format!("{}/({})", top, bottom)
    } else {
        alloc::format!("{}/{}", top, bottom)
    }
}

fn print(s: &Scalar, tex: bool) -> String {
    if s.is_zero() {
        return String::from("0");
    }
    let mut out = String::new();
    for (k, (m, c)) in s.terms.iter().rev().enumerate() {
        let body = print_term(m, c, tex);
        match (k, c.is_negative()) {
            (0, false) => {}
            (0, true) => out.push('-'),
            (_, false) => out.push_str(" + "),
            (_, true) => out.push_str(" - "),
        }
        out.push_str(&body);
    }
    out
}

// ----- parsing --------------------------------------------------------------

/// Names that denote unknown functions, with their dependencies.
#[derive(Clone, Debug, Default)]
pub struct ScalarContext {
    pub functions: BTreeMap<String, Vec<String>>,
}

impl ScalarContext {
    pub fn new() -> Self {
        Self::default()
    }

    pub fn depends(&mut self, name: &str, deps: &[String]) {
        self.functions.insert(name.to_string(), deps.to_vec());
    }

    fn leaf(&self, name: &str) -> Scalar {
        match self.functions.get(name) {
            Some(deps) => Scalar::function(name, deps),
            None => Scalar::symbol(name),
        }
    }
}

#[derive(Clone, Debug, PartialEq)]
enum Tok {
    Num(Rational),
    Ident(String),
    Op(char),
}

fn lex(src: &str) -> Result<Vec<(Tok, usize)>, ScalarError> {
    let b = src.as_bytes();
    let mut out = Vec::new();
    let mut i = 0;
    while i < b.len() {
        let ch = b[i] as char;
        if ch.is_ascii_whitespace() {
            i += 1;
        } else if ch.is_ascii_digit() || (ch == '.' && b.get(i + 1).is_some_and(u8::is_ascii_digit)) {
            let start = i;
            while i < b.len() && (b[i].is_ascii_digit() || b[i] == b'.') {
                i += 1;
            }
            let text = &src[start..i];
            let value = match text.split_once('.') {
                None => text.parse::<num_bigint::BigInt>().map(Rational::from_integer).ok(),
                Some((whole, frac)) => {
                    let digits = alloc::format!("{}{}", whole, frac);
                    let scale = num_bigint::BigInt::from(10u32).pow(frac.len() as u32);
                    digits.parse::<num_bigint::BigInt>().ok().map(|n| Rational::new(n, scale))
                }
            };
            let value = value.ok_or(ScalarError::Parse { message: alloc::format!("bad number '{}'", text), pos: start })?;
            out.push((Tok::Num(value), start));
        } else if ch.is_ascii_alphabetic() || ch == '_' || ch == '\\' {
            let start = i;
            i += 1;
            while i < b.len() && (b[i].is_ascii_alphanumeric() || b[i] == b'_') {
                i += 1;
            }
            out.push((Tok::Ident(src[start..i].trim_start_matches('\\').to_string()), start));
        } else if "+-*/^(),".contains(ch) {
            out.push((Tok::Op(ch), i));
            i += 1;
        } else {
            return Err(ScalarError::Parse { message: alloc::format!("unexpected character '{}'", ch), pos: i });
        }
    }
    Ok(out)
}

struct Parser<'a> {
    toks: Vec<(Tok, usize)>,
    pos: usize,
    end: usize,
    ctx: &'a ScalarContext,
}

impl Parser<'_> {
    fn peek(&self) -> Option<&Tok> {
        self.toks.get(self.pos).map(|t| &t.0)
    }

    fn here(&self) -> usize {
        self.toks.get(self.pos).map(|t| t.1).unwrap_or(self.end)
    }

    fn err<T>(&self, m: &str) -> Result<T, ScalarError> {
        Err(ScalarError::Parse { message: m.to_string(), pos: self.here() })
    }

    fn eat(&mut self, c: char) -> bool {
        if self.peek() == Some(&Tok::Op(c)) {
            self.pos += 1;
            true
        } else {
            false
        }
    }

    fn expect(&mut self, c: char) -> Result<(), ScalarError> {
        if self.eat(c) {
            Ok(())
        } else {
            self.err(&alloc::format!("expected '{}'", c))
        }
    }

    fn sum(&mut self) -> Result<Scalar, ScalarError> {
        let mut acc = self.product()?;
        loop {
            if self.eat('+') {
                acc = acc.add(&self.product()?);
            } else if self.eat('-') {
                acc = acc.sub(&self.product()?);
            } else {
                return Ok(acc);
            }
        }
    }

    fn product(&mut self) -> Result<Scalar, ScalarError> {
        let mut acc = self.unary()?;
        loop {
            if self.eat('*') {
                acc = acc.mul(&self.unary()?);
            } else if self.eat('/') {
                acc = acc.div(&self.unary()?)?;
            } else {
                return Ok(acc);
            }
        }
    }

    fn unary(&mut self) -> Result<Scalar, ScalarError> {
        if self.eat('-') {
            return Ok(self.unary()?.neg());
        }
        if self.eat('+') {
            return self.unary();
        }
        self.power()
    }

    fn power(&mut self) -> Result<Scalar, ScalarError> {
        let base = self.primary()?;
        if !self.eat('^') {
            return Ok(base);
        }
        let exp = self.unary_power_operand()?;
        let e = exp.as_constant().ok_or(ScalarError::BadExponent)?;
        if is_integer(&e) {
            let k = crate::rational::to_i64(&e).and_then(|k| i32::try_from(k).ok()).ok_or(ScalarError::BadExponent)?;
            base.powi(k)
        } else if e.denom() == &num_bigint::BigInt::from(2) {
            let k = crate::rational::to_i64(&Rational::from_integer(e.numer().clone()))
                .and_then(|k| i32::try_from(k).ok())
                .ok_or(ScalarError::BadExponent)?;
            base.sqrt().powi(k)
        } else {
            Err(ScalarError::BadExponent)
        }
    }

    /// Exponent: a signed primary (parenthesise anything larger).
    fn unary_power_operand(&mut self) -> Result<Scalar, ScalarError> {
        if self.eat('-') {
            return Ok(self.unary_power_operand()?.neg());
        }
        self.primary()
    }

    fn primary(&mut self) -> Result<Scalar, ScalarError> {
        match self.peek().cloned() {
            Some(Tok::Num(r)) => {
                self.pos += 1;
                Ok(Scalar::constant(r))
            }
            Some(Tok::Op('(')) => {
                self.pos += 1;
                let e = self.sum()?;
                self.expect(')')?;
                Ok(e)
            }
            Some(Tok::Ident(name)) => {
                self.pos += 1;
                if self.peek() != Some(&Tok::Op('(')) {
                    return Ok(self.ctx.leaf(&name));
                }
                self.pos += 1;
                let r = self.call(&name)?;
                self.expect(')')?;
                Ok(r)
            }
            _ => self.err("expected a number, name or '('"),
        }
    }

    fn ident(&mut self) -> Result<String, ScalarError> {
        match self.peek().cloned() {
            Some(Tok::Ident(n)) => {
                self.pos += 1;
                Ok(n)
            }
            _ => self.err("expected a variable name"),
        }
    }

    fn call(&mut self, name: &str) -> Result<Scalar, ScalarError> {
        let f = match name {
            "sin" => Some(Func1::Sin),
            "cos" => Some(Func1::Cos),
            "exp" => Some(Func1::Exp),
            "log" => Some(Func1::Log),
            _ => None,
        };
        if let Some(f) = f {
            return Ok(Scalar::apply(f, &self.sum()?));
        }
        match name {
            "abs" => Ok(self.sum()?.abs()),
            "sqrt" => Ok(self.sum()?.sqrt()),
            "diff" => {
                let mut e = self.sum()?;
                while self.eat(',') {
                    let x = self.ident()?;
                    let mut times = 1;
                    if self.peek() == Some(&Tok::Op(',')) {
                        if let Some((Tok::Num(n), _)) = self.toks.get(self.pos + 1) {
                            times = crate::rational::to_i64(n).filter(|n| *n >= 0).ok_or(ScalarError::BadExponent)?;
                            self.pos += 2;
                        }
                    }
                    for _ in 0..times {
                        e = e.diff(&x);
                    }
                }
                Ok(e)
            }
            _ => self.err(&alloc::format!("unknown function '{}'", name)),
        }
    }
}

/// Parses `src` in the plain scalar syntax: numbers, names, `+ - * / ^`,
/// parentheses and the calls `diff(e, x[, n], ...)`, `abs`, `sqrt`, `sin`,
/// `cos`, `exp`, `log`. Names listed in `ctx` are unknown functions.
pub fn parse_scalar(src: &str, ctx: &ScalarContext) -> Result<Scalar, ScalarError> {
    let toks = lex(src)?;
    let mut p = Parser { toks, pos: 0, end: src.len(), ctx };
    let e = p.sum()?;
    if p.pos != p.toks.len() {
        return p.err("unexpected input after expression");
    }
    Ok(e.simplify())
}
