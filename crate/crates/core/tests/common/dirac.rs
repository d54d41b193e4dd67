//! Evaluation of gamma-matrix expressions in the explicit 4×4 Dirac
//! representation. Every index runs over 0..3; dummies are summed at the
//! level (term or group) where they are paired.

use std::cell::RefCell;
use std::collections::BTreeMap;

use tensorkernel_core::rational::to_i64;
use tensorkernel_core::{Expr, Factor, Index, Tensor, Term, Variance};
use tensorkernel_oracles::dirac::{gamma_antisym, metric, Gauss, M4};

pub const GAMMA: &str = r"\gamma";
pub const METRIC: &str = "g";

pub type Env = BTreeMap<String, usize>;

thread_local! {
    static ANTISYM: RefCell<BTreeMap<Vec<(usize, bool)>, M4>> = RefCell::new(BTreeMap::new());
}

/// `gamma_antisym`, memoised: the oracle sums over all orderings.
pub fn antisym(idx: &[(usize, bool)]) -> M4 {
    if let Some(m) = ANTISYM.with(|c| c.borrow().get(idx).copied()) {
        return m;
    }
    let m = gamma_antisym(idx);
    ANTISYM.with(|c| c.borrow_mut().insert(idx.to_vec(), m));
    m
}

fn value(env: &Env, i: &Index) -> usize {
    *env.get(&i.name).unwrap_or_else(|| panic!("index {} is unbound", i.name))
}

fn eval_tensor(t: &Tensor, env: &Env) -> M4 {
    assert!(t.wrappers.is_empty(), "derivatives have no Dirac value");
    match (t.head.as_str(), t.slots.as_slice()) {
        (GAMMA, slots) => {
            let idx: Vec<(usize, bool)> = slots.iter().map(|i| (value(env, i), i.variance == Variance::Upper)).collect();
            antisym(&idx)
        }
        (METRIC, [x, y]) => {
            let (u, v) = (value(env, x), value(env, y));
            let entry = if x.variance == y.variance { metric(u, v) } else { i64::from(u == v) };
            M4::identity().scale(Gauss::int(entry))
        }
        (h, _) => panic!("no Dirac value for {}", h),
    }
}

fn eval_term(t: &Term, env: &Env) -> M4 {
    let mut local: Vec<String> = Vec::new();
    for i in t.occurrences() {
        if !env.contains_key(&i.name) && !local.contains(&i.name) {
            local.push(i.name);
        }
    }
    let coeff = to_i64(&t.coeff).unwrap_or_else(|| panic!("coefficient {} is not an integer", t.coeff));
    let mut acc = M4::zero();
    let mut env = env.clone();
    let total = 4usize.pow(local.len() as u32);
    for code in 0..total {
        let mut c = code;
        for n in &local {
            env.insert(n.clone(), c % 4);
            c /= 4;
        }
        let mut m = M4::identity();
        for f in &t.factors {
            m = m * match f {
                Factor::Tensor(x) => eval_tensor(x, &env),
                Factor::Group(g) => eval_expr(g, &env),
            };
        }
        acc = acc + m;
    }
    acc.scale(Gauss::int(coeff))
}

/// Value of `e` with its free indices fixed by `env`.
pub fn eval_expr(e: &Expr, env: &Env) -> M4 {
    e.terms.iter().fold(M4::zero(), |acc, t| acc + eval_term(t, env))
}

/// Every assignment of 0..3 to `names`.
pub fn assignments(names: &[String]) -> Vec<Env> {
    let total = 4usize.pow(names.len() as u32);
    (0..total)
        .map(|code| {
            let mut c = code;
            names
                .iter()
                .map(|n| {
                    let v = c % 4;
                    c /= 4;
                    (n.clone(), v)
                })
                .collect()
        })
        .collect()
}

/// Checks `a == b` as matrices for every value of the free indices of `a`;
/// returns the first failing assignment.
pub fn equal_everywhere(a: &Expr, b: &Expr) -> Result<(), String> {
    let names: Vec<String> = a.free_indices().into_iter().map(|i| i.name).collect();
    for env in assignments(&names) {
        if eval_expr(a, &env) != eval_expr(b, &env) {
            return Err(format!("differ at {:?}", env));
        }
    }
    Ok(())
}
