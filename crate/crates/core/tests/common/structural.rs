//! Structural properties shared by the property suite and the acceptance
//! run: each check takes a seed and reports the first violation.

use rand::rngs::StdRng;
use rand::seq::IndexedRandom;
use rand::Rng;
use tensorkernel_core::notation::{
    parse_expr, parse_statement, print_plain, print_rule_plain, print_tex, StatementKind, Value,
};
use tensorkernel_core::properties::PropertyTable;
use tensorkernel_core::rewrite::{collect_terms, distribute, eliminate_kr, eliminate_metric, prodsort, substitute};
use tensorkernel_core::scalar::{parse_scalar, ScalarContext};
use tensorkernel_core::session::{Session, SessionOptions};
use tensorkernel_core::symmetry::{canonicalise, young_project, DEFAULT_MAX_ORBIT};
use tensorkernel_core::{Expr, Rule};

use super::exprgen::{random_expr, GenOptions, DECLS};
use super::{props, SCRIPTS};

fn rules() -> Vec<Rule> {
    [r"F_{a b} -> V_{a} A_{b} - V_{b} A_{a}", r"F_{a b} -> R_{a c b d} S^{c d}", r"V_{a} -> W_{a b c} F^{b c}"]
        .iter()
        .map(|src| match parse_statement(&format!("{};", src)).unwrap().kind {
            StatementKind::Assign(a) => match a.value {
                Value::Rule(r) => r,
                v => panic!("{:?}", v),
            },
            k => panic!("{:?}", k),
        })
        .collect()
}

/// Every rewrite by name, applied once.
fn rewrites(e: &Expr, p: &PropertyTable) -> Vec<(String, Result<Expr, String>)> {
    let mut out = vec![
        ("prodsort".to_string(), Ok(prodsort(e, p))),
        ("distribute".to_string(), distribute(e, p).map_err(|x| x.to_string())),
        ("eliminate_metric".to_string(), Ok(eliminate_metric(e, p, false))),
        ("eliminate_metric!!".to_string(), Ok(eliminate_metric(e, p, true))),
        ("eliminate_kr".to_string(), Ok(eliminate_kr(e, p, true))),
        ("canonicalise".to_string(), canonicalise(e, p, DEFAULT_MAX_ORBIT).map_err(|x| x.to_string())),
        ("collect_terms".to_string(), Ok(collect_terms(e))),
        ("young_project_tensor".to_string(), Ok(young_project(e, p))),
        ("normalize".to_string(), Ok(e.clone().normalize())),
    ];
    for (k, r) in rules().iter().enumerate() {
        out.push((format!("substitute#{}", k), substitute(e, r, p).map_err(|x| x.to_string())));
    }
    out
}

pub fn free_indices_preserved(seed: u64) -> Result<(), String> {
    let p = props(DECLS);
    let e = random_expr(&mut super::rng(seed), GenOptions::default());
    let want = e.free_indices();
    for (name, r) in rewrites(&e, &p) {
        let r = r.map_err(|err| format!("{} failed on {}: {}", name, print_plain(&e), err))?;
        r.check().map_err(|err| format!("{} made {} invalid: {}", name, print_plain(&r), err))?;
        for t in &r.terms {
            let mut got = t.free_indices();
            got.sort();
            if got != want {
                return Err(format!("{}: {} -> {} changed free indices", name, print_plain(&e), print_plain(&r)));
            }
        }
    }
    Ok(())
}

pub fn normal_forms_idempotent(seed: u64) -> Result<(), String> {
    let p = props(DECLS);
    let e = random_expr(&mut super::rng(seed), GenOptions::default());
    let n = e.clone().normalize();
    if n.clone().normalize() != n {
        return Err(format!("normalize is not idempotent on {}", print_plain(&e)));
    }
    let c = canonicalise(&e, &p, DEFAULT_MAX_ORBIT).map_err(|x| x.to_string())?;
    let cc = canonicalise(&c, &p, DEFAULT_MAX_ORBIT).map_err(|x| x.to_string())?;
    if cc != c {
        return Err(format!("canonicalise: {} -> {} -> {}", print_plain(&e), print_plain(&c), print_plain(&cc)));
    }
    let s = collect_terms(&c);
    if collect_terms(&s) != s {
        return Err(format!("collect_terms is not idempotent on {}", print_plain(&c)));
    }
    Ok(())
}

fn random_scalar_text(rng: &mut StdRng, depth: u32) -> String {
    let leaves = ["r", "theta", "z", "t", "1", "2", "3", "1/2", "pi"];
    if depth == 0 || rng.random_bool(0.25) {
        return leaves.choose(rng).unwrap().to_string();
    }
    let a = random_scalar_text(rng, depth - 1);
    let b = random_scalar_text(rng, depth - 1);
    match rng.random_range(0..11) {
        0 | 1 => format!("({}) + ({})", a, b),
        2 => format!("({}) - ({})", a, b),
        3 | 4 => format!("({})*({})", a, b),
        5 => format!("({})/({} + 4)", a, b),
        6 => format!("({})^{}", a, rng.random_range(2..4)),
        7 => format!("sin({})", a),
        8 => format!("cos({})*exp({})", a, b),
        9 => format!("abs({})", a),
        _ => format!("sqrt(({})^2 + 1)", a),
    }
}

pub fn simplify_idempotent(seed: u64) -> Result<(), String> {
    let mut rng = super::rng(seed);
    let text = random_scalar_text(&mut rng, 4);
    let ctx = ScalarContext::new();
    let s = match parse_scalar(&text, &ctx) {
        Ok(s) => s.simplify(),
        // Division by an expression that happens to be zero.
        Err(tensorkernel_core::scalar::ScalarError::DivisionByZero) => return Ok(()),
        Err(e) => return Err(format!("{}: {}", text, e)),
    };
    if s.simplify() != s {
        return Err(format!("simplify is not idempotent on {}", text));
    }
    let back = parse_scalar(&s.to_plain(), &ctx).map_err(|e| format!("{} printed as {}: {}", text, s.to_plain(), e))?;
    if !back.sub(&s).simplify().is_zero() {
        return Err(format!("{} printed as {} reads back as {}", text, s.to_plain(), back.to_plain()));
    }
    Ok(())
}

pub fn round_trip(seed: u64) -> Result<(), String> {
    let e = random_expr(&mut super::rng(seed), GenOptions::default());
    for (style, text) in [("plain", print_plain(&e)), ("tex", print_tex(&e))] {
        let back = parse_expr(&text).map_err(|err| format!("{} `{}`: {}", style, text, err))?;
        if back != e {
            return Err(format!("{} `{}` reads back as {:?}, not {:?}", style, text, back, e));
        }
    }
    Ok(())
}

/// Every assignment line the bundled scripts produce parses back and
/// prints to the same text; expressions also survive TeX. Returns the
/// number of lines checked.
pub fn golden_corpus_round_trips() -> Result<usize, String> {
    let mut count = 0;
    for (name, src) in SCRIPTS.iter().filter(|(n, _)| *n != "maxwell.tk") {
        let report = Session::new(SessionOptions::default()).run_script(src);
        for line in report.output.iter().filter(|l| l.contains(" := ")) {
            let value = match parse_statement(line).map_err(|e| format!("{}: {}: {}", name, line, e))?.kind {
                StatementKind::Assign(a) => a.value,
                k => return Err(format!("{}: {} parsed as {:?}", name, line, k)),
            };
            let (label, _) = super::split_assignment(line).unwrap();
            let printed = match &value {
                Value::Expr(e) => print_plain(e),
                Value::Rule(r) => print_rule_plain(r),
            };
            if format!("{} := {};", label, printed) != *line {
                return Err(format!("{} reprints as {}", line, printed));
            }
            if let Value::Expr(e) = &value {
                let tex = print_tex(e);
                if parse_expr(&tex).map_err(|x| format!("{}: {}", tex, x))? != *e {
                    return Err(format!("{} does not survive TeX", line));
                }
            }
            count += 1;
        }
    }
    Ok(count)
}
