use alloc::string::String;
use alloc::vec::Vec;

use num_traits::{One, Signed};

use crate::expr::{Expr, Factor, Rule, Tensor, Term};
use crate::index::{Index, Variance};
use crate::rational::{is_integer, Rational};

/// Output flavour.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Default)]
pub enum Style {
    /// Re-parseable text: `2 g_{a b}`, `(1/2) \partial_{c}{g_{a b}}`.
    #[default]
    Plain,
    /// TeX fragment: `2\, {g}_{a b}`, `\frac{1}{2} {\partial}_{c}{{g}_{a b}}`.
    Tex,
}

pub fn print_plain(e: &Expr) -> String {
    print_expr(e, Style::Plain)
}

pub fn print_tex(e: &Expr) -> String {
    print_expr(e, Style::Tex)
}

pub fn print_rule_plain(r: &Rule) -> String {
    alloc::format!("{} -> {}", print_plain(&r.lhs), print_plain(&r.rhs))
}

pub fn print_rule_tex(r: &Rule) -> String {
    alloc::format!("{} \\rightarrow {}", print_tex(&r.lhs), print_tex(&r.rhs))
}

pub(crate) fn print_expr(e: &Expr, style: Style) -> String {
    let terms: Vec<&Term> = e.terms.iter().filter(|t| !t.coeff.is_zero_ref()).collect();
    if terms.is_empty() {
        return String::from("0");
    }
    let mut out = String::new();
    for (k, t) in terms.iter().enumerate() {
        let negative = t.coeff.is_negative();
        if k == 0 {
            if negative {
                out.push('-');
            }
        } else {
            out.push_str(if negative { " - " } else { " + " });
        }
        print_term_magnitude(t, style, &mut out);
    }
    out
}

trait IsZeroRef {
    fn is_zero_ref(&self) -> bool;
}

impl IsZeroRef for Rational {
    fn is_zero_ref(&self) -> bool {
        num_traits::Zero::is_zero(self)
    }
}

fn print_term_magnitude(t: &Term, style: Style, out: &mut String) {
    let m = t.coeff.abs();
    if t.factors.is_empty() {
        out.push_str(&number(&m, style));
        return;
    }
    if !m.is_one() {
        match style {
            Style::Plain if is_integer(&m) => {
                out.push_str(&alloc::format!("{} ", m.numer()));
            }
            Style::Plain => out.push_str(&alloc::format!("({}/{}) ", m.numer(), m.denom())),
            Style::Tex if is_integer(&m) => out.push_str(&alloc::format!("{}\\, ", m.numer())),
            Style::Tex => out.push_str(&alloc::format!("\\frac{{{}}}{{{}}} ", m.numer(), m.denom())),
        }
    }
    for (k, f) in t.factors.iter().enumerate() {
        if k > 0 {
            out.push(' ');
        }
        match f {
            Factor::Tensor(x) => print_tensor(x, style, out),
            Factor::Group(g) => {
                out.push('(');
                out.push_str(&print_expr(g, style));
                out.push(')');
            }
        }
    }
}

fn number(m: &Rational, style: Style) -> String {
    if is_integer(m) {
        alloc::format!("{}", m.numer())
    } else {
        match style {
            Style::Plain => alloc::format!("{}/{}", m.numer(), m.denom()),
            Style::Tex => alloc::format!("\\frac{{{}}}{{{}}}", m.numer(), m.denom()),
        }
    }
}

fn print_head(head: &str, style: Style, out: &mut String) {
    match style {
        Style::Plain => out.push_str(head),
        Style::Tex => {
            out.push('{');
            out.push_str(head);
            out.push('}');
        }
    }
}

/// Slot groups: consecutive slots of equal variance share one `_{...}`.
pub(crate) fn print_slots(slots: &[Index], style: Style, out: &mut String) {
    let mut k = 0;
    let mut first = true;
    while k < slots.len() {
        let v = slots[k].variance;
        let mut j = k;
        while j < slots.len() && slots[j].variance == v {
            j += 1;
        }
        if !first && style == Style::Tex {
            out.push_str("\\,");
        }
        first = false;
        out.push(match v {
            Variance::Upper => '^',
            Variance::Lower => '_',
        });
        out.push('{');
        for (n, s) in slots[k..j].iter().enumerate() {
            if n > 0 {
                out.push(' ');
            }
            out.push_str(&s.name);
        }
        out.push('}');
        k = j;
    }
}

pub(crate) fn print_tensor(t: &Tensor, style: Style, out: &mut String) {
    for w in &t.wrappers {
        print_head(&w.op, style, out);
        print_slots(&w.slots, style, out);
        out.push('{');
    }
    print_head(&t.head, style, out);
    print_slots(&t.slots, style, out);
    for _ in &t.wrappers {
        out.push('}');
    }
}
