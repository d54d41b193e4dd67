use alloc::string::{String, ToString};
use alloc::vec::Vec;

use num_bigint::BigInt;
use num_traits::{One, Zero};

use super::lexer::{tokenize, Tok, Token};
use super::*;
use crate::expr::{Expr, ExprError, Factor, Rule, Tensor, Term};
use crate::index::{Index, Variance};
use crate::rational::Rational;

/// Parses one complete statement. A trailing `;` or `.` is optional.
pub fn parse_statement(text: &str) -> Result<Statement, ParseError> {
    let mut toks = tokenize(text)?;
    let terminator = match toks.last().map(|t| &t.tok) {
        Some(Tok::Semi) => {
            toks.pop();
            Terminator::Semi
        }
        Some(Tok::Dot) => {
            toks.pop();
            Terminator::Dot
        }
        _ => Terminator::None,
    };
    if toks.is_empty() {
        return Err(ParseError::syntax("empty statement", SourceSpan::at(text, 0, text.len())));
    }
    let span = SourceSpan::at(text, toks[0].start, toks.last().unwrap().end);
    let mut p = Parser { src: text, toks, pos: 0, patterns: false };
    let kind = p.statement()?;
    if p.pos < p.toks.len() {
        return Err(p.error_here("unexpected input after the end of the statement"));
    }
    Ok(Statement { kind, terminator, span })
}

/// Parses a bare expression (no label, no terminator).
pub fn parse_expr(text: &str) -> Result<Expr, ParseError> {
    let toks = tokenize(text)?;
    let mut p = Parser { src: text, toks, pos: 0, patterns: false };
    if p.toks.is_empty() {
        return Err(p.error_here("expected an expression"));
    }
    let e = p.sum()?;
    if p.pos < p.toks.len() {
        return Err(p.error_here("unexpected input after the expression"));
    }
    p.check_pairs(&e)?;
    Ok(e)
}

struct Parser<'a> {
    src: &'a str,
    toks: Vec<Token>,
    pos: usize,
    /// Accept `#` wildcards (declaration targets).
    patterns: bool,
}

/// Result of parsing one multiplicative atom.
enum Atom {
    Number(Rational),
    Product(Rational, Vec<Factor>),
}

impl<'a> Parser<'a> {
    fn peek(&self) -> Option<&Tok> {
        self.toks.get(self.pos).map(|t| &t.tok)
    }

    fn peek_at(&self, k: usize) -> Option<&Tok> {
        self.toks.get(self.pos + k).map(|t| &t.tok)
    }

    fn bump(&mut self) -> Option<Tok> {
        let t = self.toks.get(self.pos).map(|t| t.tok.clone());
        self.pos += 1;
        t
    }

    fn eat(&mut self, tok: &Tok) -> bool {
        if self.peek() == Some(tok) {
            self.pos += 1;
            true
        } else {
            false
        }
    }

    fn span_of(&self, from: usize, to: usize) -> SourceSpan {
        let start = self.toks.get(from).map(|t| t.start).unwrap_or(self.src.len());
        let end = if to == 0 { start } else { self.toks.get(to - 1).map(|t| t.end).unwrap_or(self.src.len()) };
        SourceSpan::at(self.src, start, end)
    }

    fn error_here(&self, msg: &str) -> ParseError {
        let (start, end) = match self.toks.get(self.pos) {
            Some(t) => (t.start, t.end),
            None => (self.src.len(), self.src.len()),
        };
        ParseError::syntax(msg, SourceSpan::at(self.src, start, end))
    }

    fn expect(&mut self, tok: &Tok, what: &str) -> Result<(), ParseError> {
        if self.eat(tok) {
            Ok(())
        } else {
            Err(self.error_here(&alloc::format!("expected {}", what)))
        }
    }

    /// Index of the first token at bracket depth 0 (from the current
    /// position) satisfying `pred`.
    fn find_top(&self, pred: impl Fn(&Tok) -> bool) -> Option<usize> {
        let mut depth = 0i32;
        for (k, t) in self.toks.iter().enumerate().skip(self.pos) {
            if depth == 0 && pred(&t.tok) {
                return Some(k);
            }
            match t.tok {
                Tok::LBrace | Tok::LParen | Tok::LBracket => depth += 1,
                Tok::RBrace | Tok::RParen | Tok::RBracket => depth -= 1,
                _ => {}
            }
        }
        None
    }

    /// Token index just after the bracket that closes the one at `open`.
    fn matching(&self, open: usize) -> Option<usize> {
        let mut depth = 0i32;
        for k in open..self.toks.len() {
            match self.toks[k].tok {
                Tok::LBrace | Tok::LParen | Tok::LBracket => depth += 1,
                Tok::RBrace | Tok::RParen | Tok::RBracket => {
                    depth -= 1;
                    if depth == 0 {
                        return Some(k + 1);
                    }
                }
                _ => {}
            }
        }
        None
    }

    // ----- statements -------------------------------------------------

    fn statement(&mut self) -> Result<StatementKind, ParseError> {
        if let Some(Tok::Algo(name, _)) = self.peek() {
            if CHART_COMMANDS.contains(&name.as_str()) {
                return self.chart_command().map(StatementKind::Chart);
            }
            return self.algorithm_call(self.toks.len()).map(StatementKind::Algorithm);
        }
        if let Some(k) = self.find_top(|t| *t == Tok::DoubleColon) {
            return self.declaration(k);
        }
        if let Some(k) = self.find_top(|t| *t == Tok::Assign) {
            let label = match (k - self.pos, self.peek()) {
                (1, Some(Tok::Ident(s) | Tok::Command(s) | Tok::Number(s))) => s.clone(),
                _ => return Err(self.error_here("expected a single name before ':='")),
            };
            self.pos = k + 1;
            let value = self.value()?;
            return Ok(StatementKind::Assign(Assignment { label: Some(label), value }));
        }
        let value = self.value()?;
        Ok(StatementKind::Assign(Assignment { label: None, value }))
    }

    fn value(&mut self) -> Result<Value, ParseError> {
        if self.pos >= self.toks.len() {
            return Err(self.error_here("expected an expression"));
        }
        let lhs = self.sum()?;
        self.check_pairs(&lhs)?;
        if self.eat(&Tok::Arrow) {
            let rhs = self.sum()?;
            self.check_pairs(&rhs)?;
            return Ok(Value::Rule(Rule { lhs, rhs }));
        }
        Ok(Value::Expr(lhs))
    }

    fn name_token(&mut self, what: &str) -> Result<String, ParseError> {
        match self.peek() {
            Some(Tok::Ident(s) | Tok::Command(s) | Tok::Number(s)) => {
                let s = s.clone();
                self.pos += 1;
                Ok(s)
            }
            _ => Err(self.error_here(&alloc::format!("expected {}", what))),
        }
    }

    fn chart_command(&mut self) -> Result<ChartCommand, ParseError> {
        let name = match self.bump() {
            Some(Tok::Algo(n, _)) => n,
            _ => unreachable!(),
        };
        self.expect(&Tok::LParen, "'(' after the command name")?;
        let chart = self.name_token("a chart name")?;
        self.expect(&Tok::RParen, "')'")?;
        Ok(match name.as_str() {
            "chart" => ChartCommand::Show(chart),
            "christoffel" => ChartCommand::Christoffel(chart),
            "maxwell" => ChartCommand::Maxwell(chart),
            _ => ChartCommand::MetricCheck(chart),
        })
    }

    /// `@name` repeat `(target)` extra-args, ending before token `end`.
    fn algorithm_call(&mut self, end: usize) -> Result<AlgorithmCall, ParseError> {
        let begin = self.pos;
        let (name, post) = match self.bump() {
            Some(Tok::Algo(n, p)) => (n, p),
            _ => return Err(self.error_here("expected an algorithm call")),
        };
        if !ALGORITHM_NAMES.contains(&name.as_str()) {
            return Err(ParseError::syntax(
                alloc::format!("unknown algorithm '@{}'", name),
                self.span_of(begin, begin + 1),
            ));
        }
        let mut repeat = Repeat::Once;
        if self.eat(&Tok::Bang) {
            if self.eat(&Tok::Bang) {
                repeat = Repeat::Fixpoint;
            } else if let Some(Tok::Number(n)) = self.peek() {
                let depth = n.parse().map_err(|_| self.error_here("depth out of range"))?;
                self.pos += 1;
                repeat = Repeat::Depth(depth);
            }
        }
        let mut target = Target::Last;
        if self.peek() == Some(&Tok::LParen) {
            self.pos += 1;
            target = match self.peek() {
                Some(Tok::Percent) => {
                    self.pos += 1;
                    Target::Last
                }
                _ => Target::Register(self.name_token("'%' or a register name")?),
            };
            self.expect(&Tok::RParen, "')' after the target")?;
        }
        let mut args = Vec::new();
        while self.pos < end {
            match self.peek() {
                Some(Tok::LParen) => {
                    let close = self.matching(self.pos).ok_or_else(|| self.error_here("unclosed '('"))?;
                    self.pos += 1;
                    if self.peek() == Some(&Tok::At) {
                        self.pos += 1;
                        self.expect(&Tok::LParen, "'(' after '@'")?;
                        let label = self.name_token("a rule name")?;
                        self.expect(&Tok::RParen, "')'")?;
                        args.push(AlgoArg::RuleRef(label));
                    } else {
                        match self.value()? {
                            Value::Rule(r) => args.push(AlgoArg::Rule(r)),
                            Value::Expr(_) => return Err(self.error_here("expected a rule 'lhs -> rhs'")),
                        }
                    }
                    if self.pos + 1 != close {
                        return Err(self.error_here("expected ')'"));
                    }
                    self.pos = close;
                }
                Some(Tok::LBrace) => {
                    self.pos += 1;
                    loop {
                        let w = self.name_token("an argument word")?;
                        args.push(AlgoArg::Word(w));
                        if !self.eat(&Tok::Comma) {
                            break;
                        }
                    }
                    self.expect(&Tok::RBrace, "'}'")?;
                }
                _ => break,
            }
        }
        Ok(AlgorithmCall { name, post, repeat, target, args, span: self.span_of(begin, self.pos) })
    }

    fn declaration(&mut self, colons: usize) -> Result<StatementKind, ParseError> {
        let begin = self.pos;
        let mut targets = Vec::new();
        if colons > self.pos {
            self.patterns = true;
            let whole_list = self.peek() == Some(&Tok::LBrace) && self.matching(self.pos) == Some(colons);
            if whole_list {
                self.pos += 1;
                loop {
                    targets.push(self.pattern()?);
                    if !self.eat(&Tok::Comma) {
                        break;
                    }
                }
                self.expect(&Tok::RBrace, "'}' closing the list")?;
            } else {
                targets.push(self.pattern()?);
            }
            self.patterns = false;
            if self.pos != colons {
                return Err(self.error_here("expected '::'"));
            }
        }
        self.pos = colons + 1;
        let prop_at = self.pos;
        let property = match self.bump() {
            Some(Tok::Ident(s)) => s,
            _ => {
                self.pos = prop_at;
                return Err(self.error_here("expected a property name after '::'"));
            }
        };
        if !PROPERTY_NAMES.contains(&property.as_str()) {
            return Err(ParseError::UnknownProperty { name: property, span: self.span_of(prop_at, prop_at + 1) });
        }
        if property == "PostDefaultRules" {
            let mut calls = Vec::new();
            if self.eat(&Tok::LParen) {
                loop {
                    let end = self.find_top(|t| matches!(t, Tok::Comma | Tok::RParen)).unwrap_or(self.toks.len());
                    if self.pos == end {
                        break;
                    }
                    calls.push(self.algorithm_call(end)?);
                    if !self.eat(&Tok::Comma) {
                        break;
                    }
                }
                self.expect(&Tok::RParen, "')' closing the rule list")?;
            }
            return Ok(StatementKind::PostRules(calls));
        }
        let mut args = Vec::new();
        if self.eat(&Tok::LParen) {
            while self.peek() != Some(&Tok::RParen) {
                if self.pos >= self.toks.len() {
                    return Err(self.error_here("expected ')'"));
                }
                args.push(self.prop_arg()?);
                if !self.eat(&Tok::Comma) {
                    break;
                }
            }
            self.expect(&Tok::RParen, "')' closing the arguments")?;
        }
        let span = self.span_of(begin, self.pos);
        Ok(StatementKind::Declaration(Declaration { targets, property, args, span }))
    }

    fn prop_arg(&mut self) -> Result<PropArg, ParseError> {
        let mut key = None;
        if let (Some(Tok::Ident(k)), Some(Tok::Eq)) = (self.peek(), self.peek_at(1)) {
            key = Some(k.clone());
            self.pos += 2;
        }
        let end = self.find_top(|t| matches!(t, Tok::Comma | Tok::RParen)).unwrap_or(self.toks.len());
        if end == self.pos {
            return Err(self.error_here("expected an argument value"));
        }
        let toks = &self.toks[self.pos..end];
        let raw = String::from(&self.src[toks[0].start..toks[toks.len() - 1].end]);
        let value = classify_value(toks);
        self.pos = end;
        Ok(PropArg { key, value, raw })
    }

    /// A declaration target.
    fn pattern(&mut self) -> Result<Pattern, ParseError> {
        let head = match self.bump() {
            Some(Tok::Ident(s) | Tok::Command(s)) => s,
            _ => {
                self.pos -= 1;
                return Err(self.error_here("expected a name"));
            }
        };
        if self.eat(&Tok::Hash) {
            return Ok(Pattern { tensor: Tensor::new(head, Vec::new()), wildcard: false, family: true });
        }
        let (slots, mut wildcard) = self.slot_groups()?;
        let mut tensor = Tensor::new(head, slots);
        if self.peek() == Some(&Tok::LBrace) && self.adjacent() {
            self.pos += 1;
            if self.eat(&Tok::Hash) {
                wildcard = true;
            } else {
                let inner = self.pattern()?;
                wildcard |= inner.wildcard;
                let mut t = inner.tensor;
                t.wrappers.insert(0, crate::expr::Wrapper { op: tensor.head, slots: tensor.slots });
                tensor = t;
            }
            self.expect(&Tok::RBrace, "'}'")?;
        }
        Ok(Pattern { tensor, wildcard, family: false })
    }

    /// True when the current token touches the previous one (no whitespace).
    fn adjacent(&self) -> bool {
        self.pos > 0 && self.toks[self.pos - 1].end == self.toks[self.pos].start
    }

    /// Sequence of `_{...}` / `^{...}` groups. Returns the slots and whether
    /// a `#` wildcard appeared.
    fn slot_groups(&mut self) -> Result<(Vec<Index>, bool), ParseError> {
        let mut slots = Vec::new();
        let mut wildcard = false;
        loop {
            let variance = match self.peek() {
                Some(Tok::Sub) => Variance::Lower,
                Some(Tok::Sup) => Variance::Upper,
                _ => break,
            };
            self.pos += 1;
            if self.eat(&Tok::LBrace) {
                loop {
                    match self.peek() {
                        Some(Tok::Ident(n)) => {
                            slots.push(Index::new(n.clone(), variance));
                            self.pos += 1;
                        }
                        Some(Tok::Hash) if self.patterns => {
                            wildcard = true;
                            self.pos += 1;
                        }
                        Some(Tok::RBrace) => break,
                        _ => return Err(self.error_here("expected an index name")),
                    }
                }
                self.pos += 1;
            } else {
                match self.peek() {
                    Some(Tok::Ident(n)) => {
                        slots.push(Index::new(n.clone(), variance));
                        self.pos += 1;
                    }
                    Some(Tok::Hash) if self.patterns => {
                        wildcard = true;
                        self.pos += 1;
                    }
                    _ => return Err(self.error_here("expected an index name")),
                }
            }
        }
        Ok((slots, wildcard))
    }

    // ----- expressions --------------------------------------------------

    fn sum(&mut self) -> Result<Expr, ParseError> {
        let mut terms = Vec::new();
        let mut negative = false;
        if self.eat(&Tok::Minus) {
            negative = true;
        } else {
            self.eat(&Tok::Plus);
        }
        loop {
            let mut t = self.product()?;
            if negative {
                t.coeff = -t.coeff;
            }
            if !t.coeff.is_zero() {
                terms.push(t);
            }
            match self.peek() {
                Some(Tok::Plus) => negative = false,
                Some(Tok::Minus) => negative = true,
                _ => break,
            }
            self.pos += 1;
        }
        Ok(Expr::from_terms(terms))
    }

    fn starts_atom(&self) -> bool {
        matches!(
            self.peek(),
            Some(Tok::Number(_) | Tok::Ident(_) | Tok::Command(_) | Tok::LParen | Tok::LBrace)
        )
    }

    fn product(&mut self) -> Result<Term, ParseError> {
        if !self.starts_atom() {
            return Err(self.error_here("expected a term"));
        }
        let mut coeff = Rational::one();
        let mut factors = Vec::new();
        loop {
            match self.atom()? {
                Atom::Number(r) => coeff *= r,
                Atom::Product(r, fs) => {
                    coeff *= r;
                    factors.extend(fs);
                }
            }
            if self.eat(&Tok::Star) {
                continue;
            }
            if !self.starts_atom() {
                break;
            }
        }
        Ok(Term::new(coeff, factors))
    }

    fn number(&mut self) -> Result<BigInt, ParseError> {
        match self.bump() {
            Some(Tok::Number(n)) => n.parse::<BigInt>().map_err(|_| {
                self.pos -= 1;
                self.error_here("bad number")
            }),
            _ => {
                self.pos -= 1;
                Err(self.error_here("expected a number"))
            }
        }
    }

    fn atom(&mut self) -> Result<Atom, ParseError> {
        match self.peek().cloned() {
            Some(Tok::Number(_)) => {
                let n = self.number()?;
                if self.peek() == Some(&Tok::Slash) && matches!(self.peek_at(1), Some(Tok::Number(_))) {
                    self.pos += 1;
                    let at = self.pos;
                    let d = self.number()?;
                    if d.is_zero() {
                        self.pos = at;
                        return Err(self.error_here("division by zero"));
                    }
                    return Ok(Atom::Number(Rational::new(n, d)));
                }
                Ok(Atom::Number(Rational::from_integer(n)))
            }
            Some(Tok::Command(c)) if c == "\\frac" => {
                self.pos += 1;
                let num = self.braced_number()?;
                let at = self.pos;
                let den = self.braced_number()?;
                if den.is_zero() {
                    self.pos = at;
                    return Err(self.error_here("division by zero"));
                }
                Ok(Atom::Number(num / den))
            }
            Some(Tok::LParen) => {
                self.pos += 1;
                let inner = self.sum()?;
                self.expect(&Tok::RParen, "')'")?;
                Ok(grouped(inner))
            }
            Some(Tok::LBrace) => {
                self.pos += 1;
                let inner = self.sum()?;
                self.expect(&Tok::RBrace, "'}'")?;
                // TeX-style `{g}_{a b}`: a braced bare head followed by slots.
                if matches!(self.peek(), Some(Tok::Sub | Tok::Sup)) {
                    if let Some(head) = bare_head(&inner) {
                        return self.tensor_tail(head);
                    }
                }
                Ok(grouped(inner))
            }
            Some(Tok::Ident(h) | Tok::Command(h)) => {
                self.pos += 1;
                self.tensor_tail(h)
            }
            _ => Err(self.error_here("expected a term")),
        }
    }

    fn braced_number(&mut self) -> Result<Rational, ParseError> {
        self.expect(&Tok::LBrace, "'{'")?;
        let at = self.pos;
        let e = self.sum()?;
        self.expect(&Tok::RBrace, "'}'")?;
        match e.terms.len() {
            0 => Ok(Rational::zero()),
            1 if e.terms[0].factors.is_empty() => Ok(e.terms[0].coeff.clone()),
            _ => {
                self.pos = at;
                Err(self.error_here("expected a number"))
            }
        }
    }

    /// Slots after a head, then an optional adjacent `{...}` argument that
    /// makes the tensor an operator applied to the argument.
    fn tensor_tail(&mut self, head: String) -> Result<Atom, ParseError> {
        let (slots, _) = self.slot_groups()?;
        if self.peek() == Some(&Tok::LBrace) && self.adjacent() {
            let at = self.pos;
            self.pos += 1;
            let arg = self.sum()?;
            self.expect(&Tok::RBrace, "'}'")?;
            let mut terms = Vec::new();
            for t in arg.terms {
                match <[Factor; 1]>::try_from(t.factors) {
                    Ok([Factor::Tensor(inner)]) => {
                        terms.push(Term::new(t.coeff, alloc::vec![Factor::Tensor(inner.wrapped(head.clone(), slots.clone()))]))
                    }
                    _ => {
                        self.pos = at;
                        return Err(self.error_here("a derivative argument must be a sum of single tensors"));
                    }
                }
            }
            return Ok(grouped(Expr::from_terms(terms)));
        }
        Ok(Atom::Product(Rational::one(), alloc::vec![Factor::Tensor(Tensor::new(head, slots))]))
    }

    /// Rejects same-variance repeats and triple occurrences, reporting the
    /// span of the whole statement.
    fn check_pairs(&self, e: &Expr) -> Result<(), ParseError> {
        for t in &e.terms {
            if let Err(err) = t.check_pairing() {
                let msg = match err {
                    ExprError::RepeatedIndex(n) => {
                        alloc::format!("index '{}' is repeated with the same variance", n)
                    }
                    ExprError::IndexOverused(n) => alloc::format!("index '{}' appears more than twice", n),
                    other => other.to_string(),
                };
                return Err(ParseError::syntax(msg, SourceSpan::at(self.src, 0, self.src.len())));
            }
        }
        Ok(())
    }
}

fn grouped(inner: Expr) -> Atom {
    match inner.terms.len() {
        0 => Atom::Number(Rational::zero()),
        1 => {
            let t = inner.terms.into_iter().next().unwrap();
            if t.factors.is_empty() {
                Atom::Number(t.coeff)
            } else {
                Atom::Product(t.coeff, t.factors)
            }
        }
        _ => Atom::Product(Rational::one(), alloc::vec![Factor::Group(inner)]),
    }
}

fn bare_head(e: &Expr) -> Option<String> {
    match e.terms.as_slice() {
        [t] if t.coeff.is_one() => match t.factors.as_slice() {
            [Factor::Tensor(x)] if x.slots.is_empty() && x.wrappers.is_empty() => Some(x.head.clone()),
            _ => None,
        },
        _ => None,
    }
}

fn classify_value(toks: &[Token]) -> PropValue {
    let kinds: Vec<&Tok> = toks.iter().map(|t| &t.tok).collect();
    let int = |k: &[&Tok]| -> Option<i64> {
        match k {
            [Tok::Number(n)] => n.parse().ok(),
            [Tok::Minus, Tok::Number(n)] => n.parse::<i64>().ok().map(|v| -v),
            _ => None,
        }
    };
    if let [Tok::Ident(w)] = kinds.as_slice() {
        return PropValue::Word(w.clone());
    }
    if let Some(v) = int(&kinds) {
        return PropValue::Int(v);
    }
    if let Some(dd) = kinds.iter().position(|t| **t == Tok::DotDot) {
        if let (Some(lo), Some(hi)) = (int(&kinds[..dd]), int(&kinds[dd + 1..])) {
            return PropValue::Range(lo, hi);
        }
    }
    if kinds.first() == Some(&&Tok::LBrace) && kinds.last() == Some(&&Tok::RBrace) {
        let inner = &kinds[1..kinds.len() - 1];
        let mut out = Vec::new();
        let mut ok = true;
        for part in inner.split(|t| **t == Tok::Comma) {
            match int(part) {
                Some(v) => out.push(v),
                None => {
                    ok = false;
                    break;
                }
            }
        }
        if ok && !inner.is_empty() {
            return PropValue::IntList(out);
        }
    }
    PropValue::Raw
}
