//! A computation session: declared properties, expression registers,
//! charts, and statement execution.
//!
//! A bare expression is stored in the next numbered register and echoed as
//! `N := expr;`. `name := expr;` and `name := lhs -> rhs;` fill named
//! registers. Algorithm calls such as `@join!!(%)` rewrite a register in
//! place and echo it; `%` is the most recently produced expression. After
//! every expression input and every algorithm call the post-processing
//! pipeline declared with `::PostDefaultRules(...)` runs, unless disabled.
//!
//! Errors are values: a failing statement leaves the session unchanged.

use alloc::collections::BTreeMap;
use alloc::string::{String, ToString};
use alloc::vec::Vec;

use thiserror::Error;

use crate::clifford::{self, CliffordError};
use crate::expr::{Expr, ExprError, Rule};
use crate::geometry::{self, Chart, GeometryError};
use crate::notation::{
    parse_statement, print_plain, print_rule_plain, print_rule_tex, print_tex, split_script, AlgoArg, AlgorithmCall,
    ChartCommand, Declaration, ParseError, Piece, Repeat, StatementKind, Target, Terminator, Value,
};
use crate::properties::{PropertyError, PropertyTable};
use crate::rewrite::{self, RewriteError};
use crate::symmetry::{self, SymmetryError, DEFAULT_MAX_ORBIT};

/// Upper bound on `!!` iterations of algorithms without their own fixpoint.
pub const FIXPOINT_LIMIT: usize = 64;

/// Algorithms callable as `@name`.
pub const ALGORITHMS: &[&str] = &[
    "prodsort",
    "distribute",
    "substitute",
    "eliminate_metric",
    "eliminate_kr",
    "canonicalise",
    "collect_terms",
    "join",
    "young_project_tensor",
];

#[derive(Debug, Clone, PartialEq, Error)]
pub enum SessionError {
    #[error("{0}")]
    Parse(ParseError),
    #[error(transparent)]
    Property(#[from] PropertyError),
    #[error(transparent)]
    Expr(#[from] ExprError),
    #[error(transparent)]
    Rewrite(#[from] RewriteError),
    #[error(transparent)]
    Clifford(#[from] CliffordError),
    #[error(transparent)]
    Symmetry(#[from] SymmetryError),
    #[error(transparent)]
    Geometry(#[from] GeometryError),
    #[error("no current expression")]
    NoCurrentExpression,
    #[error("unknown register '{0}'")]
    UnknownRegister(String),
    #[error("register '{0}' holds a rule, not an expression")]
    NotAnExpression(String),
    #[error("register '{0}' holds an expression, not a rule")]
    NotARule(String),
    #[error("unknown algorithm '@{0}'")]
    UnknownAlgorithm(String),
    #[error("@{algorithm}: {reason}")]
    BadArguments { algorithm: String, reason: String },
}

impl From<ParseError> for SessionError {
    fn from(e: ParseError) -> Self {
        SessionError::Parse(e)
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct SessionOptions {
    /// Print expressions and reports as TeX.
    pub tex: bool,
    /// Run the `PostDefaultRules` pipeline.
    pub post_rules: bool,
    /// Largest symmetry orbit `canonicalise` may enumerate.
    pub max_orbit: u64,
}

impl Default for SessionOptions {
    fn default() -> Self {
        SessionOptions { tex: false, post_rules: true, max_orbit: DEFAULT_MAX_ORBIT }
    }
}

#[derive(Clone, Debug)]
pub struct Session {
    options: SessionOptions,
    props: PropertyTable,
    registers: BTreeMap<String, Value>,
    next_number: u64,
    last: Option<String>,
    charts: BTreeMap<String, Chart>,
}

impl Default for Session {
    fn default() -> Self {
        Session::new(SessionOptions::default())
    }
}

/// One `#>` expectation of a script and what the session produced for it.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Check {
    pub line: usize,
    pub expected: String,
    pub actual: Option<String>,
}

impl Check {
    pub fn passed(&self) -> bool {
        self.actual.as_deref() == Some(self.expected.as_str())
    }
}

#[derive(Clone, Debug, Default, PartialEq, Eq)]
pub struct ScriptReport {
    /// Every produced line, errors included, in order.
    pub output: Vec<String>,
    pub checks: Vec<Check>,
    /// Number of statements that failed.
    pub errors: usize,
}

impl ScriptReport {
    pub fn passed(&self) -> usize {
        self.checks.iter().filter(|c| c.passed()).count()
    }

    pub fn failed(&self) -> usize {
        self.checks.len() - self.passed()
    }
}

fn fixpoint<E>(e: &Expr, mut step: impl FnMut(&Expr) -> Result<Expr, E>) -> Result<Expr, E> {
    let mut cur = step(e)?;
    for _ in 0..FIXPOINT_LIMIT {
        let next = step(&cur)?;
        if next == cur {
            break;
        }
        cur = next;
    }
    Ok(cur)
}

impl Session {
    pub fn new(options: SessionOptions) -> Self {
        Session {
            options,
            props: PropertyTable::new(),
            registers: BTreeMap::new(),
            next_number: 1,
            last: None,
            charts: BTreeMap::new(),
        }
    }

    pub fn options(&self) -> &SessionOptions {
        &self.options
    }

    pub fn properties(&self) -> &PropertyTable {
        &self.props
    }

    pub fn register(&self, name: &str) -> Option<&Value> {
        self.registers.get(name)
    }

    /// The expression `%` refers to.
    pub fn current(&self) -> Option<&Expr> {
        match self.registers.get(self.last.as_deref()?)? {
            Value::Expr(e) => Some(e),
            Value::Rule(_) => None,
        }
    }

    /// A declared chart, or a built-in one.
    pub fn chart(&mut self, name: &str) -> Result<&Chart, GeometryError> {
        if !self.charts.contains_key(name) {
            let c = geometry::builtin_chart(name)?;
            self.charts.insert(name.to_string(), c);
        }
        Ok(&self.charts[name])
    }

    fn print_expr(&self, e: &Expr) -> String {
        if self.options.tex {
            print_tex(e)
        } else {
            print_plain(e)
        }
    }

    fn print_rule(&self, r: &Rule) -> String {
        if self.options.tex {
            print_rule_tex(r)
        } else {
            print_rule_plain(r)
        }
    }

    fn echo(&self, label: &str) -> String {
        match &self.registers[label] {
            Value::Expr(e) => alloc::format!("{} := {};", label, self.print_expr(e)),
            Value::Rule(r) => alloc::format!("{} := {};", label, self.print_rule(r)),
        }
    }

    /// Executes one statement and returns the lines it prints. The bare
    /// command `show properties` lists the property registry.
    pub fn execute(&mut self, text: &str) -> Result<Vec<String>, SessionError> {
        let trimmed = text.trim().trim_end_matches(';').trim_end();
        if trimmed.is_empty() {
            return Ok(Vec::new());
        }
        if trimmed == "show properties" {
            return Ok(self.props.dump().lines().map(String::from).collect());
        }
        let stmt = parse_statement(text)?;
        let quiet = stmt.terminator == Terminator::Dot;
        let lines = match stmt.kind {
            StatementKind::Declaration(d) => {
                self.declare(&d)?;
                return Ok(Vec::new());
            }
            StatementKind::PostRules(calls) => {
                for c in &calls {
                    if !ALGORITHMS.contains(&c.name.as_str()) {
                        return Err(SessionError::UnknownAlgorithm(c.name.clone()));
                    }
                }
                self.props.set_post_rules(calls);
                return Ok(Vec::new());
            }
            StatementKind::Assign(a) => {
                let label = match a.label {
                    Some(l) => l,
                    None => {
                        let n = self.next_number;
                        self.next_number += 1;
                        n.to_string()
                    }
                };
                let value = match a.value {
                    Value::Expr(e) => {
                        let mut props = self.props.clone();
                        props.validate(&e)?;
                        e.check()?;
                        let e = self.post_process(&e, &props)?;
                        self.props = props;
                        Value::Expr(e)
                    }
                    Value::Rule(r) => {
                        let mut props = self.props.clone();
                        props.validate(&r.lhs)?;
                        props.validate(&r.rhs)?;
                        self.props = props;
                        Value::Rule(r)
                    }
                };
                let is_expr = matches!(value, Value::Expr(_));
                self.registers.insert(label.clone(), value);
                if is_expr {
                    self.last = Some(label.clone());
                }
                alloc::vec![self.echo(&label)]
            }
            StatementKind::Algorithm(call) => {
                let label = self.resolve(&call.target)?;
                let Some(Value::Expr(e)) = self.registers.get(&label) else {
                    return Err(SessionError::NotAnExpression(label));
                };
                let out = self.apply_algorithm(e, &call)?;
                let out = self.post_process(&out, &self.props)?;
                self.registers.insert(label.clone(), Value::Expr(out));
                self.last = Some(label.clone());
                alloc::vec![self.echo(&label)]
            }
            StatementKind::Chart(cmd) => self.chart_command(&cmd)?,
        };
        Ok(if quiet { Vec::new() } else { lines })
    }

    fn resolve(&self, target: &Target) -> Result<String, SessionError> {
        match target {
            Target::Last => self.last.clone().ok_or(SessionError::NoCurrentExpression),
            Target::Register(r) => {
                if self.registers.contains_key(r) {
                    Ok(r.clone())
                } else {
                    Err(SessionError::UnknownRegister(r.clone()))
                }
            }
        }
    }

    fn declare(&mut self, d: &Declaration) -> Result<(), SessionError> {
        if d.property != "Chart" {
            return Ok(self.props.declare(d)?);
        }
        let bad = |reason: &str| PropertyError::BadArgument { property: "Chart".into(), reason: reason.into() };
        let [target] = d.targets.as_slice() else {
            return Err(bad("declare one chart at a time").into());
        };
        if !target.tensor.slots.is_empty() || !target.tensor.wrappers.is_empty() {
            return Err(bad("a chart name is a bare symbol").into());
        }
        let arg = |key: &str| {
            d.args.iter().find(|a| a.key.as_deref() == Some(key)).map(|a| a.raw.as_str()).ok_or_else(|| bad(key))
        };
        let chart = Chart::from_source(&target.tensor.head, arg("coords")?, arg("metric")?)?;
        self.charts.insert(target.tensor.head.clone(), chart);
        Ok(())
    }

    fn chart_command(&mut self, cmd: &ChartCommand) -> Result<Vec<String>, SessionError> {
        let tex = self.options.tex;
        let (ChartCommand::Show(name)
        | ChartCommand::Christoffel(name)
        | ChartCommand::Maxwell(name)
        | ChartCommand::MetricCheck(name)) = cmd;
        let chart = self.chart(name)?.clone();
        let text = match cmd {
            ChartCommand::Show(_) => geometry::chart_report(&chart, tex),
            ChartCommand::Christoffel(_) => geometry::christoffel_report(&chart, tex),
            ChartCommand::MetricCheck(_) => geometry::metric_check_report(&chart),
            ChartCommand::Maxwell(_) => {
                let spec = geometry::parse_field_spec(&geometry::default_maxwell_spec(&chart))?;
                let fields = geometry::maxwell_fields(&chart, &spec)?;
                geometry::maxwell_report(&chart, &geometry::maxwell_residuals(&chart, &fields)?, tex)
            }
        };
        Ok(text.lines().map(String::from).collect())
    }

    fn rule_arg(&self, call: &AlgorithmCall) -> Result<Rule, SessionError> {
        let bad = |reason: &str| SessionError::BadArguments { algorithm: call.name.clone(), reason: reason.into() };
        let mut rules = call.args.iter().filter(|a| !matches!(a, AlgoArg::Word(_)));
        let rule = match rules.next() {
            Some(AlgoArg::Rule(r)) => r.clone(),
            Some(AlgoArg::RuleRef(name)) => match self.registers.get(name) {
                Some(Value::Rule(r)) => r.clone(),
                Some(Value::Expr(_)) => return Err(SessionError::NotARule(name.clone())),
                None => return Err(SessionError::UnknownRegister(name.clone())),
            },
            _ => return Err(bad("expects a rule argument")),
        };
        if rules.next().is_some() {
            return Err(bad("expects exactly one rule"));
        }
        Ok(rule)
    }

    /// Applies one algorithm call to `e` (the call's target is ignored).
    pub fn apply_algorithm(&self, e: &Expr, call: &AlgorithmCall) -> Result<Expr, SessionError> {
        let props = &self.props;
        let name = call.name.as_str();
        if !ALGORITHMS.contains(&name) {
            return Err(SessionError::UnknownAlgorithm(call.name.clone()));
        }
        for a in &call.args {
            match a {
                AlgoArg::Word(w) if !(name == "join" && w == "expand") => {
                    return Err(SessionError::BadArguments {
                        algorithm: call.name.clone(),
                        reason: alloc::format!("unknown option '{{{}}}'", w),
                    })
                }
                AlgoArg::Rule(_) | AlgoArg::RuleRef(_) if name != "substitute" => {
                    return Err(SessionError::BadArguments {
                        algorithm: call.name.clone(),
                        reason: "takes no rule argument".into(),
                    })
                }
                _ => {}
            }
        }
        let repeat = call.repeat == Repeat::Fixpoint;
        let once = |e: &Expr| -> Result<Expr, SessionError> {
            Ok(match name {
                "prodsort" => rewrite::prodsort(e, props),
                "distribute" => rewrite::distribute(e, props)?,
                "substitute" => rewrite::substitute(e, &self.rule_arg(call)?, props)?,
                "canonicalise" => symmetry::canonicalise(e, props, self.options.max_orbit)?,
                "collect_terms" => rewrite::collect_terms(e),
                "young_project_tensor" => symmetry::young_project(e, props),
                _ => unreachable!("algorithm list and dispatch agree"),
            })
        };
        match name {
            "eliminate_metric" => Ok(rewrite::eliminate_metric(e, props, repeat)),
            "eliminate_kr" => Ok(rewrite::eliminate_kr(e, props, repeat)),
            "join" => Ok(clifford::join(e, props, repeat)?),
            _ if repeat => fixpoint(e, once),
            _ => once(e),
        }
    }

    /// Runs the declared post-processing pipeline on `e`, in order.
    pub fn apply_post_rules(&self, e: &Expr) -> Result<Expr, SessionError> {
        let mut cur = e.clone();
        for call in self.props.post_rules() {
            cur = self.apply_algorithm(&cur, call)?;
        }
        Ok(cur)
    }

    fn post_process(&self, e: &Expr, props: &PropertyTable) -> Result<Expr, SessionError> {
        if !self.options.post_rules || props.post_rules().is_empty() {
            return Ok(e.clone());
        }
        if core::ptr::eq(props, &self.props) {
            return self.apply_post_rules(e);
        }
        let view = Session { props: props.clone(), ..self.clone() };
        view.apply_post_rules(e)
    }

    /// Runs a whole script. Statement errors are reported in-band as
    /// `error (line L): message` and do not stop the run. Each `#>` line
    /// is compared with the next unclaimed output line of the statement
    /// just before it.
    pub fn run_script(&mut self, src: &str) -> ScriptReport {
        let mut report = ScriptReport::default();
        let mut recent: Vec<String> = Vec::new();
        let mut cursor = 0;
        for piece in split_script(src) {
            match piece {
                Piece::Statement { text, line, offset } => {
                    recent = match self.execute(&text) {
                        Ok(lines) => lines,
                        Err(SessionError::Parse(p)) => {
                            report.errors += 1;
                            alloc::vec![alloc::format!("error: {}", p.shifted(line, offset))]
                        }
                        Err(e) => {
                            report.errors += 1;
                            alloc::vec![alloc::format!("error (line {}): {}", line, e)]
                        }
                    };
                    cursor = 0;
                    report.output.extend(recent.iter().cloned());
                }
                Piece::Expect { text, line } => {
                    report.checks.push(Check { line, expected: text, actual: recent.get(cursor).cloned() });
                    cursor += 1;
                }
            }
        }
        report
    }
}
