//! The TeX-like input language: statements, expressions, declarations and
//! algorithm calls, plus plain-text and TeX printers.
//!
//! Parsing is purely syntactic. Checks that need session state (declared
//! index sets, head arities, which heads are derivatives) happen when a
//! statement is executed.

mod lexer;
mod parser;
pub(crate) mod print;
mod split;

use alloc::string::String;
use alloc::vec::Vec;
use core::fmt;

use crate::expr::{Expr, Rule, Tensor};

pub use parser::{parse_expr, parse_statement};
pub use print::{print_plain, print_rule_plain, print_rule_tex, print_tex, Style};
pub use split::{split_script, Piece, Splitter};

/// Location of a fragment of source text.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Default)]
pub struct SourceSpan {
    /// 1-based line.
    pub line: usize,
    /// 1-based column, counted in characters.
    pub column: usize,
    pub start: usize,
    pub end: usize,
}

impl SourceSpan {
    /// Span of bytes `start..end` of `src`, with line and column computed.
    pub fn at(src: &str, start: usize, end: usize) -> Self {
        let start = start.min(src.len());
        let before = &src[..start];
        let line = before.matches('\n').count() + 1;
        let column = before.rsplit('\n').next().map(|l| l.chars().count()).unwrap_or(0) + 1;
        SourceSpan { line, column, start, end: end.max(start) }
    }

    /// The same span seen from a text in which this fragment starts at
    /// `line` (1-based) and byte `offset`.
    pub fn shifted(self, line: usize, offset: usize) -> Self {
        SourceSpan {
            line: self.line + line - 1,
            column: self.column,
            start: self.start + offset,
            end: self.end + offset,
        }
    }
}

impl fmt::Display for SourceSpan {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "line {}, column {}", self.line, self.column)
    }
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub enum ParseError {
    Syntax { message: String, span: SourceSpan },
    UnknownProperty { name: String, span: SourceSpan },
}

impl ParseError {
    pub fn syntax(message: impl Into<String>, span: SourceSpan) -> Self {
        ParseError::Syntax { message: message.into(), span }
    }

    pub fn span(&self) -> SourceSpan {
        match self {
            ParseError::Syntax { span, .. } | ParseError::UnknownProperty { span, .. } => *span,
        }
    }

    /// Re-anchors the error span for a statement that starts at `line`/`offset`
    /// of a larger text.
    pub fn shifted(self, line: usize, offset: usize) -> Self {
        match self {
            ParseError::Syntax { message, span } => ParseError::Syntax { message, span: span.shifted(line, offset) },
            ParseError::UnknownProperty { name, span } => {
                ParseError::UnknownProperty { name, span: span.shifted(line, offset) }
            }
        }
    }
}

impl fmt::Display for ParseError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            ParseError::Syntax { message, span } => write!(f, "syntax error at {}: {}", span, message),
            ParseError::UnknownProperty { name, span } => write!(f, "unknown property '{}' at {}", name, span),
        }
    }
}

impl core::error::Error for ParseError {}

/// How a statement was terminated.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Terminator {
    /// `;` — expressions, algorithm calls.
    Semi,
    /// `.` — declarations.
    Dot,
    /// End of input without a terminator (REPL convenience).
    None,
}

#[derive(Clone, Debug, PartialEq)]
pub struct Statement {
    pub kind: StatementKind,
    pub terminator: Terminator,
    pub span: SourceSpan,
}

#[derive(Clone, Debug, PartialEq)]
pub enum StatementKind {
    Declaration(Declaration),
    /// `::PostDefaultRules( @@prodsort!(%), ... ).`
    PostRules(Vec<AlgorithmCall>),
    Assign(Assignment),
    Algorithm(AlgorithmCall),
    Chart(ChartCommand),
}

/// `targets::Property(args).`
#[derive(Clone, Debug, PartialEq)]
pub struct Declaration {
    pub targets: Vec<Pattern>,
    pub property: String,
    pub args: Vec<PropArg>,
    pub span: SourceSpan,
}

/// A declaration target: a tensor shape such as `g_{a b}`, `\partial_{#}`,
/// `\nabla_{e}{R_{a b c d}}`, or a bare name such as `A` or `u#`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Pattern {
    pub tensor: Tensor,
    /// `_{#}` or `{#}`: any number of slots / any argument.
    pub wildcard: bool,
    /// `u#`: the name starts an unbounded family `u1, u2, ...`.
    pub family: bool,
}

impl Pattern {
    pub fn head(&self) -> &str {
        &self.tensor.head
    }
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct PropArg {
    pub key: Option<String>,
    pub value: PropValue,
    /// Source text of the value, for arguments parsed by other grammars
    /// (chart metrics).
    pub raw: String,
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub enum PropValue {
    Word(String),
    Int(i64),
    Range(i64, i64),
    IntList(Vec<i64>),
    /// Anything else; see [`PropArg::raw`].
    Raw,
}

#[derive(Clone, Debug, PartialEq)]
pub struct Assignment {
    /// `None` for a bare expression, which gets the next numbered register.
    pub label: Option<String>,
    pub value: Value,
}

#[derive(Clone, Debug, PartialEq)]
pub enum Value {
    Expr(Expr),
    Rule(Rule),
}

/// `@name!(%)`, `@name!!(target)(args){words}`.
#[derive(Clone, Debug, PartialEq)]
pub struct AlgorithmCall {
    pub name: String,
    /// Written with `@@` (inside `PostDefaultRules`).
    pub post: bool,
    pub repeat: Repeat,
    pub target: Target,
    pub args: Vec<AlgoArg>,
    pub span: SourceSpan,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Repeat {
    /// `!` or nothing: one pass over every term and factor.
    Once,
    /// `!!`: repeat until nothing changes.
    Fixpoint,
    /// `!n`: a depth argument; accepted and treated like [`Repeat::Once`].
    Depth(u32),
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub enum Target {
    /// `%`
    Last,
    Register(String),
}

#[derive(Clone, Debug, PartialEq)]
pub enum AlgoArg {
    /// `(@(Gamma))`: a rule stored in a register.
    RuleRef(String),
    /// `(A_{a} -> B_{a})`: an inline rule.
    Rule(Rule),
    /// `{expand}`
    Word(String),
}

/// Component-calculus commands on a named chart.
#[derive(Clone, Debug, PartialEq, Eq)]
pub enum ChartCommand {
    /// `@chart(name);` — metric, inverse and determinant.
    Show(String),
    /// `@christoffel(name);`
    Christoffel(String),
    /// `@maxwell(name);` — residuals for symbolic fields.
    Maxwell(String),
    /// `@metric_check(name);`
    MetricCheck(String),
}

/// Names accepted after `::`.
pub const PROPERTY_NAMES: &[&str] = &[
    "Indices",
    "Integer",
    "Metric",
    "KroneckerDelta",
    "PartialDerivative",
    "Derivative",
    "GammaMatrix",
    "Commuting",
    "AntiCommuting",
    "SelfNonCommuting",
    "NonCommuting",
    "TableauSymmetry",
    "RiemannTensor",
    "SatisfiesBianchi",
    "PostDefaultRules",
    "Chart",
];

/// Names accepted after `@` that act on charts rather than expressions.
pub const CHART_COMMANDS: &[&str] = &["chart", "christoffel", "maxwell", "metric_check"];

/// Algorithms accepted after `@`.
pub const ALGORITHM_NAMES: &[&str] = &[
    "distribute",
    "prodsort",
    "substitute",
    "eliminate_metric",
    "eliminate_kr",
    "canonicalise",
    "canonicalize",
    "collect_terms",
    "join",
    "young_project_tensor",
    "young_project",
];
