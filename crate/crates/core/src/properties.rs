//! The session registry of declared properties.

use alloc::collections::{BTreeMap, BTreeSet};
use alloc::string::{String, ToString};
use alloc::vec::Vec;

use thiserror::Error;

use crate::expr::{Expr, Factor, Tensor};
use crate::index::{IndexSets, Variance};
use crate::notation::{AlgorithmCall, Declaration, Pattern, PropArg, PropValue, Repeat, Target};
use crate::symmetry::{SignedPermutation, Tableau};

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum PropertyError {
    #[error("conflicting property: {0}")]
    ConflictingProperty(String),
    #[error("invalid tableau for {head}: {reason}")]
    InvalidTableau { head: String, reason: String },
    #[error("'{head}' used with {found} indices, but it has {expected}")]
    ArityMismatch { head: String, expected: usize, found: usize },
    #[error("bad argument for {property}: {reason}")]
    BadArgument { property: String, reason: String },
    #[error("'{0}' carries no tableau symmetry")]
    NoSymmetry(String),
    #[error("index '{0}' is not in any declared index set")]
    UnknownIndex(String),
    #[error("'{0}' is applied as a derivative but is not declared PartialDerivative or Derivative")]
    UndeclaredDerivative(String),
}

/// How two heads behave under exchange in a product.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Commutation {
    Commute,
    AntiCommute,
    NoCommute,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
enum Relation {
    Commuting,
    AntiCommuting,
    SelfNonCommuting,
    NonCommuting,
}

impl Relation {
    fn name(self) -> &'static str {
        match self {
            Relation::Commuting => "Commuting",
            Relation::AntiCommuting => "AntiCommuting",
            Relation::SelfNonCommuting => "SelfNonCommuting",
            Relation::NonCommuting => "NonCommuting",
        }
    }
}

/// Identifies a tensor shape: derivative operators (with their slot counts)
/// around a head.
#[derive(Clone, Debug, PartialEq, Eq, PartialOrd, Ord)]
struct ShapeKey {
    wrappers: Vec<(String, usize)>,
    head: String,
}

impl ShapeKey {
    fn of(t: &Tensor) -> Self {
        ShapeKey { wrappers: t.wrappers.iter().map(|w| (w.op.clone(), w.slots.len())).collect(), head: t.head.clone() }
    }
}

/// Declared properties of a session.
#[derive(Clone, Debug, Default)]
pub struct PropertyTable {
    sets: IndexSets,
    /// Metric head and the index names of its declaration pattern.
    metrics: Vec<(String, Vec<String>)>,
    deltas: BTreeSet<String>,
    partials: BTreeSet<String>,
    derivatives: BTreeSet<String>,
    /// Gamma head to the name of its metric.
    gammas: BTreeMap<String, String>,
    relations: Vec<(Vec<String>, Relation)>,
    tableaux: BTreeMap<ShapeKey, Tableau>,
    /// Heads declared with `#` wildcards accept any number of slots.
    variadic: BTreeSet<String>,
    arities: BTreeMap<String, usize>,
    head_order: Vec<String>,
    post_rules: Vec<AlgorithmCall>,
    /// Human-readable record of declarations, for `show properties`.
    log: Vec<String>,
}

impl PropertyTable {
    pub fn new() -> Self {
        Self::default()
    }

    pub fn index_sets(&self) -> &IndexSets {
        &self.sets
    }

    pub fn index_sets_mut(&mut self) -> &mut IndexSets {
        &mut self.sets
    }

    pub fn post_rules(&self) -> &[AlgorithmCall] {
        &self.post_rules
    }

    pub fn set_post_rules(&mut self, calls: Vec<AlgorithmCall>) {
        let names: Vec<String> = calls.iter().map(describe_call).collect();
        self.log.push(alloc::format!("PostDefaultRules: {}", names.join(", ")));
        self.post_rules = calls;
    }

    fn note_head(&mut self, head: &str) {
        if !self.head_order.iter().any(|h| h == head) {
            self.head_order.push(head.to_string());
        }
    }

    fn note_pattern(&mut self, p: &Pattern) -> Result<(), PropertyError> {
        for w in &p.tensor.wrappers {
            self.note_head(&w.op);
        }
        self.note_head(&p.tensor.head);
        if p.wildcard {
            self.variadic.insert(p.tensor.head.clone());
        } else if p.tensor.wrappers.is_empty() || !self.is_derivative(&p.tensor.head) {
            self.record_arity(&p.tensor.head, p.tensor.slots.len())?;
        }
        Ok(())
    }

    fn record_arity(&mut self, head: &str, n: usize) -> Result<(), PropertyError> {
        if self.variadic.contains(head) || self.is_derivative(head) {
            return Ok(());
        }
        match self.arities.get(head) {
            Some(&m) if m != n => Err(PropertyError::ArityMismatch { head: head.to_string(), expected: m, found: n }),
            Some(_) => Ok(()),
            None => {
                self.arities.insert(head.to_string(), n);
                Ok(())
            }
        }
    }

    /// Registers one declaration. `Chart` and `PostDefaultRules` are handled
    /// by the session and rejected here.
    pub fn declare(&mut self, d: &Declaration) -> Result<(), PropertyError> {
        let prop = d.property.as_str();
        let bad = |reason: &str| PropertyError::BadArgument { property: prop.to_string(), reason: reason.to_string() };
        match prop {
            "Indices" => {
                let mut names = Vec::new();
                let mut family = None;
                for t in &d.targets {
                    if !t.tensor.slots.is_empty() || !t.tensor.wrappers.is_empty() {
                        return Err(bad("index names must be bare symbols"));
                    }
                    if t.family {
                        family = Some(t.tensor.head.clone());
                    } else {
                        names.push(t.tensor.head.clone());
                    }
                }
                let label = d.args.iter().find_map(|a| match (&a.key, &a.value) {
                    (None | Some(_), PropValue::Word(w)) => Some(w.clone()),
                    _ => None,
                });
                self.sets.declare(label, names, family);
            }
            "Integer" => {
                let (lo, hi) = d
                    .args
                    .iter()
                    .find_map(|a| match a.value {
                        PropValue::Range(lo, hi) => Some((lo, hi)),
                        _ => None,
                    })
                    .ok_or_else(|| bad("expected a range such as 0..3"))?;
                if hi < lo {
                    return Err(bad("empty range"));
                }
                let first = d.targets.first().ok_or_else(|| bad("no index names given"))?;
                let id = match self.sets.set_of(first.head()) {
                    Some(id) => id,
                    None => {
                        let names = d.targets.iter().filter(|t| !t.family).map(|t| t.head().to_string()).collect();
                        let family = d.targets.iter().find(|t| t.family).map(|t| t.head().to_string());
                        self.sets.declare(None, names, family)
                    }
                };
                self.sets.get_mut(id).unwrap().range = Some((lo, hi));
            }
            "Metric" => {
                let p = single_target(d)?;
                if p.tensor.slots.len() != 2 {
                    return Err(bad("a metric has two indices"));
                }
                self.note_pattern(p)?;
                let names: Vec<String> = p.tensor.slots.iter().map(|i| i.name.clone()).collect();
                let set = self.sets.set_of(&names[0]);
                if let Some(other) = self.metrics.iter().find(|(h, n)| *h != p.head() && self.sets.set_of(&n[0]) == set) {
                    return Err(PropertyError::ConflictingProperty(alloc::format!(
                        "index set already has metric '{}'",
                        other.0
                    )));
                }
                self.metrics.retain(|(h, _)| h != p.head());
                self.metrics.push((p.head().to_string(), names));
            }
            "KroneckerDelta" => {
                let p = single_target(d)?;
                if p.tensor.slots.len() != 2 {
                    return Err(bad("a Kronecker delta has two indices"));
                }
                self.note_pattern(p)?;
                self.deltas.insert(p.head().to_string());
            }
            "PartialDerivative" | "Derivative" => {
                for p in &d.targets {
                    let op = p.tensor.wrappers.first().map(|w| w.op.clone()).unwrap_or_else(|| p.head().to_string());
                    self.variadic.insert(op.clone());
                    self.note_head(&op);
                    if prop == "PartialDerivative" {
                        self.derivatives.remove(&op);
                        self.partials.insert(op);
                    } else {
                        self.partials.remove(&op);
                        self.derivatives.insert(op);
                    }
                }
            }
            "GammaMatrix" => {
                let metric = d
                    .args
                    .iter()
                    .find_map(|a| match (&a.key, &a.value) {
                        (Some(k), PropValue::Word(w)) if k == "metric" => Some(w.clone()),
                        _ => None,
                    })
                    .ok_or_else(|| bad("expected metric=<name>"))?;
                for p in &d.targets {
                    self.note_head(p.head());
                    self.variadic.insert(p.head().to_string());
                    self.gammas.insert(p.head().to_string(), metric.clone());
                }
            }
            "Commuting" | "AntiCommuting" | "SelfNonCommuting" | "NonCommuting" => {
                let rel = match prop {
                    "Commuting" => Relation::Commuting,
                    "AntiCommuting" => Relation::AntiCommuting,
                    "SelfNonCommuting" => Relation::SelfNonCommuting,
                    _ => Relation::NonCommuting,
                };
                let heads: Vec<String> = d.targets.iter().map(|p| p.head().to_string()).collect();
                for p in &d.targets {
                    self.note_pattern(p)?;
                }
                if matches!(rel, Relation::Commuting | Relation::AntiCommuting) {
                    for (other, r) in &self.relations {
                        let clash = *r != rel
                            && matches!(r, Relation::Commuting | Relation::AntiCommuting)
                            && heads.iter().filter(|h| other.contains(h)).count() >= 2;
                        if clash {
                            return Err(PropertyError::ConflictingProperty(alloc::format!(
                                "{{{}}} is already declared {}",
                                heads.join(","),
                                r.name()
                            )));
                        }
                    }
                }
                self.relations.push((heads, rel));
            }
            "TableauSymmetry" => {
                let p = single_target(d)?;
                let shape = int_list(&d.args, "shape").ok_or_else(|| bad("expected shape={...}"))?;
                let indices = int_list(&d.args, "indices").ok_or_else(|| bad("expected indices={...}"))?;
                let to_usize = |v: Vec<i64>| -> Result<Vec<usize>, PropertyError> {
                    v.into_iter().map(|x| usize::try_from(x).map_err(|_| bad("negative entry"))).collect()
                };
                let tab = Tableau::new(to_usize(shape)?, to_usize(indices)?)
                    .map_err(|reason| PropertyError::InvalidTableau { head: p.head().to_string(), reason })?;
                self.add_tableau(p, tab)?;
            }
            "RiemannTensor" => {
                let p = single_target(d)?;
                self.add_tableau(p, Tableau::riemann())?;
            }
            "SatisfiesBianchi" => {
                let p = single_target(d)?;
                self.add_tableau(p, Tableau::bianchi())?;
            }
            other => {
                return Err(PropertyError::BadArgument {
                    property: other.to_string(),
                    reason: "not handled by the property table".to_string(),
                })
            }
        }
        self.log.push(describe_declaration(d));
        Ok(())
    }

    fn add_tableau(&mut self, p: &Pattern, tab: Tableau) -> Result<(), PropertyError> {
        if p.tensor.arity() != tab.size() {
            return Err(PropertyError::InvalidTableau {
                head: p.head().to_string(),
                reason: alloc::format!("the pattern has {} slots but the tableau has {} cells", p.tensor.arity(), tab.size()),
            });
        }
        self.note_pattern(p)?;
        self.tableaux.insert(ShapeKey::of(&p.tensor), tab);
        Ok(())
    }

    // ----- queries --------------------------------------------------------

    pub fn is_partial(&self, op: &str) -> bool {
        self.partials.contains(op)
    }

    /// Declared `PartialDerivative` or `Derivative`.
    pub fn is_derivative(&self, op: &str) -> bool {
        self.partials.contains(op) || self.derivatives.contains(op)
    }

    pub fn is_metric(&self, head: &str) -> bool {
        self.metrics.iter().any(|(h, _)| h == head)
    }

    pub fn has_metric(&self) -> bool {
        !self.metrics.is_empty()
    }

    pub fn is_delta(&self, head: &str) -> bool {
        self.deltas.contains(head)
    }

    pub fn has_delta(&self) -> bool {
        !self.deltas.is_empty()
    }

    pub fn is_gamma(&self, head: &str) -> bool {
        self.gammas.contains_key(head)
    }

    pub fn gamma_metric(&self, head: &str) -> Option<&str> {
        self.gammas.get(head).map(String::as_str)
    }

    /// The metric head that raises and lowers indices named like `name`.
    pub fn metric_for_index(&self, name: &str) -> Option<&str> {
        let set = self.sets.set_of(name);
        self.metrics.iter().find(|(_, n)| self.sets.set_of(&n[0]) == set).map(|(h, _)| h.as_str())
    }

    pub fn dimension_of(&self, name: &str) -> Option<i64> {
        self.sets.dimension_of(name)
    }

    /// Rank used to order commuting factors: declaration order, then
    /// undeclared heads alphabetically.
    pub fn head_rank(&self, head: &str) -> (usize, String) {
        match self.head_order.iter().position(|h| h == head) {
            Some(p) => (p, String::new()),
            None => (self.head_order.len(), head.to_string()),
        }
    }

    /// Exchange behaviour of two heads; the latest matching declaration
    /// wins. Gamma matrices never commute with each other.
    pub fn commutation(&self, a: &str, b: &str) -> Commutation {
        if self.is_gamma(a) && self.is_gamma(b) {
            return Commutation::NoCommute;
        }
        for (heads, rel) in self.relations.iter().rev() {
            let has_a = heads.iter().any(|h| h == a);
            let has_b = heads.iter().any(|h| h == b);
            match rel {
                Relation::SelfNonCommuting if a == b && has_a => return Commutation::NoCommute,
                Relation::NonCommuting if has_a && has_b => return Commutation::NoCommute,
                Relation::Commuting if has_a && has_b && a != b => return Commutation::Commute,
                Relation::AntiCommuting if has_a && has_b && a != b => return Commutation::AntiCommute,
                _ => {}
            }
        }
        Commutation::Commute
    }

    /// The tableau governing a tensor occurrence: one declared for its exact
    /// shape, else the head's own tableau shifted past derivative slots.
    pub fn tableau_for(&self, t: &Tensor) -> Option<Tableau> {
        if let Some(tab) = self.tableaux.get(&ShapeKey::of(t)) {
            return Some(tab.clone());
        }
        if t.wrappers.is_empty() {
            return None;
        }
        let bare = ShapeKey { wrappers: Vec::new(), head: t.head.clone() };
        let tab = self.tableaux.get(&bare)?;
        let off = t.wrapper_slot_count();
        let n = t.arity();
        // Prepend the derivative slots as single-cell rows at the bottom of
        // the diagram would change the shape; instead keep only the head's
        // diagram and leave derivative slots out of the projection.
        if off == 0 {
            return Some(tab.clone());
        }
        let _ = n;
        None
    }

    /// Generators of the slot-symmetry group of one tensor occurrence, on
    /// its flat slots.
    pub fn slot_generators(&self, t: &Tensor) -> Vec<SignedPermutation> {
        let n = t.arity();
        if let Some(tab) = self.tableaux.get(&ShapeKey::of(t)) {
            return tab.generators();
        }
        let off = t.wrapper_slot_count();
        let mut out: Vec<SignedPermutation> = self.head_generators(&t.head, &t.slots).into_iter().map(|g| g.shifted(off, n)).collect();
        // Consecutive partial-derivative slots commute.
        let mut k = 0;
        let mut run_start = 0;
        let mut in_run = false;
        for w in &t.wrappers {
            let partial = self.is_partial(&w.op);
            if partial && !in_run {
                run_start = k;
                in_run = true;
            }
            if !partial {
                in_run = false;
            }
            if partial {
                for j in k..k + w.slots.len() {
                    if j > run_start {
                        out.push(SignedPermutation::swap(n, j - 1, j, 1));
                    }
                }
            }
            k += w.slots.len();
        }
        out
    }

    fn head_generators(&self, head: &str, slots: &[crate::index::Index]) -> Vec<SignedPermutation> {
        let n = slots.len();
        let bare = ShapeKey { wrappers: Vec::new(), head: head.to_string() };
        if let Some(tab) = self.tableaux.get(&bare) {
            if tab.size() == n {
                return tab.generators();
            }
        }
        if self.is_gamma(head) {
            return (1..n).map(|j| SignedPermutation::swap(n, j - 1, j, -1)).collect();
        }
        if self.is_metric(head) && n == 2 {
            let mixed = slots[0].variance != slots[1].variance;
            if !mixed || self.is_delta(head) {
                return alloc::vec![SignedPermutation::swap(2, 0, 1, 1)];
            }
        }
        Vec::new()
    }

    /// Monoterm generators of a head's declared tableau.
    pub fn monoterm_generators(&self, head: &str) -> Result<Vec<SignedPermutation>, PropertyError> {
        let bare = ShapeKey { wrappers: Vec::new(), head: head.to_string() };
        match self.tableaux.get(&bare) {
            Some(tab) => Ok(tab.generators()),
            None if self.arities.get(head) == Some(&0) => Ok(Vec::new()),
            None => Err(PropertyError::NoSymmetry(head.to_string())),
        }
    }

    /// Validates an expression against the session: index names belong to
    /// declared sets, derivative operators are declared, and every head
    /// keeps one arity. New heads have their arity recorded.
    pub fn validate(&mut self, e: &Expr) -> Result<(), PropertyError> {
        for t in &e.terms {
            for f in &t.factors {
                match f {
                    Factor::Group(g) => self.validate(g)?,
                    Factor::Tensor(x) => {
                        for i in x.iter_slots() {
                            if !self.sets.accepts(&i.name) {
                                return Err(PropertyError::UnknownIndex(i.name.clone()));
                            }
                        }
                        for w in &x.wrappers {
                            if !self.is_derivative(&w.op) {
                                return Err(PropertyError::UndeclaredDerivative(w.op.clone()));
                            }
                        }
                        if x.wrappers.is_empty() && self.is_derivative(&x.head) {
                            continue;
                        }
                        self.record_arity(&x.head, x.slots.len())?;
                    }
                }
            }
        }
        Ok(())
    }

    /// Text listing of the registry.
    pub fn dump(&self) -> String {
        let mut out = String::new();
        for (k, s) in self.sets.sets().iter().enumerate() {
            let mut names = s.names.join(",");
            if let Some(f) = &s.family {
                if !names.is_empty() {
                    names.push(',');
                }
                names.push_str(f);
                names.push('#');
            }
            let label = s.label.clone().unwrap_or_else(|| alloc::format!("set {}", k + 1));
            out.push_str(&alloc::format!("indices {}: {{{}}}", label, names));
            if let Some((lo, hi)) = s.range {
                out.push_str(&alloc::format!(" range {}..{} (dimension {})", lo, hi, hi - lo + 1));
            }
            out.push('\n');
        }
        for line in &self.log {
            if !line.starts_with("Indices") && !line.starts_with("Integer") {
                out.push_str(line);
                out.push('\n');
            }
        }
        if out.is_empty() {
            out.push_str("no properties declared\n");
        }
        out
    }

    /// Whether the variances of a metric occurrence make it a plain metric
    /// (both slots alike) rather than a mixed delta.
    pub fn is_bare_metric(&self, t: &Tensor) -> bool {
        t.wrappers.is_empty()
            && self.is_metric(&t.head)
            && t.slots.len() == 2
            && t.slots[0].variance == t.slots[1].variance
    }

    /// A bare two-slot tensor with one upper and one lower slot whose head
    /// is a declared Kronecker delta (or a metric, whose mixed form is the
    /// identity).
    pub fn is_mixed_delta(&self, t: &Tensor) -> bool {
        t.wrappers.is_empty()
            && (self.is_delta(&t.head) || self.is_metric(&t.head))
            && t.slots.len() == 2
            && t.slots[0].variance != t.slots[1].variance
    }
}

fn single_target(d: &Declaration) -> Result<&Pattern, PropertyError> {
    match d.targets.as_slice() {
        [p] => Ok(p),
        _ => Err(PropertyError::BadArgument {
            property: d.property.clone(),
            reason: "expected exactly one tensor pattern".to_string(),
        }),
    }
}

fn int_list(args: &[PropArg], key: &str) -> Option<Vec<i64>> {
    args.iter().find_map(|a| match (&a.key, &a.value) {
        (Some(k), PropValue::IntList(v)) if k == key => Some(v.clone()),
        (Some(k), PropValue::Int(v)) if k == key => Some(alloc::vec![*v]),
        _ => None,
    })
}

fn describe_pattern(p: &Pattern) -> String {
    let mut s = String::new();
    crate::notation::print::print_tensor(&p.tensor, crate::notation::Style::Plain, &mut s);
    if p.family {
        s.push('#');
    }
    if p.wildcard {
        s.push_str("{#}");
    }
    s
}

fn describe_declaration(d: &Declaration) -> String {
    let targets: Vec<String> = d.targets.iter().map(describe_pattern).collect();
    let lhs = if targets.len() == 1 { targets[0].clone() } else { alloc::format!("{{{}}}", targets.join(", ")) };
    let args: Vec<String> = d
        .args
        .iter()
        .map(|a| match &a.key {
            Some(k) => alloc::format!("{}={}", k, a.raw),
            None => a.raw.clone(),
        })
        .collect();
    if args.is_empty() {
        alloc::format!("{}: {}", lhs, d.property)
    } else {
        alloc::format!("{}: {}({})", lhs, d.property, args.join(", "))
    }
}

fn describe_call(c: &AlgorithmCall) -> String {
    let marks = match c.repeat {
        Repeat::Once => "!".to_string(),
        Repeat::Fixpoint => "!!".to_string(),
        Repeat::Depth(n) => alloc::format!("!{}", n),
    };
    let target = match &c.target {
        Target::Last => "%".to_string(),
        Target::Register(r) => r.clone(),
    };
    alloc::format!("@@{}{}({})", c.name, marks, target)
}

/// Whether `v` is upper.
pub fn is_upper(v: Variance) -> bool {
    v == Variance::Upper
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::notation::{parse_expr, parse_statement, StatementKind};

    fn decl(p: &mut PropertyTable, s: &str) -> Result<(), PropertyError> {
        match parse_statement(s).unwrap().kind {
            StatementKind::Declaration(d) => p.declare(&d),
            k => panic!("{:?}", k),
        }
    }

    #[test]
    fn commutation_rules() {
        let mut p = PropertyTable::new();
        decl(&mut p, "{A,B}::Commuting.").unwrap();
        decl(&mut p, "{C,D}::AntiCommuting.").unwrap();
        assert_eq!(p.commutation("A", "B"), Commutation::Commute);
        assert_eq!(p.commutation("D", "C"), Commutation::AntiCommute);
        assert_eq!(p.commutation("A", "X"), Commutation::Commute);
        assert!(p.head_rank("A") < p.head_rank("B"));
        assert!(p.head_rank("D") < p.head_rank("X"));
        assert!(matches!(decl(&mut p, "{A,B}::AntiCommuting."), Err(PropertyError::ConflictingProperty(_))));
    }

    #[test]
    fn gamma_session_setup() {
        let mut p = PropertyTable::new();
        decl(&mut p, "{a,b,c,d,e,f}::Indices(vector).").unwrap();
        decl(&mut p, "{a,b,c,d,e,f}::Integer(0..3).").unwrap();
        decl(&mut p, r"\gamma_{#}::GammaMatrix(metric=g).").unwrap();
        decl(&mut p, "g_{a b}::Metric.").unwrap();
        decl(&mut p, "g_{a}^{b}::KroneckerDelta.").unwrap();
        assert_eq!(p.dimension_of("e"), Some(4));
        assert_eq!(p.gamma_metric(r"\gamma"), Some("g"));
        assert_eq!(p.commutation(r"\gamma", r"\gamma"), Commutation::NoCommute);
        assert_eq!(p.commutation(r"\gamma", "g"), Commutation::Commute);
        assert!(p.head_rank(r"\gamma") < p.head_rank("g"));
        assert_eq!(p.metric_for_index("a"), Some("g"));
        assert!(p.validate(&parse_expr(r"\gamma_{a b c} \gamma^{a}").unwrap()).is_ok());
        assert!(matches!(p.validate(&parse_expr("X_{z}").unwrap()), Err(PropertyError::UnknownIndex(_))));
        let dump = p.dump();
        assert!(dump.contains("indices vector: {a,b,c,d,e,f} range 0..3 (dimension 4)"), "{}", dump);
        assert!(dump.contains("g_{a b}: Metric"), "{}", dump);
    }

    #[test]
    fn tableau_declarations() {
        let mut p = PropertyTable::new();
        decl(&mut p, "R_{a b c d}::TableauSymmetry(shape={2,2}, indices={0,2,1,3}).").unwrap();
        assert_eq!(p.monoterm_generators("R").unwrap().len(), 3);
        assert!(matches!(
            decl(&mut p, "S_{a b}::TableauSymmetry(shape={2,2}, indices={0,2,1,3})."),
            Err(PropertyError::InvalidTableau { .. })
        ));
        assert!(matches!(
            decl(&mut p, "S_{a b c}::TableauSymmetry(shape={1,2}, indices={0,1,2})."),
            Err(PropertyError::InvalidTableau { .. })
        ));
        assert!(matches!(p.monoterm_generators("Q"), Err(PropertyError::NoSymmetry(_))));
        decl(&mut p, r"\nabla{#}::Derivative.").unwrap();
        decl(&mut p, r"\nabla_{e}{R_{a b c d}}::SatisfiesBianchi.").unwrap();
        let t = parse_expr(r"\nabla_{e}{R_{a b c d}}").unwrap();
        let x = t.terms[0].factors[0].as_tensor().unwrap();
        assert_eq!(p.tableau_for(x), Some(Tableau::bianchi()));
        assert!(matches!(p.validate(&parse_expr("R_{a b}").unwrap()), Err(PropertyError::ArityMismatch { .. })));
    }

    #[test]
    fn undeclared_derivatives_are_rejected() {
        let mut p = PropertyTable::new();
        let e = parse_expr(r"\partial_{c}{g_{a b}}").unwrap();
        assert!(matches!(p.validate(&e), Err(PropertyError::UndeclaredDerivative(_))));
        decl(&mut p, r"\partial_{#}::PartialDerivative.").unwrap();
        assert!(p.validate(&e).is_ok());
    }
}
