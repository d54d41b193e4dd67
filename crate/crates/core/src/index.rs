//! Abstract index slots and declared index sets.

use alloc::collections::BTreeSet;
use alloc::format;
use alloc::string::{String, ToString};
use alloc::vec::Vec;
use core::fmt;

/// Position of an index. `Upper` orders before `Lower`.
#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum Variance {
    Upper,
    Lower,
}

impl Variance {
    pub fn flip(self) -> Variance {
        match self {
            Variance::Upper => Variance::Lower,
            Variance::Lower => Variance::Upper,
        }
    }

    pub fn marker(self) -> char {
        match self {
            Variance::Upper => '^',
            Variance::Lower => '_',
        }
    }
}

/// One occurrence of an abstract index in a tensor slot.
#[derive(Clone, Debug, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct Index {
    pub name: String,
    pub variance: Variance,
}

impl Index {
    pub fn new(name: impl Into<String>, variance: Variance) -> Self {
        Index { name: name.into(), variance }
    }

    pub fn up(name: impl Into<String>) -> Self {
        Index::new(name, Variance::Upper)
    }

    pub fn down(name: impl Into<String>) -> Self {
        Index::new(name, Variance::Lower)
    }

    pub fn flipped(&self) -> Self {
        Index::new(self.name.clone(), self.variance.flip())
    }

    /// True for the two halves of a dummy pair.
    pub fn pairs_with(&self, other: &Index) -> bool {
        self.name == other.name && self.variance != other.variance
    }
}

impl fmt::Display for Index {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}{{{}}}", self.variance.marker(), self.name)
    }
}

/// A declared set of index names, e.g. `{a,b,c,d,e,f,g#}::Indices(vector).`
///
/// `family` holds the prefix of a generated family (`g#` gives `g1, g2, ...`).
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct IndexSet {
    pub label: Option<String>,
    pub names: Vec<String>,
    pub family: Option<String>,
    pub range: Option<(i64, i64)>,
}

impl IndexSet {
    fn position(&self, name: &str) -> Option<usize> {
        if let Some(p) = self.names.iter().position(|n| n == name) {
            return Some(p);
        }
        let prefix = self.family.as_deref()?;
        let rest = name.strip_prefix(prefix)?;
        if rest.is_empty() || !rest.bytes().all(|b| b.is_ascii_digit()) || rest.starts_with('0') {
            return None;
        }
        let n: usize = rest.parse().ok()?;
        Some(self.names.len() + n)
    }

    /// Name at `pos` in declaration order, family members after listed names.
    fn name_at(&self, pos: usize) -> Option<String> {
        if pos < self.names.len() {
            return Some(self.names[pos].clone());
        }
        let prefix = self.family.as_deref()?;
        Some(format!("{}{}", prefix, pos - self.names.len() + 1))
    }

    pub fn dimension(&self) -> Option<i64> {
        self.range.map(|(lo, hi)| hi - lo + 1)
    }
}

/// Total order key for index names: declared set, position in it, then text.
#[derive(Clone, Debug, PartialEq, Eq, PartialOrd, Ord)]
pub struct NameRank(usize, usize, String);

/// Registry of declared index sets. With nothing declared every name is
/// accepted into an implicit alphabetical set.
#[derive(Clone, Debug, Default, PartialEq, Eq)]
pub struct IndexSets {
    sets: Vec<IndexSet>,
}

const IMPLICIT: &str = "abcdefghijklmnopqrstuvwxyz";

impl IndexSets {
    pub fn new() -> Self {
        Self::default()
    }

    pub fn is_declared(&self) -> bool {
        !self.sets.is_empty()
    }

    pub fn sets(&self) -> &[IndexSet] {
        &self.sets
    }

    /// Declares a set. Names already bound elsewhere are re-bound to the new set.
    pub fn declare(&mut self, label: Option<String>, names: Vec<String>, family: Option<String>) -> usize {
        for set in &mut self.sets {
            set.names.retain(|n| !names.contains(n));
            if family.is_some() && set.family == family {
                set.family = None;
            }
        }
        // An identical re-declaration replaces the old (now empty) entry.
        self.sets.retain(|s| !s.names.is_empty() || s.family.is_some());
        self.sets.push(IndexSet { label, names, family, range: None });
        self.sets.len() - 1
    }

    pub fn set_of(&self, name: &str) -> Option<usize> {
        self.sets.iter().position(|s| s.position(name).is_some())
    }

    pub fn get(&self, id: usize) -> Option<&IndexSet> {
        self.sets.get(id)
    }

    pub fn get_mut(&mut self, id: usize) -> Option<&mut IndexSet> {
        self.sets.get_mut(id)
    }

    pub fn accepts(&self, name: &str) -> bool {
        !self.is_declared() || self.set_of(name).is_some()
    }

    pub fn rank(&self, name: &str) -> NameRank {
        if !self.is_declared() {
            return match IMPLICIT.find(name) {
                Some(p) if name.len() == 1 => NameRank(0, p, name.to_string()),
                _ => NameRank(1, 0, name.to_string()),
            };
        }
        for (i, s) in self.sets.iter().enumerate() {
            if let Some(p) = s.position(name) {
                return NameRank(i, p, name.to_string());
            }
        }
        NameRank(self.sets.len(), 0, name.to_string())
    }

    pub fn dimension_of(&self, name: &str) -> Option<i64> {
        self.set_of(name).and_then(|i| self.sets[i].dimension())
    }

    /// Candidate names, in order, for fresh dummies drawn from the set that
    /// contains `like` (or the first set when `like` is undeclared).
    pub fn candidates(&self, like: Option<&str>) -> Candidates<'_> {
        let set = like.and_then(|n| self.set_of(n)).or(if self.is_declared() { Some(0) } else { None });
        Candidates { sets: self, set, pos: 0 }
    }

    /// First name of the set of `like` that is not in `used`.
    pub fn fresh(&self, like: Option<&str>, used: &BTreeSet<String>) -> Option<String> {
        self.candidates(like).find(|n| !used.contains(n))
    }
}

/// Iterator over the names of one index set in declaration order.
pub struct Candidates<'a> {
    sets: &'a IndexSets,
    set: Option<usize>,
    pos: usize,
}

impl Iterator for Candidates<'_> {
    type Item = String;

    fn next(&mut self) -> Option<String> {
        let pos = self.pos;
        // Generated families are unbounded; cap to keep searches finite.
        if pos > 100_000 {
            return None;
        }
        self.pos += 1;
        match self.set {
            Some(id) => self.sets.sets[id].name_at(pos),
            None => {
                if pos < IMPLICIT.len() {
                    Some(IMPLICIT[pos..pos + 1].to_string())
                } else {
                    Some(format!("i{}", pos - IMPLICIT.len() + 1))
                }
            }
        }
    }
}
