//! Shared helpers for the integration suites: declaration tables, random
//! generators, and adapters between kernel data and the independent
//! oracles in `tensorkernel-oracles`.

#![allow(dead_code)]

pub mod dirac;
pub mod exprgen;
pub mod geo;
pub mod orbit;
pub mod structural;

use rand::rngs::StdRng;
use rand::SeedableRng;
use tensorkernel_core::notation::{parse_statement, StatementKind};
use tensorkernel_core::properties::PropertyTable;
use tensorkernel_core::session::{ScriptReport, Session, SessionOptions};

/// The bundled example scripts, by file name.
pub const SCRIPTS: &[(&str, &str)] = &[
    ("nonindex.tk", include_str!("../../../tensorkernel/scripts/nonindex.tk")),
    ("holonomic.tk", include_str!("../../../tensorkernel/scripts/holonomic.tk")),
    ("gamma.tk", include_str!("../../../tensorkernel/scripts/gamma.tk")),
    ("riemann.tk", include_str!("../../../tensorkernel/scripts/riemann.tk")),
    ("bianchi.tk", include_str!("../../../tensorkernel/scripts/bianchi.tk")),
    ("maxwell.tk", include_str!("../../../tensorkernel/scripts/maxwell.tk")),
];

pub fn script(name: &str) -> &'static str {
    SCRIPTS.iter().find(|(n, _)| *n == name).map(|(_, s)| *s).expect("bundled script")
}

pub fn run_script(name: &str) -> ScriptReport {
    Session::new(SessionOptions::default()).run_script(script(name))
}

pub fn run_script_tex(name: &str) -> ScriptReport {
    Session::new(SessionOptions { tex: true, ..SessionOptions::default() }).run_script(script(name))
}

/// The `#>` lines of a script, in order.
pub fn expected_lines(src: &str) -> Vec<String> {
    src.lines().filter_map(|l| l.strip_prefix("#>")).map(|l| l.trim().to_string()).collect()
}

/// A property table built from declaration statements.
pub fn props(decls: &[&str]) -> PropertyTable {
    let mut p = PropertyTable::new();
    for d in decls {
        match parse_statement(d).unwrap_or_else(|e| panic!("{}: {}", d, e)).kind {
            StatementKind::Declaration(decl) => p.declare(&decl).unwrap_or_else(|e| panic!("{}: {}", d, e)),
            k => panic!("not a declaration: {:?}", k),
        }
    }
    p
}

pub fn rng(seed: u64) -> StdRng {
    StdRng::seed_from_u64(seed)
}

/// Splits `label := body;` into its parts.
pub fn split_assignment(line: &str) -> Option<(&str, &str)> {
    let (label, body) = line.split_once(" := ")?;
    Some((label, body.strip_suffix(';')?))
}
