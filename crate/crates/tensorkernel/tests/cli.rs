//! End-to-end runs of the `tensorkernel` binary.

use std::io::Write;
use std::path::PathBuf;
use std::process::{Command, Output, Stdio};

fn bin() -> Command {
    Command::new(env!("CARGO_BIN_EXE_tensorkernel"))
}

fn run(args: &[&str]) -> Output {
    bin().args(args).output().expect("binary runs")
}

fn stdout(o: &Output) -> String {
    String::from_utf8(o.stdout.clone()).unwrap()
}

fn stderr(o: &Output) -> String {
    String::from_utf8(o.stderr.clone()).unwrap()
}

fn repl(input: &str) -> Output {
    let mut child = bin().arg("repl").stdin(Stdio::piped()).stdout(Stdio::piped()).spawn().unwrap();
    child.stdin.take().unwrap().write_all(input.as_bytes()).unwrap();
    child.wait_with_output().unwrap()
}

fn scripts() -> Vec<PathBuf> {
    let dir = PathBuf::from(env!("CARGO_MANIFEST_DIR")).join("scripts");
    let mut v: Vec<PathBuf> =
        std::fs::read_dir(dir).unwrap().map(|e| e.unwrap().path()).filter(|p| p.extension().is_some_and(|x| x == "tk")).collect();
    v.sort();
    v
}

#[test]
fn every_bundled_script_passes_its_checks() {
    let all = scripts();
    assert_eq!(all.len(), 6);
    for s in all {
        let o = run(&["run", "--check", s.to_str().unwrap()]);
        assert!(o.status.success(), "{}: {}", s.display(), stderr(&o));
        assert!(stderr(&o).contains(", 0 failed"), "{}", stderr(&o));
    }
}

#[test]
fn failed_check_reports_line_and_exits_nonzero() {
    let mut f = tempfile::NamedTempFile::new().unwrap();
    write!(f, "A B;\n#> 1 := B A;\n").unwrap();
    let o = run(&["run", "--check", f.path().to_str().unwrap()]);
    assert_eq!(o.status.code(), Some(1));
    assert!(stderr(&o).contains(":2: expected `1 := B A;`, got `1 := A B;`"), "{}", stderr(&o));
    assert!(stderr(&o).contains("check: 0 passed, 1 failed"));
}

#[test]
fn missing_script_is_a_usage_error() {
    let o = run(&["run", "/nonexistent/script.tk"]);
    assert_eq!(o.status.code(), Some(2));
    assert!(stderr(&o).starts_with("error: /nonexistent/script.tk"));
}

#[test]
fn repl_reports_errors_in_band_and_stops_at_quit() {
    let o = repl("@canonicalise!(%);\nA_{a} B^{a};\nshow properties\nquit\nC;\n");
    assert!(o.status.success());
    assert_eq!(stdout(&o), "error: no current expression\n1 := A_{a} B^{a};\nno properties declared\n");
}

#[test]
fn repl_joins_statements_across_lines() {
    let o = repl("A_{a}\n  B^{a};\n@canonicalise!(%);\n");
    assert_eq!(stdout(&o), "1 := A_{a} B^{a};\n1 := A_{a} B^{a};\n");
}

#[test]
fn tex_output() {
    let o = repl("A B;\n");
    assert_eq!(stdout(&o), "1 := A B;\n");
    let mut child = bin().args(["--tex", "repl"]).stdin(Stdio::piped()).stdout(Stdio::piped()).spawn().unwrap();
    child.stdin.take().unwrap().write_all(b"2 g_{a b};\n").unwrap();
    assert_eq!(stdout(&child.wait_with_output().unwrap()), "1 := 2\\, {g}_{a b};\n");
}

#[test]
fn chart_show_builtin_and_custom() {
    let o = run(&["chart", "show", "cylindrical"]);
    assert!(o.status.success());
    assert_eq!(
        stdout(&o),
        "chart cylindrical\ncoords: r, theta, z\nlg = [[1, 0, 0], [0, r^2, 0], [0, 0, 1]]\n\
         ug = [[1, 0, 0], [0, 1/r^2, 0], [0, 0, 1]]\nsqrt|det g| = abs(r)\n"
    );
    let o = run(&["chart", "show", "polar", "--coords", "{r,theta}", "--metric", "{{1,0},{0,r^2}}"]);
    assert_eq!(stdout(&o), "chart polar\ncoords: r, theta\nlg = [[1, 0], [0, r^2]]\nug = [[1, 0], [0, 1/r^2]]\nsqrt|det g| = abs(r)\n");
}

#[test]
fn unknown_chart_is_rejected() {
    let o = run(&["chart", "show", "nosuch"]);
    assert_eq!(o.status.code(), Some(2));
    assert_eq!(stderr(&o), "error: unknown chart 'nosuch'\n");
}

#[test]
fn christoffel_symbols_of_the_sphere() {
    let out = stdout(&run(&["christoffel", "spherical"]));
    let lines: Vec<&str> = out.lines().collect();
    assert_eq!(lines[0], "christoffel spherical");
    for l in [
        "Gamma^r_{theta theta} = -r",
        "Gamma^r_{phi phi} = -r*sin(theta)^2",
        "Gamma^theta_{r theta} = 1/r",
        "Gamma^theta_{phi phi} = -sin(theta)*cos(theta)",
        "Gamma^phi_{theta phi} = cos(theta)/sin(theta)",
    ] {
        assert!(lines.contains(&l), "missing {}", l);
    }
    assert_eq!(lines.len(), 10);
}

#[test]
fn metric_check_on_builtin_charts() {
    for (name, n) in [("cartesian3", 27), ("cylindrical", 27), ("spherical", 27)] {
        let out = stdout(&run(&["metric-check", name]));
        assert_eq!(out, format!("metric_check {}: all {} components of nabla g vanish\n", name, n));
    }
}

#[test]
fn maxwell_default_fields() {
    let out = stdout(&run(&["maxwell", "cylindrical"]));
    assert!(out.contains("div(B) = diff(B3,z) + diff(B2,theta) + diff(B1,r) + B1/r\n"), "{}", out);
    assert!(out.contains("div(D) - 4*pi*rho = diff(D3,z) + diff(D2,theta) + diff(D1,r) + D1/r - 4*pi*rho\n"));
}

#[test]
fn maxwell_with_field_spec() {
    let mut f = tempfile::NamedTempFile::new().unwrap();
    write!(f, "tensorkernel-fields v1\n# uniform charge\nD = [x, 0, 0]\nrho = 1/(4*pi)\n").unwrap();
    let o = run(&["maxwell", "cartesian3", "--spec", f.path().to_str().unwrap()]);
    assert!(o.status.success(), "{}", stderr(&o));
    assert_eq!(
        stdout(&o),
        "maxwell cartesian3\ndiv(B) = 0\ndiv(D) - 4*pi*rho = 0\nrot(H) + diff(D,t)/c - 4*pi*j/c =\n  0\n  0\n  0\n\
         rot(E) + diff(B,t)/c =\n  0\n  0\n  0\n"
    );

    let mut bad = tempfile::NamedTempFile::new().unwrap();
    writeln!(bad, "bogus").unwrap();
    let o = run(&["maxwell", "cartesian3", "--spec", bad.path().to_str().unwrap()]);
    assert_eq!(o.status.code(), Some(2));
    assert!(stderr(&o).contains("expected the header 'tensorkernel-fields v1'"));
}

#[test]
fn spinor_dimensions() {
    for (n, d) in [("1", "1"), ("2", "2"), ("3", "2"), ("4", "4"), ("5", "4"), ("10", "32")] {
        assert_eq!(stdout(&run(&["spinor-dim", n])), format!("{}\n", d), "n = {}", n);
    }
    assert_eq!(run(&["spinor-dim", "0"]).status.code(), Some(2));
}
