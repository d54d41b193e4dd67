//! Component calculus on coordinate charts.
//!
//! A [`Chart`] holds coordinates and metric components `g_{ij}` as exact
//! [`Scalar`]s; construction derives the inverse metric, the determinant,
//! `sqrt|det g|` and the Christoffel symbols
//! `Γ^a_{bc} = ½ g^{ad}(∂_b g_{dc} + ∂_c g_{bd} − ∂_d g_{bc})` once.
//! Operators work in the holonomic (coordinate) basis:
//!
//! * `div v = (1/√|g|) ∂_i(√|g| v^i)` for contravariant `v`,
//! * `(rot w)^i = ε^{ijk} ∂_j w_k / √|g|` for covariant `w` in three dimensions,
//! * `(grad f)_i = ∂_i f`.

use alloc::string::{String, ToString};
use alloc::vec::Vec;

use thiserror::Error;

use crate::rational::ratio;
use crate::scalar::{parse_scalar, Scalar, ScalarContext, ScalarError};

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum GeometryError {
    #[error("unknown chart '{0}'")]
    UnknownChart(String),
    #[error("the metric of chart '{0}' is singular")]
    SingularMetric(String),
    #[error("the metric of chart '{0}' is not symmetric")]
    AsymmetricMetric(String),
    #[error("chart '{chart}': {reason}")]
    BadChart { chart: String, reason: String },
    #[error("expected a {expected} field, got a {found} field")]
    KindMismatch { expected: &'static str, found: &'static str },
    #[error("rot needs a three-dimensional chart")]
    DimensionNot3,
    #[error("field has {found} components, the chart has {expected} coordinates")]
    DimensionMismatch { expected: usize, found: usize },
    #[error("physical components need an orthogonal (diagonal) metric")]
    NonOrthogonalChart,
    #[error("field spec line {line}: {reason}")]
    FieldSpec { line: usize, reason: String },
    #[error(transparent)]
    Scalar(#[from] ScalarError),
}

pub type Matrix = Vec<Vec<Scalar>>;

/// Names of the built-in charts.
pub const BUILTIN_CHARTS: &[&str] = &["cartesian3", "cylindrical", "spherical"];

#[derive(Clone, Debug, PartialEq)]
pub struct Chart {
    pub name: String,
    pub coords: Vec<String>,
    pub metric: Matrix,
    pub inverse: Matrix,
    pub det: Scalar,
    /// `sqrt|det g|`, with absolute values kept.
    pub sqrt_det: Scalar,
    /// `christoffel[a][b][c] = Γ^a_{bc}`.
    pub christoffel: Vec<Matrix>,
}

fn minor(m: &Matrix, row: usize, col: usize) -> Matrix {
    m.iter()
        .enumerate()
        .filter(|(i, _)| *i != row)
        .map(|(_, r)| r.iter().enumerate().filter(|(j, _)| *j != col).map(|(_, x)| x.clone()).collect())
        .collect()
}

/// Determinant by cofactor expansion along the first row.
pub fn determinant(m: &Matrix) -> Scalar {
    match m.len() {
        0 => Scalar::one(),
        1 => m[0][0].clone(),
        n => {
            let mut acc = Scalar::zero();
            for j in 0..n {
                if m[0][j].is_zero() {
                    continue;
                }
                let t = m[0][j].mul(&determinant(&minor(m, 0, j)));
                acc = if j % 2 == 0 { acc.add(&t) } else { acc.sub(&t) };
            }
            acc.simplify()
        }
    }
}

/// Matrix inverse through the adjugate; `None` if the determinant is zero.
pub fn inverse(m: &Matrix) -> Option<Matrix> {
    let n = m.len();
    let det = determinant(m);
    if det.is_zero() {
        return None;
    }
    let inv_det = det.recip().ok()?;
    let mut out = alloc::vec![alloc::vec![Scalar::zero(); n]; n];
    for (i, row) in out.iter_mut().enumerate() {
        for (j, x) in row.iter_mut().enumerate() {
            let c = determinant(&minor(m, j, i));
            let c = if (i + j) % 2 == 0 { c } else { c.neg() };
            *x = c.mul(&inv_det).simplify();
        }
    }
    Some(out)
}

pub fn mat_mul(a: &Matrix, b: &Matrix) -> Matrix {
    let n = a.len();
    let m = b.first().map_or(0, Vec::len);
    (0..n)
        .map(|i| {
            (0..m)
                .map(|j| (0..b.len()).fold(Scalar::zero(), |acc, k| acc.add(&a[i][k].mul(&b[k][j]))).simplify())
                .collect()
        })
        .collect()
}

impl Chart {
    /// Builds a chart and its derived quantities.
    pub fn new(name: &str, coords: Vec<String>, metric: Matrix) -> Result<Chart, GeometryError> {
        let n = coords.len();
        let bad = |reason: String| GeometryError::BadChart { chart: name.to_string(), reason };
        if n == 0 {
            return Err(bad("no coordinates".into()));
        }
        if metric.len() != n || metric.iter().any(|r| r.len() != n) {
            return Err(bad(alloc::format!("the metric must be {}x{}", n, n)));
        }
        for i in 0..n {
            for j in 0..i {
                if metric[i][j] != metric[j][i] {
                    return Err(GeometryError::AsymmetricMetric(name.to_string()));
                }
            }
        }
        let det = determinant(&metric);
        let inverse = inverse(&metric).ok_or_else(|| GeometryError::SingularMetric(name.to_string()))?;
        let sqrt_det = det.abs().sqrt();
        let dg: Vec<Matrix> = coords.iter().map(|x| metric.iter().map(|r| r.iter().map(|g| g.diff(x)).collect()).collect()).collect();
        let half = ratio(1, 2);
        let mut christoffel = alloc::vec![alloc::vec![alloc::vec![Scalar::zero(); n]; n]; n];
        for (a, gamma_a) in christoffel.iter_mut().enumerate() {
            for b in 0..n {
                for c in 0..n {
                    let mut acc = Scalar::zero();
                    for d in 0..n {
                        if inverse[a][d].is_zero() {
                            continue;
                        }
                        let inner = dg[b][d][c].add(&dg[c][b][d]).sub(&dg[d][b][c]);
                        acc = acc.add(&inverse[a][d].mul(&inner));
                    }
                    gamma_a[b][c] = acc.scale(&half).simplify();
                }
            }
        }
        Ok(Chart { name: name.to_string(), coords, metric, inverse, det, sqrt_det, christoffel })
    }

    pub fn dim(&self) -> usize {
        self.coords.len()
    }

    pub fn is_diagonal(&self) -> bool {
        (0..self.dim()).all(|i| (0..self.dim()).all(|j| i == j || self.metric[i][j].is_zero()))
    }

    /// Builds a chart from the raw argument text of a declaration:
    /// `coords={r,theta}` and `metric={{1,0},{0,r^2}}`.
    pub fn from_source(name: &str, coords: &str, metric: &str) -> Result<Chart, GeometryError> {
        let bad = |reason: &str| GeometryError::BadChart { chart: name.to_string(), reason: reason.to_string() };
        let coords: Vec<String> = split_braced(coords).ok_or_else(|| bad("coords must look like {x,y,z}"))?;
        if coords.iter().any(|c| c.is_empty() || !c.chars().all(|ch| ch.is_ascii_alphanumeric() || ch == '_')) {
            return Err(bad("coordinates must be plain names"));
        }
        let rows = split_braced(metric).ok_or_else(|| bad("metric must look like {{..},{..}}"))?;
        let ctx = ScalarContext::new();
        let mut m = Vec::new();
        for row in rows {
            let cells = split_braced(&row).ok_or_else(|| bad("each metric row must be braced"))?;
            let mut r = Vec::new();
            for cell in cells {
                r.push(parse_scalar(&cell, &ctx)?);
            }
            m.push(r);
        }
        Chart::new(name, coords, m)
    }
}

/// Splits `{a, b, {c, d}}` into its top-level items.
fn split_braced(s: &str) -> Option<Vec<String>> {
    let inner = s.trim().strip_prefix('{')?.strip_suffix('}')?;
    let mut out = Vec::new();
    let mut depth = 0i32;
    let mut cur = String::new();
    for ch in inner.chars() {
        match ch {
            '{' | '(' => depth += 1,
            '}' | ')' => depth -= 1,
            ',' if depth == 0 => {
                out.push(cur.trim().to_string());
                cur.clear();
                continue;
            }
            _ => {}
        }
        if depth < 0 {
            return None;
        }
        cur.push(ch);
    }
    if !cur.trim().is_empty() || !out.is_empty() {
        out.push(cur.trim().to_string());
    }
    Some(out)
}

fn names(v: &[&str]) -> Vec<String> {
    v.iter().map(|s| s.to_string()).collect()
}

fn diagonal(entries: Vec<Scalar>) -> Matrix {
    let n = entries.len();
    entries
        .into_iter()
        .enumerate()
        .map(|(i, e)| {
            let mut row = alloc::vec![Scalar::zero(); n];
            row[i] = e;
            row
        })
        .collect()
}

/// One of the built-in charts.
pub fn builtin_chart(name: &str) -> Result<Chart, GeometryError> {
    let ctx = ScalarContext::new();
    let p = |s: &str| parse_scalar(s, &ctx).expect("built-in metric entries parse");
    match name {
        "cartesian3" => Chart::new(name, names(&["x", "y", "z"]), diagonal(alloc::vec![p("1"), p("1"), p("1")])),
        "cylindrical" => Chart::new(name, names(&["r", "theta", "z"]), diagonal(alloc::vec![p("1"), p("r^2"), p("1")])),
        "spherical" => Chart::new(
            name,
            names(&["r", "theta", "phi"]),
            diagonal(alloc::vec![p("1"), p("r^2"), p("r^2*sin(theta)^2")]),
        ),
        _ => Err(GeometryError::UnknownChart(name.to_string())),
    }
}

// ----- fields and operators -------------------------------------------------

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum FieldKind {
    Scalar,
    Contravariant,
    Covariant,
}

impl FieldKind {
    fn name(self) -> &'static str {
        match self {
            FieldKind::Scalar => "scalar",
            FieldKind::Contravariant => "contravariant",
            FieldKind::Covariant => "covariant",
        }
    }
}

#[derive(Clone, Debug, PartialEq)]
pub struct ComponentField {
    pub kind: FieldKind,
    pub components: Vec<Scalar>,
}

impl ComponentField {
    pub fn new(kind: FieldKind, components: Vec<Scalar>) -> Self {
        ComponentField { kind, components }
    }

    fn expect(&self, kind: FieldKind, c: &Chart) -> Result<(), GeometryError> {
        if self.kind != kind {
            return Err(GeometryError::KindMismatch { expected: kind.name(), found: self.kind.name() });
        }
        if kind != FieldKind::Scalar && self.components.len() != c.dim() {
            return Err(GeometryError::DimensionMismatch { expected: c.dim(), found: self.components.len() });
        }
        Ok(())
    }
}

pub fn div(c: &Chart, v: &ComponentField) -> Result<Scalar, GeometryError> {
    v.expect(FieldKind::Contravariant, c)?;
    let mut acc = Scalar::zero();
    for (x, vi) in c.coords.iter().zip(&v.components) {
        acc = acc.add(&c.sqrt_det.mul(vi).diff(x));
    }
    Ok(acc.div(&c.sqrt_det)?.simplify())
}

pub fn rot(c: &Chart, w: &ComponentField) -> Result<ComponentField, GeometryError> {
    if c.dim() != 3 {
        return Err(GeometryError::DimensionNot3);
    }
    w.expect(FieldKind::Covariant, c)?;
    let inv = c.sqrt_det.recip()?;
    let x = &c.coords;
    let comps = (0..3)
        .map(|i| {
            let (j, k) = ((i + 1) % 3, (i + 2) % 3);
            w.components[k].diff(&x[j]).sub(&w.components[j].diff(&x[k])).mul(&inv).simplify()
        })
        .collect();
    Ok(ComponentField::new(FieldKind::Contravariant, comps))
}

pub fn grad(c: &Chart, f: &Scalar) -> ComponentField {
    ComponentField::new(FieldKind::Covariant, c.coords.iter().map(|x| f.diff(x)).collect())
}

/// `v^i = g^{ij} w_j`.
pub fn raise(c: &Chart, w: &ComponentField) -> Result<ComponentField, GeometryError> {
    w.expect(FieldKind::Covariant, c)?;
    let comps = (0..c.dim())
        .map(|i| (0..c.dim()).fold(Scalar::zero(), |acc, j| acc.add(&c.inverse[i][j].mul(&w.components[j]))).simplify())
        .collect();
    Ok(ComponentField::new(FieldKind::Contravariant, comps))
}

/// `w_i = g_{ij} v^j`.
pub fn lower(c: &Chart, v: &ComponentField) -> Result<ComponentField, GeometryError> {
    v.expect(FieldKind::Contravariant, c)?;
    let comps = (0..c.dim())
        .map(|i| (0..c.dim()).fold(Scalar::zero(), |acc, j| acc.add(&c.metric[i][j].mul(&v.components[j]))).simplify())
        .collect();
    Ok(ComponentField::new(FieldKind::Covariant, comps))
}

/// Lamé coefficients `h_i = sqrt(g_ii)` of an orthogonal chart.
pub fn lame(c: &Chart) -> Result<Vec<Scalar>, GeometryError> {
    if !c.is_diagonal() {
        return Err(GeometryError::NonOrthogonalChart);
    }
    Ok((0..c.dim()).map(|i| c.metric[i][i].sqrt()).collect())
}

/// Components in the normalised orthogonal frame: `h_i v^i` for
/// contravariant and `w_i / h_i` for covariant fields.
pub fn physical_components(c: &Chart, v: &ComponentField) -> Result<ComponentField, GeometryError> {
    let h = lame(c)?;
    if v.kind == FieldKind::Scalar {
        return Err(GeometryError::KindMismatch { expected: "vector", found: "scalar" });
    }
    v.expect(v.kind, c)?;
    let mut comps = Vec::new();
    for (x, hi) in v.components.iter().zip(&h) {
        comps.push(match v.kind {
            FieldKind::Contravariant => x.mul(hi).simplify(),
            _ => x.div(hi)?.simplify(),
        });
    }
    Ok(ComponentField::new(v.kind, comps))
}

/// `∇_k g_{ij} = ∂_k g_{ij} − Γ^l_{ik} g_{lj} − Γ^l_{jk} g_{il}`, indexed
/// `[k][i][j]`.
pub fn metric_compatibility_check(c: &Chart) -> Vec<Matrix> {
    let n = c.dim();
    (0..n)
        .map(|k| {
            (0..n)
                .map(|i| {
                    (0..n)
                        .map(|j| {
                            let mut acc = c.metric[i][j].diff(&c.coords[k]);
                            for l in 0..n {
                                acc = acc.sub(&c.christoffel[l][i][k].mul(&c.metric[l][j]));
                                acc = acc.sub(&c.christoffel[l][j][k].mul(&c.metric[i][l]));
                            }
                            acc.simplify()
                        })
                        .collect()
                })
                .collect()
        })
        .collect()
}

/// Inputs of the Maxwell system: `B, D, j` contravariant, `H, E`
/// covariant, charge density `rho`.
#[derive(Clone, Debug, PartialEq)]
pub struct MaxwellFields {
    pub b: ComponentField,
    pub d: ComponentField,
    pub j: ComponentField,
    pub h: ComponentField,
    pub e: ComponentField,
    pub rho: Scalar,
}

#[derive(Clone, Debug, PartialEq)]
pub struct MaxwellResiduals {
    /// `div B`
    pub div_b: Scalar,
    /// `div D − 4πρ`
    pub div_d: Scalar,
    /// `rot H + (1/c) ∂_t D − (4π/c) j`
    pub rot_h: Vec<Scalar>,
    /// `rot E + (1/c) ∂_t B`
    pub rot_e: Vec<Scalar>,
}

pub const TIME: &str = "t";
pub const LIGHT_SPEED: &str = "c";

pub fn maxwell_residuals(c: &Chart, f: &MaxwellFields) -> Result<MaxwellResiduals, GeometryError> {
    let pi = Scalar::symbol("pi");
    let inv_c = Scalar::symbol(LIGHT_SPEED).recip()?;
    let four_pi = pi.scale(&crate::rational::int(4));
    let div_b = div(c, &f.b)?;
    let div_d = div(c, &f.d)?.sub(&four_pi.mul(&f.rho)).simplify();
    f.j.expect(FieldKind::Contravariant, c)?;
    let rh = rot(c, &f.h)?;
    let re = rot(c, &f.e)?;
    let rot_h = (0..3)
        .map(|i| {
            rh.components[i]
                .add(&f.d.components[i].diff(TIME).mul(&inv_c))
                .sub(&four_pi.mul(&f.j.components[i]).mul(&inv_c))
                .simplify()
        })
        .collect();
    let rot_e = (0..3).map(|i| re.components[i].add(&f.b.components[i].diff(TIME).mul(&inv_c)).simplify()).collect();
    Ok(MaxwellResiduals { div_b, div_d, rot_h, rot_e })
}

// ----- field specs -------------------------------------------------

/// Header line of the field-spec format.
pub const FIELD_SPEC_HEADER: &str = "tensorkernel-fields v1";

/// Parses a field spec:
///
/// ```text
/// tensorkernel-fields v1
/// # comment
/// B = [B1,B2,B3] depends t,r,theta,z
/// rho = rho depends t,r,theta,z
/// E = [0, exp(x)*cos(t), 0]
/// ```
///
/// Bare names followed by `depends` become unknown functions of the listed
/// symbols; other entries are scalar expressions that may use any unknown
/// function declared on an earlier line.
pub fn parse_field_spec(text: &str) -> Result<Vec<(String, Vec<Scalar>)>, GeometryError> {
    let mut lines = text.lines().enumerate().filter(|(_, l)| {
        let t = l.trim();
        !t.is_empty() && !t.starts_with('#')
    });
    let bad = |line: usize, reason: &str| GeometryError::FieldSpec { line: line + 1, reason: reason.to_string() };
    match lines.next() {
        Some((_, l)) if l.trim() == FIELD_SPEC_HEADER => {}
        Some((n, _)) => return Err(bad(n, &alloc::format!("expected the header '{}'", FIELD_SPEC_HEADER))),
        None => return Err(bad(0, "empty field spec")),
    }
    let mut ctx = ScalarContext::new();
    let mut out: Vec<(String, Vec<Scalar>)> = Vec::new();
    for (n, line) in lines {
        let (name, rest) = line.split_once('=').ok_or_else(|| bad(n, "expected 'NAME = value'"))?;
        let name = name.trim().to_string();
        let (value, deps) = match rest.split_once(" depends ") {
            Some((v, d)) => (v.trim(), Some(d.split(',').map(|s| s.trim().to_string()).collect::<Vec<_>>())),
            None => (rest.trim(), None),
        };
        let entries: Vec<String> = match value.strip_prefix('[').and_then(|v| v.strip_suffix(']')) {
            Some(inner) => split_braced(&alloc::format!("{{{}}}", inner)).ok_or_else(|| bad(n, "unbalanced list"))?,
            None => alloc::vec![value.to_string()],
        };
        if let Some(deps) = &deps {
            for e in &entries {
                if e.chars().all(|c| c.is_ascii_alphanumeric() || c == '_') && !e.is_empty() {
                    ctx.depends(e, deps);
                }
            }
        }
        let mut comps = Vec::new();
        for e in &entries {
            comps.push(parse_scalar(e, &ctx).map_err(|err| bad(n, &err.to_string()))?);
        }
        if out.iter().any(|(m, _)| *m == name) {
            return Err(bad(n, "field defined twice"));
        }
        out.push((name, comps));
    }
    Ok(out)
}

/// The field set used when no spec is given: unknown functions of time
/// and the chart coordinates, `B = [B1,B2,B3]`, `D = [D1,D2,D3]`,
/// `j = [j1,j2,j3]`, `H = [H_1,H_2,H_3]`, `E = [E_1,E_2,E_3]`, `rho`.
pub fn default_maxwell_spec(c: &Chart) -> String {
    let mut deps = alloc::vec![TIME.to_string()];
    deps.extend(c.coords.iter().cloned());
    let deps = deps.join(",");
    let mut s = String::from(FIELD_SPEC_HEADER);
    s.push('\n');
    for (name, comps) in [
        ("B", "[B1,B2,B3]"),
        ("D", "[D1,D2,D3]"),
        ("j", "[j1,j2,j3]"),
        ("H", "[H_1,H_2,H_3]"),
        ("E", "[E_1,E_2,E_3]"),
        ("rho", "rho"),
    ] {
        s.push_str(&alloc::format!("{} = {} depends {}\n", name, comps, deps));
    }
    s
}

/// Assembles Maxwell inputs from a parsed field spec; missing vectors are
/// zero and a missing `rho` is zero.
pub fn maxwell_fields(c: &Chart, spec: &[(String, Vec<Scalar>)]) -> Result<MaxwellFields, GeometryError> {
    let get = |name: &str, kind: FieldKind| -> Result<ComponentField, GeometryError> {
        match spec.iter().find(|(n, _)| n == name) {
            Some((_, comps)) => {
                let f = ComponentField::new(kind, comps.clone());
                f.expect(kind, c)?;
                Ok(f)
            }
            None => Ok(ComponentField::new(kind, alloc::vec![Scalar::zero(); c.dim()])),
        }
    };
    let rho = match spec.iter().find(|(n, _)| n == "rho") {
        Some((_, v)) if v.len() == 1 => v[0].clone(),
        Some(_) => return Err(GeometryError::KindMismatch { expected: "scalar", found: "vector" }),
        None => Scalar::zero(),
    };
    Ok(MaxwellFields {
        b: get("B", FieldKind::Contravariant)?,
        d: get("D", FieldKind::Contravariant)?,
        j: get("j", FieldKind::Contravariant)?,
        h: get("H", FieldKind::Covariant)?,
        e: get("E", FieldKind::Covariant)?,
        rho,
    })
}

// ----- reports --------------------------------------------------------------

/// `[[a, b], [c, d]]` or a TeX `pmatrix`.
pub fn format_matrix(m: &Matrix, tex: bool) -> String {
    if tex {
        let rows: Vec<String> =
            m.iter().map(|r| r.iter().map(Scalar::to_tex).collect::<Vec<_>>().join(" & ")).collect();
        alloc::format!("\\begin{{pmatrix}}{}\\end{{pmatrix}}", rows.join("\\cr "))
    } else {
        let rows: Vec<String> =
            m.iter().map(|r| alloc::format!("[{}]", r.iter().map(Scalar::to_plain).collect::<Vec<_>>().join(", "))).collect();
        alloc::format!("[{}]", rows.join(", "))
    }
}

fn fmt(s: &Scalar, tex: bool) -> String {
    if tex {
        s.to_tex()
    } else {
        s.to_plain()
    }
}

pub fn chart_report(c: &Chart, tex: bool) -> String {
    alloc::format!(
        "chart {}\ncoords: {}\nlg = {}\nug = {}\nsqrt|det g| = {}\n",
        c.name,
        c.coords.join(", "),
        format_matrix(&c.metric, tex),
        format_matrix(&c.inverse, tex),
        fmt(&c.sqrt_det, tex)
    )
}

pub fn christoffel_report(c: &Chart, tex: bool) -> String {
    let mut out = alloc::format!("christoffel {}\n", c.name);
    let mut any = false;
    for (a, ga) in c.christoffel.iter().enumerate() {
        for (b, gb) in ga.iter().enumerate() {
            for (k, g) in gb.iter().enumerate() {
                if g.is_zero() {
                    continue;
                }
                any = true;
                out.push_str(&alloc::format!(
                    "Gamma^{}_{{{} {}}} = {}\n",
                    c.coords[a],
                    c.coords[b],
                    c.coords[k],
                    fmt(g, tex)
                ));
            }
        }
    }
    if !any {
        out.push_str("all Christoffel symbols vanish\n");
    }
    out
}

pub fn maxwell_report(c: &Chart, r: &MaxwellResiduals, tex: bool) -> String {
    let vec = |v: &[Scalar]| v.iter().map(|s| alloc::format!("  {}\n", fmt(s, tex))).collect::<String>();
    alloc::format!(
        "maxwell {}\ndiv(B) = {}\ndiv(D) - 4*pi*rho = {}\nrot(H) + diff(D,t)/c - 4*pi*j/c =\n{}rot(E) + diff(B,t)/c =\n{}",
        c.name,
        fmt(&r.div_b, tex),
        fmt(&r.div_d, tex),
        vec(&r.rot_h),
        vec(&r.rot_e)
    )
}

pub fn metric_check_report(c: &Chart) -> String {
    let check = metric_compatibility_check(c);
    let nonzero: Vec<String> = check
        .iter()
        .enumerate()
        .flat_map(|(k, m)| {
            m.iter().enumerate().flat_map(move |(i, r)| {
                r.iter().enumerate().filter(|(_, x)| !x.is_zero()).map(move |(j, x)| {
                    alloc::format!("nabla_{} g_{{{} {}}} = {}", k, i, j, x)
                })
            })
        })
        .collect();
    if nonzero.is_empty() {
        let n = c.dim();
        alloc::format!("metric_check {}: all {} components of nabla g vanish\n", c.name, n * n * n)
    } else {
        alloc::format!("metric_check {}:\n{}\n", c.name, nonzero.join("\n"))
    }
}
