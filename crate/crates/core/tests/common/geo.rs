//! Finite-difference oracle for the component calculus. Each chart comes
//! with an embedding into Cartesian space; the oracle metric is `JᵀJ` of
//! the embedding Jacobian, and every operator is rebuilt numerically from
//! that metric by central differences.

use std::f64::consts::PI;

use rand::rngs::StdRng;
use rand::Rng;
use tensorkernel_core::geometry::{
    self, builtin_chart, Chart, ComponentField, FieldKind, MaxwellFields, LIGHT_SPEED, TIME,
};
use tensorkernel_core::scalar::{parse_scalar, Leaf, Scalar, ScalarContext};
use tensorkernel_oracles::fd::{close, derivative, partial, step_for};

/// Points per chart.
pub const POINTS: usize = 10;
/// Tolerance of every comparison: `|a - b| <= RTOL * max(1, |a|, |b|)`.
pub const RTOL: f64 = 1e-6;
/// Value given to the speed of light in numeric checks.
pub const C_VALUE: f64 = 3.0;

pub type Embedding = fn(&[f64]) -> [f64; 3];

pub struct Case {
    pub chart: Chart,
    pub embed: Embedding,
    pub domain: [(f64, f64); 3],
}

fn cartesian(p: &[f64]) -> [f64; 3] {
    [p[0], p[1], p[2]]
}

fn cylindrical(p: &[f64]) -> [f64; 3] {
    [p[0] * p[1].cos(), p[0] * p[1].sin(), p[2]]
}

fn spherical(p: &[f64]) -> [f64; 3] {
    [p[0] * p[1].sin() * p[2].cos(), p[0] * p[1].sin() * p[2].sin(), p[0] * p[1].cos()]
}

fn sheared(p: &[f64]) -> [f64; 3] {
    [p[0] + p[1] * p[1], p[1], p[2] + p[0] * p[1]]
}

/// The metric of [`sheared`], written out by hand: a non-orthogonal chart.
pub const SHEARED_METRIC: &str = "{{1+v^2, 2*v+u*v, v}, {2*v+u*v, 1+u^2+4*v^2, u}, {v, u, 1}}";

pub fn cases() -> Vec<Case> {
    vec![
        Case {
            chart: builtin_chart("cartesian3").unwrap(),
            embed: cartesian,
            domain: [(-2.0, 2.0), (-2.0, 2.0), (-2.0, 2.0)],
        },
        Case {
            chart: builtin_chart("cylindrical").unwrap(),
            embed: cylindrical,
            domain: [(0.5, 3.0), (-3.0, 3.0), (-2.0, 2.0)],
        },
        Case {
            chart: builtin_chart("spherical").unwrap(),
            embed: spherical,
            domain: [(0.5, 3.0), (0.3, 2.8), (-3.0, 3.0)],
        },
        Case {
            chart: Chart::from_source("sheared", "{u,v,w}", SHEARED_METRIC).unwrap(),
            embed: sheared,
            domain: [(-1.5, 1.5), (-1.5, 1.5), (-1.5, 1.5)],
        },
    ]
}

/// A point of the chart domain and a time.
pub fn random_point(rng: &mut StdRng, case: &Case) -> (Vec<f64>, f64) {
    let p = case.domain.iter().map(|&(lo, hi)| rng.random_range(lo..hi)).collect();
    (p, rng.random_range(-1.0..1.0))
}

/// Numeric value of `s` at chart point `p` and time `t`.
pub fn eval(chart: &Chart, s: &Scalar, p: &[f64], t: f64) -> f64 {
    let env = |leaf: Leaf| match leaf {
        Leaf::Sym(n) => match chart.coords.iter().position(|c| c == n) {
            Some(k) => Some(p[k]),
            None if n == TIME => Some(t),
            None if n == LIGHT_SPEED => Some(C_VALUE),
            None if n == "pi" => Some(PI),
            None => None,
        },
        _ => None,
    };
    s.eval(&env).unwrap_or_else(|e| panic!("cannot evaluate {}: {}", s.to_plain(), e))
}

fn check(what: &str, p: &[f64], kernel: f64, oracle: f64) -> Result<(), String> {
    if close(kernel, oracle, RTOL) {
        Ok(())
    } else {
        Err(format!("{} at {:?}: kernel {} vs oracle {}", what, p, kernel, oracle))
    }
}

// ----- oracle metric --------------------------------------------------------

pub type Mat = Vec<Vec<f64>>;

pub fn oracle_metric(embed: Embedding, p: &[f64]) -> Mat {
    let jac: Vec<[f64; 3]> = (0..3)
        .map(|i| {
            let mut col = [0.0; 3];
            for (a, c) in col.iter_mut().enumerate() {
                *c = partial(&|q: &[f64]| embed(q)[a], p, i, step_for(p[i]));
            }
            col
        })
        .collect();
    (0..3).map(|i| (0..3).map(|j| (0..3).map(|a| jac[i][a] * jac[j][a]).sum()).collect()).collect()
}

/// Gauss–Jordan inverse with partial pivoting.
pub fn invert(m: &Mat) -> Mat {
    let n = m.len();
    let mut a: Mat = m.iter().enumerate().map(|(i, r)| {
        let mut row = r.clone();
        row.extend((0..n).map(|j| f64::from(u8::from(i == j))));
        row
    }).collect();
    for col in 0..n {
        let piv = (col..n).max_by(|&x, &y| a[x][col].abs().total_cmp(&a[y][col].abs())).unwrap();
        a.swap(col, piv);
        let d = a[col][col];
        assert!(d.abs() > 1e-12, "singular oracle metric");
        for v in &mut a[col] {
            *v /= d;
        }
        for r in 0..n {
            if r != col {
                let f = a[r][col];
                let pivot_row = a[col].clone();
                for (v, pv) in a[r].iter_mut().zip(&pivot_row) {
                    *v -= f * pv;
                }
            }
        }
    }
    a.into_iter().map(|r| r[n..].to_vec()).collect()
}

pub fn det3(m: &Mat) -> f64 {
    m[0][0] * (m[1][1] * m[2][2] - m[1][2] * m[2][1]) - m[0][1] * (m[1][0] * m[2][2] - m[1][2] * m[2][0])
        + m[0][2] * (m[1][0] * m[2][1] - m[1][1] * m[2][0])
}

fn sqrt_g(embed: Embedding, p: &[f64]) -> f64 {
    det3(&oracle_metric(embed, p)).abs().sqrt()
}

// ----- field templates ------------------------------------------------------

/// Substitutes the chart's coordinate names for the placeholders `X Y Z`.
pub fn instantiate(template: &str, chart: &Chart) -> String {
    template.replace('X', &chart.coords[0]).replace('Y', &chart.coords[1]).replace('Z', &chart.coords[2])
}

pub fn scalar(template: &str, chart: &Chart) -> Scalar {
    parse_scalar(&instantiate(template, chart), &ScalarContext::new()).unwrap()
}

pub const VECTOR: [&str; 3] = ["X^2*sin(Y) + Z*t", "cos(Y)*Z*X + t^2", "exp(-X)*t + Y*Z"];
pub const COVECTOR: [&str; 3] = ["X*Y*Z + t", "sin(X)*cos(Z)*t", "X^3 + Y^2*t"];
pub const FUNCTION: &str = "X^2*Y + sin(Z)*t";

pub const MAXWELL_SPEC: &str = "tensorkernel-fields v1
# concrete fields for the finite-difference comparison
B = [X*Z*t, sin(Y)*t^2, X + Y*Z]
D = [cos(X*t), Y^2, Z*X*t]
j = [t*Y, X^2, sin(Z)]
H = [Y*t, X*Z, cos(Y)*t]
E = [exp(Z)*t, X*Y, Z^2*t]
rho = X*Y + t*Z
";

pub fn field(kind: FieldKind, templates: &[&str; 3], chart: &Chart) -> ComponentField {
    ComponentField::new(kind, templates.iter().map(|s| scalar(s, chart)).collect())
}

fn values(chart: &Chart, f: &ComponentField, p: &[f64], t: f64) -> Vec<f64> {
    f.components.iter().map(|s| eval(chart, s, p, t)).collect()
}

fn oracle_div(case: &Case, v: &ComponentField, p: &[f64], t: f64) -> f64 {
    let c = &case.chart;
    let embed = case.embed;
    let mut acc = 0.0;
    for i in 0..3 {
        let comp = &v.components[i];
        acc += partial(&|q: &[f64]| sqrt_g(embed, q) * eval(c, comp, q, t), p, i, step_for(p[i]));
    }
    acc / sqrt_g(embed, p)
}

fn oracle_rot(case: &Case, w: &ComponentField, p: &[f64], t: f64) -> Vec<f64> {
    let c = &case.chart;
    (0..3)
        .map(|i| {
            let (j, k) = ((i + 1) % 3, (i + 2) % 3);
            let dj = partial(&|q: &[f64]| eval(c, &w.components[k], q, t), p, j, step_for(p[j]));
            let dk = partial(&|q: &[f64]| eval(c, &w.components[j], q, t), p, k, step_for(p[k]));
            (dj - dk) / sqrt_g(case.embed, p)
        })
        .collect()
}

fn oracle_dt(chart: &Chart, s: &Scalar, p: &[f64], t: f64) -> f64 {
    derivative(|tt| eval(chart, s, p, tt), t, step_for(t))
}

// ----- checks ---------------------------------------------------------------

/// Metric, inverse, `sqrt|det g|` and Christoffel symbols at one point.
pub fn check_chart_data(case: &Case, p: &[f64]) -> Result<(), String> {
    let c = &case.chart;
    let g = oracle_metric(case.embed, p);
    let ginv = invert(&g);
    for i in 0..3 {
        for j in 0..3 {
            check(&format!("{} g[{}][{}]", c.name, i, j), p, eval(c, &c.metric[i][j], p, 0.0), g[i][j])?;
            check(&format!("{} ug[{}][{}]", c.name, i, j), p, eval(c, &c.inverse[i][j], p, 0.0), ginv[i][j])?;
        }
    }
    check(&format!("{} sqrt|det g|", c.name), p, eval(c, &c.sqrt_det, p, 0.0), det3(&g).abs().sqrt())?;
    let embed = case.embed;
    // dg[k][i][j] = ∂_k g_ij
    let dg: Vec<Mat> = (0..3)
        .map(|k| {
            (0..3)
                .map(|i| (0..3).map(|j| partial(&|q: &[f64]| oracle_metric(embed, q)[i][j], p, k, step_for(p[k]))).collect())
                .collect()
        })
        .collect();
    for a in 0..3 {
        for b in 0..3 {
            for cc in 0..3 {
                let oracle: f64 =
                    (0..3).map(|d| 0.5 * ginv[a][d] * (dg[b][d][cc] + dg[cc][b][d] - dg[d][b][cc])).sum();
                let kernel = eval(c, &c.christoffel[a][b][cc], p, 0.0);
                check(&format!("{} Gamma^{}_{{{} {}}}", c.name, a, b, cc), p, kernel, oracle)?;
            }
        }
    }
    Ok(())
}

/// div, rot, grad, raise, lower and physical components at one point.
pub fn check_operators(case: &Case, p: &[f64], t: f64) -> Result<(), String> {
    let c = &case.chart;
    let v = field(FieldKind::Contravariant, &VECTOR, c);
    let w = field(FieldKind::Covariant, &COVECTOR, c);
    let f = scalar(FUNCTION, c);
    let g = oracle_metric(case.embed, p);
    let ginv = invert(&g);

    let div = geometry::div(c, &v).map_err(|e| e.to_string())?;
    check(&format!("{} div", c.name), p, eval(c, &div, p, t), oracle_div(case, &v, p, t))?;

    let rot = geometry::rot(c, &w).map_err(|e| e.to_string())?;
    for (i, (k, o)) in values(c, &rot, p, t).into_iter().zip(oracle_rot(case, &w, p, t)).enumerate() {
        check(&format!("{} rot[{}]", c.name, i), p, k, o)?;
    }

    let grad = geometry::grad(c, &f);
    for (i, k) in values(c, &grad, p, t).into_iter().enumerate() {
        let o = partial(&|q: &[f64]| eval(c, &f, q, t), p, i, step_for(p[i]));
        check(&format!("{} grad[{}]", c.name, i), p, k, o)?;
    }

    let wv = values(c, &w, p, t);
    let raised = values(c, &geometry::raise(c, &w).map_err(|e| e.to_string())?, p, t);
    let vv = values(c, &v, p, t);
    let lowered = values(c, &geometry::lower(c, &v).map_err(|e| e.to_string())?, p, t);
    for i in 0..3 {
        let up: f64 = (0..3).map(|j| ginv[i][j] * wv[j]).sum();
        let down: f64 = (0..3).map(|j| g[i][j] * vv[j]).sum();
        check(&format!("{} raise[{}]", c.name, i), p, raised[i], up)?;
        check(&format!("{} lower[{}]", c.name, i), p, lowered[i], down)?;
    }

    if c.is_diagonal() {
        let phys = values(c, &geometry::physical_components(c, &v).map_err(|e| e.to_string())?, p, t);
        for i in 0..3 {
            check(&format!("{} physical[{}]", c.name, i), p, phys[i], g[i][i].sqrt() * vv[i])?;
        }
    }
    Ok(())
}

pub fn concrete_maxwell_fields(chart: &Chart) -> MaxwellFields {
    let spec = geometry::parse_field_spec(&instantiate(MAXWELL_SPEC, chart)).unwrap();
    geometry::maxwell_fields(chart, &spec).unwrap()
}

/// The four Maxwell residuals on concrete fields at one point.
pub fn check_maxwell(case: &Case, fields: &MaxwellFields, p: &[f64], t: f64) -> Result<(), String> {
    let c = &case.chart;
    let r = geometry::maxwell_residuals(c, fields).map_err(|e| e.to_string())?;
    let cv = C_VALUE;
    check(&format!("{} div B", c.name), p, eval(c, &r.div_b, p, t), oracle_div(case, &fields.b, p, t))?;
    let div_d = oracle_div(case, &fields.d, p, t) - 4.0 * PI * eval(c, &fields.rho, p, t);
    check(&format!("{} div D", c.name), p, eval(c, &r.div_d, p, t), div_d)?;
    let rot_h = oracle_rot(case, &fields.h, p, t);
    let rot_e = oracle_rot(case, &fields.e, p, t);
    for i in 0..3 {
        let dd = oracle_dt(c, &fields.d.components[i], p, t);
        let db = oracle_dt(c, &fields.b.components[i], p, t);
        let j = eval(c, &fields.j.components[i], p, t);
        check(&format!("{} rot H[{}]", c.name, i), p, eval(c, &r.rot_h[i], p, t), rot_h[i] + dd / cv - 4.0 * PI * j / cv)?;
        check(&format!("{} rot E[{}]", c.name, i), p, eval(c, &r.rot_e[i], p, t), rot_e[i] + db / cv)?;
    }
    Ok(())
}

/// Every numeric check on `POINTS` random points of every chart.
pub fn check_all(seed: u64) -> Result<usize, String> {
    let mut rng = super::rng(seed);
    let mut count = 0;
    for case in cases() {
        let fields = concrete_maxwell_fields(&case.chart);
        for _ in 0..POINTS {
            let (p, t) = random_point(&mut rng, &case);
            check_chart_data(&case, &p)?;
            check_operators(&case, &p, t)?;
            check_maxwell(&case, &fields, &p, t)?;
            count += 1;
        }
    }
    Ok(count)
}

/// `metric_compatibility_check` vanishes identically.
pub fn metric_compatible(chart: &Chart) -> bool {
    geometry::metric_compatibility_check(chart).iter().flatten().flatten().all(Scalar::is_zero)
}

/// The residual rows printed for the default (symbolic) fields, as the
/// reference forms they must equal after normalisation.
pub const GOLDEN_ROT_H: [&str; 3] = [
    "(diff(H_3,theta) - diff(H_2,z))/abs(r) + diff(D1,t)/c - 4*pi*j1/c",
    "-(diff(H_3,r) - diff(H_1,z))/abs(r) + diff(D2,t)/c - 4*pi*j2/c",
    "(diff(H_2,r) - diff(H_1,theta))/abs(r) + diff(D3,t)/c - 4*pi*j3/c",
];
pub const GOLDEN_ROT_E: [&str; 3] = [
    "(diff(E_3,theta) - diff(E_2,z))/abs(r) + diff(B1,t)/c",
    "diff(B2,t)/c - (diff(E_3,r) - diff(E_1,z))/abs(r)",
    "(diff(E_2,r) - diff(E_1,theta))/abs(r) + diff(B3,t)/c",
];
pub const GOLDEN_DIV_B: &str = "diff(B3,z) + diff(B2,theta) + diff(B1,r) + B1/r";
pub const GOLDEN_DIV_D: &str = "diff(D3,z) + diff(D2,theta) + diff(D1,r) + D1/r - 4*pi*rho";

/// Context declaring the default Maxwell unknowns on `chart`.
pub fn maxwell_context(chart: &Chart) -> ScalarContext {
    let mut deps = vec![TIME.to_string()];
    deps.extend(chart.coords.iter().cloned());
    let mut ctx = ScalarContext::new();
    for n in ["B1", "B2", "B3", "D1", "D2", "D3", "j1", "j2", "j3", "H_1", "H_2", "H_3", "E_1", "E_2", "E_3", "rho"] {
        ctx.depends(n, &deps);
    }
    ctx
}

/// `a - b` normalises to zero.
pub fn same_normal_form(a: &Scalar, b: &Scalar) -> bool {
    a.sub(b).simplify().is_zero()
}

/// Residuals for the default fields on the cylindrical chart agree with
/// the reference forms.
pub fn check_golden_residuals() -> Result<(), String> {
    let chart = builtin_chart("cylindrical").unwrap();
    let spec = geometry::parse_field_spec(&geometry::default_maxwell_spec(&chart)).map_err(|e| e.to_string())?;
    let fields = geometry::maxwell_fields(&chart, &spec).map_err(|e| e.to_string())?;
    let r = geometry::maxwell_residuals(&chart, &fields).map_err(|e| e.to_string())?;
    let ctx = maxwell_context(&chart);
    let parse = |s: &str| parse_scalar(s, &ctx).map_err(|e| format!("{}: {}", s, e));
    let mut pairs: Vec<(&str, &Scalar, &str)> =
        vec![("div B", &r.div_b, GOLDEN_DIV_B), ("div D", &r.div_d, GOLDEN_DIV_D)];
    for i in 0..3 {
        pairs.push(("rot H", &r.rot_h[i], GOLDEN_ROT_H[i]));
        pairs.push(("rot E", &r.rot_e[i], GOLDEN_ROT_E[i]));
    }
    for (what, got, want) in pairs {
        if !same_normal_form(got, &parse(want)?) {
            return Err(format!("{}: got {}, expected {}", what, got.to_plain(), want));
        }
    }
    if r.div_b.to_plain() != GOLDEN_DIV_B || r.div_d.to_plain() != GOLDEN_DIV_D {
        return Err(format!("divergence lines print as {} / {}", r.div_b.to_plain(), r.div_d.to_plain()));
    }
    Ok(())
}

/// Vacuum plane wave `E_y = cos(z - c t)`, `B_x = -cos(z - c t)` on the
/// Cartesian chart. Gauss and Faraday residuals vanish identically; the
/// Ampère row carries `+ (1/c) ∂_t D`, so for a vacuum solution it equals
/// exactly `(2/c) ∂_t D`.
pub fn plane_wave_residuals_vanish() -> Result<(), String> {
    let chart = builtin_chart("cartesian3").unwrap();
    let spec = "tensorkernel-fields v1
E = [0, cos(z - c*t), 0]
D = [0, cos(z - c*t), 0]
B = [-cos(z - c*t), 0, 0]
H = [-cos(z - c*t), 0, 0]
";
    let fields = geometry::maxwell_fields(&chart, &geometry::parse_field_spec(spec).map_err(|e| e.to_string())?)
        .map_err(|e| e.to_string())?;
    let r = geometry::maxwell_residuals(&chart, &fields).map_err(|e| e.to_string())?;
    let zero: Vec<&Scalar> = [&r.div_b, &r.div_d].into_iter().chain(&r.rot_e).collect();
    if let Some(s) = zero.iter().find(|s| !s.is_zero()) {
        return Err(format!("plane-wave residual {} is not zero", s.to_plain()));
    }
    let two_over_c = Scalar::symbol(LIGHT_SPEED).recip().map_err(|e| e.to_string())?.scale(&tensorkernel_core::rational::int(2));
    for (row, d) in r.rot_h.iter().zip(&fields.d.components) {
        let expected = d.diff(TIME).mul(&two_over_c);
        if !same_normal_form(row, &expected) {
            return Err(format!("Ampère row {} differs from {}", row.to_plain(), expected.to_plain()));
        }
    }
    Ok(())
}
