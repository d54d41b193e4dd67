//! Central finite differences.

/// Fourth-order central first derivative of `f` at `x` with step `h`.
pub fn derivative(f: impl Fn(f64) -> f64, x: f64, h: f64) -> f64 {
    (-f(x + 2.0 * h) + 8.0 * f(x + h) - 8.0 * f(x - h) + f(x - 2.0 * h)) / (12.0 * h)
}

/// Partial derivative of `f` with respect to component `k` of `p`.
pub fn partial(f: &dyn Fn(&[f64]) -> f64, p: &[f64], k: usize, h: f64) -> f64 {
    let g = |t: f64| {
        let mut q = p.to_vec();
        q[k] = t;
        f(&q)
    };
    derivative(g, p[k], h)
}

/// Step size scaled to the magnitude of `x`.
pub fn step_for(x: f64) -> f64 {
    1e-3 * x.abs().max(1.0)
}

/// `|a - b| <= tol * max(1, |a|, |b|)`.
pub fn close(a: f64, b: f64, tol: f64) -> bool {
    (a - b).abs() <= tol * 1f64.max(a.abs()).max(b.abs())
}
