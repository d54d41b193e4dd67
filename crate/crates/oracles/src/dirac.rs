//! The Dirac representation of the 4-dimensional Clifford algebra with
//! metric `diag(+1, -1, -1, -1)`, over exact Gaussian integers.

use std::ops::{Add, Mul, Neg, Sub};

/// `re + i·im`.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Default)]
pub struct Gauss {
    pub re: i64,
    pub im: i64,
}

impl Gauss {
    pub const ZERO: Gauss = Gauss { re: 0, im: 0 };
    pub const ONE: Gauss = Gauss { re: 1, im: 0 };
    pub const I: Gauss = Gauss { re: 0, im: 1 };

    pub fn int(n: i64) -> Gauss {
        Gauss { re: n, im: 0 }
    }
}

impl Add for Gauss {
    type Output = Gauss;
    fn add(self, o: Gauss) -> Gauss {
        Gauss { re: self.re + o.re, im: self.im + o.im }
    }
}

impl Sub for Gauss {
    type Output = Gauss;
    fn sub(self, o: Gauss) -> Gauss {
        Gauss { re: self.re - o.re, im: self.im - o.im }
    }
}

impl Mul for Gauss {
    type Output = Gauss;
    fn mul(self, o: Gauss) -> Gauss {
        Gauss { re: self.re * o.re - self.im * o.im, im: self.re * o.im + self.im * o.re }
    }
}

impl Neg for Gauss {
    type Output = Gauss;
    fn neg(self) -> Gauss {
        Gauss { re: -self.re, im: -self.im }
    }
}

/// A 4×4 matrix of Gaussian integers.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct M4(pub [[Gauss; 4]; 4]);

impl M4 {
    pub fn zero() -> M4 {
        M4([[Gauss::ZERO; 4]; 4])
    }

    pub fn identity() -> M4 {
        let mut m = M4::zero();
        for i in 0..4 {
            m.0[i][i] = Gauss::ONE;
        }
        m
    }

    pub fn scale(&self, s: Gauss) -> M4 {
        let mut m = *self;
        for row in &mut m.0 {
            for x in row.iter_mut() {
                *x = *x * s;
            }
        }
        m
    }

    /// Exact division of every entry by `d`; `None` if some entry is not
    /// divisible.
    pub fn div_exact(&self, d: i64) -> Option<M4> {
        let mut m = *self;
        for row in &mut m.0 {
            for x in row.iter_mut() {
                if x.re % d != 0 || x.im % d != 0 {
                    return None;
                }
                *x = Gauss { re: x.re / d, im: x.im / d };
            }
        }
        Some(m)
    }
}

impl Add for M4 {
    type Output = M4;
    fn add(self, o: M4) -> M4 {
        let mut m = self;
        for i in 0..4 {
            for j in 0..4 {
                m.0[i][j] = m.0[i][j] + o.0[i][j];
            }
        }
        m
    }
}

impl Sub for M4 {
    type Output = M4;
    fn sub(self, o: M4) -> M4 {
        self + o.scale(-Gauss::ONE)
    }
}

impl Mul for M4 {
    type Output = M4;
    fn mul(self, o: M4) -> M4 {
        let mut m = M4::zero();
        for i in 0..4 {
            for j in 0..4 {
                let mut acc = Gauss::ZERO;
                for k in 0..4 {
                    acc = acc + self.0[i][k] * o.0[k][j];
                }
                m.0[i][j] = acc;
            }
        }
        m
    }
}

/// Metric component `g_{μν}` (equal to `g^{μν}`).
pub fn metric(mu: usize, nu: usize) -> i64 {
    match (mu, nu) {
        (0, 0) => 1,
        (a, b) if a == b => -1,
        _ => 0,
    }
}

/// `γ^μ` in the Dirac representation.
pub fn gamma_upper(mu: usize) -> M4 {
    let z = Gauss::ZERO;
    let o = Gauss::ONE;
    let i = Gauss::I;
    let rows: [[Gauss; 4]; 4] = match mu {
        0 => [[o, z, z, z], [z, o, z, z], [z, z, -o, z], [z, z, z, -o]],
        1 => [[z, z, z, o], [z, z, o, z], [z, -o, z, z], [-o, z, z, z]],
        2 => [[z, z, z, -i], [z, z, i, z], [z, i, z, z], [-i, z, z, z]],
        3 => [[z, z, o, z], [z, z, z, -o], [-o, z, z, z], [z, o, z, z]],
        _ => panic!("index out of range"),
    };
    M4(rows)
}

/// `γ_μ = g_{μν} γ^ν`.
pub fn gamma_lower(mu: usize) -> M4 {
    gamma_upper(mu).scale(Gauss::int(metric(mu, mu)))
}

/// `γ` with one index of the given position.
pub fn gamma(mu: usize, upper: bool) -> M4 {
    if upper {
        gamma_upper(mu)
    } else {
        gamma_lower(mu)
    }
}

fn permutations(n: usize) -> Vec<(Vec<usize>, i64)> {
    if n == 0 {
        return vec![(Vec::new(), 1)];
    }
    let mut out = Vec::new();
    for (p, s) in permutations(n - 1) {
        // Insert n-1 at every position; inserting at position k from the
        // end adds (n-1-k) inversions.
        for k in 0..n {
            let mut q = p.clone();
            q.insert(k, n - 1);
            let inversions = (n - 1 - k) as i64;
            out.push((q, if inversions % 2 == 0 { s } else { -s }));
        }
    }
    out
}

/// Antisymmetrized product `γ_{[μ1} ... γ_{μr]}` with unit weight
/// (`1/r!` times the signed sum over orderings).
pub fn gamma_antisym(indices: &[(usize, bool)]) -> M4 {
    let r = indices.len();
    let mut acc = M4::zero();
    for (p, s) in permutations(r) {
        let mut m = M4::identity();
        for &k in &p {
            m = m * gamma(indices[k].0, indices[k].1);
        }
        acc = acc + m.scale(Gauss::int(s));
    }
    let fact: i64 = (1..=r as i64).product();
    acc.div_exact(fact).expect("antisymmetrized gamma products are integral")
}
