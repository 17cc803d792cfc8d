//! Exponential sums: additive characters, quadratic and generalised Gauss
//! sums, Kloosterman and Salié sums.
//!
//! Every sum has a direct-summation routine that walks its index set in
//! ascending order, so results are bit-stable across runs. Closed forms are
//! provided next to them where one exists, and the analytic bounds are
//! exposed as plain functions so callers can compare.

use std::f64::consts::PI;

use num_complex::Complex64;

use crate::error::{Error, Result};
use crate::ring::{
    divisor_count, gcd, hensel_sqrt, jacobi, mod_inverse, mul_mod, reduce_signed, Modulus,
    RingElement,
};

pub type ComplexValue = Complex64;

/// Per-term slack for floating comparisons.
pub const TOL_PER_TERM: f64 = 1e-9;

/// Comparison tolerance for a sum of `terms` unit-modulus terms.
pub fn tolerance(terms: u64) -> f64 {
    TOL_PER_TERM * terms.max(1) as f64
}

/// `exp(2 pi i x / n)`.
pub fn additive_char(x: i64, n: u64) -> ComplexValue {
    assert!(n >= 1, "additive character needs n >= 1");
    let r = reduce_signed(x, n);
    if r == 0 {
        return Complex64::new(1.0, 0.0);
    }
    Complex64::from_polar(1.0, 2.0 * PI * r as f64 / n as f64)
}

/// Precomputed `n`-th roots of unity, `roots[k] = exp(2 pi i k / n)`.
#[derive(Debug, Clone)]
pub struct RootTable {
    n: u64,
    roots: Vec<ComplexValue>,
}

impl RootTable {
    pub fn new(n: u64) -> Self {
        let roots = (0..n).map(|k| additive_char(k as i64, n)).collect();
        Self { n, roots }
    }

    pub fn modulus(&self) -> u64 {
        self.n
    }

    /// Character at a residue already reduced into `[0, n)`.
    #[inline]
    pub fn at(&self, r: u64) -> ComplexValue {
        self.roots[r as usize]
    }

    #[inline]
    pub fn chi(&self, x: i64) -> ComplexValue {
        self.roots[reduce_signed(x, self.n) as usize]
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub struct GaussSumParams {
    pub a: i64,
    pub b: i64,
    pub n: u64,
}

impl GaussSumParams {
    pub fn new(a: i64, b: i64, n: u64) -> Self {
        assert!(n >= 1, "Gauss sum modulus must be positive");
        Self { a, b, n }
    }
}

/// `G(a, b, n) = sum_{x in Z/n} chi(a x^2 + b x)` by literal summation.
pub fn gauss_sum_direct(params: GaussSumParams) -> ComplexValue {
    let n = params.n;
    let table = RootTable::new(n);
    let a = reduce_signed(params.a, n);
    let b = reduce_signed(params.b, n);
    (0..n)
        .map(|x| table.at((mul_mod(a, mul_mod(x, x, n), n) + mul_mod(b, x, n)) % n))
        .sum()
}

/// `epsilon_n`: 1 for `n = 1 mod 4`, `i` for `n = 3 mod 4`.
pub fn epsilon(n: u64) -> ComplexValue {
    debug_assert!(n % 2 == 1);
    if n % 4 == 1 {
        Complex64::new(1.0, 0.0)
    } else {
        Complex64::new(0.0, 1.0)
    }
}

/// `G(a, n)` for odd `n` and `gcd(a, n) = 1`: `epsilon_n (a/n) sqrt(n)`.
fn gauss_unit(a: u64, n: u64) -> ComplexValue {
    if n == 1 {
        return Complex64::new(1.0, 0.0);
    }
    let symbol = jacobi(a as i64, n).expect("odd modulus") as f64;
    epsilon(n) * symbol * (n as f64).sqrt()
}

/// Closed-form `G(a, b, n)`.
///
/// Odd `n` only: the gcd reduction strips `(a, n)`, then completing the
/// square gives `G(a, n) chi(-b^2 / 4a)`. Even `n` falls back to
/// [`gauss_sum_direct`].
pub fn gauss_sum_closed(params: GaussSumParams) -> ComplexValue {
    let n = params.n;
    if n % 2 == 0 {
        return gauss_sum_direct(params);
    }
    let a = reduce_signed(params.a, n);
    let b = reduce_signed(params.b, n);
    let g = gcd(a, n);
    if b % g != 0 {
        return Complex64::new(0.0, 0.0);
    }
    let (a, b, n) = (a / g, b / g, n / g);
    if n == 1 {
        return Complex64::new(g as f64, 0.0);
    }
    let inv4a = mod_inverse(mul_mod(4, a, n), n).expect("4a is a unit for odd n");
    let shift = mul_mod(mul_mod(b, b, n), inv4a, n);
    g as f64 * gauss_unit(a, n) * additive_char(-(shift as i64), n)
}

/// The character `x -> (x/p)^k` on `Z/p^l`, zero on non-units.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub struct DirichletChar {
    modulus: Modulus,
    power: u32,
}

impl DirichletChar {
    pub fn legendre_power(modulus: Modulus, power: u32) -> Self {
        Self { modulus, power }
    }

    pub fn modulus(&self) -> Modulus {
        self.modulus
    }

    pub fn power(&self) -> u32 {
        self.power
    }

    /// Even powers give the principal character.
    pub fn is_principal(&self) -> bool {
        self.power % 2 == 0
    }

    pub fn eval(&self, x: i64) -> i8 {
        let p = self.modulus.p();
        let r = reduce_signed(x, p);
        if r == 0 {
            return 0;
        }
        if self.is_principal() {
            1
        } else {
            jacobi(r as i64, p).expect("odd prime")
        }
    }

    /// Conductor of the primitive character inducing this one.
    pub fn conductor(&self) -> u64 {
        if self.is_principal() {
            1
        } else {
            self.modulus.p()
        }
    }
}

/// `tau(psi, chi_a) = sum_x psi(x) chi_a(x)` by direct summation.
pub fn tau(psi: &DirichletChar, a: RingElement) -> Result<ComplexValue> {
    let m = psi.modulus();
    if a.modulus() != m {
        return Err(Error::ModulusMismatch(m.q(), a.modulus().q()));
    }
    let q = m.q();
    let table = RootTable::new(q);
    let av = a.value();
    Ok(m
        .units()
        .map(|x| table.at(mul_mod(av, x, q)) * psi.eval(x as i64) as f64)
        .sum())
}

/// `tau(psi)` through the primitive character that induces `psi`:
/// `mu(n/n*) psi*(n/n*) tau(psi*)`.
pub fn tau_via_primitive(psi: &DirichletChar) -> ComplexValue {
    let m = psi.modulus();
    let conductor = psi.conductor();
    let ratio = m.q() / conductor;
    let mu = crate::ring::mobius(ratio) as f64;
    if psi.is_principal() {
        // psi* is the trivial character mod 1: psi*(n) = 1, tau(psi*) = 1.
        return Complex64::new(mu, 0.0);
    }
    let p = m.p();
    let star_at_ratio = if ratio == 1 { 1.0 } else { 0.0 };
    let table = RootTable::new(p);
    let tau_star: ComplexValue = (1..p)
        .map(|x| table.at(x) * jacobi(x as i64, p).unwrap() as f64)
        .sum();
    mu * star_at_ratio * tau_star
}

/// Direct sum of `chi(a x^-1 + b x) w(x)` over the units of `Z/q`.
fn unit_sum(a: i64, b: i64, m: &Modulus, weight: impl Fn(u64) -> i8) -> ComplexValue {
    let q = m.q();
    let table = RootTable::new(q);
    let (a, b) = (reduce_signed(a, q), reduce_signed(b, q));
    m.units()
        .map(|x| {
            let inv = mod_inverse(x, q).expect("unit");
            let arg = (mul_mod(a, inv, q) + mul_mod(b, x, q)) % q;
            table.at(arg) * weight(x) as f64
        })
        .sum()
}

/// Kloosterman sum `K(a, b, q)`.
pub fn kloosterman(a: i64, b: i64, q: &Modulus) -> ComplexValue {
    unit_sum(a, b, q, |_| 1)
}

/// Salié sum `S(a, b, q)`, twisted by the Jacobi symbol `(x/q)`.
pub fn salie(a: i64, b: i64, q: &Modulus) -> ComplexValue {
    let n = q.q();
    unit_sum(a, b, q, |x| jacobi(x as i64, n).expect("odd modulus"))
}

/// Explicit evaluation `epsilon_q sqrt(q) (b/q) sum_{v^2 = ab} chi(2v)`,
/// valid when `gcd(2b, q) = 1`; `None` otherwise.
pub fn salie_explicit(a: i64, b: i64, q: &Modulus) -> Option<ComplexValue> {
    let n = q.q();
    let b_red = reduce_signed(b, n);
    if !q.is_unit(b_red) {
        return None;
    }
    let ab = q.element(a) * q.element(b);
    let table = RootTable::new(n);
    let roots: ComplexValue = hensel_sqrt(ab)
        .into_iter()
        .map(|v| table.at(mul_mod(2, v.value(), n)))
        .sum();
    let symbol = jacobi(b_red as i64, n).expect("odd modulus") as f64;
    Some(epsilon(n) * (n as f64).sqrt() * symbol * roots)
}

/// `f(q) gcd(a, b, q)^(1/2) q^(1/2)`.
pub fn weil_bound(a: i64, b: i64, q: &Modulus) -> f64 {
    let n = q.q();
    let g = gcd(gcd(reduce_signed(a, n), reduce_signed(b, n)), n);
    divisor_count(n) as f64 * (g as f64).sqrt() * (n as f64).sqrt()
}

/// `sum_{u in (Z/p^beta)^x} chi(a u^-1 + b u) (u/p)^(beta d)` for unit `b`.
pub fn twisted_unit_sum(a: i64, b: i64, beta: u32, d: u32, p: u64) -> Result<ComplexValue> {
    let m = Modulus::new(p, beta)?;
    let b_red = reduce_signed(b, m.q());
    if !m.is_unit(b_red) {
        return Err(Error::NotAUnit {
            value: b_red,
            modulus: m.q(),
        });
    }
    let exponent = beta * d;
    Ok(unit_sum(a, b, &m, |u| {
        if exponent % 2 == 0 {
            1
        } else {
            jacobi(u as i64, p).expect("odd prime")
        }
    }))
}

/// `(beta + 1) p^(beta/2)`.
pub fn twisted_bound(beta: u32, p: u64) -> f64 {
    (beta as f64 + 1.0) * (p as f64).powf(beta as f64 / 2.0)
}

/// `sum_{z in (Z/p^m)^x} chi(p^n z)` with `chi` the additive character mod
/// `p^m`, by direct summation.
pub fn unit_char_sum(n: u32, m: u32, p: u64) -> Result<ComplexValue> {
    if n >= m {
        return Err(Error::InvalidRange(format!("need n < m, got n={n}, m={m}")));
    }
    let md = Modulus::new(p, m)?;
    let q = md.q();
    let table = RootTable::new(q);
    let pn = p.pow(n);
    Ok(md.units().map(|z| table.at(mul_mod(pn, z, q))).sum())
}

/// Exact value of [`unit_char_sum`]: `-p^(m-1)` when `n = m - 1`, else 0.
pub fn unit_char_sum_exact(n: u32, m: u32, p: u64) -> Result<i64> {
    if n >= m {
        return Err(Error::InvalidRange(format!("need n < m, got n={n}, m={m}")));
    }
    Ok(if n + 1 == m { -(p.pow(m - 1) as i64) } else { 0 })
}

/// Whether `x -> a/x + b x` permutes the units of `Z/q`.
pub fn h_map_is_bijective(a: i64, b: i64, q: &Modulus) -> bool {
    let n = q.q();
    let (a, b) = (reduce_signed(a, n), reduce_signed(b, n));
    let mut hit = vec![false; n as usize];
    for x in q.units() {
        let inv = mod_inverse(x, n).expect("unit");
        let y = (mul_mod(a, inv, n) + mul_mod(b, x, n)) % n;
        if !q.is_unit(y) || hit[y as usize] {
            return false;
        }
        hit[y as usize] = true;
    }
    true
}
