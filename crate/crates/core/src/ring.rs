//! Exact arithmetic in `Z/p^l` and its unit group.
//!
//! Everything here is integer-exact. Residues are stored as `u64` in `[0, q)`;
//! products go through `u128` so no intermediate can overflow.

use std::fmt;
use std::ops::{Add, Mul, Neg, Sub};

use crate::error::{Error, Result};

/// Largest grid `q^d` any experiment may address.
pub const GRID_CAP: u64 = 1 << 63;

pub fn gcd(mut a: u64, mut b: u64) -> u64 {
    while b != 0 {
        (a, b) = (b, a % b);
    }
    a
}

pub fn is_prime(n: u64) -> bool {
    if n < 2 {
        return false;
    }
    if n % 2 == 0 {
        return n == 2;
    }
    let mut f = 3;
    while f * f <= n {
        if n % f == 0 {
            return false;
        }
        f += 2;
    }
    true
}

/// Trial-division factorisation, primes ascending with multiplicity.
pub fn factorize(mut n: u64) -> Vec<(u64, u32)> {
    let mut out = Vec::new();
    let mut f = 2;
    while f * f <= n {
        if n % f == 0 {
            let mut e = 0;
            while n % f == 0 {
                n /= f;
                e += 1;
            }
            out.push((f, e));
        }
        f += if f == 2 { 1 } else { 2 };
    }
    if n > 1 {
        out.push((n, 1));
    }
    out
}

#[inline]
pub fn mul_mod(a: u64, b: u64, n: u64) -> u64 {
    ((a as u128 * b as u128) % n as u128) as u64
}

pub fn pow_mod(mut base: u64, mut exp: u64, n: u64) -> u64 {
    let mut acc = 1 % n;
    base %= n;
    while exp > 0 {
        if exp & 1 == 1 {
            acc = mul_mod(acc, base, n);
        }
        base = mul_mod(base, base, n);
        exp >>= 1;
    }
    acc
}

/// Reduce a signed integer into `[0, n)`.
#[inline]
pub fn reduce_signed(x: i64, n: u64) -> u64 {
    (x as i128).rem_euclid(n as i128) as u64
}

/// Inverse of `x` modulo an arbitrary `n >= 1`, if it exists.
pub fn mod_inverse(x: u64, n: u64) -> Option<u64> {
    if n == 1 {
        return Some(0);
    }
    let (mut r0, mut r1) = (n as i128, (x % n) as i128);
    let (mut s0, mut s1) = (0i128, 1i128);
    while r1 != 0 {
        let k = r0 / r1;
        (r0, r1) = (r1, r0 - k * r1);
        (s0, s1) = (s1, s0 - k * s1);
    }
    if r0 != 1 {
        return None;
    }
    Some(s0.rem_euclid(n as i128) as u64)
}

/// The ring `Z/p^l` for an odd prime `p`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct Modulus {
    p: u64,
    ell: u32,
    q: u64,
}

impl Modulus {
    pub fn new(p: u64, ell: u32) -> Result<Self> {
        if p == 2 {
            return Err(Error::InvalidModulus("p = 2 is not supported".into()));
        }
        if !is_prime(p) {
            return Err(Error::InvalidModulus(format!("{p} is not prime")));
        }
        if ell == 0 {
            return Err(Error::InvalidModulus("exponent must be at least 1".into()));
        }
        let q = p
            .checked_pow(ell)
            .filter(|&q| q <= GRID_CAP)
            .ok_or_else(|| Error::InvalidModulus(format!("{p}^{ell} does not fit the cap")))?;
        Ok(Self { p, ell, q })
    }

    /// Recover `(p, l)` from `q = p^l`.
    pub fn from_prime_power(q: u64) -> Result<Self> {
        let f = factorize(q);
        match f.as_slice() {
            [(p, ell)] => Self::new(*p, *ell),
            _ => Err(Error::InvalidModulus(format!("{q} is not a prime power"))),
        }
    }

    pub fn p(&self) -> u64 {
        self.p
    }

    pub fn ell(&self) -> u32 {
        self.ell
    }

    pub fn q(&self) -> u64 {
        self.q
    }

    /// `p^i`, for `0 <= i <= l`.
    pub fn p_pow(&self, i: u32) -> u64 {
        debug_assert!(i <= self.ell);
        self.p.pow(i)
    }

    /// `q^d`, rejecting grids beyond [`GRID_CAP`].
    pub fn grid_size(&self, d: usize) -> Result<u64> {
        let d32 = u32::try_from(d).map_err(|_| Error::InvalidRange(format!("dimension {d}")))?;
        match self.q.checked_pow(d32) {
            Some(n) if n <= GRID_CAP => Ok(n),
            _ => Err(Error::CapacityExceeded {
                what: "grid q^d",
                requested: (self.q as u128).saturating_pow(d32),
                limit: GRID_CAP as u128,
            }),
        }
    }

    pub fn unit_count(&self) -> u64 {
        self.q - self.q / self.p
    }

    #[inline]
    pub fn is_unit(&self, x: u64) -> bool {
        x % self.p != 0
    }

    /// Units of `Z/q`, ascending.
    pub fn units(&self) -> impl Iterator<Item = u64> + '_ {
        (1..self.q).filter(move |x| x % self.p != 0)
    }

    pub fn element(&self, value: i64) -> RingElement {
        RingElement {
            value: reduce_signed(value, self.q),
            modulus: *self,
        }
    }
}

impl fmt::Display for Modulus {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "Z/{}^{}", self.p, self.ell)
    }
}

/// p-adic valuation of a residue; `Infinite` exactly for zero.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum Valuation {
    Finite(u32),
    Infinite,
}

impl Valuation {
    pub fn finite(self) -> Option<u32> {
        match self {
            Valuation::Finite(v) => Some(v),
            Valuation::Infinite => None,
        }
    }
}

impl fmt::Display for Valuation {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Valuation::Finite(v) => write!(f, "{v}"),
            Valuation::Infinite => f.write_str("inf"),
        }
    }
}

/// Valuation of `x mod q`: zero maps to `Infinite`.
pub fn valuation_mod(x: u64, m: &Modulus) -> Valuation {
    let mut x = x % m.q;
    if x == 0 {
        return Valuation::Infinite;
    }
    let mut v = 0;
    while x % m.p == 0 {
        x /= m.p;
        v += 1;
    }
    Valuation::Finite(v)
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub struct RingElement {
    value: u64,
    modulus: Modulus,
}

impl RingElement {
    pub fn value(&self) -> u64 {
        self.value
    }

    pub fn modulus(&self) -> Modulus {
        self.modulus
    }

    pub fn is_unit(&self) -> bool {
        self.modulus.is_unit(self.value)
    }

    pub fn val_p(&self) -> Valuation {
        valuation_mod(self.value, &self.modulus)
    }

    pub fn pow(&self, e: u64) -> Self {
        Self {
            value: pow_mod(self.value, e, self.modulus.q),
            modulus: self.modulus,
        }
    }

    pub fn inverse(&self) -> Result<Self> {
        if !self.is_unit() {
            return Err(Error::NotAUnit {
                value: self.value,
                modulus: self.modulus.q,
            });
        }
        let value = mod_inverse(self.value, self.modulus.q).expect("units are invertible");
        Ok(Self {
            value,
            modulus: self.modulus,
        })
    }

    fn same_ring(&self, rhs: &Self) {
        assert_eq!(
            self.modulus, rhs.modulus,
            "arithmetic between different rings"
        );
    }
}

impl fmt::Display for RingElement {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{} (mod {})", self.value, self.modulus.q)
    }
}

impl Add for RingElement {
    type Output = Self;
    fn add(self, rhs: Self) -> Self {
        self.same_ring(&rhs);
        let q = self.modulus.q as u128;
        let value = ((self.value as u128 + rhs.value as u128) % q) as u64;
        Self { value, ..self }
    }
}

impl Sub for RingElement {
    type Output = Self;
    fn sub(self, rhs: Self) -> Self {
        self + (-rhs)
    }
}

impl Neg for RingElement {
    type Output = Self;
    fn neg(self) -> Self {
        let value = (self.modulus.q - self.value) % self.modulus.q;
        Self { value, ..self }
    }
}

impl Mul for RingElement {
    type Output = Self;
    fn mul(self, rhs: Self) -> Self {
        self.same_ring(&rhs);
        Self {
            value: mul_mod(self.value, rhs.value, self.modulus.q),
            ..self
        }
    }
}

pub fn val_p(x: RingElement) -> Valuation {
    x.val_p()
}

pub fn inverse(x: RingElement) -> Result<RingElement> {
    x.inverse()
}

/// Jacobi symbol `(a / m)` for odd `m`, by the reciprocity iteration.
pub fn jacobi(a: i64, m: u64) -> Result<i8> {
    if m % 2 == 0 {
        return Err(Error::EvenModulus(m));
    }
    let mut a = reduce_signed(a, m);
    let mut n = m;
    let mut sign = 1i8;
    while a != 0 {
        let tz = a.trailing_zeros();
        a >>= tz;
        if tz % 2 == 1 && matches!(n % 8, 3 | 5) {
            sign = -sign;
        }
        if a % 4 == 3 && n % 4 == 3 {
            sign = -sign;
        }
        (a, n) = (n % a, a);
    }
    Ok(if n == 1 { sign } else { 0 })
}

/// All square roots of `a` in `Z/q`, ascending.
///
/// Units are handled by lifting the roots mod `p` one power of `p` at a time
/// (Newton step `x -> x - (x^2 - a) / 2x`). Non-units fall back to a scan of
/// the whole ring.
pub fn hensel_sqrt(a: RingElement) -> Vec<RingElement> {
    let m = a.modulus();
    let (p, q) = (m.p(), m.q());
    let target = a.value();
    if !m.is_unit(target) {
        return (0..q)
            .filter(|&x| mul_mod(x, x, q) == target)
            .map(|x| m.element(x as i64))
            .collect();
    }
    let base: Vec<u64> = (1..p).filter(|&x| (x * x) % p == target % p).collect();
    let mut roots: Vec<u64> = base
        .into_iter()
        .map(|mut x| {
            let mut pk = p;
            for _ in 1..m.ell() {
                pk *= p;
                let fx = (mul_mod(x, x, pk) + pk - target % pk) % pk;
                let inv2x = mod_inverse(2 * x % pk, pk).expect("2x is a unit");
                x = (x + pk - mul_mod(fx, inv2x, pk)) % pk;
            }
            x
        })
        .collect();
    roots.sort_unstable();
    roots.into_iter().map(|x| m.element(x as i64)).collect()
}

pub fn mobius(n: u64) -> i8 {
    assert!(n >= 1, "mobius is defined for n >= 1");
    let f = factorize(n);
    if f.iter().any(|&(_, e)| e > 1) {
        0
    } else if f.len() % 2 == 0 {
        1
    } else {
        -1
    }
}

pub fn divisor_count(n: u64) -> u64 {
    assert!(n >= 1, "divisor_count is defined for n >= 1");
    factorize(n).iter().map(|&(_, e)| e as u64 + 1).product()
}

/// `x mod q1*q2 -> (x mod q1, x mod q2)`.
pub fn crt_split(x: u64, q1: u64, q2: u64) -> Result<(u64, u64)> {
    if gcd(q1, q2) != 1 {
        return Err(Error::NotCoprime(q1, q2));
    }
    let x = x % (q1 * q2);
    Ok((x % q1, x % q2))
}

/// Inverse of [`crt_split`].
pub fn crt_join(r1: u64, r2: u64, q1: u64, q2: u64) -> Result<u64> {
    let inv = mod_inverse(q1 % q2, q2).ok_or(Error::NotCoprime(q1, q2))?;
    let (r1, r2) = (r1 % q1, r2 % q2);
    // x = r1 + q1 * ((r2 - r1) * q1^-1 mod q2)
    let diff = (r2 + q2 - r1 % q2) % q2;
    let k = mul_mod(diff, inv, q2);
    Ok(r1 + q1 * k)
}
