//! Spheres `S_j = { x in (Z/q)^d : x_1^2 + ... + x_d^2 = j }`.
//!
//! Sizes come two ways: exhaustive enumeration of the grid, and the
//! Gauss-sum expansion `|S_j| = q^-1 (T_inf + T_0 + ... + T_{l-1})` where
//! `T_i` collects the frequencies of valuation `i`. Fourier decay of the
//! indicator is measured with [`crate::fourier`].

use num_complex::Complex64;
use rayon::prelude::*;

use crate::charsum::{additive_char, gauss_sum_closed, ComplexValue, GaussSumParams};
use crate::error::{Error, Result};
use crate::fourier::{forward, FourierCoefficients, GridFunction};
use crate::points::{PointSet, DENSE_CAP};
use crate::ring::{gcd, Modulus};

/// Largest grid walked by exhaustive enumeration.
pub const ENUM_CAP: u64 = 1 << 32;

/// Largest acceptable distance between the Gauss-sum reconstruction of a
/// sphere size and the nearest integer.
pub const MAX_ROUNDING_DRIFT: f64 = 1e-6;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub struct SphereSpec {
    modulus: Modulus,
    dim: usize,
    radius: u64,
}

impl SphereSpec {
    pub fn new(modulus: Modulus, dim: usize, radius: u64) -> Result<Self> {
        if dim < 2 {
            return Err(Error::InvalidRange(format!("sphere dimension must be >= 2, got {dim}")));
        }
        modulus.grid_size(dim)?;
        Ok(Self {
            modulus,
            dim,
            radius: radius % modulus.q(),
        })
    }

    pub fn modulus(&self) -> Modulus {
        self.modulus
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn radius(&self) -> u64 {
        self.radius
    }

    pub fn unit_radius(&self) -> bool {
        self.modulus.is_unit(self.radius)
    }

    /// `q^(d-1)`.
    pub fn main_term(&self) -> u64 {
        self.modulus.q().pow(self.dim as u32 - 1)
    }

    fn require_unit(&self) -> Result<()> {
        if self.unit_radius() {
            Ok(())
        } else {
            Err(Error::NotAUnit {
                value: self.radius,
                modulus: self.modulus.q(),
            })
        }
    }
}

fn enum_size(n: u64, dim: usize) -> Result<u64> {
    match n.checked_pow(dim as u32) {
        Some(total) if total <= ENUM_CAP => Ok(total),
        _ => Err(Error::CapacityExceeded {
            what: "exhaustive enumeration",
            requested: (n as u128).saturating_pow(dim as u32),
            limit: ENUM_CAP as u128,
        }),
    }
}

/// `||x|| mod n` for every point of a line, given the norm of the other
/// coordinates.
fn squares(n: u64) -> Vec<u64> {
    (0..n).map(|x| x * x % n).collect()
}

/// Norm of coordinates `1..d` of the line with outer index `r`.
fn outer_norm(mut r: u64, n: u64, dim: usize, sq: &[u64]) -> u64 {
    let mut s = 0;
    for _ in 1..dim {
        s += sq[(r % n) as usize];
        r /= n;
    }
    s % n
}

/// Histogram of `||x||` over all of `(Z/n)^d`, by exhaustive enumeration.
///
/// Works for any modulus `n >= 1`, not just prime powers, so it also serves
/// the composite side of the CRT check.
pub fn norm_histogram(n: u64, dim: usize) -> Result<Vec<u64>> {
    if n == 0 || dim == 0 {
        return Err(Error::InvalidRange("need n >= 1 and d >= 1".into()));
    }
    let total = enum_size(n, dim)?;
    let sq = squares(n);
    let lines = total / n;
    let hist = (0..lines)
        .into_par_iter()
        .fold(
            || vec![0u64; n as usize],
            |mut h, r| {
                let s = outer_norm(r, n, dim, &sq);
                for &x2 in &sq {
                    let v = s + x2;
                    h[(if v >= n { v - n } else { v }) as usize] += 1;
                }
                h
            },
        )
        .reduce(
            || vec![0u64; n as usize],
            |mut a, b| {
                a.iter_mut().zip(b).for_each(|(x, y)| *x += y);
                a
            },
        );
    Ok(hist)
}

/// `||x||` for every cell of the grid, in the standard layout.
pub fn norm_grid(modulus: &Modulus, dim: usize) -> Result<Vec<u64>> {
    let n = modulus.q();
    let total = enum_size(n, dim)?;
    let sq = squares(n);
    let mut out = vec![0u64; total as usize];
    out.par_chunks_mut(n as usize).enumerate().for_each(|(r, line)| {
        let s = outer_norm(r as u64, n, dim, &sq);
        for (slot, &x2) in line.iter_mut().zip(&sq) {
            *slot = (s + x2) % n;
        }
    });
    Ok(out)
}

/// Every point of `S_j`, by exhaustive enumeration.
pub fn enumerate_sphere(spec: &SphereSpec) -> Result<PointSet> {
    let n = spec.modulus.q();
    let total = enum_size(n, spec.dim)?;
    let sq = squares(n);
    let (dim, j) = (spec.dim, spec.radius);
    let indices: Vec<u64> = (0..total / n)
        .into_par_iter()
        .flat_map_iter(|r| {
            let s = outer_norm(r, n, dim, &sq);
            let sq = &sq;
            (0..n).filter(move |&x| (s + sq[x as usize]) % n == j).map(move |x| r * n + x)
        })
        .collect();
    PointSet::from_indices(spec.modulus, spec.dim, indices)
}

/// Sphere size by enumeration, without materialising the points.
pub fn sphere_size(spec: &SphereSpec) -> Result<u64> {
    Ok(norm_histogram(spec.modulus.q(), spec.dim)?[spec.radius as usize])
}

/// Result of counting a sphere through Gauss sums.
#[derive(Debug, Clone, PartialEq)]
pub struct SphereCountReport {
    pub spec: SphereSpec,
    pub exact_count: u64,
    /// `q^(d-1)`.
    pub main_term: u64,
    /// `T_0, ..., T_{l-1}`; empty when the radius is not a unit.
    pub t_terms: Vec<ComplexValue>,
    /// `|T_i|`.
    pub error_terms: Vec<f64>,
    /// Per-level bounds on `|T_i|`.
    pub level_bounds: Vec<f64>,
    /// Bound on `sum_i |T_i|`; `None` off the unit-radius case.
    pub sum_bound: Option<f64>,
    /// Distance from the raw reconstruction to `exact_count`.
    pub drift: f64,
    pub via_gauss: bool,
}

impl SphereCountReport {
    pub fn error_sum(&self) -> f64 {
        self.error_terms.iter().sum()
    }

    pub fn bounds_hold(&self) -> bool {
        let levels = self
            .error_terms
            .iter()
            .zip(&self.level_bounds)
            .all(|(t, b)| *t <= b * (1.0 + 1e-12) + 1e-9);
        let total = self
            .sum_bound
            .is_none_or(|b| self.error_sum() <= b * (1.0 + 1e-12) + 1e-9);
        levels && total
    }
}

/// Bound on `|T_i|` for level `i`, `0 <= i < l`.
///
/// With `k = l - i`: `p^((l+i)d/2) p^(k-1)` when `dk` is even, and
/// `p^((l+i)d/2) (p^(k/2) + p^(k-1))` when `dk` is odd.
pub fn level_bound(modulus: &Modulus, dim: usize, i: u32) -> f64 {
    let p = modulus.p() as f64;
    let ell = modulus.ell();
    let k = ell - i;
    let d = dim as f64;
    let head = p.powf((ell + i) as f64 * d / 2.0);
    if (dim as u32 * k) % 2 == 0 {
        head * p.powi(k as i32 - 1)
    } else {
        head * (p.powf(k as f64 / 2.0) + p.powi(k as i32 - 1))
    }
}

/// Bound on `|T_0| + ... + |T_{l-1}|`: `l p^(ld - d/2)` for even `d`,
/// `2 l p^(ld - (d-1)/2)` for odd `d`.
pub fn error_sum_bound(modulus: &Modulus, dim: usize) -> f64 {
    let p = modulus.p() as f64;
    let ell = modulus.ell() as f64;
    let d = dim as f64;
    if dim % 2 == 0 {
        ell * p.powf(ell * d - d / 2.0)
    } else {
        2.0 * ell * p.powf(ell * d - (d - 1.0) / 2.0)
    }
}

/// `T_i = p^(id) sum_{s in (Z/p^(l-i))^x} G(s, p^(l-i))^d chi(-s j)`.
pub fn t_term(modulus: &Modulus, dim: usize, radius: u64, i: u32) -> ComplexValue {
    let sub = Modulus::new(modulus.p(), modulus.ell() - i).expect("sub-modulus");
    let n = sub.q();
    let scale = (modulus.p() as f64).powi((i as usize * dim) as i32);
    let j = (radius % n) as i64;
    let sum: ComplexValue = sub
        .units()
        .map(|s| {
            let g = gauss_sum_closed(GaussSumParams::new(s as i64, 0, n));
            g.powi(dim as i32) * additive_char(-(s as i64) * j, n)
        })
        .sum();
    sum * scale
}

/// Count `S_j` through the Gauss-sum expansion (unit radii) or by
/// enumeration (non-unit radii).
pub fn count_via_gauss(spec: &SphereSpec) -> Result<SphereCountReport> {
    let m = spec.modulus;
    if !spec.unit_radius() {
        return Ok(SphereCountReport {
            spec: *spec,
            exact_count: sphere_size(spec)?,
            main_term: spec.main_term(),
            t_terms: Vec::new(),
            error_terms: Vec::new(),
            level_bounds: Vec::new(),
            sum_bound: None,
            drift: 0.0,
            via_gauss: false,
        });
    }
    let t_terms: Vec<ComplexValue> = (0..m.ell())
        .map(|i| t_term(&m, spec.dim, spec.radius, i))
        .collect();
    let q = m.q() as f64;
    let t_inf = q.powi(spec.dim as i32);
    let raw = (Complex64::new(t_inf, 0.0) + t_terms.iter().sum::<ComplexValue>()) / q;
    let rounded = raw.re.round();
    let drift = (raw - Complex64::new(rounded, 0.0)).norm();
    if drift >= MAX_ROUNDING_DRIFT || rounded < 0.0 {
        return Err(Error::RoundingDrift(drift));
    }
    Ok(SphereCountReport {
        spec: *spec,
        exact_count: rounded as u64,
        main_term: spec.main_term(),
        error_terms: t_terms.iter().map(|t| t.norm()).collect(),
        level_bounds: (0..m.ell()).map(|i| level_bound(&m, spec.dim, i)).collect(),
        sum_bound: Some(error_sum_bound(&m, spec.dim)),
        t_terms,
        drift,
        via_gauss: true,
    })
}

#[derive(Debug, Clone, PartialEq)]
pub struct AsymptoticRow {
    pub spec: SphereSpec,
    pub exact_count: u64,
    pub main_term: u64,
    /// `exact / q^(d-1)`.
    pub ratio: f64,
    /// `q^-1` times the bound on `sum_i |T_i|`.
    pub allowed_deviation: f64,
    pub within_bound: bool,
}

/// Compare enumerated sphere sizes with `q^(d-1)` and the error allowance.
pub fn sphere_size_asymptotic_check(specs: &[SphereSpec]) -> Result<Vec<AsymptoticRow>> {
    specs
        .iter()
        .map(|spec| {
            spec.require_unit()?;
            let exact = sphere_size(spec)?;
            let main = spec.main_term();
            let q = spec.modulus.q() as f64;
            let allowed = error_sum_bound(&spec.modulus, spec.dim) / q;
            let deviation = (exact as f64 - main as f64).abs();
            Ok(AsymptoticRow {
                spec: *spec,
                exact_count: exact,
                main_term: main,
                ratio: exact as f64 / main as f64,
                allowed_deviation: allowed,
                within_bound: deviation <= allowed * (1.0 + 1e-12),
            })
        })
        .collect()
}

/// `l(l+1) q^(-(d + 2l - 1) / 2l)`.
pub fn decay_bound(modulus: &Modulus, dim: usize) -> f64 {
    let ell = modulus.ell() as f64;
    let q = modulus.q() as f64;
    ell * (ell + 1.0) * q.powf(-(dim as f64 + 2.0 * ell - 1.0) / (2.0 * ell))
}

/// Fourier coefficients of the indicator of `S_j`.
pub fn sphere_coefficients(spec: &SphereSpec) -> Result<FourierCoefficients> {
    let norms = dense_norms(&spec.modulus, spec.dim)?;
    Ok(coefficients_from_norms(&spec.modulus, spec.dim, &norms, spec.radius))
}

pub(crate) fn dense_norms(modulus: &Modulus, dim: usize) -> Result<Vec<u64>> {
    let n = modulus.grid_size(dim)?;
    if n > DENSE_CAP {
        return Err(Error::CapacityExceeded {
            what: "dense sphere indicator",
            requested: n as u128,
            limit: DENSE_CAP as u128,
        });
    }
    norm_grid(modulus, dim)
}

pub(crate) fn coefficients_from_norms(modulus: &Modulus, dim: usize, norms: &[u64], radius: u64) -> FourierCoefficients {
    let values = norms
        .iter()
        .map(|&v| Complex64::new(if v == radius { 1.0 } else { 0.0 }, 0.0))
        .collect();
    let f = GridFunction::from_values(*modulus, dim, values).expect("shape matches");
    forward(&f)
}

#[derive(Debug, Clone, PartialEq)]
pub struct DecayReport {
    pub spec: SphereSpec,
    /// `max_{m != 0} |S_j^(m)|`.
    pub sup_offzero: f64,
    pub bound: f64,
    /// `S_j^(0)`, which must equal `|S_j| / q^d`.
    pub zero_coefficient: ComplexValue,
    pub grid_cells: u64,
}

impl DecayReport {
    /// Sup within the bound plus `1e-9` per grid cell.
    pub fn holds(&self) -> bool {
        self.sup_offzero <= self.bound + 1e-9 * self.grid_cells as f64
    }
}

fn decay_from_norms(spec: &SphereSpec, norms: &[u64]) -> DecayReport {
    let coeffs = coefficients_from_norms(&spec.modulus, spec.dim, norms, spec.radius);
    let sup = coeffs.values()[1..]
        .iter()
        .map(|c| c.norm())
        .fold(0.0, f64::max);
    DecayReport {
        spec: *spec,
        sup_offzero: sup,
        bound: decay_bound(&spec.modulus, spec.dim),
        zero_coefficient: coeffs.values()[0],
        grid_cells: norms.len() as u64,
    }
}

/// Off-zero sup of the sphere's Fourier transform against the decay bound.
pub fn sphere_fourier_decay(spec: &SphereSpec) -> Result<DecayReport> {
    spec.require_unit()?;
    let norms = dense_norms(&spec.modulus, spec.dim)?;
    Ok(decay_from_norms(spec, &norms))
}

/// [`sphere_fourier_decay`] for every unit radius of one grid, sharing the
/// norm table.
pub fn decay_for_all_units(modulus: &Modulus, dim: usize) -> Result<Vec<DecayReport>> {
    let norms = dense_norms(modulus, dim)?;
    modulus
        .units()
        .map(|j| Ok(decay_from_norms(&SphereSpec::new(*modulus, dim, j)?, &norms)))
        .collect()
}

/// Sphere count over `Z/(q1 q2)` by enumeration, and the product of the
/// component counts at the CRT images of `t`.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct CrtSphereCheck {
    pub radius: u64,
    pub components: (u64, u64),
    pub product_count: u64,
    pub direct_count: u64,
}

pub fn crt_sphere_check(q1: &Modulus, q2: &Modulus, dim: usize, t: (u64, u64)) -> Result<CrtSphereCheck> {
    let (a, b) = (q1.q(), q2.q());
    if q1.p() == q2.p() || gcd(a, b) != 1 {
        return Err(Error::NotCoprime(a, b));
    }
    let (t1, t2) = (t.0 % a, t.1 % b);
    let radius = crate::ring::crt_join(t1, t2, a, b)?;
    let c1 = norm_histogram(a, dim)?[t1 as usize];
    let c2 = norm_histogram(b, dim)?[t2 as usize];
    let direct = norm_histogram(a * b, dim)?[radius as usize];
    Ok(CrtSphereCheck {
        radius,
        components: (t1, t2),
        product_count: c1 * c2,
        direct_count: direct,
    })
}
