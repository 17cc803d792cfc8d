//! Distance and dot-product incidences of point sets in `(Z/q)^d`.
//!
//! Pair counts are computed twice: by direct enumeration of `E x E`, and
//! through Fourier analysis (`lambda_j`) or the valuation split of the
//! additive characters (`nu(t)`). Comparing the two is the main check.

use num_complex::Complex64;
use rayon::prelude::*;

use crate::charsum::{tolerance, ComplexValue, RootTable};
use crate::error::{Error, Result};
use crate::fourier::{encode, forward, FourierCoefficients};
use crate::points::{PointSet, DENSE_CAP};
use crate::ring::{valuation_mod, Modulus, Valuation};
use crate::sphere::{coefficients_from_norms, dense_norms};

/// Largest number of ordered pairs enumerated directly.
pub const PAIR_CAP: u128 = 1_000_000_000;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum Kind {
    Distance,
    DotProduct,
}

impl Kind {
    pub fn name(self) -> &'static str {
        match self {
            Kind::Distance => "distance",
            Kind::DotProduct => "dotproduct",
        }
    }
}

fn pair_count(e: &PointSet) -> u128 {
    (e.len() as u128).pow(2)
}

fn check_pair_cap(e: &PointSet) -> Result<()> {
    let pairs = pair_count(e);
    if pairs > PAIR_CAP {
        return Err(Error::CapacityExceeded {
            what: "pair enumeration",
            requested: pairs,
            limit: PAIR_CAP,
        });
    }
    Ok(())
}

/// Dot product reduced mod `q`; `wide` selects u128 accumulation when
/// `d (q-1)^2` would overflow.
#[inline]
fn dot_mod(x: &[u64], y: &[u64], q: u64, wide: bool) -> u64 {
    if wide {
        let s: u128 = x.iter().zip(y).map(|(&a, &b)| (a as u128 * b as u128) % q as u128).sum();
        (s % q as u128) as u64
    } else {
        x.iter().zip(y).map(|(&a, &b)| a * b).sum::<u64>() % q
    }
}

fn needs_wide(q: u64, dim: usize) -> bool {
    ((q - 1) as u128).pow(2) * dim as u128 >= u64::MAX as u128
}

/// Histogram over `Z/q` of `||x - y||` or `x . y` for all ordered pairs.
///
/// Both forms are symmetric, so only `x <= y` is visited and off-diagonal
/// pairs are counted twice.
pub fn pair_histogram(e: &PointSet, kind: Kind) -> Result<Vec<u64>> {
    check_pair_cap(e)?;
    let q = e.modulus().q();
    let d = e.dim();
    let wide = needs_wide(q, d);
    let norms: Vec<u64> = e.iter().map(|x| dot_mod(x, x, q, wide)).collect();
    let n = e.len();
    let value = |a: usize, b: usize| -> u64 {
        let dot = dot_mod(e.point(a), e.point(b), q, wide);
        match kind {
            Kind::DotProduct => dot,
            Kind::Distance => {
                let s = (norms[a] as u128 + norms[b] as u128 + 2 * (q - dot) as u128) % q as u128;
                s as u64
            }
        }
    };
    let hist = (0..n)
        .into_par_iter()
        .fold(
            || vec![0u64; q as usize],
            |mut h, a| {
                h[value(a, a) as usize] += 1;
                for b in a + 1..n {
                    h[value(a, b) as usize] += 2;
                }
                h
            },
        )
        .reduce(
            || vec![0u64; q as usize],
            |mut x, y| {
                x.iter_mut().zip(y).for_each(|(a, b)| *a += b);
                x
            },
        );
    Ok(hist)
}

fn support(hist: &[u64]) -> Vec<u64> {
    (0..hist.len() as u64).filter(|&t| hist[t as usize] > 0).collect()
}

/// `Delta(E)`, sorted ascending.
pub fn distance_set(e: &PointSet) -> Result<Vec<u64>> {
    Ok(support(&pair_histogram(e, Kind::Distance)?))
}

/// `Pi(E)`, sorted ascending.
pub fn dot_product_set(e: &PointSet) -> Result<Vec<u64>> {
    Ok(support(&pair_histogram(e, Kind::DotProduct)?))
}

fn set_fourier(e: &PointSet) -> Result<FourierCoefficients> {
    Ok(forward(&e.indicator()?))
}

/// `q^(2d) |E^(m)|^2` for every frequency.
fn energy(ehat: &FourierCoefficients) -> Vec<f64> {
    let qd = ehat.values().len() as f64;
    ehat.values().iter().map(|c| c.norm_sqr() * qd * qd).collect()
}

/// `R_j = q^(2d) sum_{m != 0} |E^(m)|^2 S_j^(m)`.
fn lambda_error(energy: &[f64], sphere: &FourierCoefficients) -> ComplexValue {
    energy[1..]
        .iter()
        .zip(&sphere.values()[1..])
        .map(|(w, s)| s * *w)
        .sum()
}

pub fn lambda_bound(modulus: &Modulus, dim: usize, size: usize) -> f64 {
    let ell = modulus.ell() as f64;
    ell * (ell + 1.0) * size as f64 * error_scale(modulus, dim)
}

pub fn nu_bound(modulus: &Modulus, dim: usize, size: usize) -> f64 {
    modulus.ell() as f64 * size as f64 * error_scale(modulus, dim)
}

/// `|E| q^((d-1)/2 (1 + i/l))`.
pub fn nu_level_bound(modulus: &Modulus, dim: usize, size: usize, level: u32) -> f64 {
    let ell = modulus.ell() as f64;
    let expo = (dim as f64 - 1.0) / 2.0 * (1.0 + level as f64 / ell);
    size as f64 * (modulus.q() as f64).powf(expo)
}

/// `q^((d-1)(2l-1)/(2l))`.
fn error_scale(modulus: &Modulus, dim: usize) -> f64 {
    let ell = modulus.ell() as f64;
    (modulus.q() as f64).powf((dim as f64 - 1.0) * (2.0 * ell - 1.0) / (2.0 * ell))
}

/// Pair count at one value with its main-term/error split.
#[derive(Debug, Clone, PartialEq)]
pub struct Decomposition {
    pub value: u64,
    /// Direct count, or the rounded decomposition when `indirect`.
    pub count: u64,
    pub main_term: f64,
    pub error: ComplexValue,
    /// Per-valuation pieces `nu_i`; empty for distances.
    pub per_level: Vec<ComplexValue>,
    /// Bound on `|error|`; `None` when `value` is not a unit.
    pub bound: Option<f64>,
    pub level_bounds: Vec<f64>,
    pub tolerance: f64,
    pub indirect: bool,
}

impl Decomposition {
    /// `|count - main - error|`.
    pub fn drift(&self) -> f64 {
        (Complex64::new(self.count as f64 - self.main_term, 0.0) - self.error).norm()
    }

    pub fn identity_holds(&self) -> bool {
        self.drift() <= self.tolerance
    }

    pub fn bounds_hold(&self) -> bool {
        let total = self
            .bound
            .is_none_or(|b| self.error.norm() <= b + self.tolerance);
        let levels = self
            .per_level
            .iter()
            .zip(&self.level_bounds)
            .all(|(v, b)| v.norm() <= b + self.tolerance);
        total && levels
    }
}

/// Pair counts for every value of `Z/q` with their decompositions.
#[derive(Debug, Clone, PartialEq)]
pub struct IncidenceProfile {
    pub kind: Kind,
    pub size: usize,
    pub rows: Vec<Decomposition>,
}

impl IncidenceProfile {
    pub fn counts(&self) -> Vec<u64> {
        self.rows.iter().map(|r| r.count).collect()
    }

    pub fn total(&self) -> u64 {
        self.rows.iter().map(|r| r.count).sum()
    }

    pub fn max_drift(&self) -> f64 {
        self.rows.iter().map(|r| r.drift()).fold(0.0, f64::max)
    }

    pub fn all_hold(&self) -> bool {
        self.rows.iter().all(|r| r.identity_holds() && r.bounds_hold())
    }

    /// Largest `|error| / bound` over unit values (0 when there are none).
    pub fn worst_bound_ratio(&self) -> f64 {
        self.rows
            .iter()
            .filter_map(|r| r.bound.map(|b| r.error.norm() / b))
            .fold(0.0, f64::max)
    }
}

fn direct_or_none(e: &PointSet, kind: Kind) -> Result<Option<Vec<u64>>> {
    match pair_histogram(e, kind) {
        Ok(h) => Ok(Some(h)),
        Err(Error::CapacityExceeded { what: "pair enumeration", .. }) => Ok(None),
        Err(err) => Err(err),
    }
}

fn rounded(main: f64, error: ComplexValue) -> u64 {
    (main + error.re).round().max(0.0) as u64
}

/// `lambda_j` for every `j`, with the Fourier split.
pub fn distance_profile(e: &PointSet) -> Result<IncidenceProfile> {
    let m = e.modulus();
    let d = e.dim();
    let norms = dense_norms(&m, d)?;
    let ehat = set_fourier(e)?;
    let energy = energy(&ehat);
    let direct = direct_or_none(e, Kind::Distance)?;
    let qd = norms.len() as f64;
    let size2 = (e.len() as f64).powi(2);
    let mut sizes = vec![0u64; m.q() as usize];
    for &v in &norms {
        sizes[v as usize] += 1;
    }
    let tol = tolerance(norms.len() as u64);
    let rows = (0..m.q())
        .map(|j| {
            let sphere = coefficients_from_norms(&m, d, &norms, j);
            let main = size2 * sizes[j as usize] as f64 / qd;
            let error = lambda_error(&energy, &sphere);
            Decomposition {
                value: j,
                count: direct.as_ref().map_or_else(|| rounded(main, error), |h| h[j as usize]),
                main_term: main,
                error,
                per_level: Vec::new(),
                bound: m.is_unit(j).then(|| lambda_bound(&m, d, e.len())),
                level_bounds: Vec::new(),
                tolerance: tol,
                indirect: direct.is_none(),
            }
        })
        .collect();
    Ok(IncidenceProfile {
        kind: Kind::Distance,
        size: e.len(),
        rows,
    })
}

/// `lambda_j` for a single radius.
pub fn lambda(e: &PointSet, j: u64) -> Result<Decomposition> {
    let m = e.modulus();
    let d = e.dim();
    let j = j % m.q();
    let norms = dense_norms(&m, d)?;
    let ehat = set_fourier(e)?;
    let sphere = coefficients_from_norms(&m, d, &norms, j);
    let size = norms.iter().filter(|&&v| v == j).count() as f64;
    let main = (e.len() as f64).powi(2) * size / norms.len() as f64;
    let error = lambda_error(&energy(&ehat), &sphere);
    let direct = direct_or_none(e, Kind::Distance)?;
    Ok(Decomposition {
        value: j,
        count: direct.as_ref().map_or_else(|| rounded(main, error), |h| h[j as usize]),
        main_term: main,
        error,
        per_level: Vec::new(),
        bound: m.is_unit(j).then(|| lambda_bound(&m, d, e.len())),
        level_bounds: Vec::new(),
        tolerance: tolerance(norms.len() as u64),
        indirect: direct.is_none(),
    })
}

/// `W(s) = sum_{x,y in E} chi(s x.y) = q^d sum_{x in E} E^(-s x)`, for all s.
fn character_weights(e: &PointSet, ehat: &FourierCoefficients) -> Vec<ComplexValue> {
    let q = e.modulus().q();
    let qd = ehat.values().len() as f64;
    let wide = needs_wide(q, 1);
    let mut buf = vec![0u64; e.dim()];
    (0..q)
        .map(|s| {
            let mut acc = Complex64::new(0.0, 0.0);
            for x in e.iter() {
                for (b, &c) in buf.iter_mut().zip(x) {
                    let sx = if wide { crate::ring::mul_mod(s, c, q) } else { s * c % q };
                    *b = (q - sx) % q;
                }
                acc += ehat.values()[encode(&buf, q) as usize];
            }
            acc * qd
        })
        .collect()
}

/// `nu(t)` for every `t`, with the valuation split `nu_i(t)`.
pub fn dot_product_profile(e: &PointSet) -> Result<IncidenceProfile> {
    let m = e.modulus();
    let d = e.dim();
    let q = m.q();
    let ehat = set_fourier(e)?;
    let weights = character_weights(e, &ehat);
    let direct = direct_or_none(e, Kind::DotProduct)?;
    let roots = RootTable::new(q);
    let levels: Vec<Vec<u64>> = (0..m.ell())
        .map(|i| (1..q).filter(|&s| valuation_mod(s, &m) == Valuation::Finite(i)).collect())
        .collect();
    let main = (e.len() as f64).powi(2) / q as f64;
    let tol = tolerance(q * e.len().max(1) as u64);
    let rows = (0..q)
        .map(|t| {
            let per_level: Vec<ComplexValue> = levels
                .iter()
                .map(|ss| {
                    ss.iter()
                        .map(|&s| roots.chi(-((s as u128 * t as u128 % q as u128) as i64)) * weights[s as usize])
                        .sum::<ComplexValue>()
                        / q as f64
                })
                .collect();
            let error: ComplexValue = per_level.iter().sum();
            let unit = m.is_unit(t);
            Decomposition {
                value: t,
                count: direct.as_ref().map_or_else(|| rounded(main, error), |h| h[t as usize]),
                main_term: main,
                error,
                bound: unit.then(|| nu_bound(&m, d, e.len())),
                level_bounds: if unit {
                    (0..m.ell()).map(|i| nu_level_bound(&m, d, e.len(), i)).collect()
                } else {
                    Vec::new()
                },
                per_level,
                tolerance: tol,
                indirect: direct.is_none(),
            }
        })
        .collect();
    Ok(IncidenceProfile {
        kind: Kind::DotProduct,
        size: e.len(),
        rows,
    })
}

/// `nu(t)` for a single value.
pub fn nu(e: &PointSet, t: u64) -> Result<Decomposition> {
    let t = t % e.modulus().q();
    Ok(dot_product_profile(e)?.rows.swap_remove(t as usize))
}

/// Counts `R_E(alpha) = |{y in E : y = alpha mod p^(l-i)}|` over the
/// occupied classes `alpha`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ResidueFibers {
    pub level: u32,
    /// `p^(l-i)`.
    pub fiber_modulus: u64,
    /// `p^(id)`, the size of each full fiber.
    pub kernel_size: u64,
    /// `(encoded alpha, count)` for occupied classes, ascending.
    pub counts: Vec<(u64, u64)>,
}

impl ResidueFibers {
    pub fn total(&self) -> u64 {
        self.counts.iter().map(|c| c.1).sum()
    }

    pub fn sum_of_squares(&self) -> u64 {
        self.counts.iter().map(|c| c.1 * c.1).sum()
    }

    pub fn max_fiber(&self) -> u64 {
        self.counts.iter().map(|c| c.1).max().unwrap_or(0)
    }

    /// `sum R^2 <= p^(id) sum R`.
    pub fn inequality_holds(&self) -> bool {
        self.max_fiber() <= self.kernel_size
            && self.sum_of_squares() as u128 <= self.kernel_size as u128 * self.total() as u128
    }
}

pub fn residue_fibers(e: &PointSet, level: u32) -> Result<ResidueFibers> {
    let m = e.modulus();
    if level > m.ell() {
        return Err(Error::InvalidRange(format!("level {level} exceeds l = {}", m.ell())));
    }
    let r = m.p_pow(m.ell() - level);
    let mut buf = vec![0u64; e.dim()];
    let mut keys: Vec<u64> = e
        .iter()
        .map(|x| {
            buf.iter_mut().zip(x).for_each(|(b, &c)| *b = c % r);
            encode(&buf, r)
        })
        .collect();
    keys.sort_unstable();
    let mut counts: Vec<(u64, u64)> = Vec::new();
    for k in keys {
        match counts.last_mut() {
            Some((last, c)) if *last == k => *c += 1,
            _ => counts.push((k, 1)),
        }
    }
    Ok(ResidueFibers {
        level,
        fiber_modulus: r,
        kernel_size: m.p_pow(level).pow(e.dim() as u32),
        counts,
    })
}

/// Unit coverage of `Delta(E)` or `Pi(E)` against the size threshold.
#[derive(Debug, Clone, PartialEq)]
pub struct CoverageCheck {
    pub kind: Kind,
    pub size: usize,
    /// Threshold with implied constant 1; advisory only.
    pub threshold: f64,
    pub threshold_met: bool,
    /// `l = 1` and `|E| >= 2 q^((d+1)/2)`, where coverage is guaranteed.
    pub guaranteed: bool,
    pub units_covered: bool,
    pub missing_units: Vec<u64>,
}

impl CoverageCheck {
    /// Only the guaranteed regime can fail; the advisory threshold never does.
    pub fn passes(&self) -> bool {
        !self.guaranteed || self.units_covered
    }
}

/// `2 q^((d+1)/2)`.
pub fn guaranteed_size(modulus: &Modulus, dim: usize) -> f64 {
    2.0 * (modulus.q() as f64).powf((dim as f64 + 1.0) / 2.0)
}

fn coverage(e: &PointSet, kind: Kind, constant: f64) -> Result<CoverageCheck> {
    let m = e.modulus();
    let d = e.dim();
    let ell = m.ell() as f64;
    let expo = ((2.0 * ell - 1.0) * d as f64 + 1.0) / (2.0 * ell);
    let threshold = constant * (m.q() as f64).powf(expo);
    let hist = pair_histogram(e, kind)?;
    let missing: Vec<u64> = m.units().filter(|&u| hist[u as usize] == 0).collect();
    let size = e.len();
    Ok(CoverageCheck {
        kind,
        size,
        threshold,
        threshold_met: size as f64 >= threshold,
        guaranteed: m.ell() == 1 && size as f64 >= guaranteed_size(&m, d),
        units_covered: missing.is_empty(),
        missing_units: missing,
    })
}

/// Does `Delta(E)` contain every unit? Threshold `l(l+1) q^(((2l-1)d+1)/2l)`.
pub fn check_distance_theorem(e: &PointSet) -> Result<CoverageCheck> {
    let ell = e.modulus().ell() as f64;
    coverage(e, Kind::Distance, ell * (ell + 1.0))
}

/// Does `Pi(E)` contain every unit? Threshold `l q^(((2l-1)d+1)/2l)`.
pub fn check_dotproduct_theorem(e: &PointSet) -> Result<CoverageCheck> {
    coverage(e, Kind::DotProduct, e.modulus().ell() as f64)
}

#[derive(Debug, Clone, PartialEq)]
pub struct SumsetCheck {
    /// The d-fold sumset `A.A + ... + A.A`, ascending.
    pub sumset: Vec<u64>,
    pub threshold: f64,
    pub threshold_met: bool,
    pub covered: bool,
    pub missing_units: Vec<u64>,
}

/// Compute `dA^2` exactly and test whether it contains every unit.
pub fn check_da2(a: &[u64], modulus: &Modulus, dim: usize) -> Result<SumsetCheck> {
    let q = modulus.q();
    if q > DENSE_CAP {
        return Err(Error::CapacityExceeded {
            what: "sumset table",
            requested: q as u128,
            limit: DENSE_CAP as u128,
        });
    }
    if let Some(&bad) = a.iter().find(|&&x| x >= q) {
        return Err(Error::InvalidPoint(format!("{bad} not reduced mod {q}")));
    }
    let qn = q as usize;
    let mut products = vec![false; qn];
    for &x in a {
        for &y in a {
            products[crate::ring::mul_mod(x, y, q) as usize] = true;
        }
    }
    let prod: Vec<usize> = (0..qn).filter(|&v| products[v]).collect();
    let mut reach = vec![false; qn];
    reach[0] = true;
    for _ in 0..dim {
        let mut next = vec![false; qn];
        for s in (0..qn).filter(|&s| reach[s]) {
            for &v in &prod {
                next[(s + v) % qn] = true;
            }
        }
        reach = next;
    }
    let ell = modulus.ell() as f64;
    let expo = (2.0 * ell - 1.0) / (2.0 * ell) + 1.0 / (2.0 * ell * dim as f64);
    let threshold = (q as f64).powf(expo);
    let mut distinct = a.to_vec();
    distinct.sort_unstable();
    distinct.dedup();
    let missing: Vec<u64> = modulus.units().filter(|&u| !reach[u as usize]).collect();
    Ok(SumsetCheck {
        sumset: (0..q).filter(|&v| reach[v as usize]).collect(),
        threshold,
        threshold_met: distinct.len() as f64 > threshold,
        covered: missing.is_empty(),
        missing_units: missing,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::points::PointSet;

    fn m(p: u64, ell: u32) -> Modulus {
        Modulus::new(p, ell).unwrap()
    }

    /// Pair counts straight from the definitions, every ordered pair.
    fn naive(e: &PointSet, kind: Kind) -> Vec<u64> {
        let q = e.modulus().q();
        let mut h = vec![0u64; q as usize];
        for x in e.iter() {
            for y in e.iter() {
                let v: u64 = match kind {
                    Kind::DotProduct => x.iter().zip(y).map(|(a, b)| a * b).sum::<u64>() % q,
                    Kind::Distance => x.iter().zip(y).map(|(a, b)| (a + q - b) % q).map(|z| z * z).sum::<u64>() % q,
                };
                h[v as usize] += 1;
            }
        }
        h
    }

    #[test]
    fn set_examples() {
        let m3 = m(3, 1);
        let single = PointSet::new(m3, 2, [[2, 1]]).unwrap();
        assert_eq!(distance_set(&single).unwrap(), vec![0]);
        let two = PointSet::new(m3, 2, [[0, 0], [1, 0]]).unwrap();
        assert_eq!(distance_set(&two).unwrap(), vec![0, 1]);
        let full = PointSet::full(m3, 2).unwrap();
        assert_eq!(distance_set(&full).unwrap(), vec![0, 1, 2]);
        assert_eq!(dot_product_set(&full).unwrap(), vec![0, 1, 2]);
        let origin = PointSet::new(m3, 3, [[0, 0, 0]]).unwrap();
        assert_eq!(dot_product_set(&origin).unwrap(), vec![0]);
        let e10 = PointSet::new(m3, 2, [[1, 0]]).unwrap();
        assert_eq!(dot_product_set(&e10).unwrap(), vec![1]);
    }

    #[test]
    fn histograms_match_naive() {
        for (p, ell, d, size, seed) in [(3, 2, 2, 30, 1), (5, 1, 3, 40, 2), (3, 3, 2, 50, 3), (7, 1, 2, 49, 4)] {
            let e = PointSet::random(m(p, ell), d, size, seed).unwrap();
            for kind in [Kind::Distance, Kind::DotProduct] {
                let h = pair_histogram(&e, kind).unwrap();
                assert_eq!(h, naive(&e, kind));
                assert_eq!(h.iter().sum::<u64>(), size * size);
            }
        }
    }

    #[test]
    fn lambda_examples() {
        let m3 = m(3, 1);
        let single = PointSet::new(m3, 2, [[1, 1]]).unwrap();
        assert_eq!(lambda(&single, 1).unwrap().count, 0);
        let full = PointSet::full(m(3, 2), 2).unwrap();
        let l = lambda(&full, 1).unwrap();
        assert_eq!(l.count, 81 * 12);
        assert!(l.identity_holds());
        let e = PointSet::random(m(3, 2), 2, 30, 5).unwrap();
        let l = lambda(&e, 1).unwrap();
        assert!(l.identity_holds(), "drift {}", l.drift());
        assert!(l.bounds_hold());
        assert!(!l.indirect);
    }

    #[test]
    fn nu_examples() {
        let e = PointSet::new(m(3, 1), 2, [[1, 0]]).unwrap();
        assert_eq!(nu(&e, 1).unwrap().count, 1);
        assert_eq!(nu(&e, 2).unwrap().count, 0);
        let empty = PointSet::empty(m(3, 1), 2).unwrap();
        let prof = dot_product_profile(&empty).unwrap();
        assert!(prof.rows.iter().all(|r| r.count == 0 && r.identity_holds()));
        let e = PointSet::random(m(3, 2), 2, 40, 3).unwrap();
        let n = nu(&e, 1).unwrap();
        assert_eq!(n.per_level.len(), 2);
        assert!(n.identity_holds(), "drift {}", n.drift());
        assert!(n.bounds_hold());
    }

    #[test]
    fn profiles_decompose_exactly() {
        for (p, ell, d, size, seed) in [(3, 3, 2, 160, 9), (5, 2, 2, 40, 1), (3, 2, 3, 160, 2)] {
            let e = PointSet::random(m(p, ell), d, size, seed).unwrap();
            for prof in [distance_profile(&e).unwrap(), dot_product_profile(&e).unwrap()] {
                assert_eq!(prof.total(), size * size);
                assert!(prof.all_hold(), "{:?} drift {}", prof.kind, prof.max_drift());
            }
        }
    }

    #[test]
    fn distances_are_translation_invariant() {
        let e = PointSet::random(m(3, 2), 2, 25, 8).unwrap();
        let h = pair_histogram(&e, Kind::Distance).unwrap();
        for v in [[1, 0], [4, 7], [8, 8]] {
            assert_eq!(pair_histogram(&e.translate(&v).unwrap(), Kind::Distance).unwrap(), h);
        }
    }

    #[test]
    fn dot_products_scale_by_unit_squares() {
        let md = m(5, 2);
        let e = PointSet::random(md, 2, 30, 4).unwrap();
        let pi = dot_product_set(&e).unwrap();
        for u in [2, 7, 24] {
            let mut expect: Vec<u64> = pi.iter().map(|&t| t * u * u % 25).collect();
            expect.sort_unstable();
            assert_eq!(dot_product_set(&e.scale(u).unwrap()).unwrap(), expect);
        }
    }

    #[test]
    fn fiber_examples() {
        let e = PointSet::random(m(3, 2), 2, 20, 1).unwrap();
        let f0 = residue_fibers(&e, 0).unwrap();
        assert_eq!(f0.max_fiber(), 1);
        assert_eq!(f0.sum_of_squares(), 20);
        let f2 = residue_fibers(&e, 2).unwrap();
        assert_eq!(f2.counts, vec![(0, 20)]);
        let full = PointSet::full(m(3, 2), 2).unwrap();
        let f1 = residue_fibers(&full, 1).unwrap();
        assert_eq!(f1.counts.len(), 9);
        assert!(f1.counts.iter().all(|c| c.1 == 9));
        assert_eq!(f1.sum_of_squares(), 9 * 81);
        assert!(f1.inequality_holds());
        assert!(residue_fibers(&full, 3).is_err());
    }

    #[test]
    fn coverage_examples() {
        let m7 = m(7, 1);
        let e = PointSet::random(m7, 3, 100, 1).unwrap();
        let c = check_distance_theorem(&e).unwrap();
        assert!(c.guaranteed && c.units_covered && c.passes());
        let c = check_dotproduct_theorem(&e).unwrap();
        assert!(c.guaranteed && c.units_covered);
        let full = PointSet::full(m(3, 2), 2).unwrap();
        assert!(check_distance_theorem(&full).unwrap().units_covered);
        let line: Vec<[u64; 3]> = std::iter::once([1, 0, 0]).chain(m7.units().map(|u| [u, 0, 0])).collect();
        let c = check_dotproduct_theorem(&PointSet::new(m7, 3, line).unwrap()).unwrap();
        assert!(c.units_covered);
        let small = PointSet::new(m7, 3, [[1, 0, 0]]).unwrap();
        let c = check_distance_theorem(&small).unwrap();
        assert!(!c.units_covered && !c.guaranteed && c.passes());
        assert_eq!(c.missing_units.len(), 6);
    }

    #[test]
    fn sumset_examples() {
        let m9 = m(3, 2);
        let all: Vec<u64> = (0..9).collect();
        assert!(check_da2(&all, &m9, 2).unwrap().covered);
        let pz = [0, 3, 6];
        let c = check_da2(&pz, &m9, 3).unwrap();
        assert!(!c.covered);
        assert_eq!(c.sumset, vec![0]);
        let m7 = m(7, 1);
        let c = check_da2(&[1, 2, 3], &m7, 3).unwrap();
        assert!(c.covered);
    }

    #[test]
    fn sumset_agrees_with_product_grid() {
        let md = m(5, 2);
        for a in [vec![1u64, 5, 7], vec![0, 10, 15], vec![2, 3]] {
            let c = check_da2(&a, &md, 2).unwrap();
            let grid: Vec<[u64; 2]> = a.iter().flat_map(|&x| a.iter().map(move |&y| [x, y])).collect();
            let e = PointSet::new(md, 2, grid).unwrap();
            assert_eq!(dot_product_set(&e).unwrap(), c.sumset);
        }
    }
}
