//! Totally isotropic subspaces of `F_p^d` for the dot form and their full
//! lifts to `(Z/p^l)^d`, whose distance and dot-product sets avoid units.

use crate::error::{Error, Result};
use crate::fourier::{decode_into, encode};
use crate::incidence::{pair_histogram, Kind};
use crate::points::{PointSet, DENSE_CAP};
use crate::ring::{mod_inverse, Modulus};

fn dot(x: &[u64], y: &[u64], p: u64) -> u64 {
    x.iter().zip(y).map(|(a, b)| a * b % p).sum::<u64>() % p
}

/// Reduced row echelon form over `F_p`; returns the nonzero rows and their
/// pivot columns.
fn rref(rows: &[Vec<u64>], p: u64) -> (Vec<Vec<u64>>, Vec<usize>) {
    let mut m: Vec<Vec<u64>> = rows.to_vec();
    let cols = m.first().map_or(0, |r| r.len());
    let mut pivots = Vec::new();
    let mut r = 0;
    for c in 0..cols {
        let Some(k) = (r..m.len()).find(|&k| m[k][c] != 0) else {
            continue;
        };
        m.swap(r, k);
        let inv = mod_inverse(m[r][c], p).expect("nonzero mod prime");
        m[r].iter_mut().for_each(|v| *v = *v * inv % p);
        let pivot = m[r].clone();
        for (k, row) in m.iter_mut().enumerate() {
            if k != r && row[c] != 0 {
                let f = row[c];
                for (v, &pv) in row.iter_mut().zip(&pivot) {
                    *v = (*v + p * p - f * pv % p) % p;
                }
            }
        }
        pivots.push(c);
        r += 1;
    }
    m.truncate(r);
    (m, pivots)
}

/// Row space of a set of vectors over `F_p`, kept in reduced echelon form.
#[derive(Debug, Clone, PartialEq, Eq)]
struct RowSpace {
    p: u64,
    rows: Vec<Vec<u64>>,
    pivots: Vec<usize>,
}

impl RowSpace {
    fn new(vectors: &[Vec<u64>], p: u64) -> Self {
        let (rows, pivots) = rref(vectors, p);
        Self { p, rows, pivots }
    }

    fn dim(&self) -> usize {
        self.rows.len()
    }

    fn contains(&self, v: &[u64]) -> bool {
        let p = self.p;
        let mut rest: Vec<u64> = v.iter().map(|x| x % p).collect();
        for (row, &c) in self.rows.iter().zip(&self.pivots) {
            let f = rest[c];
            if f != 0 {
                rest.iter_mut().zip(row).for_each(|(a, b)| *a = (*a + p * p - f * b % p) % p);
            }
        }
        rest.iter().all(|&x| x == 0)
    }
}

/// A totally isotropic subspace of `F_p^d` for `x . y`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct LagrangianSubspace {
    p: u64,
    dim_ambient: usize,
    basis: Vec<Vec<u64>>,
    space: RowSpace,
    target_dim: usize,
}

impl LagrangianSubspace {
    /// Wrap a basis, checking independence and isotropy.
    pub fn from_basis(p: u64, dim_ambient: usize, basis: Vec<Vec<u64>>) -> Result<Self> {
        Modulus::new(p, 1)?;
        if basis.iter().any(|v| v.len() != dim_ambient) {
            return Err(Error::ShapeMismatch("basis vector of wrong length".into()));
        }
        let space = RowSpace::new(&basis, p);
        if space.dim() != basis.len() {
            return Err(Error::InvalidPoint("basis is linearly dependent".into()));
        }
        let sub = Self {
            p,
            dim_ambient,
            basis,
            space,
            target_dim: dim_ambient / 2,
        };
        if !sub.basis_isotropic() {
            return Err(Error::InvalidPoint("basis is not totally isotropic".into()));
        }
        Ok(sub)
    }

    pub fn p(&self) -> u64 {
        self.p
    }

    pub fn dim_ambient(&self) -> usize {
        self.dim_ambient
    }

    pub fn basis(&self) -> &[Vec<u64>] {
        &self.basis
    }

    pub fn dim(&self) -> usize {
        self.basis.len()
    }

    /// `(d-1)/2` for odd `d`, `d/2` for even `d`.
    pub fn target_dim(&self) -> usize {
        self.target_dim
    }

    pub fn shortfall(&self) -> bool {
        self.dim() < self.target_dim
    }

    /// `p^dim`.
    pub fn cardinality(&self) -> u64 {
        self.p.pow(self.dim() as u32)
    }

    pub fn contains(&self, v: &[u64]) -> bool {
        v.len() == self.dim_ambient && self.space.contains(v)
    }

    fn basis_isotropic(&self) -> bool {
        self.basis
            .iter()
            .all(|v| self.basis.iter().all(|w| dot(v, w, self.p) == 0))
    }

    /// Every element, as all `F_p` combinations of the basis.
    pub fn elements(&self) -> Vec<Vec<u64>> {
        let p = self.p;
        let k = self.dim();
        let mut coeffs = vec![0u64; k];
        (0..self.cardinality())
            .map(|i| {
                decode_into(i, p, &mut coeffs);
                let mut v = vec![0u64; self.dim_ambient];
                for (c, b) in coeffs.iter().zip(&self.basis) {
                    v.iter_mut().zip(b).for_each(|(x, y)| *x = (*x + c * y) % p);
                }
                v
            })
            .collect()
    }

    /// Pairwise isotropy over every element, not just the basis.
    pub fn exhaustively_isotropic(&self) -> bool {
        let all = self.elements();
        all.iter().all(|v| all.iter().all(|w| dot(v, w, self.p) == 0))
    }
}

/// Vectors of `F_p^d` in lexicographic order, first coordinate most
/// significant, skipping zero.
fn lex_vectors(p: u64, d: usize) -> impl Iterator<Item = Vec<u64>> {
    let total = p.pow(d as u32);
    (1..total).map(move |mut i| {
        let mut v = vec![0u64; d];
        for slot in v.iter_mut().rev() {
            *slot = i % p;
            i /= p;
        }
        v
    })
}

/// Maximal totally isotropic subspace by repeated hyperbolic-pair
/// extraction: take the lexicographically first isotropic `v` in the
/// current space `W`, complete it to a pair `(v, w)` with `v.w = 1`,
/// `w.w = 0`, and continue in the orthogonal complement of the pair in `W`.
pub fn find_lagrangian(p: u64, d: usize) -> Result<LagrangianSubspace> {
    Modulus::new(p, 1)?;
    if d < 3 {
        return Err(Error::InvalidRange(format!("need d >= 3, got {d}")));
    }
    if (p as u128).pow(d as u32) > DENSE_CAP as u128 {
        return Err(Error::CapacityExceeded {
            what: "isotropic vector scan",
            requested: (p as u128).pow(d as u32),
            limit: DENSE_CAP as u128,
        });
    }
    let inv2 = mod_inverse(2, p).expect("p odd");
    let mut w_basis: Vec<Vec<u64>> = (0..d)
        .map(|i| (0..d).map(|j| u64::from(i == j)).collect())
        .collect();
    let mut found: Vec<Vec<u64>> = Vec::new();
    loop {
        let space = RowSpace::new(&w_basis, p);
        let Some(v) = lex_vectors(p, d).find(|v| dot(v, v, p) == 0 && space.contains(v)) else {
            break;
        };
        let Some(b) = space.rows.iter().find(|b| dot(&v, b, p) != 0) else {
            return Err(Error::NoIsotropicVector(d));
        };
        // w = b / (v.b), then w <- w - (w.w / 2) v so that w.w = 0.
        let s = mod_inverse(dot(&v, b, p), p).expect("nonzero");
        let mut w: Vec<u64> = b.iter().map(|x| x * s % p).collect();
        let half = dot(&w, &w, p) * inv2 % p;
        w.iter_mut().zip(&v).for_each(|(a, c)| *a = (*a + p * p - half * c % p) % p);
        let complement: Vec<Vec<u64>> = space
            .rows
            .iter()
            .map(|x| {
                let (xw, xv) = (dot(x, &w, p), dot(x, &v, p));
                (0..d)
                    .map(|k| (x[k] + 2 * p * p - xw * v[k] % p - xv * w[k] % p) % p)
                    .collect()
            })
            .collect();
        w_basis = RowSpace::new(&complement, p).rows;
        found.push(v);
        if w_basis.is_empty() {
            break;
        }
    }
    if found.is_empty() {
        return Err(Error::NoIsotropicVector(d));
    }
    LagrangianSubspace::from_basis(p, d, found)
}

/// `pi^-1(L)`: every point of `(Z/p^l)^d` whose reduction mod `p` lies in `L`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct LiftedSet {
    pub base: LagrangianSubspace,
    pub points: PointSet,
}

impl LiftedSet {
    pub fn modulus(&self) -> Modulus {
        self.points.modulus()
    }

    /// `p^((l-1)d) |L|`.
    pub fn expected_size(&self) -> u64 {
        let m = self.modulus();
        m.p_pow(m.ell() - 1).pow(self.base.dim_ambient() as u32) * self.base.cardinality()
    }
}

pub fn lift(base: &LagrangianSubspace, ell: u32) -> Result<LiftedSet> {
    let m = Modulus::new(base.p(), ell)?;
    let d = base.dim_ambient();
    let total = m.grid_size(d)?;
    if total > DENSE_CAP {
        return Err(Error::CapacityExceeded {
            what: "lift enumeration",
            requested: total as u128,
            limit: DENSE_CAP as u128,
        });
    }
    let p = base.p();
    // Membership of each residue class mod p, computed once per class.
    let mut member = vec![false; p.pow(d as u32) as usize];
    let mut v = vec![0u64; d];
    for (i, slot) in member.iter_mut().enumerate() {
        decode_into(i as u64, p, &mut v);
        *slot = base.contains(&v);
    }
    let q = m.q();
    let mut x = vec![0u64; d];
    let indices = (0..total).filter(|&i| {
        decode_into(i, q, &mut x);
        x.iter_mut().for_each(|c| *c %= p);
        member[encode(&x, p) as usize]
    });
    let points = PointSet::from_indices(m, d, indices.collect::<Vec<_>>())?;
    Ok(LiftedSet {
        base: base.clone(),
        points,
    })
}

#[derive(Debug, Clone, PartialEq)]
pub struct SharpnessReport {
    pub size: u64,
    pub expected_size: u64,
    pub pi_set: Vec<u64>,
    pub delta_set: Vec<u64>,
    pub pi_no_units: bool,
    pub delta_no_units: bool,
    /// `|Pi(E)| <= p^(l-1)`.
    pub pi_small: bool,
    pub size_formula_ok: bool,
    /// `|E| = b q^((2l-1)d/2l)` with `b = 1` (even `d`) or `p^(-1/2)` (odd
    /// `d`); `None` when the subspace falls short of the target dimension.
    pub constant_ok: Option<bool>,
}

impl SharpnessReport {
    pub fn passes(&self) -> bool {
        self.pi_no_units
            && self.delta_no_units
            && self.pi_small
            && self.size_formula_ok
            && self.constant_ok.unwrap_or(true)
    }
}

pub fn verify_sharpness(e: &LiftedSet) -> Result<SharpnessReport> {
    let m = e.modulus();
    let support = |kind| -> Result<Vec<u64>> {
        let h = pair_histogram(&e.points, kind)?;
        Ok((0..m.q()).filter(|&t| h[t as usize] > 0).collect())
    };
    let pi_set = support(Kind::DotProduct)?;
    let delta_set = support(Kind::Distance)?;
    let size = e.points.len() as u64;
    let d = e.base.dim_ambient() as u64;
    let ell = m.ell() as u64;
    let constant_ok = (!e.base.shortfall()).then(|| {
        // Exponents of p, doubled to stay integral.
        let lhs = 2 * ((ell - 1) * d + e.base.dim() as u64);
        let rhs = (2 * ell - 1) * d - d % 2;
        lhs == rhs
    });
    Ok(SharpnessReport {
        size,
        expected_size: e.expected_size(),
        pi_no_units: pi_set.iter().all(|&t| !m.is_unit(t)),
        delta_no_units: delta_set.iter().all(|&t| !m.is_unit(t)),
        pi_small: pi_set.len() as u64 <= m.p_pow(m.ell() - 1),
        size_formula_ok: size == e.expected_size(),
        constant_ok,
        pi_set,
        delta_set,
    })
}
