use crate::error::{Error, Result};
use crate::fourier::{decode_into, encode, GridFunction};
use crate::ring::{mul_mod, Modulus};
use crate::rng::{sample_distinct, SplitMix64};

/// Largest grid for which a dense indicator is materialised.
pub const DENSE_CAP: u64 = 1 << 24;

/// A finite subset of `(Z/q)^d`.
///
/// Points are deduplicated and kept sorted by their linear index (see
/// [`crate::fourier`] for the layout), so two sets with the same members
/// compare equal and iterate identically.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct PointSet {
    modulus: Modulus,
    dim: usize,
    indices: Vec<u64>,
    coords: Vec<u64>,
}

impl PointSet {
    pub fn from_indices(modulus: Modulus, dim: usize, indices: impl IntoIterator<Item = u64>) -> Result<Self> {
        let total = modulus.grid_size(dim)?;
        let mut indices: Vec<u64> = indices.into_iter().collect();
        if let Some(&bad) = indices.iter().find(|&&i| i >= total) {
            return Err(Error::InvalidPoint(format!("index {bad} outside grid of {total}")));
        }
        indices.sort_unstable();
        indices.dedup();
        let q = modulus.q();
        let mut coords = vec![0; indices.len() * dim];
        if dim > 0 {
            for (i, chunk) in indices.iter().zip(coords.chunks_mut(dim)) {
                decode_into(*i, q, chunk);
            }
        }
        Ok(Self {
            modulus,
            dim,
            indices,
            coords,
        })
    }

    pub fn new<P: AsRef<[u64]>>(modulus: Modulus, dim: usize, points: impl IntoIterator<Item = P>) -> Result<Self> {
        modulus.grid_size(dim)?;
        let q = modulus.q();
        let mut idx = Vec::new();
        for p in points {
            let p = p.as_ref();
            if p.len() != dim {
                return Err(Error::InvalidPoint(format!("expected {dim} coordinates, got {}", p.len())));
            }
            if let Some(c) = p.iter().find(|&&c| c >= q) {
                return Err(Error::InvalidPoint(format!("coordinate {c} not reduced mod {q}")));
            }
            idx.push(encode(p, q));
        }
        Self::from_indices(modulus, dim, idx)
    }

    pub fn empty(modulus: Modulus, dim: usize) -> Result<Self> {
        Self::from_indices(modulus, dim, [])
    }

    /// All of `(Z/q)^d`.
    pub fn full(modulus: Modulus, dim: usize) -> Result<Self> {
        let n = modulus.grid_size(dim)?;
        Self::from_indices(modulus, dim, 0..n)
    }

    /// `size` points drawn uniformly without replacement (see [`crate::rng`]).
    pub fn random(modulus: Modulus, dim: usize, size: u64, seed: u64) -> Result<Self> {
        let n = modulus.grid_size(dim)?;
        let mut rng = SplitMix64::new(seed);
        Self::from_indices(modulus, dim, sample_distinct(n, size, &mut rng)?)
    }

    pub fn modulus(&self) -> Modulus {
        self.modulus
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn len(&self) -> usize {
        self.indices.len()
    }

    pub fn is_empty(&self) -> bool {
        self.indices.is_empty()
    }

    pub fn indices(&self) -> &[u64] {
        &self.indices
    }

    /// Flat coordinates, `dim` per point.
    pub fn coords(&self) -> &[u64] {
        &self.coords
    }

    pub fn point(&self, i: usize) -> &[u64] {
        &self.coords[i * self.dim..(i + 1) * self.dim]
    }

    pub fn iter(&self) -> impl Iterator<Item = &[u64]> + '_ {
        (0..self.len()).map(move |i| self.point(i))
    }

    pub fn contains(&self, point: &[u64]) -> bool {
        point.len() == self.dim
            && point.iter().all(|&c| c < self.modulus.q())
            && self.indices.binary_search(&encode(point, self.modulus.q())).is_ok()
    }

    /// Dense 0/1 indicator, available up to [`DENSE_CAP`] cells.
    pub fn indicator(&self) -> Result<GridFunction> {
        let n = self.modulus.grid_size(self.dim)?;
        if n > DENSE_CAP {
            return Err(Error::CapacityExceeded {
                what: "dense indicator",
                requested: n as u128,
                limit: DENSE_CAP as u128,
            });
        }
        GridFunction::indicator(self.modulus, self.dim, self.indices.iter().copied())
    }

    /// `E + v`.
    pub fn translate(&self, v: &[u64]) -> Result<Self> {
        if v.len() != self.dim {
            return Err(Error::InvalidPoint("translation has wrong dimension".into()));
        }
        let q = self.modulus.q();
        let moved: Vec<Vec<u64>> = self
            .iter()
            .map(|x| x.iter().zip(v).map(|(a, b)| (a + b % q) % q).collect())
            .collect();
        Self::new(self.modulus, self.dim, moved)
    }

    /// `u E`.
    pub fn scale(&self, u: u64) -> Result<Self> {
        let q = self.modulus.q();
        let scaled: Vec<Vec<u64>> = self
            .iter()
            .map(|x| x.iter().map(|&a| mul_mod(a, u, q)).collect())
            .collect();
        Self::new(self.modulus, self.dim, scaled)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn dedup_and_order() {
        let m = Modulus::new(3, 1).unwrap();
        let e = PointSet::new(m, 2, [[1, 0], [0, 1], [1, 0]]).unwrap();
        assert_eq!(e.len(), 2);
        assert_eq!(e.point(0), &[1, 0]);
        assert_eq!(e.point(1), &[0, 1]);
        assert!(e.contains(&[0, 1]));
        assert!(!e.contains(&[1, 1]));
    }

    #[test]
    fn rejects_bad_points() {
        let m = Modulus::new(3, 1).unwrap();
        assert!(PointSet::new(m, 2, [[3, 0]]).is_err());
        assert!(PointSet::new(m, 2, [vec![1, 0, 0]]).is_err());
        assert!(PointSet::from_indices(m, 2, [9]).is_err());
    }

    #[test]
    fn random_sets_are_reproducible() {
        let m = Modulus::new(3, 2).unwrap();
        let a = PointSet::random(m, 2, 30, 5).unwrap();
        assert_eq!(a.len(), 30);
        assert_eq!(a, PointSet::random(m, 2, 30, 5).unwrap());
        assert_ne!(a, PointSet::random(m, 2, 30, 6).unwrap());
        assert!(PointSet::random(m, 2, 82, 5).is_err());
    }

    #[test]
    fn indicator_cap() {
        let m = Modulus::new(3, 1).unwrap();
        let e = PointSet::new(m, 2, [[1, 2]]).unwrap();
        assert_eq!(e.indicator().unwrap().at(&[1, 2]).re, 1.0);
        let big = Modulus::new(3, 5).unwrap();
        let e = PointSet::empty(big, 4).unwrap();
        assert!(matches!(e.indicator(), Err(Error::CapacityExceeded { .. })));
    }
}
