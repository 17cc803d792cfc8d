//! Discrete Fourier analysis on `(Z/q)^d`.
//!
//! Grids are stored densely in mixed-radix little-endian order: coordinate 0
//! varies fastest, so point `x` lives at `sum_k x_k q^k`. The forward
//! transform carries the `q^-d` normalisation,
//! `f^(m) = q^-d sum_x f(x) chi(-x.m)`, and the inverse is unnormalised.
//! Both are computed axis by axis with a length-`q` FFT per line.

use num_complex::Complex64;
use rayon::prelude::*;
use rustfft::{Fft, FftDirection, FftPlanner};

use crate::charsum::{ComplexValue, RootTable};
use crate::error::{Error, Result};
use crate::ring::{mul_mod, Modulus};

/// Number of cells in a `(modulus, dim)` grid, as a `usize`.
pub fn grid_len(modulus: &Modulus, dim: usize) -> Result<usize> {
    let n = modulus.grid_size(dim)?;
    usize::try_from(n).map_err(|_| Error::CapacityExceeded {
        what: "grid q^d",
        requested: n as u128,
        limit: usize::MAX as u128,
    })
}

/// Linear index of a point.
pub fn encode(point: &[u64], q: u64) -> u64 {
    point.iter().rev().fold(0, |acc, &c| acc * q + c)
}

/// Point at a linear index, written into `out`.
pub fn decode_into(mut index: u64, q: u64, out: &mut [u64]) {
    for c in out.iter_mut() {
        *c = index % q;
        index /= q;
    }
}

pub fn decode(index: u64, q: u64, dim: usize) -> Vec<u64> {
    let mut out = vec![0; dim];
    decode_into(index, q, &mut out);
    out
}

/// A function `(Z/q)^d -> C`.
#[derive(Debug, Clone, PartialEq)]
pub struct GridFunction {
    modulus: Modulus,
    dim: usize,
    values: Vec<ComplexValue>,
}

/// Fourier coefficients, indexed by frequency with the same layout as
/// [`GridFunction`].
#[derive(Debug, Clone, PartialEq)]
pub struct FourierCoefficients(GridFunction);

impl GridFunction {
    pub fn zeros(modulus: Modulus, dim: usize) -> Result<Self> {
        let len = grid_len(&modulus, dim)?;
        Ok(Self {
            modulus,
            dim,
            values: vec![Complex64::new(0.0, 0.0); len],
        })
    }

    pub fn from_values(modulus: Modulus, dim: usize, values: Vec<ComplexValue>) -> Result<Self> {
        let len = grid_len(&modulus, dim)?;
        if values.len() != len {
            return Err(Error::ShapeMismatch(format!(
                "expected {len} values for q={}, d={dim}, got {}",
                modulus.q(),
                values.len()
            )));
        }
        Ok(Self {
            modulus,
            dim,
            values,
        })
    }

    pub fn from_fn(
        modulus: Modulus,
        dim: usize,
        f: impl Fn(&[u64]) -> ComplexValue,
    ) -> Result<Self> {
        let len = grid_len(&modulus, dim)?;
        let q = modulus.q();
        let mut point = vec![0; dim];
        let values = (0..len as u64)
            .map(|i| {
                decode_into(i, q, &mut point);
                f(&point)
            })
            .collect();
        Ok(Self {
            modulus,
            dim,
            values,
        })
    }

    /// Indicator of a set of linear indices.
    pub fn indicator(modulus: Modulus, dim: usize, indices: impl IntoIterator<Item = u64>) -> Result<Self> {
        let mut f = Self::zeros(modulus, dim)?;
        for i in indices {
            let slot = f.values.get_mut(i as usize).ok_or_else(|| {
                Error::InvalidPoint(format!("index {i} outside grid"))
            })?;
            *slot = Complex64::new(1.0, 0.0);
        }
        Ok(f)
    }

    pub fn modulus(&self) -> Modulus {
        self.modulus
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn values(&self) -> &[ComplexValue] {
        &self.values
    }

    pub fn into_values(self) -> Vec<ComplexValue> {
        self.values
    }

    pub fn at(&self, point: &[u64]) -> ComplexValue {
        self.values[encode(point, self.modulus.q()) as usize]
    }

    pub fn mean(&self) -> ComplexValue {
        self.values.iter().sum::<ComplexValue>() / self.values.len() as f64
    }

    fn same_shape(&self, other: &Self) -> Result<()> {
        if self.modulus != other.modulus || self.dim != other.dim {
            return Err(Error::ShapeMismatch(format!(
                "q={}, d={} vs q={}, d={}",
                self.modulus.q(),
                self.dim,
                other.modulus.q(),
                other.dim
            )));
        }
        Ok(())
    }

    /// `alpha * self + beta * other`.
    pub fn combine(&self, alpha: ComplexValue, other: &Self, beta: ComplexValue) -> Result<Self> {
        self.same_shape(other)?;
        let values = self
            .values
            .iter()
            .zip(&other.values)
            .map(|(x, y)| alpha * x + beta * y)
            .collect();
        Ok(Self { values, ..*self })
    }
}

impl FourierCoefficients {
    pub fn modulus(&self) -> Modulus {
        self.0.modulus
    }

    pub fn dim(&self) -> usize {
        self.0.dim
    }

    pub fn values(&self) -> &[ComplexValue] {
        &self.0.values
    }

    pub fn at(&self, freq: &[u64]) -> ComplexValue {
        self.0.at(freq)
    }

    pub fn from_values(modulus: Modulus, dim: usize, values: Vec<ComplexValue>) -> Result<Self> {
        GridFunction::from_values(modulus, dim, values).map(Self)
    }

    pub fn as_grid(&self) -> &GridFunction {
        &self.0
    }
}

/// One separable pass over coordinate 0 followed by a cyclic rotation of
/// the axes, so that after `d` passes the layout is back to the original.
///
/// Input is viewed as lines `values[r*q .. r*q + q]` (coordinate 0 varies
/// along the line); output cell `(x_1, .., x_{d-1}, m)` lands at
/// `r + m * q^(d-1)`. Every line is transformed independently, so the result
/// does not depend on how rayon splits the work.
fn rotate_pass(values: &mut [ComplexValue], q: usize, fft: &dyn Fft<f64>, scale: f64) -> Vec<ComplexValue> {
    let lines = values.len() / q;
    values.par_chunks_mut(q * 64).for_each_init(
        || vec![Complex64::new(0.0, 0.0); fft.get_inplace_scratch_len()],
        |scratch, block| {
            fft.process_with_scratch(block, scratch);
            if scale != 1.0 {
                block.iter_mut().for_each(|v| *v *= scale);
            }
        },
    );
    let mut out = vec![Complex64::new(0.0, 0.0); values.len()];
    out.par_chunks_mut(lines).enumerate().for_each(|(m, dst)| {
        for (r, slot) in dst.iter_mut().enumerate() {
            *slot = values[r * q + m];
        }
    });
    out
}

fn transform(values: &[ComplexValue], q: usize, dim: usize, direction: FftDirection, scale: f64) -> Vec<ComplexValue> {
    let fft = FftPlanner::new().plan_fft(q, direction);
    let mut values = values.to_vec();
    for _ in 0..dim {
        values = rotate_pass(&mut values, q, fft.as_ref(), scale);
    }
    values
}

/// `f^(m) = q^-d sum_x f(x) chi(-x.m)`.
pub fn forward(f: &GridFunction) -> FourierCoefficients {
    let q = f.modulus.q() as usize;
    let values = transform(&f.values, q, f.dim, FftDirection::Forward, 1.0 / q as f64);
    FourierCoefficients(GridFunction { values, ..*f })
}

/// `f(x) = sum_m chi(x.m) f^(m)`.
pub fn inverse(coeffs: &FourierCoefficients) -> GridFunction {
    let g = &coeffs.0;
    let values = transform(&g.values, g.modulus.q() as usize, g.dim, FftDirection::Inverse, 1.0);
    GridFunction { values, ..*g }
}

/// Both sides of Plancherel: `(q^-d sum_x f conj(g), sum_m f^ conj(g^))`.
pub fn plancherel_check(f: &GridFunction, g: &GridFunction) -> Result<(ComplexValue, ComplexValue)> {
    f.same_shape(g)?;
    let n = f.values.len() as f64;
    let lhs = f
        .values
        .iter()
        .zip(&g.values)
        .map(|(a, b)| a * b.conj())
        .sum::<ComplexValue>()
        / n;
    let (fh, gh) = (forward(f), forward(g));
    let rhs = fh
        .values()
        .iter()
        .zip(gh.values())
        .map(|(a, b)| a * b.conj())
        .sum();
    Ok((lhs, rhs))
}

/// `q^-d sum_x chi(x.m)` by direct summation over the grid.
pub fn orthogonality_check(modulus: &Modulus, m: &[u64]) -> Result<ComplexValue> {
    let dim = m.len();
    let len = grid_len(modulus, dim)?;
    let q = modulus.q();
    let roots = RootTable::new(q);
    let mut x = vec![0; dim];
    let mut acc = Complex64::new(0.0, 0.0);
    for i in 0..len as u64 {
        decode_into(i, q, &mut x);
        let dot = x.iter().zip(m).fold(0, |s, (&a, &b)| (s + mul_mod(a, b % q, q)) % q);
        acc += roots.at(dot);
    }
    Ok(acc / len as f64)
}
