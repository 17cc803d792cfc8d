//! `verify-all` grid configuration: flat `key = value` lines, `#` comments.
//!
//! Lists are comma separated; incidence cells are written `qxd`
//! (e.g. `9x2`). Keys left out keep their defaults.

use std::collections::HashSet;
use std::path::Path;
use std::str::FromStr;

use crate::CliError;

#[derive(Debug, Clone, PartialEq)]
pub struct VerifyConfig {
    pub seed: u64,
    /// Multiplier applied to every bound before comparison; values below 1
    /// make the suites stricter than the theory allows.
    pub bound_scale: f64,
    pub gauss_moduli: Vec<u64>,
    pub salie_moduli: Vec<u64>,
    pub twisted_primes: Vec<u64>,
    pub twisted_max_beta: u32,
    pub twisted_dims: Vec<u32>,
    pub unit_sum_primes: Vec<u64>,
    pub unit_sum_max_m: u32,
    pub sphere_moduli: Vec<u64>,
    pub sphere_dims: Vec<usize>,
    /// Sphere cells with more than this many grid points are skipped.
    pub sphere_max_cells: u64,
    pub crt_pairs: Vec<(u64, u64)>,
    pub crt_dims: Vec<usize>,
    pub incidence_cells: Vec<(u64, usize)>,
    pub incidence_sizes: Vec<u64>,
    pub incidence_trials: u32,
    pub coverage_primes: Vec<u64>,
    pub coverage_dim: usize,
    pub coverage_trials: u32,
    pub sharpness_primes: Vec<u64>,
    pub sharpness_ells: Vec<u32>,
    pub sharpness_dims: Vec<usize>,
}

impl Default for VerifyConfig {
    fn default() -> Self {
        Self {
            seed: 0,
            bound_scale: 1.0,
            gauss_moduli: vec![3, 9, 27, 5, 25, 125, 7, 49, 11, 13],
            salie_moduli: vec![3, 9, 27, 5, 25, 7, 49],
            twisted_primes: vec![3, 5, 7],
            twisted_max_beta: 3,
            twisted_dims: vec![1, 2, 3],
            unit_sum_primes: vec![3, 5, 7],
            unit_sum_max_m: 4,
            sphere_moduli: vec![3, 9, 27, 5, 25, 7, 49],
            sphere_dims: vec![2, 3, 4],
            sphere_max_cells: 1 << 20,
            crt_pairs: vec![(3, 5), (3, 7), (5, 7), (9, 5)],
            crt_dims: vec![2, 3],
            incidence_cells: vec![(3, 2), (9, 2), (27, 2), (3, 3), (9, 3), (5, 2), (25, 2), (7, 2)],
            incidence_sizes: vec![10, 40, 160],
            incidence_trials: 20,
            coverage_primes: vec![7, 11],
            coverage_dim: 3,
            coverage_trials: 30,
            sharpness_primes: vec![3, 5],
            sharpness_ells: vec![1, 2],
            sharpness_dims: vec![3, 4],
        }
    }
}

fn bad(line: usize, msg: impl std::fmt::Display) -> CliError {
    CliError::Config(format!("line {line}: {msg}"))
}

fn scalar<T: FromStr>(line: usize, key: &str, v: &str) -> Result<T, CliError> {
    v.parse().map_err(|_| bad(line, format!("invalid value {v:?} for {key}")))
}

fn list<T: FromStr>(line: usize, key: &str, v: &str) -> Result<Vec<T>, CliError> {
    v.split(',')
        .map(str::trim)
        .filter(|s| !s.is_empty())
        .map(|s| scalar(line, key, s))
        .collect()
}

fn pairs<A: FromStr, B: FromStr>(line: usize, key: &str, v: &str, sep: char) -> Result<Vec<(A, B)>, CliError> {
    v.split(',')
        .map(str::trim)
        .filter(|s| !s.is_empty())
        .map(|s| {
            let (a, b) = s
                .split_once(sep)
                .ok_or_else(|| bad(line, format!("expected a{sep}b in {key}, got {s:?}")))?;
            Ok((scalar(line, key, a.trim())?, scalar(line, key, b.trim())?))
        })
        .collect()
}

impl VerifyConfig {
    pub fn parse(text: &str) -> Result<Self, CliError> {
        let mut c = Self::default();
        let mut seen = HashSet::new();
        for (i, raw) in text.lines().enumerate() {
            let n = i + 1;
            let line = raw.split('#').next().unwrap_or("").trim();
            if line.is_empty() {
                continue;
            }
            let (key, value) = line
                .split_once('=')
                .ok_or_else(|| bad(n, format!("expected key = value, got {line:?}")))?;
            let (key, v) = (key.trim(), value.trim());
            if !seen.insert(key.to_string()) {
                return Err(bad(n, format!("duplicate key {key}")));
            }
            match key {
                "seed" => c.seed = scalar(n, key, v)?,
                "bound_scale" => c.bound_scale = scalar(n, key, v)?,
                "gauss_moduli" => c.gauss_moduli = list(n, key, v)?,
                "salie_moduli" => c.salie_moduli = list(n, key, v)?,
                "twisted_primes" => c.twisted_primes = list(n, key, v)?,
                "twisted_max_beta" => c.twisted_max_beta = scalar(n, key, v)?,
                "twisted_dims" => c.twisted_dims = list(n, key, v)?,
                "unit_sum_primes" => c.unit_sum_primes = list(n, key, v)?,
                "unit_sum_max_m" => c.unit_sum_max_m = scalar(n, key, v)?,
                "sphere_moduli" => c.sphere_moduli = list(n, key, v)?,
                "sphere_dims" => c.sphere_dims = list(n, key, v)?,
                "sphere_max_cells" => c.sphere_max_cells = scalar(n, key, v)?,
                "crt_pairs" => c.crt_pairs = pairs(n, key, v, 'x')?,
                "crt_dims" => c.crt_dims = list(n, key, v)?,
                "incidence_cells" => c.incidence_cells = pairs(n, key, v, 'x')?,
                "incidence_sizes" => c.incidence_sizes = list(n, key, v)?,
                "incidence_trials" => c.incidence_trials = scalar(n, key, v)?,
                "coverage_primes" => c.coverage_primes = list(n, key, v)?,
                "coverage_dim" => c.coverage_dim = scalar(n, key, v)?,
                "coverage_trials" => c.coverage_trials = scalar(n, key, v)?,
                "sharpness_primes" => c.sharpness_primes = list(n, key, v)?,
                "sharpness_ells" => c.sharpness_ells = list(n, key, v)?,
                "sharpness_dims" => c.sharpness_dims = list(n, key, v)?,
                other => return Err(bad(n, format!("unknown key {other}"))),
            }
        }
        if !(c.bound_scale.is_finite() && c.bound_scale > 0.0) {
            return Err(CliError::Config("bound_scale must be a positive number".into()));
        }
        Ok(c)
    }

    pub fn load(path: &Path) -> Result<Self, CliError> {
        let text = std::fs::read_to_string(path)
            .map_err(|e| CliError::Usage(format!("cannot read config {}: {e}", path.display())))?;
        Self::parse(&text)
    }
}
