//! Reports for the single-shot subcommands.

use zq_core::charsum::{
    gauss_sum_closed, gauss_sum_direct, kloosterman, salie, salie_explicit, tau, tolerance, unit_char_sum,
    weil_bound, DirichletChar, GaussSumParams,
};
use zq_core::incidence::{
    check_distance_theorem, check_dotproduct_theorem, distance_profile, dot_product_profile, CoverageCheck,
    Decomposition, IncidenceProfile, Kind,
};
use zq_core::points::{PointSet, DENSE_CAP};
use zq_core::sharpness::{find_lagrangian, lift, verify_sharpness};
use zq_core::sphere::{count_via_gauss, decay_bound, sphere_fourier_decay, sphere_size, SphereSpec};
use zq_core::{ComplexValue, Error, Modulus};

use crate::report::{Cell, Report};
use crate::CliError;

/// A report plus whether every check in it passed.
pub struct Outcome {
    pub report: Report,
    pub pass: bool,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, clap::ValueEnum)]
pub enum SumKind {
    Gauss,
    Salie,
    Kloosterman,
    Tau,
    Unitsum,
}

#[derive(Debug, Clone, Default)]
pub struct CharsumParams {
    pub a: i64,
    pub b: i64,
    pub n: Option<u64>,
    pub q: Option<u64>,
    pub p: Option<u64>,
    pub m: Option<u32>,
    pub power: u32,
}

fn need<T: Copy>(v: Option<T>, flag: &str, kind: &str) -> Result<T, CliError> {
    v.ok_or_else(|| CliError::Usage(format!("{kind} needs --{flag}")))
}

/// `re + imi` with 12 decimals.
pub fn format_complex(z: ComplexValue) -> String {
    let re = if z.re.abs() < 5e-13 { 0.0 } else { z.re };
    let im = if z.im.abs() < 5e-13 { 0.0 } else { z.im };
    let sign = if im < 0.0 { '-' } else { '+' };
    format!("{re:.12} {sign} {:.12}i", im.abs())
}

/// Value, optional bound and verdict for one character sum.
pub struct CharsumResult {
    pub kind: SumKind,
    pub modulus: u64,
    pub value: ComplexValue,
    pub reference: Option<(String, f64)>,
    pub pass: bool,
}

pub fn charsum(kind: SumKind, p: &CharsumParams) -> Result<CharsumResult, CliError> {
    let name = format!("{kind:?}").to_lowercase();
    Ok(match kind {
        SumKind::Gauss => {
            let n = need(p.n.or(p.q), "n", &name)?;
            if n == 0 {
                return Err(CliError::Usage("--n must be positive".into()));
            }
            let params = GaussSumParams::new(p.a, p.b, n);
            let value = gauss_sum_closed(params);
            let gap = (value - gauss_sum_direct(params)).norm();
            CharsumResult {
                kind,
                modulus: n,
                value,
                reference: Some(("|closed - direct|".into(), gap)),
                pass: gap <= 1e-6,
            }
        }
        SumKind::Kloosterman => {
            let m = Modulus::from_prime_power(need(p.q.or(p.n), "q", &name)?)?;
            let value = kloosterman(p.a, p.b, &m);
            let bound = weil_bound(p.a, p.b, &m);
            CharsumResult {
                kind,
                modulus: m.q(),
                value,
                reference: Some(("Weil bound".into(), bound)),
                pass: value.norm() <= bound + tolerance(m.q()),
            }
        }
        SumKind::Salie => {
            let m = Modulus::from_prime_power(need(p.q.or(p.n), "q", &name)?)?;
            let value = salie(p.a, p.b, &m);
            let (reference, pass) = match salie_explicit(p.a, p.b, &m) {
                Some(z) => {
                    let gap = (z - value).norm();
                    (Some(("|explicit - direct|".into(), gap)), gap <= tolerance(m.q()))
                }
                None => (None, true),
            };
            CharsumResult {
                kind,
                modulus: m.q(),
                value,
                reference,
                pass,
            }
        }
        SumKind::Tau => {
            let m = Modulus::from_prime_power(need(p.n.or(p.q), "n", &name)?)?;
            let psi = DirichletChar::legendre_power(m, p.power);
            let a = m.element(p.a);
            let value = tau(&psi, a)?;
            // The sqrt(n) bound applies to unit twists or primitive characters.
            let applies = a.is_unit() || psi.conductor() == m.q();
            let bound = (m.q() as f64).sqrt();
            CharsumResult {
                kind,
                modulus: m.q(),
                value,
                reference: applies.then(|| ("sqrt(n)".to_string(), bound)),
                pass: !applies || value.norm() <= bound + tolerance(m.q()),
            }
        }
        SumKind::Unitsum => {
            let prime = need(p.p, "p", &name)?;
            let mm = need(p.m, "m", &name)?;
            let n = need(p.n, "n", &name)?;
            let n = u32::try_from(n).map_err(|_| CliError::Usage("--n out of range".into()))?;
            let value = unit_char_sum(n, mm, prime)?;
            let tol = tolerance(Modulus::new(prime, mm)?.q());
            CharsumResult {
                kind,
                modulus: prime.pow(mm),
                value,
                reference: None,
                pass: value.re <= tol && value.im.abs() <= tol,
            }
        }
    })
}

impl CharsumResult {
    pub fn text(&self) -> String {
        let mut out = if self.kind == SumKind::Unitsum {
            format!("{}\n", self.value.re.round() as i64)
        } else {
            format!("{}\n", format_complex(self.value))
        };
        if let Some((label, v)) = &self.reference {
            out.push_str(&format!("{label}: {v:.6}\n"));
        }
        let verdict = if self.pass { "PASS" } else { "FAIL" };
        if self.kind == SumKind::Unitsum {
            out.push_str(&format!("nonpositive: {verdict}\n"));
        } else {
            out.push_str(&format!("check: {verdict}\n"));
        }
        out
    }

    pub fn report(&self, p: &CharsumParams, seed: u64) -> Report {
        let mut r = Report::new(["kind", "modulus", "a", "b", "seed", "value_re", "value_im", "reference", "reference_value", "status"]);
        let (label, v) = self
            .reference
            .as_ref()
            .map_or((Cell::Na, Cell::Na), |(l, v)| (l.clone().into(), (*v).into()));
        r.push(vec![
            format!("{:?}", self.kind).to_lowercase().into(),
            self.modulus.into(),
            p.a.into(),
            p.b.into(),
            seed.into(),
            self.value.re.into(),
            self.value.im.into(),
            label,
            v,
            Cell::status(self.pass),
        ]);
        r
    }
}

pub const SPHERE_COLUMNS: [&str; 21] = [
    "p",
    "ell",
    "q",
    "d",
    "j",
    "seed",
    "unit_radius",
    "exact_count",
    "enumerated_count",
    "main_term",
    "ratio",
    "error_sum",
    "error_bound",
    "count_status",
    "drift",
    "decay_sup",
    "decay_bound",
    "decay_status",
    "zero_coeff_re",
    "zero_coeff_im",
    "status",
];

/// One row per radius; `j = None` means every radius of `Z/q`.
pub fn sphere(m: Modulus, d: usize, j: Option<u64>, seed: u64) -> Result<Outcome, CliError> {
    let radii: Vec<u64> = match j {
        Some(j) => vec![j % m.q()],
        None => (0..m.q()).collect(),
    };
    let cells = m.grid_size(d)?;
    let mut report = Report::new(SPHERE_COLUMNS);
    let mut all = true;
    for j in radii {
        let spec = SphereSpec::new(m, d, j)?;
        let counted = count_via_gauss(&spec)?;
        let enumerated = sphere_size(&spec)?;
        let unit = spec.unit_radius();
        let count_ok = counted.exact_count == enumerated && (!unit || counted.bounds_hold());
        let decay = if unit { Some(sphere_fourier_decay(&spec)?) } else { None };
        let decay_ok = decay.as_ref().map(|r| r.holds());
        let pass = count_ok && decay_ok.unwrap_or(true);
        all &= pass;
        let opt = |v: Option<f64>| v.map_or(Cell::Na, Cell::Float);
        report.push(vec![
            m.p().into(),
            m.ell().into(),
            m.q().into(),
            d.into(),
            j.into(),
            seed.into(),
            unit.into(),
            counted.exact_count.into(),
            enumerated.into(),
            counted.main_term.into(),
            (counted.exact_count as f64 / counted.main_term as f64).into(),
            opt(unit.then(|| counted.error_sum())),
            opt(counted.sum_bound),
            if unit { Cell::status(count_ok) } else { Cell::status(counted.exact_count == enumerated) },
            counted.drift.into(),
            opt(decay.as_ref().map(|r| r.sup_offzero)),
            opt(unit.then(|| decay_bound(&m, d) + 1e-9 * cells as f64)),
            Cell::opt_status(decay_ok),
            opt(decay.as_ref().map(|r| r.zero_coefficient.re)),
            opt(decay.as_ref().map(|r| r.zero_coefficient.im)),
            Cell::status(pass),
        ]);
    }
    Ok(Outcome { report, pass: all })
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, clap::ValueEnum)]
pub enum KindArg {
    Distance,
    Dotproduct,
}

impl From<KindArg> for Kind {
    fn from(k: KindArg) -> Self {
        match k {
            KindArg::Distance => Kind::Distance,
            KindArg::Dotproduct => Kind::DotProduct,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, clap::ValueEnum)]
pub enum SetArg {
    Random,
    Lift,
}

pub struct IncidenceParams {
    pub m: Modulus,
    pub d: usize,
    pub size: Option<u64>,
    pub seed: u64,
    pub trials: u32,
    pub kind: Kind,
    pub set: SetArg,
    pub t: Option<u64>,
}

pub const INCIDENCE_COLUMNS: [&str; 26] = [
    "kind",
    "set",
    "p",
    "ell",
    "q",
    "d",
    "trial",
    "seed",
    "size",
    "threshold",
    "threshold_met",
    "guaranteed",
    "units_covered",
    "missing_units",
    "coverage_status",
    "t",
    "count",
    "main_term",
    "error_re",
    "error_im",
    "error_bound",
    "max_error_ratio",
    "max_drift",
    "tolerance",
    "identity_status",
    "status",
];

fn profile(e: &PointSet, kind: Kind) -> Result<Option<IncidenceProfile>, Error> {
    if e.modulus().grid_size(e.dim())? > DENSE_CAP {
        return Ok(None);
    }
    match kind {
        Kind::Distance => distance_profile(e).map(Some),
        Kind::DotProduct => dot_product_profile(e).map(Some),
    }
}

fn coverage(e: &PointSet, kind: Kind) -> Result<CoverageCheck, Error> {
    match kind {
        Kind::Distance => check_distance_theorem(e),
        Kind::DotProduct => check_dotproduct_theorem(e),
    }
}

pub fn incidence(p: &IncidenceParams) -> Result<Outcome, CliError> {
    let (m, d) = (p.m, p.d);
    let cells = m.grid_size(d)?;
    let sets: Vec<(u64, u64, PointSet)> = match p.set {
        SetArg::Lift => {
            let base = find_lagrangian(m.p(), d)?;
            vec![(0, p.seed, lift(&base, m.ell())?.points)]
        }
        SetArg::Random => {
            let size = p
                .size
                .ok_or_else(|| CliError::Usage("incidence with --set random needs --size".into()))?;
            if size > cells {
                return Err(CliError::Usage(format!("--size {size} exceeds the {cells} points of the grid")));
            }
            (0..p.trials as u64)
                .map(|k| {
                    let seed = p.seed.wrapping_add(k);
                    Ok((k, seed, PointSet::random(m, d, size, seed)?))
                })
                .collect::<Result<_, Error>>()?
        }
    };
    let mut report = Report::new(INCIDENCE_COLUMNS);
    let mut all = true;
    for (trial, seed, e) in sets {
        let cov = coverage(&e, p.kind)?;
        let prof = profile(&e, p.kind)?;
        let row: Option<&Decomposition> = match (&prof, p.t) {
            (Some(pr), Some(t)) => Some(&pr.rows[(t % m.q()) as usize]),
            _ => None,
        };
        let identity_ok = prof.as_ref().map(|pr| pr.all_hold());
        let pass = cov.passes() && identity_ok.unwrap_or(true);
        all &= pass;
        let opt = |v: Option<f64>| v.map_or(Cell::Na, Cell::Float);
        report.push(vec![
            p.kind.name().into(),
            format!("{:?}", p.set).to_lowercase().into(),
            m.p().into(),
            m.ell().into(),
            m.q().into(),
            d.into(),
            trial.into(),
            seed.into(),
            e.len().into(),
            cov.threshold.into(),
            cov.threshold_met.into(),
            cov.guaranteed.into(),
            cov.units_covered.into(),
            cov.missing_units.len().into(),
            Cell::status(cov.passes()),
            p.t.map_or(Cell::Na, |t| (t % m.q()).into()),
            row.map_or(Cell::Na, |r| r.count.into()),
            opt(row.map(|r| r.main_term)),
            opt(row.map(|r| r.error.re)),
            opt(row.map(|r| r.error.im)),
            opt(row.and_then(|r| r.bound)),
            opt(prof.as_ref().map(|pr| pr.worst_bound_ratio())),
            opt(prof.as_ref().map(|pr| pr.max_drift())),
            opt(prof.as_ref().and_then(|pr| pr.rows.first().map(|r| r.tolerance))),
            Cell::opt_status(identity_ok),
            Cell::status(pass),
        ]);
    }
    Ok(Outcome { report, pass: all })
}

pub const SHARPNESS_COLUMNS: [&str; 18] = [
    "p",
    "ell",
    "q",
    "d",
    "seed",
    "lagrangian_dim",
    "target_dim",
    "shortfall",
    "basis",
    "size",
    "expected_size",
    "pi_size",
    "pi_bound",
    "pi_no_units",
    "delta_no_units",
    "size_formula",
    "constant_check",
    "status",
];

pub fn sharpness(p: u64, ell: u32, d: usize, seed: u64) -> Result<Outcome, CliError> {
    let base = find_lagrangian(p, d)?;
    let e = lift(&base, ell)?;
    let r = verify_sharpness(&e)?;
    let basis = base
        .basis()
        .iter()
        .map(|v| v.iter().map(u64::to_string).collect::<Vec<_>>().join(" "))
        .collect::<Vec<_>>()
        .join(";");
    let mut report = Report::new(SHARPNESS_COLUMNS);
    report.push(vec![
        p.into(),
        ell.into(),
        e.modulus().q().into(),
        d.into(),
        seed.into(),
        base.dim().into(),
        base.target_dim().into(),
        base.shortfall().into(),
        basis.into(),
        r.size.into(),
        r.expected_size.into(),
        r.pi_set.len().into(),
        p.pow(ell - 1).into(),
        Cell::status(r.pi_no_units),
        Cell::status(r.delta_no_units),
        Cell::status(r.size_formula_ok),
        Cell::opt_status(r.constant_ok),
        Cell::status(r.passes()),
    ]);
    Ok(Outcome {
        report,
        pass: r.passes(),
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    fn m(p: u64, ell: u32) -> Modulus {
        Modulus::new(p, ell).unwrap()
    }

    #[test]
    fn charsum_examples() {
        let g = charsum(SumKind::Gauss, &CharsumParams { a: 1, b: 0, n: Some(9), ..Default::default() }).unwrap();
        assert_eq!(g.text().lines().next().unwrap(), "3.000000000000 + 0.000000000000i");
        let k = charsum(SumKind::Kloosterman, &CharsumParams { a: 1, b: 1, q: Some(3), ..Default::default() }).unwrap();
        assert!(k.text().starts_with("-1.000000000000 + 0.000000000000i"));
        let (label, bound) = k.reference.clone().unwrap();
        assert_eq!(label, "Weil bound");
        assert!((bound - 2.0 * 3f64.sqrt()).abs() < 1e-12);
        let u = charsum(
            SumKind::Unitsum,
            &CharsumParams { n: Some(1), m: Some(2), p: Some(3), ..Default::default() },
        )
        .unwrap();
        assert_eq!(u.text(), "-3\nnonpositive: PASS\n");
        assert!(matches!(
            charsum(SumKind::Unitsum, &CharsumParams { n: Some(1), p: Some(3), ..Default::default() }),
            Err(CliError::Usage(_))
        ));
    }

    #[test]
    fn sphere_examples() {
        let o = sphere(m(3, 1), 2, Some(1), 0).unwrap();
        assert!(o.pass);
        assert_eq!(o.report.get(0, "exact_count"), Some(&Cell::Int(4)));
        assert_eq!(o.report.get(0, "decay_status"), Some(&Cell::Text("PASS".into())));
        let o = sphere(m(3, 2), 2, Some(1), 0).unwrap();
        assert_eq!(o.report.get(0, "exact_count"), Some(&Cell::Int(12)));
        let o = sphere(m(3, 1), 2, Some(0), 0).unwrap();
        assert!(o.pass);
        assert_eq!(o.report.get(0, "decay_status"), Some(&Cell::Na));
        assert_eq!(o.report.get(0, "error_bound"), Some(&Cell::Na));
        assert_eq!(sphere(m(3, 1), 2, None, 0).unwrap().report.len(), 3);
    }

    #[test]
    fn incidence_examples() {
        let base = IncidenceParams {
            m: m(7, 1),
            d: 3,
            size: Some(100),
            seed: 1,
            trials: 10,
            kind: Kind::Distance,
            set: SetArg::Random,
            t: None,
        };
        let o = incidence(&base).unwrap();
        assert!(o.pass);
        assert_eq!(o.report.len(), 10);
        for i in 0..10 {
            assert_eq!(o.report.get(i, "units_covered"), Some(&Cell::Bool(true)));
        }
        let lifted = IncidenceParams {
            m: m(3, 2),
            kind: Kind::DotProduct,
            set: SetArg::Lift,
            size: None,
            ..base
        };
        let o = incidence(&lifted).unwrap();
        assert_eq!(o.report.get(0, "units_covered"), Some(&Cell::Bool(false)));
        let none = IncidenceParams { trials: 0, ..base };
        assert!(incidence(&none).unwrap().report.is_empty());
    }

    #[test]
    fn sharpness_example() {
        let o = sharpness(3, 2, 3, 0).unwrap();
        assert!(o.pass);
        assert_eq!(o.report.get(0, "basis"), Some(&Cell::Text("1 1 1".into())));
        assert_eq!(o.report.get(0, "size"), Some(&Cell::Int(81)));
    }
}
