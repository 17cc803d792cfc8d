//! Acceptance suite: one PASS/FAIL line per criterion.
//!
//! Runs without the libtest harness so the verdict lines always reach the
//! console. Quantities marked as derived are recomputed here by brute-force
//! oracles that share no code with the library; every tolerance is pinned
//! below.

use std::collections::HashSet;
use std::f64::consts::PI;
use std::panic::{catch_unwind, AssertUnwindSafe};
use std::process::Command;
use std::time::Instant;

use zq_core::ComplexValue as Complex64;

use zq_core::charsum::{gauss_sum_closed, salie_explicit, twisted_bound, unit_char_sum, GaussSumParams};
use zq_core::incidence::{distance_profile, dot_product_profile};
use zq_core::points::PointSet;
use zq_core::sharpness::{find_lagrangian, lift, verify_sharpness};
use zq_core::sphere::{count_via_gauss, decay_bound, decay_for_all_units, enumerate_sphere, sphere_coefficients, SphereSpec};
use zq_core::Modulus;

/// Gauss closed form vs direct summation.
const GAUSS_TOL: f64 = 1e-6;
/// Per summed term, for every other floating comparison.
const TAU_PER_TERM: f64 = 1e-9;
/// Rounding drift allowed when recovering an integer sphere size.
const DRIFT_TOL: f64 = 1e-6;
/// Per-grid-cell slack on the sphere decay bound.
const DECAY_SLACK_PER_CELL: f64 = 1e-9;
/// Largest grid for the sphere criteria.
const SPHERE_GRID_CAP: u64 = 1 << 24;
/// Random sets per incidence grid point.
const INCIDENCE_SEEDS: u64 = 20;
/// Random sets per coverage prime.
const COVERAGE_SEEDS: u64 = 30;

const SPHERE_MODULI: [u64; 7] = [3, 9, 27, 5, 25, 7, 49];

type Verdict = Result<String, String>;

fn ensure(ok: bool, msg: impl FnOnce() -> String) -> Result<(), String> {
    if ok {
        Ok(())
    } else {
        Err(msg())
    }
}

// ---- oracles ------------------------------------------------------------

fn e(x: i128, n: u64) -> Complex64 {
    let r = x.rem_euclid(n as i128) as f64;
    Complex64::from_polar(1.0, 2.0 * PI * r / n as f64)
}

fn pow_mod(mut b: u64, mut k: u64, n: u64) -> u64 {
    let mut acc = 1 % n;
    b %= n;
    while k > 0 {
        if k & 1 == 1 {
            acc = (acc as u128 * b as u128 % n as u128) as u64;
        }
        b = (b as u128 * b as u128 % n as u128) as u64;
        k >>= 1;
    }
    acc
}

/// `(x/p)` by Euler's criterion.
fn legendre(x: u64, p: u64) -> i64 {
    match pow_mod(x % p, (p - 1) / 2, p) {
        0 => 0,
        1 => 1,
        _ => -1,
    }
}

/// Units of `Z/p^l` and their inverses, by Euler's theorem.
fn units_with_inverse(p: u64, q: u64) -> Vec<(u64, u64)> {
    let phi = q - q / p;
    (1..q).filter(|x| x % p != 0).map(|x| (x, pow_mod(x, phi - 1, q))).collect()
}

fn prime_of(q: u64) -> u64 {
    (2..=q).find(|d| q % d == 0).unwrap()
}

fn gauss_direct(a: i64, b: i64, n: u64) -> Complex64 {
    (0..n as i128).map(|x| e(a as i128 * x * x + b as i128 * x, n)).sum()
}

/// Pair histogram straight from the definitions.
fn pair_counts(pts: &[Vec<u64>], q: u64, distance: bool) -> Vec<u64> {
    let mut h = vec![0u64; q as usize];
    for x in pts {
        for y in pts {
            let v: u64 = if distance {
                x.iter().zip(y).map(|(a, b)| (a + q - b) % q).map(|z| z * z % q).sum::<u64>() % q
            } else {
                x.iter().zip(y).map(|(a, b)| a * b % q).sum::<u64>() % q
            };
            h[v as usize] += 1;
        }
    }
    h
}

/// `|{x in Z_q^d : ||x|| = j}|` for every `j`, by walking the grid.
fn sphere_sizes(q: u64, d: usize) -> Vec<u64> {
    let mut h = vec![0u64; q as usize];
    for idx in 0..q.pow(d as u32) {
        let mut rest = idx;
        let mut norm = 0;
        for _ in 0..d {
            let c = rest % q;
            rest /= q;
            norm = (norm + c * c) % q;
        }
        h[norm as usize] += 1;
    }
    h
}

/// `q^((d-1)(2l-1)/(2l))`, the common scale of the incidence error bounds.
fn error_scale(q: u64, ell: u32, d: usize) -> f64 {
    let l = ell as f64;
    (q as f64).powf((d as f64 - 1.0) * (2.0 * l - 1.0) / (2.0 * l))
}

fn points(e: &PointSet) -> Vec<Vec<u64>> {
    e.iter().map(|x| x.to_vec()).collect()
}

// ---- criteria -----------------------------------------------------------

fn criterion_1() -> Verdict {
    let mut worst: f64 = 0.0;
    let mut count = 0;
    for n in [3u64, 9, 27, 5, 25, 125, 7, 49, 11, 13] {
        for a in 0..n as i64 {
            for b in 0..n as i64 {
                let gap = (gauss_sum_closed(GaussSumParams::new(a, b, n)) - gauss_direct(a, b, n)).norm();
                ensure(gap <= GAUSS_TOL, || format!("G({a},{b},{n}) off by {gap:e}"))?;
                worst = worst.max(gap);
                count += 1;
            }
        }
    }
    Ok(format!("{count} sums, max gap {worst:.2e}"))
}

fn criterion_2() -> Verdict {
    let mut salie_cases = 0;
    for q in [3u64, 9, 27, 5, 25, 7, 49] {
        let p = prime_of(q);
        let ell = (q as f64).log(p as f64).round() as u32;
        let m = Modulus::new(p, ell).unwrap();
        let tol = TAU_PER_TERM * q as f64;
        let units = units_with_inverse(p, q);
        for a in 0..q as i64 {
            for &(b, _) in &units {
                // (x/q) = (x/p)^l for q = p^l.
                let direct: Complex64 = units
                    .iter()
                    .map(|&(x, xinv)| {
                        let sym = legendre(x, p).pow(ell);
                        e(a as i128 * xinv as i128 + b as i128 * x as i128, q) * sym as f64
                    })
                    .sum();
                let explicit = salie_explicit(a, b as i64, &m).ok_or("explicit formula refused a unit b")?;
                let gap = (explicit - direct).norm();
                ensure(gap <= tol, || format!("S({a},{b};{q}) off by {gap:e}"))?;
                salie_cases += 1;
            }
        }
    }
    let mut twisted = 0;
    let mut worst_ratio: f64 = 0.0;
    for p in [3u64, 5, 7] {
        for beta in 1..=3u32 {
            let q = p.pow(beta);
            let units = units_with_inverse(p, q);
            let bound = twisted_bound(beta, p);
            ensure((bound - (beta as f64 + 1.0) * (p as f64).powf(beta as f64 / 2.0)).abs() < 1e-12, || {
                "twisted bound formula".into()
            })?;
            for d in 1..=3u32 {
                for a in 0..q as i64 {
                    for &(b, _) in &units {
                        let s: Complex64 = units
                            .iter()
                            .map(|&(u, uinv)| {
                                let w = if (beta * d) % 2 == 0 { 1 } else { legendre(u, p) };
                                e(a as i128 * uinv as i128 + b as i128 * u as i128, q) * w as f64
                            })
                            .sum();
                        let lib = zq_core::charsum::twisted_unit_sum(a, b as i64, beta, d, p).unwrap();
                        ensure((lib - s).norm() <= TAU_PER_TERM * q as f64, || format!("twisted sum mismatch p={p}"))?;
                        ensure(s.norm() <= bound + TAU_PER_TERM * q as f64, || {
                            format!("|sum| = {} > {bound} at p={p} beta={beta} d={d} a={a} b={b}", s.norm())
                        })?;
                        worst_ratio = worst_ratio.max(s.norm() / bound);
                        twisted += 1;
                    }
                }
            }
        }
    }
    Ok(format!("{salie_cases} Salie sums match; {twisted} twisted sums, worst |sum|/bound {worst_ratio:.3}"))
}

fn criterion_3() -> Verdict {
    let mut n_cases = 0;
    for p in [3u64, 5, 7] {
        for m in 1..=4u32 {
            for n in 0..m {
                let expected = if n + 1 == m { -(p.pow(m - 1) as f64) } else { 0.0 };
                let v = unit_char_sum(n, m, p).unwrap();
                let tol = TAU_PER_TERM * p.pow(m) as f64;
                ensure((v - Complex64::new(expected, 0.0)).norm() <= tol, || {
                    format!("p={p} n={n} m={m}: {v} vs {expected}")
                })?;
                n_cases += 1;
            }
        }
    }
    Ok(format!("{n_cases} sums equal 0 or -p^(m-1)"))
}

fn sphere_grid() -> Vec<(Modulus, usize)> {
    let mut out = Vec::new();
    for q in SPHERE_MODULI {
        let m = Modulus::from_prime_power(q).unwrap();
        for d in 2..=4usize {
            if q.pow(d as u32) <= SPHERE_GRID_CAP {
                out.push((m, d));
            }
        }
    }
    out
}

fn criterion_4() -> Verdict {
    let mut radii = 0;
    let mut worst: f64 = 0.0;
    for (m, d) in sphere_grid() {
        let mut total = 0u64;
        for j in 0..m.q() {
            let spec = SphereSpec::new(m, d, j).unwrap();
            let enumerated = enumerate_sphere(&spec).unwrap().len() as u64;
            total += enumerated;
            if m.is_unit(j) {
                let r = count_via_gauss(&spec).map_err(|e| format!("q={} d={d} j={j}: {e}", m.q()))?;
                ensure(r.drift < DRIFT_TOL, || format!("drift {} at q={} d={d} j={j}", r.drift, m.q()))?;
                ensure(r.exact_count == enumerated, || {
                    format!("q={} d={d} j={j}: gauss {} vs enumeration {enumerated}", m.q(), r.exact_count)
                })?;
                worst = worst.max(r.drift);
                radii += 1;
            }
        }
        let cells = m.q().pow(d as u32);
        ensure(total == cells, || format!("partition q={} d={d}: {total} != {cells}", m.q()))?;
    }
    Ok(format!("{radii} unit radii agree, max drift {worst:.2e}; partitions exact"))
}

fn criterion_5() -> Verdict {
    // Spot-check the transform itself against the definition on Z_9^2.
    let m9 = Modulus::new(3, 2).unwrap();
    let spec = SphereSpec::new(m9, 2, 1).unwrap();
    let coeffs = sphere_coefficients(&spec).unwrap();
    let sphere = points(&enumerate_sphere(&spec).unwrap());
    for m1 in 0..9u64 {
        for m2 in 0..9u64 {
            let naive: Complex64 =
                sphere.iter().map(|x| e(-((x[0] * m1 + x[1] * m2) as i128), 9)).sum::<Complex64>() / 81.0;
            ensure((naive - coeffs.at(&[m1, m2])).norm() <= TAU_PER_TERM * 81.0, || {
                format!("transform mismatch at ({m1},{m2})")
            })?;
        }
    }
    let mut checked = 0;
    let mut worst_ratio: f64 = 0.0;
    for (m, d) in sphere_grid() {
        let cells = m.q().pow(d as u32) as f64;
        let ell = m.ell() as f64;
        let bound = ell * (ell + 1.0) * (m.q() as f64).powf(-(d as f64 + 2.0 * ell - 1.0) / (2.0 * ell));
        ensure((bound - decay_bound(&m, d)).abs() <= 1e-15, || "decay bound formula".into())?;
        for r in decay_for_all_units(&m, d).unwrap() {
            ensure(r.sup_offzero <= bound + DECAY_SLACK_PER_CELL * cells, || {
                format!("q={} d={d} j={}: sup {} > {bound}", m.q(), r.spec.radius(), r.sup_offzero)
            })?;
            worst_ratio = worst_ratio.max(r.sup_offzero / bound);
            checked += 1;
        }
    }
    Ok(format!("{checked} unit radii within bound, worst sup/bound {worst_ratio:.3}"))
}

fn criterion_6() -> Verdict {
    let cells = [(3u64, 2usize), (9, 2), (27, 2), (3, 3), (9, 3), (5, 2), (25, 2), (7, 2)];
    let mut sets = 0;
    let mut worst = (0.0f64, 0.0f64, 0.0f64);
    for (q, d) in cells {
        let m = Modulus::from_prime_power(q).unwrap();
        let grid = q.pow(d as u32);
        let mut sizes: Vec<u64> = [10u64, 40, 160].iter().map(|&s| s.min(grid)).collect();
        sizes.dedup();
        for size in sizes {
            for seed in 0..INCIDENCE_SEEDS {
                let e = PointSet::random(m, d, size, seed).unwrap();
                let pts = points(&e);
                let lam_tol = TAU_PER_TERM * grid as f64;
                let nu_tol = TAU_PER_TERM * (q * size) as f64;
                let ell = m.ell();
                let l = ell as f64;
                let sizes_sq = (size * size) as f64;
                let lam = distance_profile(&e).unwrap();
                let dist = pair_counts(&pts, q, true);
                let spheres = sphere_sizes(q, d);
                let lam_bound = l * (l + 1.0) * size as f64 * error_scale(q, ell, d);
                ensure(lam.rows.len() == q as usize, || "lambda profile is missing values".into())?;
                for r in &lam.rows {
                    let direct = dist[r.value as usize] as f64;
                    let main = sizes_sq * spheres[r.value as usize] as f64 / grid as f64;
                    let gap = (Complex64::new(direct - main, 0.0) - r.error).norm();
                    ensure(gap <= lam_tol, || format!("lambda q={q} d={d} |E|={size} seed={seed} j={}: {gap:e}", r.value))?;
                    worst.0 = worst.0.max(gap);
                    if m.is_unit(r.value) {
                        ensure(r.error.norm() <= lam_bound + lam_tol, || format!("|R_j| over bound at q={q} d={d}"))?;
                        worst.2 = worst.2.max(r.error.norm() / lam_bound);
                    }
                }
                let nu = dot_product_profile(&e).unwrap();
                let dots = pair_counts(&pts, q, false);
                let nu_total = l * size as f64 * error_scale(q, ell, d);
                ensure(nu.rows.len() == q as usize, || "nu profile is missing values".into())?;
                for r in &nu.rows {
                    let direct = dots[r.value as usize] as f64;
                    let main = sizes_sq / q as f64;
                    let levels: Complex64 = r.per_level.iter().sum();
                    let gap = (Complex64::new(direct - main, 0.0) - levels).norm();
                    ensure(gap <= nu_tol, || format!("nu q={q} d={d} |E|={size} seed={seed} t={}: {gap:e}", r.value))?;
                    worst.1 = worst.1.max(gap);
                    if m.is_unit(r.value) {
                        ensure(levels.norm() <= nu_total + nu_tol, || format!("|R(t)| over bound at q={q} d={d}"))?;
                        worst.2 = worst.2.max(levels.norm() / nu_total);
                        for (i, v) in r.per_level.iter().enumerate() {
                            let expo = (d as f64 - 1.0) / 2.0 * (1.0 + i as f64 / l);
                            let bi = size as f64 * (q as f64).powf(expo);
                            ensure(v.norm() <= bi + nu_tol, || format!("|nu_{i}| over bound at q={q} d={d}"))?;
                            worst.2 = worst.2.max(v.norm() / bi);
                        }
                    }
                }
                sets += 1;
            }
        }
    }
    Ok(format!(
        "{sets} sets; max lambda gap {:.2e}, max nu gap {:.2e}, worst |R|/bound {:.3}",
        worst.0, worst.1, worst.2
    ))
}

fn criterion_7() -> Verdict {
    let d = 3usize;
    let mut trials = 0;
    for p in [7u64, 11] {
        let m = Modulus::new(p, 1).unwrap();
        let size = (2.0 * (p as f64).powf((d as f64 + 1.0) / 2.0)).ceil() as u64;
        for seed in 0..COVERAGE_SEEDS {
            let e = PointSet::random(m, d, size, seed).unwrap();
            let pts = points(&e);
            for (distance, name) in [(true, "Delta"), (false, "Pi")] {
                let h = pair_counts(&pts, p, distance);
                let missing: Vec<u64> = (1..p).filter(|&u| h[u as usize] == 0).collect();
                ensure(missing.is_empty(), || format!("p={p} seed={seed}: {name}(E) misses {missing:?}"))?;
            }
            trials += 1;
        }
    }
    Ok(format!("{trials} sets of size ceil(2q^2) cover all units"))
}

fn criterion_8() -> Verdict {
    let mut built = Vec::new();
    for p in [3u64, 5] {
        for ell in [1u32, 2] {
            for d in [3usize, 4] {
                let l = find_lagrangian(p, d).unwrap();
                ensure(l.exhaustively_isotropic(), || format!("p={p} d={d}: not isotropic"))?;
                let e = lift(&l, ell).unwrap();
                let q = p.pow(ell);
                let elems: HashSet<Vec<u64>> = l.elements().into_iter().collect();
                ensure(elems.len() as u64 == p.pow(l.dim() as u32), || "subspace size".into())?;
                let pts = points(&e.points);
                ensure(pts.iter().all(|x| elems.contains(&x.iter().map(|c| c % p).collect::<Vec<_>>())), || {
                    format!("p={p} l={ell} d={d}: point outside the lift")
                })?;
                let expected = p.pow((ell - 1) * d as u32) * elems.len() as u64;
                ensure(pts.len() as u64 == expected, || format!("|E| = {} != {expected}", pts.len()))?;
                let is_unit = |t: u64| t % p != 0;
                let ph = pair_counts(&pts, q, false);
                let pi: Vec<u64> = (0..q).filter(|&t| ph[t as usize] > 0).collect();
                let dh = pair_counts(&pts, q, true);
                ensure(pi.iter().all(|&t| !is_unit(t)), || format!("p={p} l={ell} d={d}: Pi(E) has a unit"))?;
                ensure((0..q).all(|t| dh[t as usize] == 0 || !is_unit(t)), || {
                    format!("p={p} l={ell} d={d}: Delta(E) has a unit")
                })?;
                ensure(pi.len() as u64 <= p.pow(ell - 1), || format!("|Pi(E)| = {} too large", pi.len()))?;
                let r = verify_sharpness(&e).unwrap();
                ensure(r.passes() && r.pi_set == pi, || format!("library verdict disagrees at p={p} l={ell} d={d}"))?;
                built.push(format!("{p}/{ell}/{d}:{}", pts.len()));
            }
        }
    }
    Ok(format!("lifts (p/l/d:|E|) {}", built.join(" ")))
}

fn criterion_9() -> Verdict {
    let run = |threads: &str| {
        Command::new(env!("CARGO_BIN_EXE_zq"))
            .arg("verify-all")
            .env("ZQ_THREADS", threads)
            .output()
            .map_err(|e| e.to_string())
    };
    let one = run("1")?;
    let eight = run("8")?;
    ensure(one.status.code() == Some(0), || {
        format!("ZQ_THREADS=1 exited {:?}: {}", one.status.code(), String::from_utf8_lossy(&one.stderr))
    })?;
    ensure(eight.status.code() == Some(0), || format!("ZQ_THREADS=8 exited {:?}", eight.status.code()))?;
    ensure(one.stdout == eight.stdout, || "reports differ between 1 and 8 threads".into())?;
    Ok(format!("{} byte report identical, all suites PASS", one.stdout.len()))
}

fn main() {
    let criteria: [(u32, fn() -> Verdict); 9] = [
        (1, criterion_1),
        (2, criterion_2),
        (3, criterion_3),
        (4, criterion_4),
        (5, criterion_5),
        (6, criterion_6),
        (7, criterion_7),
        (8, criterion_8),
        (9, criterion_9),
    ];
    let mut failed = 0;
    for (n, f) in criteria {
        let start = Instant::now();
        let verdict = catch_unwind(AssertUnwindSafe(f)).unwrap_or_else(|_| Err("panicked".into()));
        let secs = start.elapsed().as_secs_f64();
        match verdict {
            Ok(detail) => println!("criterion {n}: PASS ({secs:.1} s) {detail}"),
            Err(why) => {
                failed += 1;
                println!("criterion {n}: FAIL ({secs:.1} s) {why}");
            }
        }
    }
    println!("acceptance: {} of 9 criteria pass", 9 - failed);
    if failed > 0 {
        std::process::exit(1);
    }
}
