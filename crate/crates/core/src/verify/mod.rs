//! Oracle-equivalence suites. Each suite runs a fixed battery of
//! comparisons and reports one check per comparison.

use std::time::Instant;

use num_complex::Complex64;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::Serialize;

use crate::analytic::{
    bessel_k, fourier_coeff, fourier_poincare, gamma_complex, radial_integral_oracle, radial_integral_oracle_zero,
    zeta_real,
};
use crate::error::{usage, Result};
use crate::geometry::{direct_poincare, SliceParams};
use crate::lattice::{construct_leech, e8, ii11, leech, GramLattice, LatticeVector, RealVector};
use crate::report::{rel_diff, TruncationPolicy};
use crate::sums::{
    diagonalize_mod_q, gauss_theta_brute, gauss_theta_brute_all, gauss_theta_closed_odd, hensel_fiber_check,
    j_brute, j_closed, kloosterman, weil_bound,
};

#[derive(Debug, Clone, Serialize)]
#[serde(rename_all = "camelCase")]
pub struct Check {
    pub label: String,
    pub passed: bool,
    /// Observed discrepancy (relative unless stated otherwise).
    pub observed: f64,
    pub limit: f64,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub detail: Option<String>,
}

#[derive(Debug, Clone, Serialize)]
#[serde(rename_all = "camelCase")]
pub struct SuiteReport {
    pub suite: String,
    pub criterion: u32,
    pub passed: bool,
    pub checks: Vec<Check>,
    pub runtime_ms: f64,
}

#[derive(Debug, Clone)]
pub struct VerifyOptions {
    /// Restrict lattice-indexed suites to one lattice (`e8`, `ii11`, ...).
    pub lattice: Option<String>,
    /// Largest modulus for the Gauss-sum suites.
    pub qmax: Option<u64>,
    pub budget: u64,
}

impl Default for VerifyOptions {
    fn default() -> Self {
        Self { lattice: None, qmax: None, budget: 1 << 26 }
    }
}

impl VerifyOptions {
    fn wants(&self, name: &str) -> bool {
        self.lattice.as_deref().is_none_or(|l| l.eq_ignore_ascii_case(name))
    }

    fn q_ok(&self, q: u64) -> bool {
        self.qmax.is_none_or(|m| q <= m)
    }
}

/// Suite names in declaration order with their criterion numbers.
pub const SUITES: [(&str, u32); 12] = [
    ("theta", 1),
    ("gauss-odd", 2),
    ("gauss-even", 3),
    ("j", 4),
    ("hensel", 5),
    ("leech", 6),
    ("dirichlet", 7),
    ("radial", 8),
    ("cross-oracle", 9),
    ("symmetry", 10),
    ("weil", 11),
    ("special", 12),
];

struct Checks(Vec<Check>);

impl Checks {
    fn new() -> Self {
        Checks(Vec::new())
    }

    fn le(&mut self, label: impl Into<String>, observed: f64, limit: f64) {
        self.0.push(Check { label: label.into(), passed: observed <= limit, observed, limit, detail: None });
    }

    fn flag(&mut self, label: impl Into<String>, ok: bool, detail: Option<String>) {
        let observed = if ok { 0.0 } else { 1.0 };
        self.0.push(Check { label: label.into(), passed: ok, observed, limit: 0.0, detail });
    }

    /// Runs `f`; an error becomes a failed check carrying the message.
    fn attempt(&mut self, label: impl Into<String>, f: impl FnOnce(&mut Checks) -> Result<()>) {
        let label = label.into();
        if let Err(e) = f(self) {
            self.0.push(Check { label, passed: false, observed: f64::NAN, limit: 0.0, detail: Some(e.to_string()) });
        }
    }
}

fn rel(a: Complex64, b: Complex64) -> f64 {
    rel_diff(a, b)
}

pub fn run_suite(name: &str, opts: &VerifyOptions) -> Result<SuiteReport> {
    let Some(&(_, criterion)) = SUITES.iter().find(|(n, _)| *n == name) else {
        return usage(format!(
            "unknown suite {name}; expected one of {}",
            SUITES.iter().map(|s| s.0).collect::<Vec<_>>().join(", ")
        ));
    };
    let start = Instant::now();
    let mut c = Checks::new();
    match name {
        "theta" => theta_suite(&mut c, opts),
        "gauss-odd" => gauss_odd_suite(&mut c, opts),
        "gauss-even" => gauss_even_suite(&mut c, opts),
        "j" => j_suite(&mut c, opts),
        "hensel" => hensel_suite(&mut c, opts),
        "leech" => leech_suite(&mut c),
        "dirichlet" => dirichlet_suite(&mut c),
        "radial" => radial_suite(&mut c),
        "cross-oracle" => cross_oracle_suite(&mut c),
        "symmetry" => symmetry_suite(&mut c),
        "weil" => weil_suite(&mut c),
        "special" => special_suite(&mut c),
        _ => unreachable!(),
    }
    let passed = !c.0.is_empty() && c.0.iter().all(|x| x.passed);
    Ok(SuiteReport {
        suite: name.to_string(),
        criterion,
        passed,
        checks: c.0,
        runtime_ms: start.elapsed().as_secs_f64() * 1e3,
    })
}

pub fn run_all(opts: &VerifyOptions) -> Result<Vec<SuiteReport>> {
    SUITES.iter().map(|(n, _)| run_suite(n, opts)).collect()
}

fn prime_powers_up_to(limit: u64) -> Vec<u64> {
    (2..=limit).filter(|&q| crate::arith::as_prime_power(q).is_some()).collect()
}

fn theta_suite(c: &mut Checks, opts: &VerifyOptions) {
    let mut cases: Vec<(&GramLattice, u64)> = Vec::new();
    if opts.wants("ii11") {
        cases.extend(prime_powers_up_to(128).into_iter().map(|q| (ii11(), q)));
    }
    if opts.wants("e8") {
        cases.extend([2, 3, 4, 5, 7, 8].into_iter().map(|q| (e8(), q)));
    }
    for (lat, q) in cases.into_iter().filter(|(_, q)| opts.q_ok(*q)) {
        c.attempt(format!("{} q={q}", lat.name()), |c| {
            let expected = (q as f64).powf(lat.rank() as f64 / 2.0);
            let worst = gauss_theta_brute_all(lat, q, opts.budget)?
                .iter()
                .map(|(_, v)| rel(v.value, Complex64::new(expected, 0.0)))
                .fold(0.0, f64::max);
            c.le(format!("{} q={q}: theta = q^(rank/2) for all c", lat.name()), worst, 1e-6);
            Ok(())
        });
    }
}

fn gauss_odd_suite(c: &mut Checks, opts: &VerifyOptions) {
    for lat in [e8(), ii11()] {
        if !opts.wants(lat.name()) {
            continue;
        }
        for q in [3u64, 5, 7, 9].into_iter().filter(|q| opts.q_ok(*q)) {
            c.attempt(format!("{} q={q}", lat.name()), |c| {
                let mut worst: f64 = 0.0;
                for (cc, v) in gauss_theta_brute_all(lat, q, opts.budget)? {
                    let closed = gauss_theta_closed_odd(lat, q, cc)?;
                    worst = worst.max(rel(closed.value, v.value));
                }
                c.le(format!("{} q={q}: closed form = enumeration", lat.name()), worst, 1e-6);
                let d = diagonalize_mod_q(lat, q)?;
                c.flag(format!("{} q={q}: diagonal basis", lat.name()), d.verify(lat)?, None);
                Ok(())
            });
        }
    }
}

fn gauss_even_suite(c: &mut Checks, opts: &VerifyOptions) {
    let mut cases: Vec<(&GramLattice, u32)> = Vec::new();
    if opts.wants("e8") {
        cases.extend([(e8(), 2), (e8(), 3)]);
    }
    if opts.wants("ii11") {
        cases.extend((2..=7).map(|r| (ii11(), r)));
    }
    for (lat, r) in cases.into_iter().filter(|(_, r)| opts.q_ok(1 << r)) {
        c.attempt(format!("{} r={r}", lat.name()), |c| {
            let top = gauss_theta_brute_all(lat, 1 << r, opts.budget)?;
            let scale = 2f64.powi(lat.rank() as i32);
            let mut worst: f64 = 0.0;
            for (cc, v) in top {
                let lower = gauss_theta_brute(lat, 1 << (r - 2), cc, opts.budget)?;
                worst = worst.max(rel(v.value, lower.value * scale));
                let rec = crate::sums::gauss_theta_even_recursion(lat, r, cc, opts.budget)?;
                worst = worst.max(rel(v.value, rec.value));
            }
            c.le(format!("{} r={r}: theta(2^r) = 2^rank theta(2^(r-2))", lat.name()), worst, 1e-6);
            Ok(())
        });
    }
}

/// A root and a norm-4 vector of E8 in its Cartan basis.
fn e8_vectors() -> Vec<(&'static str, LatticeVector)> {
    let l = e8();
    let root = l.basis_vector(0);
    let twice = l.vector(root.coords.iter().map(|x| 2 * x).collect()).expect("valid");
    let mut four = vec![0i64; 8];
    four[0] = 1;
    four[1] = 1;
    let four = l.vector(four).expect("valid");
    vec![("0", l.zero()), ("root", root), ("2 root", twice), ("norm 4", four)]
}

fn j_suite(c: &mut Checks, opts: &VerifyOptions) {
    let budget = opts.budget.max(1 << 25);
    let compare = |c: &mut Checks, lat: &GramLattice, label: &str, v: &LatticeVector, n: u64| {
        c.attempt(format!("{} {label} n={n}", lat.name()), |c| {
            let b = j_brute(lat, v, n, 1, budget)?;
            let cl = j_closed(lat, v, n)?;
            let scale = b.value.norm().max(1.0);
            c.le(format!("{} lambda={label} n={n}", lat.name()), (b.value - cl.value).norm() / scale, 1e-6);
            Ok(())
        });
    };
    if opts.wants("e8") {
        for (label, v) in e8_vectors() {
            for n in 1..=8 {
                compare(c, e8(), label, &v, n);
            }
        }
    }
    if opts.wants("ii11") {
        let l = ii11();
        for coords in [[0, 0], [1, 0], [1, 1], [2, 3], [4, 6], [3, 9]] {
            let v = l.vector(coords.to_vec()).expect("valid");
            for n in 1..=50 {
                compare(c, l, &format!("{coords:?}"), &v, n);
            }
        }
    }
    if opts.wants("e8+ii11") {
        let l = e8().direct_sum(ii11()).expect("direct sum");
        let mut root = vec![0i64; 10];
        root[0] = 1;
        let mut mixed = vec![0i64; 10];
        mixed[0] = 1;
        mixed[8] = 1;
        mixed[9] = 2;
        for (label, coords) in [("0", vec![0i64; 10]), ("root", root), ("mixed", mixed)] {
            let v = l.vector(coords).expect("valid");
            for n in 1..=4 {
                compare(c, &l, label, &v, n);
            }
        }
    }
    if opts.wants("leech") {
        let l = leech();
        for (label, v) in [("0", l.zero()), ("norm 4", l.basis_vector(0))] {
            compare(c, l, label, &v, 2);
        }
    }
}

fn hensel_suite(c: &mut Checks, opts: &VerifyOptions) {
    for (lat, p, q) in [(e8(), 2u64, 2u64), (ii11(), 3, 3)] {
        if !opts.wants(lat.name()) {
            continue;
        }
        c.attempt(format!("{} p={p}", lat.name()), |c| {
            let r = hensel_fiber_check(lat, p, q, 1, opts.budget)?;
            c.flag(
                format!("{} p={p} q={q} d=1: every fiber has p^(m-1) points", lat.name()),
                r.holds,
                Some(format!("fibers {}..{} expected {}", r.min_fiber, r.max_fiber, r.expected_fiber)),
            );
            Ok(())
        });
    }
}

fn leech_suite(c: &mut Checks) {
    c.attempt("construction", |c| {
        let start = Instant::now();
        let (lat, frame) = construct_leech()?;
        let cert = lat.certificates();
        c.flag("even", (0..24).all(|i| lat.gram(i, i) % 2 == 0) && cert.even, None);
        c.le("|det| - 1", (crate::lattice::bareiss_det(24, lat.gram_flat())?.abs() - 1) as f64, 0.0);
        c.le("norm-2 vectors", lat.shell_count(2).unwrap_or(u64::MAX) as f64, 0.0);
        let four = lat.shell_count(4).unwrap_or(0) as f64;
        c.le("|#norm-4 - 196560|", (four - 196_560.0).abs(), 0.0);
        let basis_ok = frame.basis().iter().all(|b| frame.contains(b));
        c.flag("basis lies in the Golay description", basis_ok, None);
        c.le("seconds", start.elapsed().as_secs_f64(), 120.0);
        Ok(())
    });
}

fn dirichlet_suite(c: &mut Checks) {
    c.attempt("partial sum", |c| {
        let r = crate::sums::dirichlet_j_partial(leech(), &leech().zero(), Complex64::new(30.0, 0.0), 1000, &[])?;
        let expected = zeta_real(7.0)? / zeta_real(19.0)?;
        c.le("Leech lambda=0 s=30 N=1000 vs zeta(7)/zeta(19)", rel(r.value, Complex64::new(expected, 0.0)), 1e-8);
        Ok(())
    });
}

fn radial_suite(c: &mut Checks) {
    for (s, n2, cc) in [(30.0, 4.0, 2f64.sqrt()), (30.0, 6.0, 2.0), (26.0, 4.0, 2f64.sqrt())] {
        c.attempt(format!("s={s} |lambda|^2={n2}"), |c| {
            let r = radial_integral_oracle(n2, cc, Complex64::new(s, 0.0), 1e-12)?;
            c.le(format!("s={s} |lambda|^2={n2} c={cc:.4}: quadrature vs Bessel K"), r.rel_diff(), 1e-6);
            Ok(())
        });
    }
    for s in [26.0, 30.0] {
        c.attempt(format!("lambda=0 s={s}"), |c| {
            let r = radial_integral_oracle_zero(Complex64::new(s, 0.0), 1e-13)?;
            c.le(format!("lambda=0 s={s}: quadrature vs Gamma ratio"), r.rel_diff(), 1e-8);
            Ok(())
        });
    }
}

/// Deterministic test point: lattice coordinates of size at most 0.3,
/// scaled to squared length 0.2 so that the nearest lattice point is 0.
pub fn generic_point() -> RealVector {
    let l = leech();
    let mut rng = ChaCha8Rng::seed_from_u64(0x5eed);
    let raw: Vec<f64> = (0..24).map(|_| rng.gen_range(-0.3..0.3)).collect();
    let n = l.inner_real_coords(&raw, &raw);
    let scale = (0.2 / n).sqrt().min(1.0);
    l.real_vector(raw.iter().map(|x| x * scale).collect()).expect("valid")
}

/// Truncation policy used by the cross-oracle comparisons.
pub fn cross_oracle_policy() -> TruncationPolicy {
    TruncationPolicy { n_max: 40, tol: 1e-6, ..Default::default() }
}

fn cross_oracle_suite(c: &mut Checks) {
    let s = Complex64::new(30.0, 0.0);
    let policy = cross_oracle_policy();
    let zero = leech().real_vector(vec![0.0; 24]).expect("valid");
    for h in [0.5, 0.6] {
        for (label, v) in [("v=0", zero.clone()), ("v generic", generic_point())] {
            c.attempt(format!("k=1 h={h} {label}"), |c| {
                let p = SliceParams::new(1.0, h)?;
                let start = Instant::now();
                let d = direct_poincare(leech(), &v, &p, s, &policy)?;
                let f = fourier_poincare(&v, &p, s, &policy)?;
                c.le(format!("k=1 h={h} {label}: |direct - fourier|/|fourier|"), rel(d.value, f.value), 1e-3);
                c.le(format!("k=1 h={h} {label}: seconds"), start.elapsed().as_secs_f64(), 600.0);
                Ok(())
            });
        }
    }
}

fn symmetry_suite(c: &mut Checks) {
    let s = Complex64::new(30.0, 0.0);
    let policy = cross_oracle_policy();
    let l = leech();
    let v = generic_point();
    let mu: Vec<i64> = (0..24).map(|i| [1, -2, 0, 3][i % 4]).collect();
    let shifted = l
        .real_vector(v.coords.iter().zip(&mu).map(|(a, &b)| a + b as f64).collect())
        .expect("valid");
    c.attempt("direct translation", |c| {
        let p = SliceParams::new(1.0, 0.5)?;
        let a = direct_poincare(l, &v, &p, s, &policy)?;
        let b = direct_poincare(l, &shifted, &p, s, &policy)?;
        c.le("direct: E(v) vs E(v + mu)", rel(a.value, b.value), 1e-9);
        Ok(())
    });
    c.attempt("fourier periodicity", |c| {
        let p = SliceParams::new(1.0, 0.6)?;
        let dyadic = l
            .real_vector((0..24).map(|i| [0.25, -0.125, 0.0625, 0.0][i % 4]).collect())
            .expect("valid");
        let moved = l
            .real_vector(dyadic.coords.iter().zip(&mu).map(|(a, &b)| a + b as f64).collect())
            .expect("valid");
        let a = fourier_poincare(&dyadic, &p, s, &policy)?;
        let b = fourier_poincare(&moved, &p, s, &policy)?;
        c.le("fourier: E(v) = E(v + mu) bit for bit", if a.value == b.value { 0.0 } else { 1.0 }, 0.0);
        Ok(())
    });
    c.attempt("coefficient sign symmetry", |c| {
        let p = SliceParams::new(1.0, 0.5)?;
        let mut worst: f64 = 0.0;
        for i in [0usize, 5, 11, 23] {
            let v = l.basis_vector(i);
            let w = l.vector(v.coords.iter().map(|x| -x).collect())?;
            let a = fourier_coeff(l, &v, &p, s, &policy)?;
            let b = fourier_coeff(l, &w, &p, s, &policy)?;
            worst = worst.max(rel(a.a, b.a));
        }
        c.le("a(-lambda) = a(lambda)", worst, 0.0);
        Ok(())
    });
    c.attempt("realness", |c| {
        let mut worst: f64 = 0.0;
        for (_, v) in e8_vectors() {
            for n in 1..=6 {
                let j = j_brute(e8(), &v, n, 1, 1 << 24)?.value;
                worst = worst.max(j.im.abs() / j.norm().max(1.0));
            }
        }
        for q in [3u64, 5, 8] {
            for (_, t) in gauss_theta_brute_all(e8(), q, 1 << 24)? {
                worst = worst.max(t.value.im.abs() / t.value.norm().max(1.0));
            }
        }
        let mut rng = ChaCha8Rng::seed_from_u64(17);
        for _ in 0..500 {
            let n = rng.gen_range(1..=500u64);
            let k = kloosterman(rng.gen_range(-1000..1000), rng.gen_range(-1000..1000), n).value;
            worst = worst.max(k.im.abs() / k.norm().max(1.0));
        }
        c.le("imaginary parts of j, theta and Kloosterman sums", worst, 1e-9);
        Ok(())
    });
}

fn weil_suite(c: &mut Checks) {
    let mut rng = ChaCha8Rng::seed_from_u64(11);
    let mut worst: f64 = 0.0;
    let mut failures = 0;
    for _ in 0..10_000 {
        let n = rng.gen_range(1..=5000u64);
        let a = rng.gen_range(-10_000..10_000);
        let b = rng.gen_range(-10_000..10_000);
        let k = kloosterman(a, b, n).value.norm();
        let bound = weil_bound(a, b, n);
        worst = worst.max(k / bound);
        if k > bound * (1.0 + 1e-9) {
            failures += 1;
        }
    }
    c.le("max |S(a,b;n)| / bound over 10^4 samples", worst, 1.0 + 1e-9);
    c.le("violations", failures as f64, 0.0);
}

fn special_suite(c: &mut Checks) {
    use std::f64::consts::PI;
    c.attempt("K_1/2", |c| {
        let mut worst: f64 = 0.0;
        for x in [0.5, 1.0, 10.0] {
            let k = bessel_k(Complex64::new(0.5, 0.0), x)?;
            let exact = (PI / (2.0 * x)).sqrt() * (-x).exp();
            worst = worst.max(rel(k, Complex64::new(exact, 0.0)));
        }
        c.le("K_{1/2}(x) closed form", worst, 1e-8);
        Ok(())
    });
    c.attempt("K recurrence", |c| {
        let mut worst: f64 = 0.0;
        for &(nu, x) in &[
            (Complex64::new(0.3, 0.0), 1.0),
            (Complex64::new(-18.0, 0.0), 17.77),
            (Complex64::new(2.5, 7.0), 3.0),
            (Complex64::new(-4.0, -20.0), 40.0),
        ] {
            let km = bessel_k(nu - 1.0, x)?;
            let k0 = bessel_k(nu, x)?;
            let kp = bessel_k(nu + 1.0, x)?;
            let scale = km.norm().max(kp.norm());
            worst = worst.max((kp - km - 2.0 * nu / x * k0).norm() / scale);
        }
        c.le("K_{nu+1} - K_{nu-1} = (2 nu/x) K_nu", worst, 1e-8);
        Ok(())
    });
    c.attempt("Gamma reflection", |c| {
        let g = gamma_complex(Complex64::new(0.5, 0.0))?;
        let mut worst = rel(g * g, Complex64::new(PI, 0.0));
        for z in [Complex64::new(0.3, 0.7), Complex64::new(-2.4, 1.1), Complex64::new(5.5, -3.0)] {
            let lhs = gamma_complex(z)? * gamma_complex(Complex64::new(1.0, 0.0) - z)?;
            let rhs = PI / (z * PI).sin();
            worst = worst.max(rel(lhs, rhs));
        }
        c.le("Gamma(z) Gamma(1-z) = pi / sin(pi z)", worst, 1e-10);
        Ok(())
    });
    c.attempt("zeta(2)", |c| {
        let z = zeta_real(2.0)?;
        c.le("zeta(2) vs pi^2/6", (z - PI * PI / 6.0).abs() / (PI * PI / 6.0), 1e-10);
        Ok(())
    });
}
