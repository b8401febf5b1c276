//! Fourier coefficients `a_lambda(k, h, s)` of the Poincare series.

use std::collections::HashMap;
use std::f64::consts::PI;

use num_complex::Complex64;
use parking_lot::RwLock;
use serde::{Deserialize, Serialize};

use super::special::{bessel_k_scaled, e_phase, gamma_complex, ln_gamma_complex};
use crate::arith::KahanSum;
use crate::error::{usage, Error, Result};
use crate::geometry::SliceParams;
use crate::lattice::{cache::Cache, content, Content, GramLattice, LatticeVector};
use crate::report::{complex_obj, Tail, TailKind, TruncationPolicy};
use crate::sums::{calibrated_j_bound_constant, j_closed_invariants, J_BOUND_EPSILON};

/// `1 + e(-s/2)`.
pub fn branch_prefactor(s: Complex64) -> Complex64 {
    Complex64::new(1.0, 0.0) + e_phase(-s.re / 2.0) * (PI * s.im).exp()
}

/// `(h/2 pi)^s Gamma(s)`, the ratio `a* / a`.
pub fn star_ratio(p: &SliceParams, s: Complex64) -> Result<Complex64> {
    Ok((s * (p.h() / (2.0 * PI)).ln()).exp() * gamma_complex(s)?)
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "camelCase")]
pub struct CoeffResult {
    pub lambda: LatticeVector,
    #[serde(with = "complex_obj")]
    pub a_star: Complex64,
    #[serde(with = "complex_obj")]
    pub a: Complex64,
    pub terms_used: u64,
    pub tail_bound: f64,
    pub tail_kind: TailKind,
    pub flags: Vec<String>,
}

/// Coefficient data shared by every `lambda` with the same norm and content.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "camelCase")]
pub struct CoeffValue {
    pub norm: i64,
    pub content: Content,
    #[serde(with = "complex_obj")]
    pub a_star: Complex64,
    #[serde(with = "complex_obj")]
    pub a: Complex64,
    pub terms_used: u64,
    pub tail: Tail,
}

/// `a_lambda` for an even unimodular positive-definite lattice.
pub fn fourier_coeff(
    lattice: &GramLattice,
    lambda: &LatticeVector,
    p: &SliceParams,
    s: Complex64,
    policy: &TruncationPolicy,
) -> Result<CoeffResult> {
    if !(lattice.is_even() && lattice.is_unimodular() && lattice.is_positive_definite()) {
        return usage("coefficients need an even unimodular positive-definite lattice");
    }
    let norm = lattice.norm(lambda)?;
    let c = fourier_coeff_invariants(lattice.rank(), norm, content(lambda), p, s, policy.n_max)?;
    let mut flags = Vec::new();
    if c.tail.kind == TailKind::NoTailBound {
        flags.push("no-tail-bound".to_string());
    }
    Ok(CoeffResult {
        lambda: lambda.clone(),
        a_star: c.a_star,
        a: c.a,
        terms_used: c.terms_used,
        tail_bound: c.tail.estimate,
        tail_kind: c.tail.kind,
        flags,
    })
}

/// The coefficient as a function of `lambda^2` and the content of `lambda`.
///
/// The `n`-sum stops at `n_max`. For `lambda != 0` the omitted terms are
/// bounded with `|j| <= n^{m-1}`, `|K_nu(y)| <= K_{Re nu}(y)` decreasing in
/// `y` and `c_n >= c_{N+1}` (rigorous for `Re s > m`), or with the
/// calibrated `j` bound for `(m+1)/2 + eps < Re s <= m` (heuristic).
pub fn fourier_coeff_invariants(
    rank: usize,
    norm: i64,
    lambda_content: Content,
    p: &SliceParams,
    s: Complex64,
    n_max: u64,
) -> Result<CoeffValue> {
    if norm < 0 || norm % 2 != 0 {
        return usage("lambda^2 must be even and nonnegative");
    }
    if (norm == 0) != (lambda_content == Content::All) {
        return usage("content does not match the norm");
    }
    let m = rank as f64;
    let half = m / 2.0;
    let sigma = s.re;
    let pre = branch_prefactor(s);
    let nu = Complex64::new(half, 0.0) - s;
    let mut acc = KahanSum::new();
    let (a_star, tail_star) = if norm == 0 {
        if sigma <= half {
            return Err(Error::Pole(format!(
                "the lambda = 0 coefficient diverges for Re(s) = {sigma} <= {half}"
            )));
        }
        for n in 1..=n_max {
            let j = j_closed_invariants(rank as u32, 0, Content::All, n)?.value;
            let ln_w = -s * (n as f64).ln() + (2.0 * nu) * p.c_n(n).ln();
            acc.add(j * ln_w.exp());
        }
        let front = pre * gamma_complex(s - half)? * (nu * PI.ln()).exp();
        let tail = if sigma > m {
            let sum = if n_max == 0 { 1.0 + 1.0 / (sigma - m) } else { (n_max as f64).powf(m - sigma) / (sigma - m) };
            Tail::rigorous(front.norm() * sum * p.c_n(n_max + 1).powf(m - 2.0 * sigma))
        } else {
            Tail::none()
        };
        (front * acc.value(), tail)
    } else {
        let len = (norm as f64).sqrt();
        for n in 1..=n_max {
            let j = j_closed_invariants(rank as u32, norm / 2, lambda_content, n)?.value;
            if j == Complex64::new(0.0, 0.0) {
                continue;
            }
            let cn = p.c_n(n);
            let x = 2.0 * PI * len * cn;
            let k = bessel_k_scaled(nu, x, 1e-13)?;
            let ln_w = -s * (n as f64).ln() + nu * cn.ln() - x;
            acc.add(j * k * ln_w.exp());
        }
        let front = 2.0 * pre * ((s - half) * len.ln()).exp();
        let c_next = p.c_n(n_max + 1);
        let envelope = {
            let x = 2.0 * PI * len * c_next;
            let k = bessel_k_scaled(Complex64::new(nu.re, 0.0), x, 1e-13)?.re;
            k * (nu.re * c_next.ln() - x).exp()
        };
        let e = (m - 1.0) / 2.0 + J_BOUND_EPSILON;
        let start = (n_max as f64).max(1.0);
        let tail = if sigma > m {
            let sum = if n_max == 0 { 1.0 + 1.0 / (sigma - m) } else { start.powf(m - sigma) / (sigma - m) };
            Tail::rigorous(front.norm() * envelope * sum)
        } else if sigma > e + 1.0 {
            let cj = calibrated_j_bound_constant(rank as u32) * len.powf((m - 1.0) / 2.0);
            let sum = if n_max == 0 { 1.0 + 1.0 / (sigma - e - 1.0) } else { start.powf(e + 1.0 - sigma) / (sigma - e - 1.0) };
            Tail::heuristic(front.norm() * envelope * cj * sum)
        } else {
            Tail::none()
        };
        (front * acc.value(), tail)
    };
    // a = a* / ((h/2pi)^s Gamma(s)), combined in logs for range safety
    let ln_ratio = s * (p.h() / (2.0 * PI)).ln() + ln_gamma_complex(s)?;
    let inv = (-ln_ratio).exp();
    let a = a_star * inv;
    let tail = Tail { estimate: tail_star.estimate * inv.norm(), kind: tail_star.kind };
    Ok(CoeffValue { norm, content: lambda_content, a_star, a, terms_used: n_max, tail })
}

/// Memo of coefficients keyed by `(lambda^2, content)` for one `(k, h, s)`,
/// optionally persisted through the on-disk cache.
pub struct CoeffTable {
    rank: usize,
    params: SliceParams,
    s: Complex64,
    n_max: u64,
    entries: RwLock<HashMap<(i64, Content), CoeffValue>>,
}

impl CoeffTable {
    pub fn new(rank: usize, params: SliceParams, s: Complex64, n_max: u64) -> Self {
        Self { rank, params, s, n_max, entries: RwLock::new(HashMap::new()) }
    }

    pub fn params(&self) -> &SliceParams {
        &self.params
    }

    pub fn s(&self) -> Complex64 {
        self.s
    }

    pub fn get(&self, norm: i64, c: Content) -> Result<CoeffValue> {
        if let Some(v) = self.entries.read().get(&(norm, c)) {
            return Ok(*v);
        }
        let v = fourier_coeff_invariants(self.rank, norm, c, &self.params, self.s, self.n_max)?;
        self.entries.write().entry((norm, c)).or_insert(v);
        Ok(v)
    }

    /// `a` for `lambda^2 = norm` and content `c`.
    pub fn a(&self, norm: i64, c: Content) -> Result<Complex64> {
        Ok(self.get(norm, c)?.a)
    }

    pub fn len(&self) -> usize {
        self.entries.read().len()
    }

    pub fn is_empty(&self) -> bool {
        self.len() == 0
    }

    /// Entries sorted by `(norm, content)`.
    pub fn entries(&self) -> Vec<CoeffValue> {
        let mut v: Vec<CoeffValue> = self.entries.read().values().copied().collect();
        v.sort_by_key(|e| (e.norm, content_key(e.content)));
        v
    }

    fn cache_key(&self) -> serde_json::Value {
        serde_json::json!({
            "k": self.params.k(),
            "h": self.params.h(),
            "s": { "re": self.s.re, "im": self.s.im },
            "nMax": self.n_max,
        })
    }

    pub fn store(&self, cache: &Cache, lattice: &GramLattice) -> Result<()> {
        let lines = self
            .entries()
            .iter()
            .map(serde_json::to_string)
            .collect::<std::result::Result<Vec<_>, _>>()?;
        cache.store("coeff", lattice, self.cache_key(), &lines)?;
        Ok(())
    }

    /// Loads previously stored entries; returns how many were read.
    pub fn load(&self, cache: &Cache, lattice: &GramLattice) -> Result<usize> {
        let Some(lines) = cache.load("coeff", lattice, &self.cache_key())? else {
            return Ok(0);
        };
        let mut map = self.entries.write();
        for l in &lines {
            let v: CoeffValue = serde_json::from_str(l)?;
            map.insert((v.norm, v.content), v);
        }
        Ok(lines.len())
    }
}

fn content_key(c: Content) -> u64 {
    match c {
        Content::All => 0,
        Content::Value(v) => v,
    }
}

/// CSV with columns `lambdaCoords,lambdaNormSq,aRe,aIm,tailBound,termsUsed`.
pub fn coeff_csv(rows: &[CoeffResult], lattice: &GramLattice) -> Result<String> {
    let mut out = String::from("lambdaCoords,lambdaNormSq,aRe,aIm,tailBound,termsUsed\n");
    for r in rows {
        let coords: Vec<String> = r.lambda.coords.iter().map(|c| c.to_string()).collect();
        out.push_str(&format!(
            "\"{}\",{},{:e},{:e},{:e},{}\n",
            coords.join(" "),
            lattice.norm(&r.lambda)?,
            r.a.re,
            r.a.im,
            r.tail_bound,
            r.terms_used
        ));
    }
    Ok(out)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::analytic::gamma_real;
    use crate::lattice::leech;

    fn params() -> SliceParams {
        SliceParams::new(1.0, 0.5).unwrap()
    }

    #[test]
    fn single_term_zero_coefficient() {
        let s = Complex64::new(30.0, 0.0);
        let policy = TruncationPolicy { n_max: 1, ..Default::default() };
        let r = fourier_coeff(leech(), &leech().zero(), &params(), s, &policy).unwrap();
        let c1 = 2f64.sqrt();
        let expected = 2.0 * gamma_real(18.0).unwrap() * PI.powi(-18) * c1.powi(-36);
        assert!((r.a_star.re - expected).abs() < 1e-12 * expected);
        assert!(r.a_star.im.abs() < 1e-12 * expected);
        let ratio = star_ratio(&params(), s).unwrap();
        assert!((r.a * ratio - r.a_star).norm() < 1e-12 * r.a_star.norm());
    }

    #[test]
    fn sign_symmetry_and_realness() {
        let s = Complex64::new(30.0, 0.0);
        let policy = TruncationPolicy::default();
        let v = leech().basis_vector(3);
        let minus = leech().vector(v.coords.iter().map(|c| -c).collect()).unwrap();
        let a = fourier_coeff(leech(), &v, &params(), s, &policy).unwrap();
        let b = fourier_coeff(leech(), &minus, &params(), s, &policy).unwrap();
        assert_eq!(a.a, b.a);
        assert!(a.a.im.abs() < 1e-9 * a.a.norm());
        assert_eq!(a.tail_kind, TailKind::Rigorous);
        assert!(a.tail_bound < 1e-8 * a.a.norm());
    }

    #[test]
    fn odd_integer_order_vanishes() {
        let s = Complex64::new(29.0, 0.0);
        let v = fourier_coeff_invariants(24, 4, Content::Value(1), &params(), s, 10).unwrap();
        assert!(v.a.norm() < 1e-12);
    }

    #[test]
    fn pole_and_flags() {
        let zero = fourier_coeff_invariants(24, 0, Content::All, &params(), Complex64::new(11.0, 0.0), 5);
        assert!(matches!(zero, Err(Error::Pole(_))));
        let low = fourier_coeff_invariants(24, 4, Content::Value(1), &params(), Complex64::new(12.0, 0.0), 5).unwrap();
        assert_eq!(low.tail.kind, TailKind::NoTailBound);
        let mid = fourier_coeff_invariants(24, 4, Content::Value(1), &params(), Complex64::new(20.0, 0.0), 5).unwrap();
        assert_eq!(mid.tail.kind, TailKind::Heuristic);
    }

    #[test]
    fn decay_shape() {
        let p = params();
        let s = Complex64::new(30.0, 0.0);
        let kappa = p.kappa();
        let mut worst = f64::NEG_INFINITY;
        let mut first = None;
        for norm in (4..=60).step_by(2) {
            let a = fourier_coeff_invariants(24, norm, Content::Value(1), &p, s, 30).unwrap().a.norm();
            let len = (norm as f64).sqrt();
            let shape = a.ln() + PI * kappa * len - (s.re - 0.5) * len.ln();
            first.get_or_insert(shape);
            worst = worst.max(shape);
        }
        assert!(worst.is_finite() && worst <= first.unwrap() + 1.0);
    }

    #[test]
    fn table_roundtrip_through_cache() {
        let dir = tempfile::tempdir().unwrap();
        let cache = Cache::new(dir.path());
        let s = Complex64::new(30.0, 0.0);
        let t = CoeffTable::new(24, params(), s, 8);
        t.get(0, Content::All).unwrap();
        t.get(4, Content::Value(1)).unwrap();
        t.get(8, Content::Value(1)).unwrap();
        t.store(&cache, leech()).unwrap();
        let u = CoeffTable::new(24, params(), s, 8);
        assert_eq!(u.load(&cache, leech()).unwrap(), 3);
        assert_eq!(u.entries(), t.entries());
        let other = CoeffTable::new(24, params(), s, 9);
        assert_eq!(other.load(&cache, leech()).unwrap(), 0);
    }

    #[test]
    fn csv_export() {
        let s = Complex64::new(30.0, 0.0);
        let r = fourier_coeff(leech(), &leech().basis_vector(0), &params(), s, &TruncationPolicy::default()).unwrap();
        let csv = coeff_csv(&[r], leech()).unwrap();
        let mut lines = csv.lines();
        assert_eq!(lines.next().unwrap(), "lambdaCoords,lambdaNormSq,aRe,aIm,tailBound,termsUsed");
        assert!(lines.next().unwrap().contains(",4,"));
    }
}
