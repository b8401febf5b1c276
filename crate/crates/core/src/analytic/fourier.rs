//! The Fourier side: `E(z, s) = sum_lambda a_lambda e(<lambda, v>)` with
//! `v = phi^{-1}(z)` on the Leech lattice.

use std::time::Instant;

use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use super::coeff::CoeffTable;
use super::shells::{leech_theta_counts, ShellEngine};
use super::special::e_phase;
use crate::arith::{mobius, KahanSum};
use crate::error::{usage, Error, Result};
use crate::geometry::SliceParams;
use crate::lattice::{content_of, leech_with_frame, Content, RealVector, ShortVectorSearch};
use crate::report::{EvalResult, Tail, TruncationPolicy};

/// Largest norm the adaptive cutoff may reach.
pub const MAX_FOURIER_NORM: usize = 1200;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum FourierMethod {
    /// Shell sums from the Golay-code description.
    Shells,
    /// Explicit enumeration of every lattice vector in the ball.
    Enumerated,
}

/// Cutoff `R` and the estimated contribution of the shells beyond it.
#[derive(Debug, Clone, Copy)]
struct Cutoff {
    radius: usize,
    tail: f64,
}

/// `count(N) |a(N, 1)|` for `N = 0..`, extended until negligible.
fn choose_cutoff(table: &CoeffTable, counts: &[u128], policy: &TruncationPolicy) -> Result<Cutoff> {
    let a0 = table.a(0, Content::All)?.norm();
    let mut terms = vec![a0, 0.0, 0.0, 0.0];
    let mut total = a0;
    let mut n = 4;
    loop {
        if n > MAX_FOURIER_NORM {
            return Err(Error::Resource {
                what: "Fourier coefficients do not decay within the supported norm range".into(),
                processed: MAX_FOURIER_NORM as u64,
                required: MAX_FOURIER_NORM as u64 + 2,
            });
        }
        let t = counts[n] as f64 * table.a(n as i64, Content::Value(1))?.norm();
        terms.push(t);
        terms.push(0.0);
        total += t;
        let prev = terms[n - 2];
        if let Some(r) = policy.lambda_radius_sq {
            if (n as f64) > r && t < 1e-6 * policy.tol * total && t <= prev {
                break;
            }
        } else if t < 1e-6 * policy.tol * total && t <= prev {
            break;
        }
        n += 2;
    }
    let tail_from = |r: usize| -> f64 { terms.iter().skip(r + 1).sum::<f64>() };
    let radius = match policy.lambda_radius_sq {
        Some(r) => (r.max(0.0).floor() as usize).min(terms.len() - 1),
        None => {
            let mut r = 0;
            while tail_from(r) > policy.tol * total {
                r += 2;
            }
            r
        }
    };
    Ok(Cutoff { radius, tail: tail_from(radius) })
}

/// `v - round(v)` in lattice coordinates.
fn reduce(v: &[f64]) -> Vec<f64> {
    v.iter().map(|c| c - c.round()).collect()
}

/// Fourier evaluation with the shell-sum engine.
pub fn fourier_poincare(v: &RealVector, p: &SliceParams, s: Complex64, policy: &TruncationPolicy) -> Result<EvalResult> {
    fourier_poincare_with(v, p, s, policy, FourierMethod::Shells)
}

/// Sums `a_lambda e(<lambda, v>)` over `lambda^2 <= R`, with `R` from
/// `policy.lambda_radius_sq` or chosen so that the estimated remainder
/// `sum_{N > R} #{lambda^2 = N} |a(N, primitive)|` is below `policy.tol`
/// times the absolute sum. The remainder is reported as a heuristic tail.
pub fn fourier_poincare_with(
    v: &RealVector,
    p: &SliceParams,
    s: Complex64,
    policy: &TruncationPolicy,
    method: FourierMethod,
) -> Result<EvalResult> {
    let table = CoeffTable::new(24, *p, s, policy.n_max);
    fourier_poincare_table(v, &table, policy, method)
}

/// As [`fourier_poincare_with`], reading and filling a caller-owned
/// coefficient table (whose `n`-cutoff takes precedence over the policy).
pub fn fourier_poincare_table(
    v: &RealVector,
    table: &CoeffTable,
    policy: &TruncationPolicy,
    method: FourierMethod,
) -> Result<EvalResult> {
    let start = Instant::now();
    let (lattice, frame) = leech_with_frame();
    if v.lattice != lattice.id() {
        return usage("the Fourier evaluator is implemented for the Leech lattice");
    }
    let s = table.s();
    let mut flags = Vec::new();
    if s.re <= 12.5 {
        flags.push("no-tail-bound".to_string());
    }
    let w = reduce(&v.coords);
    let counts = leech_theta_counts(MAX_FOURIER_NORM + 2);
    let cut = choose_cutoff(table, &counts, policy)?;
    let r = cut.radius;

    // coefficients needed: (N, c) with c^2 | N and N/c^2 a nonzero norm
    let mut needed = Vec::new();
    for n in (4..=r).step_by(2) {
        for c in (1..).take_while(|c| 4 * c * c <= n) {
            if n % (c * c) == 0 && (n / (c * c)) % 2 == 0 && n / (c * c) >= 4 {
                needed.push((n, c));
            }
        }
    }
    for &(n, c) in &needed {
        table.get(n as i64, Content::Value(c as u64))?;
    }

    let mut acc = KahanSum::new();
    acc.add(table.a(0, Content::All)?);
    let terms = counts[..=r]
        .iter()
        .fold(0u64, |t, &c| t.saturating_add(u64::try_from(c).unwrap_or(u64::MAX)));
    match method {
        FourierMethod::Shells => {
            let engine = ShellEngine::new(frame);
            let max_t = ((r / 4) as f64).sqrt().floor() as usize;
            let zero = w.iter().all(|&c| c == 0.0);
            let mut sums: Vec<Vec<Complex64>> = Vec::with_capacity(max_t.max(1));
            for t in 1..=max_t.max(1) {
                let deg = r / (t * t);
                if zero && t > 1 {
                    sums.push(sums[0][..=deg].to_vec());
                    continue;
                }
                let scaled: Vec<f64> = w.iter().map(|c| c * t as f64).collect();
                let y = frame.to_ambient_real(&reduce(&scaled));
                sums.push(engine.shell_sums(&y, deg));
            }
            let shell = |t: usize, m: usize| -> Complex64 {
                let row = &sums[t - 1];
                if m < row.len() {
                    row[m]
                } else {
                    Complex64::new(0.0, 0.0)
                }
            };
            // primitive sums by Mobius inversion over d^2 | M
            let primitive = |m: usize, c: usize| -> Complex64 {
                let mut total = Complex64::new(0.0, 0.0);
                let mut d = 1;
                while d * d <= m {
                    if m % (d * d) == 0 {
                        let mu = mobius(d as u64);
                        if mu != 0 && (m / (d * d)) % 2 == 0 && m / (d * d) >= 4 {
                            total += shell(c * d, m / (d * d)) * mu as f64;
                        }
                    }
                    d += 1;
                }
                total
            };
            for &(n, c) in &needed {
                let a = table.a(n as i64, Content::Value(c as u64))?;
                acc.add(a * primitive(n / (c * c), c));
            }
        }
        FourierMethod::Enumerated => {
            let search = ShortVectorSearch::new(lattice)?;
            let gw: Vec<f64> = (0..24).map(|i| (0..24).map(|j| lattice.gram(i, j) as f64 * w[j]).sum()).collect();
            let parts = search.fold_parts(&vec![0.0; 24], r as f64 + 0.5, policy.budget, KahanSum::new, |acc, x| {
                if x.norm == 0 || x.norm as usize > r {
                    return;
                }
                let a = table.a(x.norm, content_of(x.coords)).expect("coefficient precomputed");
                let ip: f64 = x.coords.iter().zip(&gw).map(|(&c, g)| c as f64 * g).sum();
                acc.add(a * e_phase(ip));
            })?;
            for part in parts {
                acc.merge(&part);
            }
        }
    }

    let mut out = EvalResult::new(
        match method {
            FourierMethod::Shells => "fourier-shells",
            FourierMethod::Enumerated => "fourier-enumerated",
        },
        acc.value(),
        terms,
        Tail::heuristic(cut.tail),
    );
    out.flags = flags;
    out.policy = Some(TruncationPolicy { lambda_radius_sq: Some(r as f64), ..*policy });
    out.runtime_ms = start.elapsed().as_secs_f64() * 1e3;
    Ok(out)
}
