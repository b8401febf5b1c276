//! Direct summation of `E(z, s)` over positive roots, height by height.

use std::time::Instant;

use num_complex::Complex64;
use rayon::prelude::*;

use super::SliceParams;
use crate::analytic::{e_phase, gamma_real};
use crate::arith::KahanSum;
use crate::error::{usage, Error, Result};
use crate::lattice::{Content, GramLattice, RealVector, ShortVectorSearch};
use crate::report::{EvalResult, HeightSubtotal, Tail, TruncationPolicy};
use crate::sums::j_closed_invariants;

/// Squared distance from `v` to the nearest lattice point.
pub fn nearest_distance_sq(lattice: &GramLattice, v: &[f64]) -> Result<f64> {
    let search = ShortVectorSearch::new(lattice)?;
    let mut radius: f64 = 1.0;
    loop {
        let mut best = f64::INFINITY;
        search.visit(v, radius, u64::MAX, |x| best = best.min(x.dist_sq))?;
        if best <= radius {
            return Ok(best);
        }
        radius *= 2.0;
    }
}

/// `|M_n(1)| = j_{0,n}`, the number of classes `l mod n` with `l^2/2 = 1 mod n`.
fn admissible_classes(rank: usize, n: u64) -> Result<f64> {
    Ok(j_closed_invariants(rank as u32, 0, Content::All, n)?.value.re)
}

/// Density model of one height: admissible `l` have density `j_{0,n}/n^m`,
/// so the terms with `(v - l/n)^2 >= r2` contribute at most about
/// `j_{0,n} (nh/2)^-sigma S (c_n^2 + r2)^{m/2 - sigma} / (2 (sigma - m/2))`.
struct HeightModel {
    rank: usize,
    sigma: f64,
    sphere: f64,
    p: SliceParams,
}

impl HeightModel {
    fn prefactor(&self, n: u64, classes: f64) -> f64 {
        classes * (n as f64 * self.p.h() / 2.0).powf(-self.sigma) * self.sphere
    }

    fn tail_beyond(&self, n: u64, classes: f64, r2: f64) -> f64 {
        let c2 = self.p.c_n(n).powi(2);
        let half = self.rank as f64 / 2.0;
        self.prefactor(n, classes) * (c2 + r2).powf(half - self.sigma) / (2.0 * (self.sigma - half))
    }

    /// Smallest `r2` with `tail_beyond(n, r2) <= target`.
    fn radius_for(&self, n: u64, classes: f64, target: f64) -> f64 {
        let c2 = self.p.c_n(n).powi(2);
        let half = self.rank as f64 / 2.0;
        let scale = self.prefactor(n, classes) / (2.0 * (self.sigma - half));
        if scale <= 0.0 {
            return 0.0;
        }
        let u = (target / scale).powf(1.0 / (half - self.sigma));
        (u - c2).max(0.0)
    }

    /// Whole-height contribution under the density model.
    fn height_total(&self, n: u64, classes: f64) -> Result<f64> {
        let half = self.rank as f64 / 2.0;
        let c = self.p.c_n(n);
        let radial = gamma_real(half)? * gamma_real(self.sigma - half)? / (2.0 * gamma_real(self.sigma)?);
        Ok(self.prefactor(n, classes) * radial * c.powf(2.0 * half - 2.0 * self.sigma))
    }
}

/// `(1 + e(-s/2)) sum_{n <= N} sum_l (-<r_{n,l}, phi(v)>)^{-s}` over positive
/// roots `(l; n, *)` with `l/n` in a ball around `v` whose radius is chosen
/// per height from `policy.tol`.
///
/// The tail estimate combines the omitted ball exteriors and the heights
/// above `policy.n_max` under a lattice-point density model; it is
/// heuristic.
pub fn direct_poincare(
    lattice: &GramLattice,
    v: &RealVector,
    p: &SliceParams,
    s: Complex64,
    policy: &TruncationPolicy,
) -> Result<EvalResult> {
    let start = Instant::now();
    if v.lattice != lattice.id() {
        return usage("point does not belong to the lattice");
    }
    if !(lattice.is_even() && lattice.is_unimodular() && lattice.is_positive_definite()) {
        return usage("the direct evaluator needs an even unimodular positive-definite lattice");
    }
    let m = lattice.rank();
    let half = m as f64 / 2.0;
    let sigma = s.re;
    let mut flags = Vec::new();
    if sigma <= 2.0 * half + 1.0 {
        flags.push("formal".to_string());
    }
    let sphere = 2.0 * std::f64::consts::PI.powf(half) / gamma_real(half)?;
    let model = HeightModel { rank: m, sigma, sphere, p: *p };
    let prefactor = Complex64::new(1.0, 0.0) + e_phase(-s.re / 2.0) * (std::f64::consts::PI * s.im).exp();

    let d0 = nearest_distance_sq(lattice, &v.coords)?;
    let c1 = p.c_n(1);
    let reference = (p.h() / 2.0 * (c1 * c1 + d0)).powf(-sigma);

    let n_max = policy.n_max;
    let per_height = policy.tol * reference / n_max.max(1) as f64;
    let plan: Vec<(u64, f64, f64)> = (1..=n_max)
        .map(|n| {
            let classes = admissible_classes(m, n)?;
            let r2 = match policy.lambda_radius_sq {
                Some(r) => r,
                None if sigma > half => model.radius_for(n, classes, per_height),
                None => return usage("automatic radii need Re(s) > rank/2"),
            };
            Ok((n, classes, r2))
        })
        .collect::<Result<_>>()?;

    let search = ShortVectorSearch::new(lattice)?;
    let ln_term = |x: f64| -> Complex64 {
        if s.im == 0.0 {
            Complex64::new(x.powf(-sigma), 0.0)
        } else {
            (-s * x.ln()).exp()
        }
    };
    let budget = policy.budget;
    let heights: Vec<(HeightSubtotal, KahanSum)> = plan
        .par_iter()
        .map(|&(n, _, r2)| {
            let nf = n as f64;
            let center: Vec<f64> = v.coords.iter().map(|c| c * nf).collect();
            let modulus = 2 * n as i64;
            let c2 = p.c_n(n).powi(2);
            let scale = nf * p.h() / 2.0;
            let parts = search.fold_parts(
                &center,
                r2 * nf * nf,
                budget,
                || (KahanSum::new(), 0u64),
                |acc, x| {
                    if (x.norm - 2).rem_euclid(modulus) == 0 {
                        let pairing = scale * (c2 + x.dist_sq / (nf * nf));
                        acc.0.add(ln_term(pairing));
                        acc.1 += 1;
                    }
                },
            )?;
            let mut sum = KahanSum::new();
            let mut count = 0;
            for (part, c) in parts {
                sum.merge(&part);
                count += c;
            }
            Ok((HeightSubtotal { n, count, radius_sq: r2, subtotal: sum.value() * prefactor }, sum))
        })
        .collect::<Result<_>>()
        .map_err(|e| match e {
            Error::Resource { what, processed, required } => Error::Resource {
                what: format!("direct summation: {what}"),
                processed,
                required,
            },
            other => other,
        })?;

    let mut total = KahanSum::new();
    let mut terms = 0;
    let mut subtotals = Vec::with_capacity(heights.len());
    for (sub, sum) in heights {
        total.merge(&sum);
        terms += sub.count;
        subtotals.push(sub);
    }

    let tail = if sigma > 2.0 * half + 1.0 {
        let mut est = 0.0;
        for &(n, classes, r2) in &plan {
            est += model.tail_beyond(n, classes, r2);
        }
        let mut n = n_max + 1;
        let mut beyond = 0.0;
        loop {
            let t = model.height_total(n, admissible_classes(m, n)?)?;
            beyond += t;
            if n > 8 * (n_max + 1) || t < 1e-9 * beyond {
                // remaining heights behave like n^{m-1-sigma}
                let nf = n as f64;
                beyond += t * nf / (sigma - 2.0 * half);
                break;
            }
            n += 1;
        }
        Tail::heuristic(prefactor.norm() * (est + beyond))
    } else {
        flags.push("no-tail-bound".to_string());
        Tail::none()
    };

    let mut out = EvalResult::new("direct", total.value() * prefactor, terms, tail);
    out.flags = flags;
    out.heights = subtotals;
    out.policy = Some(*policy);
    out.runtime_ms = start.elapsed().as_secs_f64() * 1e3;
    Ok(out)
}
