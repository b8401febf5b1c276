//! One-dimensional oracles for the radial integrals behind the coefficient
//! formula.

use std::f64::consts::PI;

use num_complex::Complex64;
use serde::Serialize;

use super::quad::tanh_sinh_composite;
use super::special::{bessel_j_int, bessel_k, gamma_complex, ln_gamma_complex};
use crate::error::{usage, Error, Result};

#[derive(Debug, Clone, Copy, Serialize)]
#[serde(rename_all = "camelCase")]
pub struct OraclePair {
    #[serde(with = "crate::report::complex_obj")]
    pub quadrature: Complex64,
    #[serde(with = "crate::report::complex_obj")]
    pub closed: Complex64,
    pub quadrature_error: f64,
}

impl OraclePair {
    pub fn rel_diff(&self) -> f64 {
        (self.quadrature - self.closed).norm() / self.closed.norm()
    }
}

/// Start of the rotated part of the contour.
const ROTATION_START: f64 = 25.0;

/// `H^(1)_n(z)` (or `H^(2)_n(z)` when `second`) from Hankel's asymptotic
/// expansion; accurate to about `e^{-2|z|}` for `|z| >= 25` and `n <= 12`.
pub fn hankel_asymptotic(n: u32, z: Complex64, second: bool) -> Complex64 {
    let i = Complex64::new(0.0, if second { -1.0 } else { 1.0 });
    let mu = 4.0 * (n as f64).powi(2);
    let phase = z - (n as f64) * PI / 2.0 - PI / 4.0;
    let mut term = Complex64::new(1.0, 0.0);
    let mut sum = term;
    for k in 1..200 {
        let odd = (2 * k - 1) as f64;
        let next = term * i * (mu - odd * odd) / (k as f64 * 8.0) / z;
        if next.norm() >= term.norm() && k > n as usize {
            break;
        }
        term = next;
        sum += term;
        if term.norm() < 1e-18 * sum.norm() {
            break;
        }
    }
    (2.0 / (PI * z)).sqrt() * (i * phase).exp() * sum
}

/// `int_0^inf x^{12} (B^2 + x^2)^{-s} J_11(x) dx` against
/// `B^{12-s} K_{12-s}(B) / (2^{s-1} Gamma(s))` with `B = 2 pi |lambda| c`,
/// where `|lambda|^2 = lambda_norm_sq`. Both sides are multiplied by
/// `(2 pi |lambda|)^{2s-12} |lambda|^{-12}` so that they equal the radial
/// integral `int_0^inf (c^2 + r^2)^{-s} r^23 2 pi J_11(2 pi |lambda| r) (r |lambda|)^{-11} dr`.
///
/// The integral is about `e^{-B}` times the size of its integrand, so on
/// `[x0, inf)` the Bessel function is split as `(H1 + H2)/2` and each half is
/// moved to the vertical line `Re z = x0` where it decays like `e^{-|Im z|}`.
pub fn radial_integral_oracle(lambda_norm_sq: f64, c: f64, s: Complex64, tol: f64) -> Result<OraclePair> {
    if !(lambda_norm_sq > 0.0 && c > 0.0) {
        return usage("need |lambda|^2 > 0 and c > 0");
    }
    if s.re <= 23.0 / 4.0 {
        return usage(format!("the radial integral needs Re(s) > 23/4, got {}", s.re));
    }
    let len = lambda_norm_sq.sqrt();
    let b = 2.0 * PI * len * c;
    let nu = Complex64::new(12.0, 0.0) - s;
    let closed_inner =
        (nu * b.ln()).exp() * bessel_k(nu, b)? / ((s - 1.0) * 2f64.ln()).exp() / gamma_complex(s)?;
    let weight = |z: Complex64| (-s * (b * b + z * z).ln()).exp() * z.powi(12);

    let x0 = ROTATION_START;
    let pieces = (x0 / PI).ceil() as usize;
    let real_pts: Vec<f64> = (0..=pieces).map(|k| x0 * k as f64 / pieces as f64).collect();
    let real = tanh_sinh_composite(
        |x| weight(Complex64::new(x, 0.0)) * bessel_j_int(11, x),
        &real_pts,
        tol,
    )?;
    let line_pts = [0.0, 1.0, 2.0, 4.0, 8.0, 16.0, 32.0, 64.0, 128.0];
    let line = |second: bool| {
        let dir = Complex64::new(0.0, if second { -1.0 } else { 1.0 });
        tanh_sinh_composite(
            |t| {
                let z = Complex64::new(x0, 0.0) + dir * t;
                weight(z) * hankel_asymptotic(11, z, second) * dir
            },
            &line_pts,
            tol,
        )
    };
    let upper = line(false)?;
    let lower = line(true)?;
    let inner = real.value + 0.5 * (upper.value + lower.value);
    let err = real.error_estimate + 0.5 * (upper.error_estimate + lower.error_estimate);
    let outer = ((2.0 * s - 12.0) * (2.0 * PI * len).ln()).exp() * len.powi(-12);
    Ok(OraclePair {
        quadrature: inner * outer,
        closed: closed_inner * outer,
        quadrature_error: err * outer.norm(),
    })
}

/// `int_0^inf x^23 (1 + x^2)^{-s} dx` against `Gamma(12) Gamma(s-12) / (2 Gamma(s))`.
pub fn radial_integral_oracle_zero(s: Complex64, tol: f64) -> Result<OraclePair> {
    if s.re <= 12.0 {
        return Err(Error::Domain(format!(
            "int x^23 (1+x^2)^-s diverges for Re(s) = {} <= 12",
            s.re
        )));
    }
    let closed = (ln_gamma_complex(Complex64::new(12.0, 0.0))? + ln_gamma_complex(s - 12.0)?
        - ln_gamma_complex(s)?)
    .exp()
        / 2.0;
    let sigma = s.re;
    let mut pts = vec![0.0, 0.25, 0.5, 0.75, 1.0, 1.5];
    let mut x: f64 = 2.0;
    while x.powf(24.0 - 2.0 * sigma) / (2.0 * sigma - 24.0) > 1e-18 * closed.norm() {
        pts.push(x);
        x *= 1.5;
    }
    pts.push(x);
    let f = |x: f64| (-s * (1.0 + x * x).ln()).exp() * x.powi(23);
    let q = tanh_sinh_composite(f, &pts, tol)?;
    Ok(OraclePair { quadrature: q.value, closed, quadrature_error: q.error_estimate })
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn bessel_closed_form_matches_quadrature() {
        for &(s, n2, c) in &[(30.0, 4.0, 2f64.sqrt()), (30.0, 6.0, 2.0), (26.0, 4.0, 2f64.sqrt())] {
            let r = radial_integral_oracle(n2, c, Complex64::new(s, 0.0), 1e-12).unwrap();
            assert!(r.rel_diff() < 1e-6, "s={s} n2={n2}: {}", r.rel_diff());
        }
    }

    #[test]
    fn complex_exponent() {
        let r = radial_integral_oracle(4.0, 1.5, Complex64::new(27.0, 3.0), 1e-12).unwrap();
        assert!(r.rel_diff() < 1e-6, "{}", r.rel_diff());
    }

    #[test]
    fn hankel_expansion_real_part_is_j() {
        for x in [25.0, 30.0, 47.5, 100.0] {
            let h = hankel_asymptotic(11, Complex64::new(x, 0.0), false);
            assert!((h.re - bessel_j_int(11, x)).abs() < 1e-13, "x={x}");
            let h2 = hankel_asymptotic(11, Complex64::new(x, 0.0), true);
            assert!((h2 - h.conj()).norm() < 1e-15);
        }
    }

    #[test]
    fn zero_variant() {
        for s in [26.0, 30.0] {
            let r = radial_integral_oracle_zero(Complex64::new(s, 0.0), 1e-13).unwrap();
            assert!(r.rel_diff() < 1e-8, "s={s}: {}", r.rel_diff());
        }
        assert!(matches!(radial_integral_oracle_zero(Complex64::new(12.0, 0.0), 1e-10), Err(Error::Domain(_))));
    }
}
