//! Special functions: e(x), complex Gamma, real zeta, modified Bessel K of
//! complex order and Bessel J of integer order.

use std::f64::consts::PI;

use num_complex::Complex64;

use super::quad::tanh_sinh;
use crate::error::{Error, Result};

/// `e(x) = exp(2 pi i x)` with the argument reduced modulo 1 first.
pub fn e_phase(x: f64) -> Complex64 {
    let r = x - x.round();
    let t = 2.0 * PI * r;
    Complex64::new(t.cos(), t.sin())
}

const LANCZOS_G: f64 = 7.0;
const LANCZOS: [f64; 9] = [
    0.999_999_999_999_809_9,
    676.520_368_121_885_1,
    -1_259.139_216_722_402_8,
    771.323_428_777_653_1,
    -176.615_029_162_140_6,
    12.507_343_278_686_905,
    -0.138_571_095_265_720_12,
    9.984_369_578_019_572e-6,
    1.505_632_735_149_311_6e-7,
];

fn is_pole(z: Complex64) -> bool {
    z.im == 0.0 && z.re <= 0.0 && z.re.fract() == 0.0
}

/// `log Gamma(z)` on the principal sheet of the Lanczos expression.
pub fn ln_gamma_complex(z: Complex64) -> Result<Complex64> {
    if is_pole(z) {
        return Err(Error::Pole(format!("{z}")));
    }
    if z.re < 0.5 {
        // Gamma(z) Gamma(1 - z) = pi / sin(pi z)
        let s = (z * PI).sin();
        return Ok(Complex64::new(PI.ln(), 0.0) - s.ln() - ln_gamma_complex(1.0 - z)?);
    }
    let z = z - 1.0;
    let mut x = Complex64::new(LANCZOS[0], 0.0);
    for (i, &c) in LANCZOS.iter().enumerate().skip(1) {
        x += c / (z + i as f64);
    }
    let t = z + LANCZOS_G + 0.5;
    Ok(0.5 * (2.0 * PI).ln() + (z + 0.5) * t.ln() - t + x.ln())
}

pub fn gamma_complex(z: Complex64) -> Result<Complex64> {
    if is_pole(z) {
        return Err(Error::Pole(format!("{z}")));
    }
    if z.re < 0.5 {
        return Ok(PI / ((z * PI).sin() * gamma_complex(1.0 - z)?));
    }
    Ok(ln_gamma_complex(z)?.exp())
}

pub fn gamma_real(x: f64) -> Result<f64> {
    Ok(gamma_complex(Complex64::new(x, 0.0))?.re)
}

const BERNOULLI_2K: [f64; 12] = [
    1.0 / 6.0,
    -1.0 / 30.0,
    1.0 / 42.0,
    -1.0 / 30.0,
    5.0 / 66.0,
    -691.0 / 2730.0,
    7.0 / 6.0,
    -3617.0 / 510.0,
    43867.0 / 798.0,
    -174611.0 / 330.0,
    854513.0 / 138.0,
    -236364091.0 / 2730.0,
];

/// Riemann zeta for real `s > 1` by Euler–Maclaurin summation.
pub fn zeta_real(s: f64) -> Result<f64> {
    if !(s > 1.0) {
        return Err(Error::Domain(format!("zeta needs s > 1, got {s}")));
    }
    const N: usize = 20;
    let n = N as f64;
    let mut head = 0.0;
    for k in (1..N).rev() {
        head += (k as f64).powf(-s);
    }
    let mut tail = n.powf(1.0 - s) / (s - 1.0) + 0.5 * n.powf(-s);
    // B_{2k}/(2k)! * s (s+1) ... (s+2k-2) N^{-s-2k+1}
    let mut rising = s;
    let mut fact = 2.0;
    let mut npow = n.powf(-s - 1.0);
    for (k, b) in BERNOULLI_2K.iter().enumerate() {
        let term = b / fact * rising * npow;
        tail += term;
        if term.abs() < 1e-18 * head {
            break;
        }
        let k2 = 2.0 * (k as f64 + 1.0);
        rising *= (s + k2 - 1.0) * (s + k2);
        fact *= (k2 + 1.0) * (k2 + 2.0);
        npow /= n * n;
    }
    Ok(head + tail)
}

const BESSEL_TAIL_LOG: f64 = 48.0;

/// `e^x K_nu(x)` from `K_nu(x) = 1/2 int_R exp(-x cosh t + nu t) dt`, with the
/// contour moved to `Im t = theta` to tame oscillation for complex order.
pub fn bessel_k_scaled(nu: Complex64, x: f64, tol: f64) -> Result<Complex64> {
    if !(x > 0.0) || !x.is_finite() {
        return Err(Error::Domain(format!("Bessel K needs x > 0, got {x}")));
    }
    let (a, b) = (nu.re, nu.im);
    let theta = if b == 0.0 {
        0.0
    } else {
        b.signum() * (b.abs() / x).min(1.0).asin().min(PI / 2.0 - 0.25)
    };
    let ct = theta.cos();
    // real part of the exponent along the shifted line, up to a constant
    let g = |t: f64| -x * ct * t.cosh() + a * t;
    let peak = (a / (x * ct)).asinh();
    let top = g(peak);
    let find = |dir: f64| -> f64 {
        let mut step = 1.0;
        let mut t = peak;
        while g(t + dir * step) > top - BESSEL_TAIL_LOG {
            t += dir * step;
            step *= 2.0;
        }
        let (mut inside, mut outside) = (t, t + dir * step);
        for _ in 0..60 {
            let mid = 0.5 * (inside + outside);
            if g(mid) > top - BESSEL_TAIL_LOG {
                inside = mid;
            } else {
                outside = mid;
            }
        }
        outside
    };
    let (lo, hi) = (find(-1.0), find(1.0));
    let shift = Complex64::new(0.0, theta);
    // factor out exp(top) for range safety, restore at the end
    let f = |t: f64| {
        let w = Complex64::new(t, 0.0) + shift;
        (-x * w.cosh() + nu * w - top).exp()
    };
    let q = tanh_sinh(f, lo, hi, tol)?;
    let restore = Complex64::new(top + x, 0.0).exp();
    Ok(0.5 * q.value * restore)
}

pub fn bessel_k(nu: Complex64, x: f64) -> Result<Complex64> {
    Ok(bessel_k_scaled(nu, x, 1e-13)? * (-x).exp())
}

/// `J_n(x)` for integer `n >= 0`: power series for small `x`, Miller's
/// backward recurrence in the middle range, Hankel's expansion for large `x`.
pub fn bessel_j_int(n: u32, x: f64) -> f64 {
    if x < 0.0 {
        let v = bessel_j_int(n, -x);
        return if n % 2 == 1 { -v } else { v };
    }
    if x == 0.0 {
        return if n == 0 { 1.0 } else { 0.0 };
    }
    if x <= 8.0 {
        j_series(n, x)
    } else if x < 150.0 + 2.0 * n as f64 {
        j_miller(n, x)
    } else {
        j_hankel(n, x)
    }
}

fn j_series(n: u32, x: f64) -> f64 {
    let half = 0.5 * x;
    let mut term = half.powi(n as i32);
    for k in 1..=n {
        term /= k as f64;
    }
    let mut sum = term;
    let q = -half * half;
    for k in 1..200 {
        term *= q / (k as f64 * (k + n) as f64);
        sum += term;
        if term.abs() < 1e-17 * sum.abs() {
            break;
        }
    }
    sum
}

fn j_miller(n: u32, x: f64) -> f64 {
    let start = (n as usize).max(x as usize) + 60 + (x.sqrt() * 6.0) as usize;
    let start = start + start % 2;
    let (mut jp, mut j) = (0.0f64, 1e-280f64);
    let mut norm = 0.0;
    let mut target = 0.0;
    for k in (1..=start).rev() {
        let jm = 2.0 * k as f64 / x * j - jp;
        jp = j;
        j = jm;
        if k - 1 == n as usize {
            target = j;
        }
        if (k - 1) % 2 == 0 && k - 1 > 0 {
            norm += 2.0 * j;
        }
        if j.abs() > 1e250 {
            j *= 1e-250;
            jp *= 1e-250;
            norm *= 1e-250;
            target *= 1e-250;
        }
    }
    norm += j;
    if n == 0 {
        target = j;
    }
    target / norm
}

fn j_hankel(n: u32, x: f64) -> f64 {
    let mu = 4.0 * (n as f64).powi(2);
    let mut p = 0.0;
    let mut q = 0.0;
    let mut term = 1.0;
    let mut best = f64::INFINITY;
    for k in 0..60 {
        if k > 0 {
            let odd = (2 * k - 1) as f64;
            term *= (mu - odd * odd) / (k as f64 * 8.0 * x);
        }
        if term.abs() > best && k > 2 {
            break;
        }
        best = best.min(term.abs());
        match k % 4 {
            0 => p += term,
            1 => q += term,
            2 => p -= term,
            _ => q -= term,
        }
        if term.abs() < 1e-17 {
            break;
        }
    }
    let chi = x - (0.5 * n as f64 + 0.25) * PI;
    (2.0 / (PI * x)).sqrt() * (p * chi.cos() - q * chi.sin())
}

#[cfg(test)]
mod tests {
    use super::*;

    fn c(x: f64) -> Complex64 {
        Complex64::new(x, 0.0)
    }

    #[test]
    fn phases() {
        assert!((e_phase(0.0) - c(1.0)).norm() < 1e-15);
        assert!((e_phase(0.5) - c(-1.0)).norm() < 1e-15);
        assert!((e_phase(1.0 / 3.0) - Complex64::new(-0.5, 3f64.sqrt() / 2.0)).norm() < 1e-15);
        assert!((e_phase(1e6 + 0.25) - Complex64::new(0.0, 1.0)).norm() < 1e-9);
    }

    #[test]
    fn gamma_values() {
        assert!((gamma_complex(c(1.0)).unwrap() - c(1.0)).norm() < 1e-13);
        assert!((gamma_complex(c(5.0)).unwrap() - c(24.0)).norm() < 1e-11);
        let half = gamma_complex(c(0.5)).unwrap();
        assert!(((half * half).re - PI).abs() < 1e-12);
        assert!(matches!(gamma_complex(c(-3.0)), Err(Error::Pole(_))));
        assert!(matches!(gamma_complex(c(0.0)), Err(Error::Pole(_))));
        let g30 = gamma_real(30.0).unwrap();
        let fact29: f64 = (1..30).map(|k| k as f64).product();
        assert!((g30 / fact29 - 1.0).abs() < 1e-13);
        // |Gamma(1/2 + iy)|^2 = pi / cosh(pi y)
        for y in [0.5, 3.0, 10.0] {
            let g = gamma_complex(Complex64::new(0.5, y)).unwrap();
            assert!((g.norm_sqr() / (PI / (PI * y).cosh()) - 1.0).abs() < 1e-11);
        }
    }

    #[test]
    fn zeta_values() {
        assert!((zeta_real(2.0).unwrap() - PI * PI / 6.0).abs() < 1e-14);
        assert!((zeta_real(4.0).unwrap() - PI.powi(4) / 90.0).abs() < 1e-14);
        assert!(zeta_real(30.0).unwrap() - 1.0 < 1e-8);
        assert!(zeta_real(30.0).unwrap() > 1.0);
        assert!(zeta_real(1.0).is_err());
        assert!((zeta_real(1.5).unwrap() - 2.612_375_348_685_488).abs() < 1e-12);
    }

    #[test]
    fn bessel_k_half_order() {
        for x in [0.5, 1.0, 10.0] {
            let k = bessel_k(c(0.5), x).unwrap();
            let exact = (PI / (2.0 * x)).sqrt() * (-x).exp();
            assert!((k.re / exact - 1.0).abs() < 1e-10, "x={x}");
            assert!(k.im.abs() < 1e-14);
        }
    }

    #[test]
    fn bessel_k_symmetry_and_recurrence() {
        for nu in [Complex64::new(0.3, 0.0), Complex64::new(-18.0, 0.0), Complex64::new(2.5, 7.0), Complex64::new(-1.0, -20.0)] {
            for x in [0.7, 3.0, 25.0] {
                let k = bessel_k(nu, x).unwrap();
                let km = bessel_k(-nu, x).unwrap();
                assert!((k - km).norm() <= 1e-9 * k.norm(), "nu={nu} x={x}");
                let kp1 = bessel_k(nu + 1.0, x).unwrap();
                let km1 = bessel_k(nu - 1.0, x).unwrap();
                let resid = (kp1 - km1 - 2.0 * nu / x * k).norm();
                assert!(resid <= 1e-9 * kp1.norm().max(km1.norm()), "nu={nu} x={x}");
            }
        }
    }

    #[test]
    fn bessel_k_frozen_values() {
        // reference values from an independent arbitrary-precision library
        let k0 = bessel_k(c(0.0), 1.0).unwrap().re;
        assert!((k0 / 0.421_024_438_240_708_3 - 1.0).abs() < 1e-12);
        let k18 = bessel_k(c(18.0), 20.0).unwrap().re;
        assert!((k18 / 1.047_308_467_378_323_9e-6 - 1.0).abs() < 1e-9, "{k18}");
        let scaled = bessel_k_scaled(c(2.0), 1000.0, 1e-13).unwrap().re;
        assert!((scaled / 0.039_707_617_862_380_14 - 1.0).abs() < 1e-10, "{scaled}");
    }

    #[test]
    fn bessel_j_regimes_agree() {
        for n in [0u32, 1, 11] {
            for x in [8.0, 7.9] {
                assert!((j_series(n, x) - j_miller(n, x)).abs() < 1e-13);
            }
            for x in [160.0, 200.0] {
                assert!((j_miller(n, x) - j_hankel(n, x)).abs() < 1e-13, "n={n} x={x}");
            }
        }
        assert!((bessel_j_int(0, 2.404_825_557_695_773).abs()) < 1e-14);
        assert!((bessel_j_int(11, 10.0) - 0.123_116_528_001_597_67).abs() < 1e-14);
    }
}
