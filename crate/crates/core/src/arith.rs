//! Elementary integer arithmetic: gcd, modular inverses, factorization,
//! Jacobi symbols and the arithmetic functions used by the exponential sums.

use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::error::{usage, Result};

pub fn gcd(a: i64, b: i64) -> i64 {
    let (mut a, mut b) = (a.unsigned_abs(), b.unsigned_abs());
    while b != 0 {
        let t = a % b;
        a = b;
        b = t;
    }
    a as i64
}

/// Extended Euclid: returns (g, x, y) with a*x + b*y = g >= 0.
pub fn ext_gcd(a: i64, b: i64) -> (i64, i64, i64) {
    let (mut old_r, mut r) = (a as i128, b as i128);
    let (mut old_s, mut s) = (1i128, 0i128);
    let (mut old_t, mut t) = (0i128, 1i128);
    while r != 0 {
        let q = old_r.div_euclid(r);
        (old_r, r) = (r, old_r - q * r);
        (old_s, s) = (s, old_s - q * s);
        (old_t, t) = (t, old_t - q * t);
    }
    if old_r < 0 {
        (old_r, old_s, old_t) = (-old_r, -old_s, -old_t);
    }
    (old_r as i64, old_s as i64, old_t as i64)
}

/// Inverse of `a` modulo `n`, canonical representative in `[0, n)`.
pub fn mod_inv(a: i64, n: i64) -> Option<i64> {
    if n == 1 {
        return Some(0);
    }
    let (g, x, _) = ext_gcd(a.rem_euclid(n), n);
    (g == 1).then(|| x.rem_euclid(n))
}

pub fn mod_pow(mut base: u64, mut exp: u64, m: u64) -> u64 {
    if m == 1 {
        return 0;
    }
    let m128 = m as u128;
    let mut acc = 1u128;
    let mut b = (base % m) as u128;
    while exp > 0 {
        if exp & 1 == 1 {
            acc = acc * b % m128;
        }
        b = b * b % m128;
        exp >>= 1;
    }
    base = acc as u64;
    base
}

/// Prime-power factorization `n = prod p^r`, primes ascending.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct PrimePowerFactorization {
    pub factors: Vec<(u64, u32)>,
}

impl PrimePowerFactorization {
    pub fn of(n: u64) -> Self {
        assert!(n >= 1, "cannot factor 0");
        let mut factors = Vec::new();
        let mut m = n;
        let mut p = 2u64;
        while p * p <= m {
            if m % p == 0 {
                let mut r = 0;
                while m % p == 0 {
                    m /= p;
                    r += 1;
                }
                factors.push((p, r));
            }
            p += if p == 2 { 1 } else { 2 };
        }
        if m > 1 {
            factors.push((m, 1));
        }
        Self { factors }
    }

    pub fn value(&self) -> u64 {
        self.factors.iter().map(|&(p, r)| p.pow(r)).product()
    }

    pub fn prime_powers(&self) -> impl Iterator<Item = (u64, u32, u64)> + '_ {
        self.factors.iter().map(|&(p, r)| (p, r, p.pow(r)))
    }

    pub fn primes(&self) -> impl Iterator<Item = u64> + '_ {
        self.factors.iter().map(|&(p, _)| p)
    }
}

pub fn is_prime(n: u64) -> bool {
    n >= 2 && PrimePowerFactorization::of(n).factors == [(n, 1)]
}

/// Returns `(p, r)` when `q = p^r` with `r >= 1`.
pub fn as_prime_power(q: u64) -> Option<(u64, u32)> {
    if q < 2 {
        return None;
    }
    let f = PrimePowerFactorization::of(q);
    (f.factors.len() == 1).then(|| f.factors[0])
}

/// p-adic valuation of a nonzero integer.
pub fn valuation(mut n: u64, p: u64) -> u32 {
    debug_assert!(n != 0 && p >= 2);
    let mut v = 0;
    while n % p == 0 {
        n /= p;
        v += 1;
    }
    v
}

pub fn divisor_count(n: u64) -> u64 {
    PrimePowerFactorization::of(n)
        .factors
        .iter()
        .map(|&(_, r)| r as u64 + 1)
        .product()
}

pub fn mobius(n: u64) -> i64 {
    let f = PrimePowerFactorization::of(n);
    if f.factors.iter().any(|&(_, r)| r > 1) {
        0
    } else if f.factors.len() % 2 == 0 {
        1
    } else {
        -1
    }
}

/// Jordan totient `J_k(n) = n^k prod_{p | n} (1 - p^{-k})`, exact.
pub fn jordan_totient(k: u32, n: u64) -> u128 {
    assert!(n >= 1 && k >= 1);
    PrimePowerFactorization::of(n)
        .factors
        .iter()
        .map(|&(p, r)| {
            let p = p as u128;
            p.pow(k * r) - p.pow(k * (r - 1))
        })
        .product()
}

/// Jacobi symbol `(a | n)` for odd positive `n`.
pub fn jacobi_symbol(a: i64, n: i64) -> Result<i32> {
    if n <= 0 || n % 2 == 0 {
        return usage(format!("Jacobi symbol needs an odd positive modulus, got {n}"));
    }
    let mut a = a.rem_euclid(n);
    let mut n = n;
    let mut sign = 1;
    while a != 0 {
        while a % 2 == 0 {
            a /= 2;
            if matches!(n % 8, 3 | 5) {
                sign = -sign;
            }
        }
        std::mem::swap(&mut a, &mut n);
        if a % 4 == 3 && n % 4 == 3 {
            sign = -sign;
        }
        a %= n;
    }
    Ok(if n == 1 { sign } else { 0 })
}

/// `1` when `n = 1 mod 4`, `i` when `n = 3 mod 4`.
pub fn epsilon_factor(n: i64) -> Result<Complex64> {
    if n <= 0 || n % 2 == 0 {
        return usage(format!("epsilon factor needs an odd positive integer, got {n}"));
    }
    Ok(if n % 4 == 1 {
        Complex64::new(1.0, 0.0)
    } else {
        Complex64::new(0.0, 1.0)
    })
}

/// Neumaier-compensated complex accumulator.
#[derive(Debug, Clone, Copy, Default)]
pub struct KahanSum {
    re: f64,
    re_c: f64,
    im: f64,
    im_c: f64,
}

fn neumaier(sum: &mut f64, comp: &mut f64, x: f64) {
    let t = *sum + x;
    if sum.abs() >= x.abs() {
        *comp += (*sum - t) + x;
    } else {
        *comp += (x - t) + *sum;
    }
    *sum = t;
}

impl KahanSum {
    pub fn new() -> Self {
        Self::default()
    }

    pub fn add(&mut self, z: Complex64) {
        neumaier(&mut self.re, &mut self.re_c, z.re);
        neumaier(&mut self.im, &mut self.im_c, z.im);
    }

    pub fn add_real(&mut self, x: f64) {
        neumaier(&mut self.re, &mut self.re_c, x);
    }

    pub fn merge(&mut self, other: &KahanSum) {
        self.add(other.value());
    }

    pub fn value(&self) -> Complex64 {
        Complex64::new(self.re + self.re_c, self.im + self.im_c)
    }
}

impl FromIterator<Complex64> for KahanSum {
    fn from_iter<I: IntoIterator<Item = Complex64>>(iter: I) -> Self {
        let mut s = KahanSum::new();
        for z in iter {
            s.add(z);
        }
        s
    }
}

/// `e(k/n) = exp(2 pi i k/n)` from an exact rational argument reduced mod 1.
pub fn unit_root(k: i64, n: u64) -> Complex64 {
    let n = n as i64;
    let r = k.rem_euclid(n);
    // fold into [0, 1/8] octant-free form: use the symmetric residue for accuracy
    let r = if 2 * r > n { r - n } else { r };
    let x = 2.0 * std::f64::consts::PI * (r as f64) / (n as f64);
    Complex64::new(x.cos(), x.sin())
}

/// Sum of `counts[k] * e(k/n)` over residues, compensated.
pub fn sum_unit_roots(counts: &[u64], n: u64) -> Complex64 {
    let mut acc = KahanSum::new();
    for (k, &c) in counts.iter().enumerate() {
        if c != 0 {
            acc.add(unit_root(k as i64, n) * c as f64);
        }
    }
    acc.value()
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn jacobi_matches_brute_squares_for_primes() {
        for p in [3i64, 5, 7, 11, 13, 23] {
            for a in 0..p {
                let is_sq = (1..p).any(|x| (x * x) % p == a);
                let expected = if a == 0 {
                    0
                } else if is_sq {
                    1
                } else {
                    -1
                };
                assert_eq!(jacobi_symbol(a, p).unwrap(), expected, "({a}|{p})");
            }
        }
        assert_eq!(jacobi_symbol(2, 7).unwrap(), 1);
        assert_eq!(jacobi_symbol(1, 45).unwrap(), 1);
        assert!(jacobi_symbol(3, 8).is_err());
    }

    #[test]
    fn epsilon_cases() {
        assert_eq!(epsilon_factor(5).unwrap(), Complex64::new(1.0, 0.0));
        assert_eq!(epsilon_factor(7).unwrap(), Complex64::new(0.0, 1.0));
        assert!(epsilon_factor(4).is_err());
    }

    #[test]
    fn jordan_small_values() {
        assert_eq!(jordan_totient(4, 1), 1);
        assert_eq!(jordan_totient(4, 2), 15);
        assert_eq!(jordan_totient(12, 2), 4095);
        assert_eq!(jordan_totient(1, 12), 4);
    }

    #[test]
    fn jordan_divisor_sum_identity() {
        for k in [1u32, 2, 4] {
            for n in 1..=2000u64 {
                let s: u128 = (1..=n).filter(|d| n % d == 0).map(|d| jordan_totient(k, d)).sum();
                assert_eq!(s, (n as u128).pow(k), "k={k} n={n}");
            }
        }
    }

    #[test]
    fn inverses_and_factorization() {
        assert_eq!(mod_inv(3, 7), Some(5));
        assert_eq!(mod_inv(2, 4), None);
        assert_eq!(mod_inv(5, 1), Some(0));
        let f = PrimePowerFactorization::of(360);
        assert_eq!(f.factors, vec![(2, 3), (3, 2), (5, 1)]);
        assert_eq!(f.value(), 360);
        assert_eq!(as_prime_power(9), Some((3, 2)));
        assert_eq!(as_prime_power(12), None);
        assert_eq!(mobius(30), -1);
        assert_eq!(mobius(12), 0);
        assert_eq!(divisor_count(12), 6);
    }

    #[test]
    fn unit_roots_are_exact_at_simple_points() {
        assert!((unit_root(0, 5) - Complex64::new(1.0, 0.0)).norm() < 1e-15);
        assert!((unit_root(1, 2) - Complex64::new(-1.0, 0.0)).norm() < 1e-15);
        let third = unit_root(1, 3);
        assert!((third - Complex64::new(-0.5, 3f64.sqrt() / 2.0)).norm() < 1e-15);
    }
}
