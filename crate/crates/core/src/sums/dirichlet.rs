use std::time::Instant;

use num_complex::Complex64;

use super::j_closed;
use crate::arith::{gcd, KahanSum};
use crate::error::Result;
use crate::lattice::{GramLattice, LatticeVector};
use crate::report::{EvalResult, Tail};

/// `sum over n <= cutoff, n prime to every element of excluded, of j_{lambda,n} n^{-s}`.
///
/// The tail uses `|j_{lambda,n}| <= |M_n(1)| <= n^{m-1}`, giving
/// `sum_{n > N} n^{m-1-Re s} <= N^{m - Re s}/(Re s - m)` for `Re s > m`.
pub fn dirichlet_j_partial(
    lattice: &GramLattice,
    lambda: &LatticeVector,
    s: Complex64,
    cutoff: u64,
    excluded: &[u64],
) -> Result<EvalResult> {
    let start = Instant::now();
    let mut acc = KahanSum::new();
    let mut terms = 0;
    for n in 1..=cutoff {
        if excluded.iter().any(|&p| gcd(n as i64, p as i64) != 1) {
            continue;
        }
        let j = j_closed(lattice, lambda, n)?.value;
        acc.add(j * (-s * (n as f64).ln()).exp());
        terms += 1;
    }
    let m = lattice.rank() as f64;
    let sigma = s.re;
    let mut flags = Vec::new();
    let tail = if sigma > m {
        let nn = cutoff.max(1) as f64;
        let first = if cutoff == 0 { 1.0 } else { 0.0 };
        Tail::rigorous(first + nn.powf(m - sigma) / (sigma - m))
    } else {
        flags.push("no-tail-bound".to_string());
        Tail::none()
    };
    let mut out = EvalResult::new("closed", acc.value(), terms, tail);
    out.flags = flags;
    out.runtime_ms = start.elapsed().as_secs_f64() * 1e3;
    Ok(out)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::analytic::zeta_real;
    use crate::lattice::{ii11, leech};

    #[test]
    fn empty_sum() {
        let k = leech();
        let r = dirichlet_j_partial(k, &k.zero(), Complex64::new(30.0, 0.0), 0, &[]).unwrap();
        assert_eq!(r.value, Complex64::new(0.0, 0.0));
        assert!(r.tail.estimate >= 1.0);
    }

    #[test]
    fn leech_zeta_ratio() {
        let k = leech();
        let r = dirichlet_j_partial(k, &k.zero(), Complex64::new(30.0, 0.0), 1000, &[]).unwrap();
        let target = zeta_real(7.0).unwrap() / zeta_real(19.0).unwrap();
        assert!((r.value.re - target).abs() / target < 1e-8);
        assert!(r.tail.estimate < 1e-15);
    }

    #[test]
    fn totient_series_trend() {
        let k = ii11();
        let target = zeta_real(5.0).unwrap() / zeta_real(6.0).unwrap();
        let mut prev = f64::INFINITY;
        for cutoff in [10u64, 100, 1000] {
            let r = dirichlet_j_partial(k, &k.zero(), Complex64::new(6.0, 0.0), cutoff, &[]).unwrap();
            let err = (r.value.re - target).abs();
            assert!(err < prev);
            assert!(err <= r.tail.estimate);
            prev = err;
        }
    }

    #[test]
    fn excluded_primes_remove_euler_factors() {
        let k = ii11();
        let r = dirichlet_j_partial(k, &k.zero(), Complex64::new(6.0, 0.0), 4000, &[2]).unwrap();
        // removing p = 2 divides by the local factor (1 - 2^{1-s})/(1 - 2^{-s})
        let full = zeta_real(5.0).unwrap() / zeta_real(6.0).unwrap();
        let local = (1.0 - 2f64.powi(-5)) / (1.0 - 2f64.powi(-6));
        assert!((r.value.re - full * local).abs() < 1e-9);
    }
}
