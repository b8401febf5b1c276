use std::collections::HashMap;
use std::sync::OnceLock;

use parking_lot::RwLock;

use super::SumValue;
use crate::arith::{divisor_count, gcd, mod_inv, unit_root, KahanSum};

type Memo = RwLock<HashMap<(u64, u64, u64), SumValue>>;

fn memo() -> &'static Memo {
    static MEMO: OnceLock<Memo> = OnceLock::new();
    MEMO.get_or_init(|| RwLock::new(HashMap::new()))
}

/// `S(a, b, n) = sum over units r mod n of e((a r + b r^-1)/n)`.
pub fn kloosterman(a: i64, b: i64, n: u64) -> SumValue {
    assert!(n >= 1, "modulus must be positive");
    let ni = n as i64;
    let key = (a.rem_euclid(ni) as u64, b.rem_euclid(ni) as u64, n);
    if let Some(v) = memo().read().get(&key) {
        return *v;
    }
    let (a, b) = (key.0 as i128, key.1 as i128);
    let mut acc = KahanSum::new();
    let mut terms = 0;
    for r in 0..ni {
        if gcd(r, ni) != 1 {
            continue;
        }
        let rinv = mod_inv(r, ni).unwrap_or(0);
        let k = (a * r as i128 + b * rinv as i128).rem_euclid(n as i128) as i64;
        acc.add(unit_root(k, n));
        terms += 1;
    }
    let v = SumValue::brute(acc.value(), terms);
    memo().write().insert(key, v);
    v
}

/// `d(n) gcd(a, b, n)^{1/2} n^{1/2}`.
pub fn weil_bound(a: i64, b: i64, n: u64) -> f64 {
    let g = gcd(gcd(a, b), n as i64) as f64;
    divisor_count(n) as f64 * g.sqrt() * (n as f64).sqrt()
}


#[cfg(test)]
mod tests {
    use super::*;
    use num_complex::Complex64;

    #[test]
    fn small_values() {
        assert!((kloosterman(7, 3, 1).value - Complex64::new(1.0, 0.0)).norm() < 1e-15);
        assert!((kloosterman(1, 1, 2).value - Complex64::new(1.0, 0.0)).norm() < 1e-15);
        assert!((kloosterman(1, 1, 3).value - Complex64::new(-1.0, 0.0)).norm() < 1e-14);
    }

    #[test]
    fn symmetric_and_real() {
        for n in 1..60u64 {
            for a in 0..5 {
                for b in 0..5 {
                    let s = kloosterman(a, b, n);
                    assert!(s.is_real(1e-12));
                    assert!((s.value - kloosterman(b, a, n).value).norm() < 1e-10);
                    assert!(s.value.norm() <= weil_bound(a, b, n) * (1.0 + 1e-12));
                }
            }
        }
    }

    #[test]
    fn ramanujan_sum_special_case() {
        // S(a, 0, n) is the Ramanujan sum; c_n(1) = mu(n)
        for n in 1..200u64 {
            let s = kloosterman(1, 0, n).value.re;
            assert!((s - crate::arith::mobius(n) as f64).abs() < 1e-9, "n={n}");
        }
    }
}
