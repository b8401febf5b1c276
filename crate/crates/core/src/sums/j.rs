use std::collections::HashMap;

use num_complex::Complex64;
use serde::Serialize;

use super::{kloosterman, SumValue};
use crate::arith::{is_prime, mod_inv, sum_unit_roots, PrimePowerFactorization};
use crate::error::{usage, Error, Result};
use crate::lattice::{content, Content, CosetWalk, GramLattice, LatticeVector};

/// `j_{lambda,n}(d) = sum over l in M/n with l^2/2 = d mod n of e(<l, lambda>/n)`
/// by walking all `n^rank` cosets.
pub fn j_brute(
    lattice: &GramLattice,
    lambda: &LatticeVector,
    n: u64,
    d: i64,
    budget: u64,
) -> Result<SumValue> {
    if !lattice.is_even() {
        return usage("the sums j are defined for even lattices");
    }
    let walk = CosetWalk::new(lattice, n, budget)?.with_phase(lambda)?;
    let ni = n as i64;
    let d = d.rem_euclid(ni);
    let parts = walk.fold_parts(
        || vec![0u64; n as usize],
        |hist, s| {
            if s.half_norm(ni) == d {
                hist[s.phase as usize] += 1;
            }
        },
    );
    let mut hist = vec![0u64; n as usize];
    for p in parts {
        for (h, c) in hist.iter_mut().zip(p) {
            *h += c;
        }
    }
    let terms = hist.iter().sum();
    Ok(SumValue::brute(sum_unit_roots(&hist, n), terms))
}

/// `j_{lambda,n} = j_{lambda,n}(1)` for an even self-dual lattice, from the
/// factorization of `n`.
pub fn j_closed(lattice: &GramLattice, lambda: &LatticeVector, n: u64) -> Result<SumValue> {
    if !lattice.is_even() || !lattice.is_unimodular() {
        return usage(format!(
            "closed form needs an even self-dual lattice; {} is not (use the brute-force sum)",
            lattice.name()
        ));
    }
    if lambda.lattice != lattice.id() {
        return usage("vector does not belong to the lattice");
    }
    let half_norm = lattice.inner_coords(&lambda.coords, &lambda.coords) / 2;
    j_closed_invariants(lattice.rank() as u32, half_norm, content(lambda), n)
}

/// The closed form depends on `lambda` only through `lambda^2/2` and its
/// content.
pub fn j_closed_invariants(rank: u32, half_norm: i64, content: Content, n: u64) -> Result<SumValue> {
    if n == 0 {
        return usage("modulus must be positive");
    }
    if rank % 2 != 0 {
        return usage("an even self-dual lattice has even rank");
    }
    let half_rank = rank / 2;
    let mut value = Complex64::new(1.0, 0.0);
    let mut terms = 0;
    for (p, r, q) in PrimePowerFactorization::of(n).prime_powers() {
        let rest = n / q;
        let u = mod_inv(rest as i64, q as i64).expect("coprime cofactor") as i128;
        let twisted = u * u * half_norm as i128;
        let v = content.valuation(p).unwrap_or(u32::MAX);
        let pf = p as f64;
        let factor = if v == 0 {
            let s = kloosterman(1, twisted.rem_euclid(q as i128) as i64, q);
            terms += s.terms;
            s.value * (q as f64).powi(half_rank as i32 - 1)
        } else if v < r {
            let q1 = p.pow(r - v);
            let modulus = (p as i128).pow(r + v);
            let reduced = twisted.rem_euclid(modulus);
            let shift = (p as i128).pow(2 * v);
            debug_assert_eq!(reduced % shift, 0);
            let b = (reduced / shift) as i64;
            let s = kloosterman(1, b, q1);
            terms += s.terms;
            s.value * pf.powi(((rank - 1) * v) as i32) * (q1 as f64).powi(half_rank as i32 - 1)
        } else {
            terms += 1;
            Complex64::new(
                pf.powi(((rank - 1) * r) as i32) * (1.0 - pf.powi(-(half_rank as i32))),
                0.0,
            )
        };
        value *= factor;
    }
    Ok(SumValue::closed(value, terms))
}

pub const J_BOUND_EPSILON: f64 = 0.05;

/// Twice the largest observed ratio `|j_{lambda,n}| / (|lambda|^{(m-1)/2} n^{(m-1)/2 + eps})`
/// over nonzero `lambda` with `lambda^2/2 <= 40`, contents up to 6 and
/// `n <= 64`. An empirical constant; bounds using it are heuristic.
pub fn calibrated_j_bound_constant(rank: u32) -> f64 {
    use std::sync::OnceLock;
    static CACHE: OnceLock<parking_lot::Mutex<HashMap<u32, f64>>> = OnceLock::new();
    let cache = CACHE.get_or_init(|| parking_lot::Mutex::new(HashMap::new()));
    if let Some(&c) = cache.lock().get(&rank) {
        return c;
    }
    let e = (rank as f64 - 1.0) / 2.0;
    let mut worst: f64 = 0.0;
    for c in 1..=6u64 {
        for b in 1..=40i64 {
            let half_norm = b * (c * c) as i64;
            let len = ((2 * half_norm) as f64).sqrt();
            for n in 1..=64u64 {
                let j = j_closed_invariants(rank, half_norm, Content::Value(c), n)
                    .expect("valid arguments")
                    .value
                    .norm();
                worst = worst.max(j / (len.powf(e) * (n as f64).powf(e + J_BOUND_EPSILON)));
            }
        }
    }
    let c = 2.0 * worst;
    cache.lock().insert(rank, c);
    c
}

#[derive(Debug, Clone, Serialize, PartialEq)]
#[serde(rename_all = "camelCase")]
pub struct HenselReport {
    pub p: u64,
    pub q: u64,
    pub d: i64,
    pub expected_fiber: u64,
    pub base_count: u64,
    pub fibers_seen: u64,
    pub min_fiber: u64,
    pub max_fiber: u64,
    pub holds: bool,
}

/// Partitions `M_{pq}(d)` by reduction to `M/q` and checks that every fiber
/// over `M_q(d)` has exactly `p^{m-1}` elements.
pub fn hensel_fiber_check(
    lattice: &GramLattice,
    p: u64,
    q: u64,
    d: i64,
    budget: u64,
) -> Result<HenselReport> {
    if !is_prime(p) {
        return usage(format!("{p} is not prime"));
    }
    let mut t = q;
    while t % p == 0 {
        t /= p;
    }
    if t != 1 {
        return usage(format!("{q} is not a power of {p}"));
    }
    if d.rem_euclid(p as i64) == 0 {
        return usage(format!("the lifting statement needs p not dividing d (p = {p}, d = {d})"));
    }
    if !lattice.is_even() || !lattice.is_unimodular() {
        return usage("fiber sizes are only claimed for even self-dual lattices");
    }
    let pq = p * q;
    let walk = CosetWalk::new(lattice, pq, budget)?;
    let (qi, pqi) = (q as i64, pq as i64);
    let mut fibers: HashMap<Vec<i64>, u64> = HashMap::new();
    walk.for_each(|s| {
        if s.half_norm(pqi) == d.rem_euclid(pqi) {
            let key: Vec<i64> = s.coords.iter().map(|c| c.rem_euclid(qi)).collect();
            *fibers.entry(key).or_default() += 1;
        }
    });
    let base = CosetWalk::new(lattice, q, budget)?;
    let mut base_count = 0u64;
    let mut missing = false;
    base.for_each(|s| {
        if s.half_norm(qi) == d.rem_euclid(qi) {
            base_count += 1;
            if !fibers.contains_key(s.coords) {
                missing = true;
            }
        }
    });
    let expected = p
        .checked_pow(lattice.rank() as u32 - 1)
        .ok_or_else(|| Error::Domain("fiber size overflows".into()))?;
    let min_fiber = fibers.values().copied().min().unwrap_or(0);
    let max_fiber = fibers.values().copied().max().unwrap_or(0);
    let holds = !missing
        && fibers.len() as u64 == base_count
        && min_fiber == expected
        && max_fiber == expected;
    Ok(HenselReport {
        p,
        q,
        d,
        expected_fiber: expected,
        base_count,
        fibers_seen: fibers.len() as u64,
        min_fiber,
        max_fiber,
        holds,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::arith::jordan_totient;
    use crate::lattice::{e8, ii11};

    fn close(a: Complex64, b: Complex64) -> bool {
        (a - b).norm() <= 1e-6 * (1.0 + b.norm())
    }

    #[test]
    fn trivial_modulus() {
        let k = e8();
        let v = k.vector(vec![1, 2, 3, 4, 5, 6, 7, 8]).unwrap();
        assert_eq!(j_brute(k, &v, 1, 7, u64::MAX).unwrap().value, Complex64::new(1.0, 0.0));
        assert_eq!(j_closed(k, &v, 1).unwrap().value, Complex64::new(1.0, 0.0));
    }

    #[test]
    fn e8_zero_vector_modulus_two() {
        let k = e8();
        let j = j_brute(k, &k.zero(), 2, 1, u64::MAX).unwrap();
        assert!(close(j.value, Complex64::new(120.0, 0.0)));
        assert_eq!(8 * jordan_totient(4, 2), 120);
        assert!(close(j_closed(k, &k.zero(), 2).unwrap().value, j.value));
    }

    #[test]
    fn e8_root_modulus_two() {
        let k = e8();
        let root = k.basis_vector(0);
        let closed = j_closed(k, &root, 2).unwrap();
        assert!(close(closed.value, Complex64::new(8.0, 0.0)));
        assert!(close(j_brute(k, &root, 2, 1, u64::MAX).unwrap().value, closed.value));
    }

    #[test]
    fn ii11_closed_matches_brute() {
        let k = ii11();
        for n in 1..=30u64 {
            for coords in [[0, 0], [1, 0], [1, 1], [2, 3], [6, 4], [0, 9]] {
                let v = k.vector(coords.to_vec()).unwrap();
                let b = j_brute(k, &v, n, 1, u64::MAX).unwrap();
                let c = j_closed(k, &v, n).unwrap();
                assert!(close(c.value, b.value), "n={n} v={coords:?}: {} vs {}", c.value, b.value);
            }
        }
    }

    #[test]
    fn sign_of_phase_does_not_matter() {
        let k = e8();
        let v = k.vector(vec![1, 0, 2, 0, -1, 0, 0, 1]).unwrap();
        let neg = k.vector(v.coords.iter().map(|c| -c).collect()).unwrap();
        for n in 2..=5 {
            let a = j_brute(k, &v, n, 1, u64::MAX).unwrap();
            let b = j_brute(k, &neg, n, 1, u64::MAX).unwrap();
            assert!(close(a.value, b.value));
            assert!(a.is_real(1e-9));
        }
    }

    #[test]
    fn non_self_dual_is_rejected() {
        let k = GramLattice::new("A1", vec![vec![2]], (1, 0)).unwrap();
        assert!(matches!(j_closed(&k, &k.zero(), 3), Err(Error::Usage(_))));
    }

    #[test]
    fn hensel_fibers() {
        let r = hensel_fiber_check(e8(), 2, 2, 1, u64::MAX).unwrap();
        assert!(r.holds);
        assert_eq!(r.expected_fiber, 128);
        let r = hensel_fiber_check(ii11(), 3, 3, 1, u64::MAX).unwrap();
        assert!(r.holds);
        assert_eq!(r.min_fiber, 3);
        assert!(hensel_fiber_check(e8(), 2, 2, 2, u64::MAX).is_err());
    }

    #[test]
    fn bound_constant_is_finite_and_dominates() {
        let c = calibrated_j_bound_constant(8);
        assert!(c.is_finite() && c > 0.0);
    }
}
