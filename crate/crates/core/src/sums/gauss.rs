use num_complex::Complex64;
use serde::Serialize;

use super::SumValue;
use crate::arith::{as_prime_power, epsilon_factor, gcd, jacobi_symbol, mod_inv, sum_unit_roots};
use crate::error::{usage, Error, Result};
use crate::lattice::{bareiss_det, CosetWalk, GramLattice, LatticeId, LatticeVector};

fn prime_of(q: u64) -> Result<Option<u64>> {
    if q == 1 {
        return Ok(None);
    }
    match as_prime_power(q) {
        Some((p, _)) => Ok(Some(p)),
        None => usage(format!("{q} is not a prime power")),
    }
}

/// Histogram of `x^2/2 mod q` (or `2^{-1} x^2` for odd lattices and odd `q`)
/// over `K/qK`, with the number of cosets walked.
fn half_norm_histogram(lattice: &GramLattice, q: u64, budget: u64) -> Result<(Vec<u64>, u64)> {
    let p = prime_of(q)?.unwrap_or(1);
    let qi = q as i64;
    let half = if lattice.is_even() {
        None
    } else if p != 2 {
        Some(mod_inv(2, qi).unwrap())
    } else {
        return usage("the sum modulo a power of 2 needs an even lattice");
    };
    let walk = CosetWalk::new(lattice, q, budget)?;
    let parts = walk.fold_parts(
        || vec![0u64; q as usize],
        |hist, s| {
            let h = match half {
                None => s.half_norm(qi),
                Some(inv2) => (s.norm_mod.rem_euclid(qi) * inv2).rem_euclid(qi),
            };
            hist[h as usize] += 1;
        },
    );
    let mut hist = vec![0u64; q as usize];
    for part in parts {
        for (h, x) in hist.iter_mut().zip(part) {
            *h += x;
        }
    }
    Ok((hist, walk.coset_count()))
}

fn twist(hist: &[u64], c: i64) -> Vec<u64> {
    let q = hist.len() as i128;
    let mut out = vec![0u64; hist.len()];
    for (h, &x) in hist.iter().enumerate() {
        out[(h as i128 * c as i128).rem_euclid(q) as usize] += x;
    }
    out
}

/// `theta_{q,c}(K) = sum over x in K/qK of e(c x^2 / 2q)`, by enumeration.
pub fn gauss_theta_brute(lattice: &GramLattice, q: u64, c: i64, budget: u64) -> Result<SumValue> {
    let Some(p) = prime_of(q)? else {
        return Ok(SumValue::brute(Complex64::new(1.0, 0.0), 1));
    };
    if gcd(c, p as i64) != 1 {
        return usage(format!("c = {c} must be prime to {p}"));
    }
    let (hist, count) = half_norm_histogram(lattice, q, budget)?;
    Ok(SumValue::brute(sum_unit_roots(&twist(&hist, c), q), count))
}

/// `theta_{q,c}` for every `c` in `1..q` prime to `q`, from one enumeration.
pub fn gauss_theta_brute_all(lattice: &GramLattice, q: u64, budget: u64) -> Result<Vec<(i64, SumValue)>> {
    let Some(p) = prime_of(q)? else {
        return Ok(vec![(1, SumValue::brute(Complex64::new(1.0, 0.0), 1))]);
    };
    let (hist, count) = half_norm_histogram(lattice, q, budget)?;
    Ok((1..q as i64)
        .filter(|c| c % p as i64 != 0)
        .map(|c| (c, SumValue::brute(sum_unit_roots(&twist(&hist, c), q), count)))
        .collect())
}

/// `q^{m/2} eps_q^m ((2^{-1} c | q))^m (det K | q)` for odd prime powers
/// `q` with `p` prime to `det K`.
pub fn gauss_theta_closed_odd(lattice: &GramLattice, q: u64, c: i64) -> Result<SumValue> {
    let Some(p) = prime_of(q)? else {
        return Ok(SumValue::closed(Complex64::new(1.0, 0.0), 1));
    };
    if p == 2 {
        return usage("the closed form is for odd prime powers");
    }
    let qi = q as i64;
    if (lattice.det() % p as i128) == 0 {
        return usage(format!("{p} divides the determinant of {}", lattice.name()));
    }
    if gcd(c, p as i64) != 1 {
        return usage(format!("c = {c} must be prime to {p}"));
    }
    let m = lattice.rank() as i32;
    let alpha = (mod_inv(2, qi).unwrap() as i128 * c as i128).rem_euclid(qi as i128) as i64;
    let sym = jacobi_symbol(alpha, qi)?;
    let det_sym = jacobi_symbol((lattice.det().rem_euclid(qi as i128)) as i64, qi)?;
    let eps = epsilon_factor(qi)?;
    let value = eps.powi(m)
        * (sym as f64).powi(m)
        * det_sym as f64
        * (q as f64).powf(m as f64 / 2.0);
    Ok(SumValue::closed(value, 1))
}

/// `theta_{2^r,c}(K) = 2^{rank} theta_{2^{r-2},c}(K)` down to `r` in `{0, 1}`,
/// with the `r = 1` base computed by enumeration.
pub fn gauss_theta_even_recursion(lattice: &GramLattice, r: u32, c: i64, budget: u64) -> Result<SumValue> {
    if !lattice.is_even() || !lattice.is_unimodular() {
        return usage("the recursion holds for even self-dual lattices");
    }
    if c % 2 == 0 {
        return usage("c must be odd");
    }
    let steps = r / 2;
    let base = if r % 2 == 1 {
        gauss_theta_brute(lattice, 2, c, budget)?
    } else {
        SumValue::brute(Complex64::new(1.0, 0.0), 1)
    };
    let scale = 2f64.powi((lattice.rank() as u32 * steps) as i32);
    Ok(SumValue::closed(base.value * scale, base.terms))
}

/// A basis `u_1..u_m` with `p` prime to each `u_i^2` and `q | <u_i, u_j>`
/// for `i != j`.
#[derive(Debug, Clone, Serialize)]
#[serde(rename_all = "camelCase")]
pub struct DiagonalBasis {
    #[serde(skip)]
    pub lattice: LatticeId,
    pub q: u64,
    pub basis: Vec<Vec<i64>>,
}

impl DiagonalBasis {
    pub fn vectors(&self) -> Vec<LatticeVector> {
        self.basis
            .iter()
            .map(|c| LatticeVector { lattice: self.lattice, coords: c.clone() })
            .collect()
    }

    /// Checks unimodularity and both congruence conditions.
    pub fn verify(&self, lattice: &GramLattice) -> Result<bool> {
        let m = lattice.rank();
        if self.basis.len() != m {
            return Ok(false);
        }
        let flat: Vec<i64> = self.basis.iter().flatten().copied().collect();
        if bareiss_det(m, &flat)?.abs() != 1 {
            return Ok(false);
        }
        let (p, _) = as_prime_power(self.q).ok_or_else(|| Error::Usage("bad modulus".into()))?;
        for i in 0..m {
            if lattice.inner_coords(&self.basis[i], &self.basis[i]).rem_euclid(p as i64) == 0 {
                return Ok(false);
            }
            for j in 0..i {
                if lattice.inner_coords(&self.basis[i], &self.basis[j]).rem_euclid(self.q as i64) != 0 {
                    return Ok(false);
                }
            }
        }
        Ok(true)
    }
}

/// Diagonalizes the form modulo an odd prime power by repeatedly choosing a
/// pivot of norm prime to `p` and clearing its pairings with the rest.
pub fn diagonalize_mod_q(lattice: &GramLattice, q: u64) -> Result<DiagonalBasis> {
    let Some((p, _)) = as_prime_power(q) else {
        return usage(format!("{q} is not a prime power"));
    };
    if p == 2 {
        return usage("diagonalization is for odd prime powers");
    }
    if lattice.det() % p as i128 == 0 {
        return usage(format!("{p} divides the determinant of {}", lattice.name()));
    }
    let m = lattice.rank();
    let (pi, qi) = (p as i64, q as i64);
    let mut u: Vec<Vec<i64>> = (0..m).map(|i| lattice.basis_vector(i).coords).collect();
    let ip = |a: &[i64], b: &[i64]| -> Result<i64> {
        let mut acc = 0i128;
        for i in 0..m {
            if a[i] == 0 {
                continue;
            }
            for j in 0..m {
                acc += a[i] as i128 * lattice.gram(i, j) as i128 * b[j] as i128;
            }
        }
        i64::try_from(acc).map_err(|_| Error::Integrity("inner product overflow".into()))
    };
    let axpy = |y: &mut Vec<i64>, t: i64, x: &[i64]| -> Result<()> {
        for (a, b) in y.iter_mut().zip(x) {
            *a = b
                .checked_mul(t)
                .and_then(|v| a.checked_add(v))
                .ok_or_else(|| Error::Integrity("coordinate overflow".into()))?;
        }
        Ok(())
    };
    for i in 0..m {
        let pivot = match (i..m).find(|&j| ip(&u[j], &u[j]).map(|n| n.rem_euclid(pi) != 0).unwrap_or(false)) {
            Some(j) => j,
            None => {
                let mut found = None;
                'outer: for a in i..m {
                    for b in i..m {
                        if a != b && ip(&u[a], &u[b])?.rem_euclid(pi) != 0 {
                            found = Some((a, b));
                            break 'outer;
                        }
                    }
                }
                let (a, b) = found.ok_or_else(|| {
                    Error::Integrity("form is degenerate modulo p despite p not dividing det".into())
                })?;
                let ua = u[a].clone();
                axpy(&mut u[b], 1, &ua)?;
                b
            }
        };
        u.swap(i, pivot);
        let norm = ip(&u[i], &u[i])?;
        let k = mod_inv(norm.rem_euclid(qi), qi).expect("pivot norm is a unit");
        let ui = u[i].clone();
        for j in i + 1..m {
            let t = ((k as i128 * ip(&ui, &u[j])? as i128).rem_euclid(qi as i128)) as i64;
            if t != 0 {
                axpy(&mut u[j], -t, &ui)?;
            }
        }
    }
    Ok(DiagonalBasis { lattice: lattice.id(), q, basis: u })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::lattice::{e8, ii11};

    fn close(a: Complex64, b: f64) -> bool {
        (a - Complex64::new(b, 0.0)).norm() <= 1e-6 * (1.0 + b.abs())
    }

    #[test]
    fn base_values() {
        assert!(close(gauss_theta_brute(e8(), 1, 3, u64::MAX).unwrap().value, 1.0));
        assert!(close(gauss_theta_brute(e8(), 2, 1, u64::MAX).unwrap().value, 16.0));
        assert!(close(gauss_theta_brute(ii11(), 2, 1, u64::MAX).unwrap().value, 2.0));
        assert!(gauss_theta_brute(e8(), 9, 3, u64::MAX).is_err());
    }

    #[test]
    fn odd_closed_form() {
        for q in [3u64, 5, 7, 9] {
            assert!(close(gauss_theta_closed_odd(e8(), q, 1).unwrap().value, (q as f64).powi(4)));
            assert!(close(gauss_theta_closed_odd(ii11(), q, 2).unwrap().value, q as f64));
        }
        let empty = GramLattice::new("0", vec![], (0, 0)).unwrap();
        assert!(close(gauss_theta_closed_odd(&empty, 3, 1).unwrap().value, 1.0));
        let a2 = GramLattice::new("A2", vec![vec![2, -1], vec![-1, 2]], (2, 0)).unwrap();
        assert!(gauss_theta_closed_odd(&a2, 3, 1).is_err());
        for q in [5u64, 7, 25] {
            for c in [1, 2, 3] {
                let b = gauss_theta_brute(&a2, q, c, u64::MAX).unwrap().value;
                let f = gauss_theta_closed_odd(&a2, q, c).unwrap().value;
                assert!((b - f).norm() < 1e-8 * (1.0 + b.norm()), "q={q} c={c}: {b} vs {f}");
            }
        }
    }

    #[test]
    fn even_recursion() {
        assert!(close(gauss_theta_even_recursion(ii11(), 2, 1, u64::MAX).unwrap().value, 4.0));
        assert!(close(gauss_theta_even_recursion(e8(), 3, 1, u64::MAX).unwrap().value, 4096.0));
        let empty = GramLattice::new("0", vec![], (0, 0)).unwrap();
        assert!(close(gauss_theta_even_recursion(&empty, 2, 1, u64::MAX).unwrap().value, 1.0));
    }

    #[test]
    fn diagonal_bases() {
        let d = diagonalize_mod_q(e8(), 9).unwrap();
        assert!(d.verify(e8()).unwrap());
        let d = diagonalize_mod_q(ii11(), 3).unwrap();
        assert!(d.verify(ii11()).unwrap());
        let one = GramLattice::new("<2>", vec![vec![2]], (1, 0)).unwrap();
        let d = diagonalize_mod_q(&one, 3).unwrap();
        assert_eq!(d.basis, vec![vec![1]]);
    }
}
