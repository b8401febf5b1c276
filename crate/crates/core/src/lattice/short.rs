//! Fincke–Pohst enumeration of lattice points in an ellipsoid.

use std::sync::atomic::{AtomicU64, Ordering};

use nalgebra::DMatrix;
use rayon::prelude::*;

use super::{GramLattice, LatticeVector, RealVector};
use crate::error::{usage, Error, Result};

/// One enumerated point: its coordinates, its exact norm and its squared
/// distance to the search center.
#[derive(Debug)]
pub struct ShortVisit<'a> {
    pub coords: &'a [i64],
    pub norm: i64,
    pub dist_sq: f64,
}

/// Precomputed Cholesky data for repeated searches in one lattice.
#[derive(Debug, Clone)]
pub struct ShortVectorSearch<'a> {
    lattice: &'a GramLattice,
    m: usize,
    diag: Vec<f64>,
    /// `mu[i * m + j] = R_ij / R_ii` for `j > i`, with `G = R^T R`.
    mu: Vec<f64>,
}

const FLUSH: u64 = 1 << 16;

impl<'a> ShortVectorSearch<'a> {
    pub fn new(lattice: &'a GramLattice) -> Result<Self> {
        if !lattice.is_positive_definite() {
            return usage(format!("lattice {} is not positive definite", lattice.name()));
        }
        let m = lattice.rank();
        let g = DMatrix::from_fn(m, m, |i, j| lattice.gram(i, j) as f64);
        let chol = g
            .cholesky()
            .ok_or_else(|| Error::Integrity("Cholesky factorization failed".into()))?;
        let l = chol.l();
        let mut diag = vec![0.0; m];
        let mut mu = vec![0.0; m * m];
        for i in 0..m {
            let rii = l[(i, i)];
            diag[i] = rii * rii;
            for j in i + 1..m {
                mu[i * m + j] = l[(j, i)] / rii;
            }
        }
        Ok(Self { lattice, m, diag, mu })
    }

    pub fn lattice(&self) -> &GramLattice {
        self.lattice
    }

    /// Calls `f` for every point within squared distance `radius_sq` of
    /// `center` (float comparison). Returns the number of points visited.
    pub fn visit<F: FnMut(&ShortVisit)>(
        &self,
        center: &[f64],
        radius_sq: f64,
        budget: u64,
        mut f: F,
    ) -> Result<u64> {
        let counter = AtomicU64::new(0);
        self.run(center, radius_sq, None, &counter, budget, &mut f)?;
        Ok(counter.load(Ordering::Relaxed))
    }

    /// Splits the search on the last coordinate and folds each part
    /// independently; parts are returned in increasing order of that
    /// coordinate so that any reduction over them is deterministic.
    pub fn fold_parts<A, I, F>(
        &self,
        center: &[f64],
        radius_sq: f64,
        budget: u64,
        init: I,
        f: F,
    ) -> Result<Vec<A>>
    where
        A: Send,
        I: Fn() -> A + Sync,
        F: Fn(&mut A, &ShortVisit) + Sync,
    {
        let m = self.m;
        if m == 0 {
            let mut a = init();
            f(&mut a, &ShortVisit { coords: &[], norm: 0, dist_sq: 0.0 });
            return Ok(vec![a]);
        }
        let top = m - 1;
        let half = (radius_sq.max(0.0) / self.diag[top]).sqrt() + 1e-9;
        let lo = (center[top] - half).ceil() as i64;
        let hi = (center[top] + half).floor() as i64;
        let counter = AtomicU64::new(0);
        (lo..=hi)
            .collect::<Vec<_>>()
            .into_par_iter()
            .map(|x_top| {
                let mut acc = init();
                self.run(center, radius_sq, Some(x_top), &counter, budget, &mut |v| f(&mut acc, v))?;
                Ok(acc)
            })
            .collect()
    }

    fn run<F: FnMut(&ShortVisit)>(
        &self,
        center: &[f64],
        radius_sq: f64,
        fixed_top: Option<i64>,
        counter: &AtomicU64,
        budget: u64,
        f: &mut F,
    ) -> Result<()> {
        let m = self.m;
        if center.len() != m {
            return usage("center has the wrong dimension");
        }
        if !(radius_sq >= 0.0) {
            return usage("radius must be nonnegative");
        }
        if m == 0 {
            f(&ShortVisit { coords: &[], norm: 0, dist_sq: 0.0 });
            counter.fetch_add(1, Ordering::Relaxed);
            return Ok(());
        }
        let bound = radius_sq * (1.0 + 1e-12) + 1e-12;
        let gram = self.lattice.gram_flat();
        let mut x = vec![0i64; m];
        let mut hi = vec![0i64; m];
        let mut t = vec![0.0f64; m];
        // partial squared distance contributed by levels >= i
        let mut dist = vec![0.0f64; m + 1];
        // exact partial norm from levels >= i
        let mut exact = vec![0i64; m + 1];
        // tacc[i*m + k] = sum_{j >= i} mu[k][j] (x_j - c_j), gacc likewise with the Gram matrix
        let mut tacc = vec![0.0f64; (m + 1) * m];
        let mut gacc = vec![0i64; (m + 1) * m];
        let mut local = 0u64;

        let init_level = |i: usize,
                              x: &mut [i64],
                              hi: &mut [i64],
                              t: &mut [f64],
                              dist: &[f64],
                              tacc: &[f64]| {
            t[i] = center[i] - tacc[(i + 1) * m + i];
            let rem = bound - dist[i + 1];
            if rem < 0.0 {
                x[i] = 1;
                hi[i] = 0;
                return;
            }
            let half = (rem / self.diag[i]).sqrt();
            x[i] = (t[i] - half).ceil() as i64;
            hi[i] = (t[i] + half).floor() as i64;
        };

        let mut i = m - 1;
        init_level(i, &mut x, &mut hi, &mut t, &dist, &tacc);
        if let Some(v) = fixed_top {
            if v < x[i] || v > hi[i] {
                return Ok(());
            }
            x[i] = v;
            hi[i] = v;
        }
        loop {
            if x[i] > hi[i] {
                i += 1;
                if i == m {
                    break;
                }
                x[i] += 1;
                continue;
            }
            let d = x[i] as f64 - t[i];
            let di = dist[i + 1] + self.diag[i] * d * d;
            let xi = x[i];
            let ei = exact[i + 1] + gram[i * m + i] * xi * xi + 2 * xi * gacc[(i + 1) * m + i];
            if i == 0 {
                if di <= bound {
                    local += 1;
                    if local % FLUSH == 0 {
                        let total = counter.fetch_add(FLUSH, Ordering::Relaxed) + FLUSH;
                        if total > budget {
                            return Err(Error::Resource {
                                what: "short-vector enumeration".into(),
                                processed: total,
                                required: budget,
                            });
                        }
                    }
                    f(&ShortVisit { coords: &x, norm: ei, dist_sq: di });
                }
                x[0] += 1;
                continue;
            }
            dist[i] = di;
            exact[i] = ei;
            let off = x[i] as f64 - center[i];
            for k in 0..i {
                tacc[i * m + k] = tacc[(i + 1) * m + k] + self.mu[k * m + i] * off;
                gacc[i * m + k] = gacc[(i + 1) * m + k] + gram[k * m + i] * xi;
            }
            i -= 1;
            init_level(i, &mut x, &mut hi, &mut t, &dist, &tacc);
        }
        let rest = local % FLUSH;
        let total = counter.fetch_add(rest, Ordering::Relaxed) + rest;
        if total > budget {
            return Err(Error::Resource {
                what: "short-vector enumeration".into(),
                processed: total,
                required: budget,
            });
        }
        Ok(())
    }
}

/// All lattice vectors `x` with `norm(x - center) <= radius_sq`, sorted
/// lexicographically. Integral centers are compared exactly.
pub fn short_vectors(
    lattice: &GramLattice,
    center: &RealVector,
    radius_sq: f64,
    budget: u64,
) -> Result<Vec<LatticeVector>> {
    if center.lattice != lattice.id() {
        return usage("center does not belong to the lattice");
    }
    let search = ShortVectorSearch::new(lattice)?;
    let integral: Option<Vec<i64>> = center
        .coords
        .iter()
        .map(|&c| (c.fract() == 0.0 && c.abs() < 1e15).then_some(c as i64))
        .collect();
    let slack = if integral.is_some() { 1e-6 } else { 0.0 };
    let mut out = Vec::new();
    search.visit(&center.coords, radius_sq + slack, budget, |v| {
        let keep = match &integral {
            Some(c) => {
                let diff: Vec<i64> = v.coords.iter().zip(c).map(|(a, b)| a - b).collect();
                (lattice.inner_coords(&diff, &diff) as f64) <= radius_sq
            }
            None => v.dist_sq <= radius_sq,
        };
        if keep {
            out.push(v.coords.to_vec());
        }
    })?;
    out.sort();
    Ok(out
        .into_iter()
        .map(|coords| LatticeVector { lattice: lattice.id(), coords })
        .collect())
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::lattice::{e8, leech};

    #[test]
    fn e8_ball_of_radius_two() {
        let k = e8();
        let zero = k.real_vector(vec![0.0; 8]).unwrap();
        let v = short_vectors(k, &zero, 2.0, u64::MAX).unwrap();
        assert_eq!(v.len(), 241);
        assert!(v.windows(2).all(|w| w[0].coords < w[1].coords));
        assert_eq!(short_vectors(k, &zero, 0.0, u64::MAX).unwrap(), vec![k.zero()]);
    }

    #[test]
    fn leech_has_no_roots() {
        let k = leech();
        let zero = k.real_vector(vec![0.0; 24]).unwrap();
        assert_eq!(short_vectors(k, &zero, 2.0, u64::MAX).unwrap(), vec![k.zero()]);
    }

    #[test]
    fn ball_is_symmetric_about_lattice_center() {
        let k = e8();
        let c: Vec<i64> = vec![1, -2, 0, 3, 1, 0, -1, 2];
        let center = k.real_vector(c.iter().map(|&a| a as f64).collect()).unwrap();
        let v = short_vectors(k, &center, 4.0, u64::MAX).unwrap();
        assert_eq!(v.len(), 1 + 240 + 2160);
        let set: std::collections::HashSet<Vec<i64>> = v.iter().map(|x| x.coords.clone()).collect();
        for x in &v {
            let mirror: Vec<i64> = x.coords.iter().zip(&c).map(|(a, b)| 2 * b - a).collect();
            assert!(set.contains(&mirror));
        }
    }

    #[test]
    fn budget_is_enforced() {
        let k = leech();
        let zero = vec![0.0; 24];
        let s = ShortVectorSearch::new(k).unwrap();
        let err = s.visit(&zero, 4.0, 1000, |_| {}).unwrap_err();
        assert!(matches!(err, Error::Resource { .. }));
    }

    #[test]
    fn parts_cover_the_same_points() {
        let k = e8();
        let s = ShortVectorSearch::new(k).unwrap();
        let center = vec![0.3, -0.1, 0.2, 0.0, 0.25, -0.3, 0.1, 0.05];
        let whole = s.visit(&center, 6.0, u64::MAX, |_| {}).unwrap();
        let parts = s.fold_parts(&center, 6.0, u64::MAX, || 0u64, |a, _| *a += 1).unwrap();
        assert_eq!(parts.iter().sum::<u64>(), whole);
    }
}
