//! Walks over the cosets of `M/nM` in reflected Gray-code order, keeping
//! `l^2 mod 2n` and one pairing `<l, lambda> mod n` up to date in O(rank)
//! per step.

use rayon::prelude::*;

use super::{GramLattice, LatticeVector};
use crate::error::{usage, Error, Result};

pub const DEFAULT_COSET_BUDGET: u64 = 1 << 25;

/// Current coset: representative coordinates in `[0, n)`, the norm modulo
/// `2n` and the pairing with the walk's phase vector modulo `n`.
#[derive(Debug)]
pub struct CosetState<'a> {
    pub coords: &'a [i64],
    pub norm_mod: i64,
    pub phase: i64,
}

impl CosetState<'_> {
    /// `l^2 / 2 mod n`, meaningful for even lattices.
    pub fn half_norm(&self, n: i64) -> i64 {
        (self.norm_mod / 2).rem_euclid(n)
    }
}

#[derive(Debug, Clone)]
pub struct CosetWalk<'a> {
    lattice: &'a GramLattice,
    n: i64,
    /// `G lambda mod n`; zero when no phase vector is set.
    g_lambda: Vec<i64>,
    count: u64,
}

impl<'a> CosetWalk<'a> {
    pub fn new(lattice: &'a GramLattice, n: u64, budget: u64) -> Result<Self> {
        if n == 0 {
            return usage("modulus must be positive");
        }
        let m = lattice.rank() as u32;
        let count = n.checked_pow(m).filter(|&c| c <= budget).ok_or_else(|| Error::Resource {
            what: format!("coset enumeration of {n}^{m} cosets"),
            processed: 0,
            required: n.checked_pow(m).unwrap_or(u64::MAX),
        })?;
        Ok(Self {
            lattice,
            n: n as i64,
            g_lambda: vec![0; lattice.rank()],
            count,
        })
    }

    pub fn with_phase(mut self, lambda: &LatticeVector) -> Result<Self> {
        if lambda.lattice != self.lattice.id() {
            return usage("phase vector does not belong to the lattice");
        }
        self.g_lambda = self
            .lattice
            .apply(&lambda.coords)
            .into_iter()
            .map(|v| v.rem_euclid(self.n))
            .collect();
        Ok(self)
    }

    pub fn modulus(&self) -> u64 {
        self.n as u64
    }

    pub fn coset_count(&self) -> u64 {
        self.count
    }

    pub fn for_each<F: FnMut(&CosetState)>(&self, mut f: F) {
        let m = self.lattice.rank();
        if m == 0 {
            f(&CosetState { coords: &[], norm_mod: 0, phase: 0 });
            return;
        }
        for t in 0..self.n {
            self.walk_part(t, &mut f);
        }
    }

    /// Folds each slice with fixed last coordinate independently; the parts
    /// come back ordered by that coordinate.
    pub fn fold_parts<A, I, F>(&self, init: I, f: F) -> Vec<A>
    where
        A: Send,
        I: Fn() -> A + Sync,
        F: Fn(&mut A, &CosetState) + Sync,
    {
        let m = self.lattice.rank();
        if m == 0 {
            let mut a = init();
            f(&mut a, &CosetState { coords: &[], norm_mod: 0, phase: 0 });
            return vec![a];
        }
        (0..self.n)
            .into_par_iter()
            .map(|t| {
                let mut acc = init();
                self.walk_part(t, &mut |s: &CosetState| f(&mut acc, s));
                acc
            })
            .collect()
    }

    fn walk_part<F: FnMut(&CosetState)>(&self, top: i64, f: &mut F) {
        let lat = self.lattice;
        let m = lat.rank();
        let n = self.n;
        let two_n = 2 * n;
        let last = m - 1;
        let mut x = vec![0i64; m];
        x[last] = top;
        let mut gx: Vec<i64> = (0..m).map(|k| (lat.gram(k, last) * top).rem_euclid(n)).collect();
        let mut q = (lat.gram(last, last) * top * top).rem_euclid(two_n);
        let mut phase = (self.g_lambda[last] * top).rem_euclid(n);
        let diag: Vec<i64> = (0..m).map(|j| lat.gram(j, j).rem_euclid(two_n)).collect();
        let cols: Vec<Vec<i64>> = (0..m)
            .map(|j| (0..m).map(|k| lat.gram(k, j).rem_euclid(n)).collect())
            .collect();

        let dims = last;
        if dims == 0 || n == 1 {
            f(&CosetState { coords: &x, norm_mod: q, phase });
            return;
        }
        let mut focus: Vec<usize> = (0..=dims).collect();
        let mut dir = vec![1i64; dims];
        loop {
            f(&CosetState { coords: &x, norm_mod: q, phase });
            let j = focus[0];
            focus[0] = 0;
            if j == dims {
                break;
            }
            let d = dir[j];
            x[j] += d;
            // (l + d e_j)^2 = l^2 + 2 d (G l)_j + G_jj
            q = (q + 2 * d * gx[j] + diag[j]).rem_euclid(two_n);
            phase = (phase + d * self.g_lambda[j]).rem_euclid(n);
            let col = &cols[j];
            if d > 0 {
                for (g, c) in gx.iter_mut().zip(col) {
                    *g += c;
                    if *g >= n {
                        *g -= n;
                    }
                }
            } else {
                for (g, c) in gx.iter_mut().zip(col) {
                    *g -= c;
                    if *g < 0 {
                        *g += n;
                    }
                }
            }
            if x[j] == 0 || x[j] == n - 1 {
                dir[j] = -d;
                focus[j] = focus[j + 1];
                focus[j + 1] = j + 1;
            }
        }
    }
}

/// One representative per coset of `M/nM`, optionally restricted to
/// `l^2/2 = d mod n`, sorted lexicographically.
pub fn coset_enumerate(
    lattice: &GramLattice,
    n: u64,
    d: Option<i64>,
    budget: u64,
) -> Result<Vec<LatticeVector>> {
    let walk = CosetWalk::new(lattice, n, budget)?;
    let ni = n as i64;
    let mut out = Vec::new();
    walk.for_each(|s| {
        if d.is_none_or(|d| s.half_norm(ni) == d.rem_euclid(ni)) {
            out.push(s.coords.to_vec());
        }
    });
    out.sort();
    Ok(out
        .into_iter()
        .map(|coords| LatticeVector { lattice: lattice.id(), coords })
        .collect())
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::lattice::{e8, ii11};

    #[test]
    fn walk_visits_every_coset_once_with_correct_norms() {
        let k = e8();
        let lambda = k.vector(vec![1, 0, -1, 2, 0, 0, 1, 0]).unwrap();
        let walk = CosetWalk::new(k, 3, u64::MAX).unwrap().with_phase(&lambda).unwrap();
        let mut seen = std::collections::HashSet::new();
        walk.for_each(|s| {
            assert!(s.coords.iter().all(|&c| (0..3).contains(&c)));
            let norm = k.inner_coords(s.coords, s.coords);
            assert_eq!(norm.rem_euclid(6), s.norm_mod);
            assert_eq!(k.inner_coords(s.coords, &lambda.coords).rem_euclid(3), s.phase);
            assert!(seen.insert(s.coords.to_vec()));
        });
        assert_eq!(seen.len(), 6561);
    }

    #[test]
    fn small_counts() {
        assert_eq!(coset_enumerate(e8(), 1, Some(5), u64::MAX).unwrap().len(), 1);
        assert_eq!(coset_enumerate(e8(), 2, Some(1), u64::MAX).unwrap().len(), 120);
        assert_eq!(coset_enumerate(ii11(), 2, Some(1), u64::MAX).unwrap().len(), 1);
        assert_eq!(coset_enumerate(ii11(), 5, None, u64::MAX).unwrap().len(), 25);
    }

    #[test]
    fn budget_names_the_coset_count() {
        let err = CosetWalk::new(e8(), 16, 1 << 20).unwrap_err();
        match err {
            Error::Resource { required, .. } => assert_eq!(required, 1 << 32),
            other => panic!("unexpected {other:?}"),
        }
    }
}
