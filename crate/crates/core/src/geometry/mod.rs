//! Geometry of `L = Lambda + II(1,1)`: points `(lambda; m, n)` of norm
//! `lambda^2 - 2mn`, heights, roots, translations and the slice of points of
//! fixed norm and height.

mod direct;

pub use direct::{direct_poincare, nearest_distance_sq};

use serde::{Deserialize, Serialize};

use crate::arith::gcd;
use crate::error::{usage, Error, Result};
use crate::lattice::{GramLattice, LatticeVector, RealVector, ShortVectorSearch};

/// A point `(lambda; m, n)`; `T = i64` for lattice points, `f64` for real ones.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct LorentzPoint<T> {
    pub leech: Vec<T>,
    pub m: T,
    pub n: T,
}

pub type IntegralPoint = LorentzPoint<i64>;
pub type RealPoint = LorentzPoint<f64>;

impl IntegralPoint {
    pub fn to_real(&self) -> RealPoint {
        RealPoint {
            leech: self.leech.iter().map(|&c| c as f64).collect(),
            m: self.m as f64,
            n: self.n as f64,
        }
    }
}

/// A positive root `(l; n, (l^2/2 - 1)/n)` of norm 2.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Root {
    point: IntegralPoint,
}

impl Root {
    pub fn point(&self) -> &IntegralPoint {
        &self.point
    }

    pub fn height(&self) -> i64 {
        self.point.m
    }
}

/// Parameters `(k, h)` of the slice `{z : z^2 = -k, ht(z) = h}` with
/// `nu = 2h^2/k < 1`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct SliceParams {
    k: f64,
    h: f64,
}

impl SliceParams {
    pub fn new(k: f64, h: f64) -> Result<Self> {
        if !(k > 0.0 && h > 0.0) || !k.is_finite() || !h.is_finite() {
            return usage(format!("slice parameters must be positive, got k = {k}, h = {h}"));
        }
        if 2.0 * h * h / k >= 1.0 {
            return usage(format!("need 2h^2/k < 1, got {}", 2.0 * h * h / k));
        }
        Ok(Self { k, h })
    }

    pub fn k(&self) -> f64 {
        self.k
    }

    pub fn h(&self) -> f64 {
        self.h
    }

    pub fn nu(&self) -> f64 {
        2.0 * self.h * self.h / self.k
    }

    /// `c_n = sqrt(k/h^2 - 2/n^2)`.
    pub fn c_n(&self, n: u64) -> f64 {
        let n = n as f64;
        (self.k / (self.h * self.h) - 2.0 / (n * n)).sqrt()
    }

    /// `kappa = sqrt(2(1 - nu)/nu)`, a lower bound for every `c_n`.
    pub fn kappa(&self) -> f64 {
        let nu = self.nu();
        (2.0 * (1.0 - nu) / nu).sqrt()
    }
}

/// The Lorentzian lattice `K + II(1,1)` for a positive-definite `K`.
#[derive(Debug, Clone, Copy)]
pub struct Lorentz<'a> {
    lattice: &'a GramLattice,
}

impl<'a> Lorentz<'a> {
    pub fn new(lattice: &'a GramLattice) -> Result<Self> {
        if !lattice.is_positive_definite() {
            return usage("the Euclidean part must be positive definite");
        }
        Ok(Self { lattice })
    }

    pub fn lattice(&self) -> &'a GramLattice {
        self.lattice
    }

    fn dim_check<T>(&self, p: &LorentzPoint<T>) -> Result<()> {
        if p.leech.len() != self.lattice.rank() {
            return usage("point has the wrong dimension");
        }
        Ok(())
    }

    /// `<(a; m, n), (b; m', n')> = <a, b> - m n' - m' n`.
    pub fn inner(&self, x: &IntegralPoint, y: &IntegralPoint) -> Result<i64> {
        self.dim_check(x)?;
        self.dim_check(y)?;
        Ok(self.lattice.inner_coords(&x.leech, &y.leech) - x.m * y.n - y.m * x.n)
    }

    pub fn inner_real(&self, x: &RealPoint, y: &RealPoint) -> Result<f64> {
        self.dim_check(x)?;
        self.dim_check(y)?;
        Ok(self.lattice.inner_real_coords(&x.leech, &y.leech) - x.m * y.n - y.m * x.n)
    }

    pub fn norm(&self, x: &IntegralPoint) -> Result<i64> {
        self.inner(x, x)
    }

    /// The cusp `(0; 0, 1)`.
    pub fn rho(&self) -> IntegralPoint {
        IntegralPoint { leech: vec![0; self.lattice.rank()], m: 0, n: 1 }
    }

    /// `(lambda; 1, lambda^2/2 - 1)`.
    pub fn leech_root(&self, lambda: &LatticeVector) -> Result<Root> {
        let norm = self.lattice.norm(lambda)?;
        self.root(IntegralPoint { leech: lambda.coords.clone(), m: 1, n: norm / 2 - 1 })
    }

    /// Validates a positive root.
    pub fn root(&self, point: IntegralPoint) -> Result<Root> {
        self.dim_check(&point)?;
        let l2 = self.lattice.inner_coords(&point.leech, &point.leech);
        let n = point.m;
        if n < 1 {
            return usage("positive roots have height at least 1");
        }
        if (l2 - 2).rem_euclid(2 * n) != 0 || (l2 / 2 - 1) != n * point.n {
            return usage("not a root of the given height");
        }
        if self.norm(&point)? != 2 {
            return Err(Error::Integrity("root does not have norm 2".into()));
        }
        Ok(Root { point })
    }

    /// Root of height `n` over `l`, if `l^2 = 2 mod 2n`.
    pub fn root_of_height(&self, n: i64, l: &[i64]) -> Result<Root> {
        let l2 = self.lattice.inner_coords(l, l);
        if n < 1 || (l2 - 2).rem_euclid(2 * n) != 0 {
            return usage(format!("no root of height {n} over a vector of norm {l2}"));
        }
        self.root(IntegralPoint { leech: l.to_vec(), m: n, n: (l2 / 2 - 1) / n })
    }

    /// `T_v(l; a, b) = (l + a v; a, b + <l, v> + a v^2/2)` for lattice `v`.
    pub fn translate(&self, v: &[i64], x: &IntegralPoint) -> Result<IntegralPoint> {
        self.dim_check(x)?;
        let lv = self.lattice.inner_coords(&x.leech, v);
        let v2 = self.lattice.inner_coords(v, v);
        Ok(IntegralPoint {
            leech: x.leech.iter().zip(v).map(|(l, w)| l + x.m * w).collect(),
            m: x.m,
            n: x.n + lv + x.m * v2 / 2,
        })
    }

    pub fn translate_real(&self, v: &[f64], x: &RealPoint) -> Result<RealPoint> {
        self.dim_check(x)?;
        let lv = self.lattice.inner_real_coords(&x.leech, v);
        let v2 = self.lattice.inner_real_coords(v, v);
        Ok(RealPoint {
            leech: x.leech.iter().zip(v).map(|(l, w)| l + x.m * w).collect(),
            m: x.m,
            n: x.n + lv + x.m * v2 / 2.0,
        })
    }

    /// `phi(v) = T_v(0; h, k/2h) = (v h; h, ((v h)^2 + k)/2h)`.
    pub fn slice_point(&self, v: &RealVector, p: &SliceParams) -> Result<RealPoint> {
        if v.coords.len() != self.lattice.rank() {
            return usage("point has the wrong dimension");
        }
        let vh: Vec<f64> = v.coords.iter().map(|c| c * p.h).collect();
        let vh2 = self.lattice.inner_real_coords(&vh, &vh);
        Ok(RealPoint { leech: vh, m: p.h, n: (vh2 + p.k) / (2.0 * p.h) })
    }

    /// `(l; h, *) -> l/h`.
    pub fn slice_inverse(&self, z: &RealPoint) -> Result<RealVector> {
        if z.m == 0.0 {
            return usage("points of height 0 are not on a slice");
        }
        self.lattice.real_vector(z.leech.iter().map(|c| c / z.m).collect())
    }

    /// `-<r, phi(v)> = (n h/2)(c_n^2 + (v - l/n)^2)` for the root of height
    /// `n` over `l`.
    pub fn root_pairing(&self, n: i64, l: &[i64], v: &[f64], p: &SliceParams) -> Result<f64> {
        let l2 = self.lattice.inner_coords(l, l);
        if n < 1 || (l2 - 2).rem_euclid(2 * n) != 0 {
            return usage(format!("l^2 = {l2} is not 2 modulo {}", 2 * n));
        }
        let nf = n as f64;
        let diff: Vec<f64> = v.iter().zip(l).map(|(a, &b)| a - b as f64 / nf).collect();
        let d2 = self.lattice.inner_real_coords(&diff, &diff);
        let cn = p.c_n(n as u64);
        Ok(nf * p.h / 2.0 * (cn * cn + d2))
    }

    /// The same pairing from the Lorentzian inner product.
    pub fn root_pairing_direct(&self, n: i64, l: &[i64], v: &RealVector, p: &SliceParams) -> Result<f64> {
        let r = self.root_of_height(n, l)?;
        let z = self.slice_point(v, p)?;
        Ok(-self.inner_real(&r.point.to_real(), &z)?)
    }

    /// Smallest `-<s_lambda, phi(v)>` over lattice `lambda` with
    /// `(v - lambda)^2 <= radius_sq`.
    pub fn chamber_margin(&self, v: &RealVector, p: &SliceParams, radius_sq: f64) -> Result<f64> {
        let search = ShortVectorSearch::new(self.lattice)?;
        let mut best = f64::INFINITY;
        search.visit(&v.coords, radius_sq, u64::MAX, |x| {
            let c1 = p.c_n(1);
            best = best.min(p.h / 2.0 * (c1 * c1 + x.dist_sq));
        })?;
        if best <= 0.0 {
            return Err(Error::Integrity(format!("nonpositive chamber margin {best}")));
        }
        Ok(best)
    }

    /// Roots `(l; n, *)` with `(center - l/n)^2 <= radius_sq`.
    pub fn roots_of_height_near(
        &self,
        n: i64,
        center: &RealVector,
        radius_sq: f64,
        budget: u64,
    ) -> Result<Vec<Root>> {
        if n < 1 {
            return usage("height must be positive");
        }
        let search = ShortVectorSearch::new(self.lattice)?;
        let nf = n as f64;
        let scaled: Vec<f64> = center.coords.iter().map(|c| c * nf).collect();
        let mut ls = Vec::new();
        search.visit(&scaled, radius_sq * nf * nf, budget, |x| {
            if (x.norm - 2).rem_euclid(2 * n) == 0 {
                ls.push(x.coords.to_vec());
            }
        })?;
        ls.sort();
        ls.iter().map(|l| self.root_of_height(n, l)).collect()
    }
}

/// Height `-<x, rho>`, the `m` coordinate.
pub fn height<T: Copy>(x: &LorentzPoint<T>) -> T {
    x.m
}

/// Content of the Euclidean part, used by tests of translation integrality.
pub fn leech_content(x: &IntegralPoint) -> i64 {
    x.leech.iter().fold(0, |g, &c| gcd(g, c))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::lattice::{e8, leech};
    use rand::{Rng, SeedableRng};
    use rand_chacha::ChaCha8Rng;

    fn random_point(rng: &mut ChaCha8Rng, m: usize) -> IntegralPoint {
        IntegralPoint {
            leech: (0..m).map(|_| rng.gen_range(-3..=3)).collect(),
            m: rng.gen_range(-4..=4),
            n: rng.gen_range(-4..=4),
        }
    }

    #[test]
    fn heights() {
        let g = Lorentz::new(leech()).unwrap();
        assert_eq!(height(&g.rho()), 0);
        let x = IntegralPoint { leech: vec![0; 24], m: 5, n: -2 };
        assert_eq!(height(&x), 5);
        let mut rng = ChaCha8Rng::seed_from_u64(1);
        for _ in 0..20 {
            let l: Vec<i64> = (0..24).map(|_| rng.gen_range(-2..=2)).collect();
            let r = g.leech_root(&leech().vector(l).unwrap()).unwrap();
            assert_eq!(r.height(), 1);
            assert_eq!(g.inner(r.point(), &g.rho()).unwrap(), -1);
        }
    }

    #[test]
    fn leech_roots_have_norm_two() {
        let g = Lorentz::new(leech()).unwrap();
        let s0 = g.leech_root(&leech().zero()).unwrap();
        assert_eq!(s0.point().n, -1);
        let v = leech().basis_vector(0);
        assert_eq!(leech().norm(&v).unwrap(), 4);
        let s = g.leech_root(&v).unwrap();
        assert_eq!(s.point().n, 1);
        assert_eq!(g.norm(s.point()).unwrap(), 2);
    }

    #[test]
    fn translations_are_isometries_fixing_rho() {
        let g = Lorentz::new(e8()).unwrap();
        let mut rng = ChaCha8Rng::seed_from_u64(7);
        for _ in 0..200 {
            let x = random_point(&mut rng, 8);
            let y = random_point(&mut rng, 8);
            let v: Vec<i64> = (0..8).map(|_| rng.gen_range(-2..=2)).collect();
            let w: Vec<i64> = (0..8).map(|_| rng.gen_range(-2..=2)).collect();
            let tx = g.translate(&v, &x).unwrap();
            let ty = g.translate(&v, &y).unwrap();
            assert_eq!(g.inner(&tx, &ty).unwrap(), g.inner(&x, &y).unwrap());
            assert_eq!(height(&tx), height(&x));
            assert_eq!(g.translate(&v, &g.rho()).unwrap(), g.rho());
            let vw: Vec<i64> = v.iter().zip(&w).map(|(a, b)| a + b).collect();
            assert_eq!(g.translate(&v, &g.translate(&w, &x).unwrap()).unwrap(), g.translate(&vw, &x).unwrap());
        }
    }

    #[test]
    fn slice_points() {
        let g = Lorentz::new(leech()).unwrap();
        let p = SliceParams::new(1.0, 0.5).unwrap();
        let zero = leech().real_vector(vec![0.0; 24]).unwrap();
        let z = g.slice_point(&zero, &p).unwrap();
        assert_eq!(z.m, 0.5);
        assert_eq!(z.n, 1.0);
        let mut rng = ChaCha8Rng::seed_from_u64(3);
        for _ in 0..50 {
            let v = leech().real_vector((0..24).map(|_| rng.gen_range(-1.0..1.0)).collect()).unwrap();
            let z = g.slice_point(&v, &p).unwrap();
            assert!((g.inner_real(&z, &z).unwrap() + 1.0).abs() < 1e-9);
            let back = g.slice_inverse(&z).unwrap();
            assert!(back.coords.iter().zip(&v.coords).all(|(a, b)| (a - b).abs() < 1e-12));
            let mu: Vec<i64> = (0..24).map(|_| rng.gen_range(-1..=1)).collect();
            let shifted = leech()
                .real_vector(v.coords.iter().zip(&mu).map(|(a, &b)| a + b as f64).collect())
                .unwrap();
            let lhs = g.slice_point(&shifted, &p).unwrap();
            let mu_f: Vec<f64> = mu.iter().map(|&c| c as f64).collect();
            let rhs = g.translate_real(&mu_f, &z).unwrap();
            assert!((lhs.n - rhs.n).abs() < 1e-9 * lhs.n.abs().max(1.0));
        }
    }

    #[test]
    fn slice_params_validation() {
        assert!(SliceParams::new(1.0, 0.8).is_err());
        assert!(SliceParams::new(-1.0, 0.1).is_err());
        let p = SliceParams::new(1.0, 0.5).unwrap();
        assert!((p.c_n(1) - 2f64.sqrt()).abs() < 1e-15);
        let mut prev = 0.0;
        for n in 1..10_000 {
            let c = p.c_n(n);
            assert!(c > prev && c >= p.kappa() - 1e-12);
            prev = c;
        }
        assert!((p.c_n(1 << 30) - 2.0).abs() < 1e-9);
    }

    #[test]
    fn pairing_closed_form_matches_inner_product() {
        let g = Lorentz::new(leech()).unwrap();
        let p = SliceParams::new(1.0, 0.5).unwrap();
        let zero = leech().real_vector(vec![0.0; 24]).unwrap();
        assert!((g.root_pairing(1, &[0; 24], &zero.coords, &p).unwrap() - 0.5).abs() < 1e-15);
        assert!((g.root_pairing_direct(1, &[0; 24], &zero, &p).unwrap() - 0.5).abs() < 1e-15);
        let mut rng = ChaCha8Rng::seed_from_u64(11);
        let mut checked = 0;
        while checked < 1000 {
            let n = rng.gen_range(1..=6);
            let l: Vec<i64> = (0..24).map(|_| rng.gen_range(-2..=2)).collect();
            let l2 = leech().inner_coords(&l, &l);
            if (l2 - 2).rem_euclid(2 * n) != 0 {
                assert!(g.root_pairing(n, &l, &zero.coords, &p).is_err());
                continue;
            }
            let v = leech().real_vector((0..24).map(|_| rng.gen_range(-0.5..0.5)).collect()).unwrap();
            let a = g.root_pairing(n, &l, &v.coords, &p).unwrap();
            let b = g.root_pairing_direct(n, &l, &v, &p).unwrap();
            assert!(a > 0.0);
            assert!((a - b).abs() <= 1e-12 * a.abs().max(b.abs()) * 10.0, "{a} vs {b}");
            checked += 1;
        }
    }

    #[test]
    fn chamber_margin_at_origin() {
        let g = Lorentz::new(leech()).unwrap();
        let p = SliceParams::new(1.0, 0.5).unwrap();
        let zero = leech().real_vector(vec![0.0; 24]).unwrap();
        assert!((g.chamber_margin(&zero, &p, 4.0).unwrap() - 0.5).abs() < 1e-15);
    }

    #[test]
    fn roots_of_height_one_near_origin() {
        let g = Lorentz::new(leech()).unwrap();
        let zero = leech().real_vector(vec![0.0; 24]).unwrap();
        let roots = g.roots_of_height_near(1, &zero, 4.0, u64::MAX).unwrap();
        assert_eq!(roots.len(), 196_561);
        assert!(roots.iter().all(|r| g.norm(r.point()).unwrap() == 2));
    }
}
