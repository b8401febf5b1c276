//! Named lattices: the hyperbolic plane, E8 and the Leech lattice.

use std::sync::OnceLock;

use super::golay::GolayCode;
use super::reduce::{echelon_basis, lll_rows};
use super::GramLattice;
use crate::error::{Error, Result};

pub fn construct_ii11() -> Result<GramLattice> {
    let lat = GramLattice::new("II11", vec![vec![0, -1], vec![-1, 0]], (1, 1))?;
    check(lat.is_even() && lat.det() == -1, "II11 must be even with determinant -1")?;
    Ok(lat)
}

/// E8 from its Cartan matrix (a chain of seven nodes with a branch at the third).
pub fn construct_e8() -> Result<GramLattice> {
    let edges = [(0, 2), (2, 3), (3, 4), (4, 5), (5, 6), (6, 7), (1, 3)];
    let mut g = vec![vec![0i64; 8]; 8];
    for (i, row) in g.iter_mut().enumerate() {
        row[i] = 2;
    }
    for &(a, b) in &edges {
        g[a][b] = -1;
        g[b][a] = -1;
    }
    let mut lat = GramLattice::new("E8", g, (8, 0))?;
    lat.certify_shells(4)?;
    check(lat.is_even() && lat.det() == 1, "E8 must be even unimodular")?;
    check(lat.shell_count(2) == Some(240), "E8 must have 240 roots")?;
    check(lat.shell_count(4) == Some(2160), "E8 must have 2160 vectors of norm 4")?;
    Ok(lat)
}

/// Coordinates of the Leech lattice inside `Z^24` with inner product `x . y / 8`.
#[derive(Debug, Clone)]
pub struct LeechFrame {
    code: GolayCode,
    /// Basis rows in ambient coordinates.
    basis: Vec<[i64; 24]>,
}

impl LeechFrame {
    pub fn code(&self) -> &GolayCode {
        &self.code
    }

    pub fn basis(&self) -> &[[i64; 24]] {
        &self.basis
    }

    /// Ambient coordinates of an integer combination of the basis.
    pub fn to_ambient(&self, coords: &[i64]) -> [i64; 24] {
        let mut x = [0i64; 24];
        for (c, row) in coords.iter().zip(&self.basis) {
            for k in 0..24 {
                x[k] += c * row[k];
            }
        }
        x
    }

    pub fn to_ambient_real(&self, coords: &[f64]) -> [f64; 24] {
        let mut y = [0.0f64; 24];
        for (c, row) in coords.iter().zip(&self.basis) {
            for k in 0..24 {
                y[k] += c * row[k] as f64;
            }
        }
        y
    }

    /// Membership test for the ambient description.
    pub fn contains(&self, x: &[i64; 24]) -> bool {
        let sum: i64 = x.iter().sum();
        if x.iter().all(|v| v.rem_euclid(2) == 0) {
            let mask = mask_where(x, |v| v.rem_euclid(4) == 2);
            self.code.contains(mask) && sum.rem_euclid(8) == 0
        } else if x.iter().all(|v| v.rem_euclid(2) == 1) {
            let mask = mask_where(x, |v| v.rem_euclid(4) == 3);
            self.code.contains(mask) && sum.rem_euclid(8) == 4
        } else {
            false
        }
    }
}

fn mask_where(x: &[i64; 24], f: impl Fn(i64) -> bool) -> u32 {
    x.iter()
        .enumerate()
        .filter(|(_, &v)| f(v))
        .fold(0u32, |m, (i, _)| m | 1 << i)
}

fn leech_generators(code: &GolayCode) -> Vec<Vec<i64>> {
    let mut gens = Vec::new();
    for &g in code.generators() {
        gens.push((0..24).map(|i| if g >> i & 1 == 1 { 2 } else { 0 }).collect());
    }
    for j in 1..24 {
        for sign in [1, -1] {
            let mut v = vec![0i64; 24];
            v[0] = 4;
            v[j] = 4 * sign;
            gens.push(v);
        }
    }
    let mut odd = vec![1i64; 24];
    odd[0] = -3;
    gens.push(odd);
    gens
}

/// Leech lattice with a reduced basis and its ambient frame. Certificates:
/// even, determinant 1, no roots, 196560 minimal vectors.
pub fn construct_leech() -> Result<(GramLattice, LeechFrame)> {
    let code = GolayCode::new();
    let wd = code.weight_distribution();
    check(
        wd[0] == 1 && wd[8] == 759 && wd[12] == 2576 && wd[16] == 759 && wd[24] == 1,
        "Golay code weight distribution",
    )?;
    let mut rows = echelon_basis(leech_generators(&code));
    check(rows.len() == 24, "Leech generators must span rank 24")?;
    lll_rows(&mut rows, 0.99);
    rows.sort_by_key(|r| (r.iter().map(|x| x * x).sum::<i64>(), r.clone()));
    let basis: Vec<[i64; 24]> = rows.iter().map(|r| r.as_slice().try_into().unwrap()).collect();
    let frame = LeechFrame { code, basis };
    for b in &frame.basis {
        check(frame.contains(b), "Leech basis vector outside the ambient description")?;
    }
    let mut gram = vec![0i64; 24 * 24];
    for i in 0..24 {
        for j in 0..24 {
            let d: i64 = frame.basis[i].iter().zip(&frame.basis[j]).map(|(a, b)| a * b).sum();
            check(d % 8 == 0, "Leech inner products must be integral")?;
            gram[i * 24 + j] = d / 8;
        }
    }
    let mut lat = GramLattice::from_flat("Leech", 24, gram, (24, 0))?;
    check(lat.is_even(), "Leech must be even")?;
    check(lat.det() == 1, "Leech must be unimodular")?;
    lat.certify_shells(4)?;
    check(lat.shell_count(2) == Some(0), "Leech must have no roots")?;
    check(lat.shell_count(4) == Some(196_560), "Leech must have 196560 minimal vectors")?;
    Ok((lat, frame))
}

fn check(ok: bool, what: &str) -> Result<()> {
    if ok {
        Ok(())
    } else {
        Err(Error::Integrity(what.to_string()))
    }
}

static II11: OnceLock<GramLattice> = OnceLock::new();
static E8: OnceLock<GramLattice> = OnceLock::new();
static LEECH: OnceLock<(GramLattice, LeechFrame)> = OnceLock::new();

/// Shared certified instances; construction failures are fatal.
pub fn ii11() -> &'static GramLattice {
    II11.get_or_init(|| construct_ii11().expect("II11 construction failed its self-check"))
}

pub fn e8() -> &'static GramLattice {
    E8.get_or_init(|| construct_e8().expect("E8 construction failed its self-check"))
}

pub fn leech() -> &'static GramLattice {
    &leech_with_frame().0
}

pub fn leech_with_frame() -> &'static (GramLattice, LeechFrame) {
    LEECH.get_or_init(|| construct_leech().expect("Leech construction failed its self-check"))
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn e8_certificates() {
        let k = e8();
        assert_eq!(k.det(), 1);
        assert!(k.is_even());
        assert_eq!(k.certificates().min_norm, Some(2));
    }

    #[test]
    fn leech_certificates() {
        let (k, frame) = leech_with_frame();
        let c = k.certificates();
        assert!(c.even);
        assert_eq!(c.det, 1);
        assert_eq!(c.min_norm, Some(4));
        assert_eq!(k.shell_count(4), Some(196_560));
        for i in 0..24 {
            let x = frame.to_ambient(&k.basis_vector(i).coords);
            let n: i64 = x.iter().map(|a| a * a).sum();
            assert_eq!(n, 8 * k.gram(i, i));
        }
    }

    #[test]
    fn ambient_membership() {
        let (_, frame) = leech_with_frame();
        let mut v = [0i64; 24];
        v[0] = 8;
        assert!(frame.contains(&v));
        v[0] = 4;
        assert!(!frame.contains(&v));
        v[5] = -4;
        assert!(frame.contains(&v));
    }
}
