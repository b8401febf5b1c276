//! Integral lattices given by a Gram matrix, named constructions, vector
//! content, short-vector search and walks over the cosets `M/nM`.

mod coset;
mod golay;
mod named;
mod reduce;
mod short;

pub mod cache;

pub use coset::{coset_enumerate, CosetWalk, CosetState, DEFAULT_COSET_BUDGET};
pub use golay::GolayCode;
pub use named::{construct_e8, construct_ii11, construct_leech, e8, ii11, leech, leech_with_frame, LeechFrame};
pub use short::{short_vectors, ShortVectorSearch, ShortVisit};

use std::fmt;

use nalgebra::{DMatrix, SymmetricEigen};
use serde::{Deserialize, Serialize};
use sha2::{Digest, Sha256};

use crate::error::{usage, Error, Result};

/// Stable identity of a lattice: the SHA-256 of its rank and Gram entries.
#[derive(Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct LatticeId(#[serde(with = "hex_bytes")] pub [u8; 32]);

mod hex_bytes {
    use serde::{Deserialize, Deserializer, Serializer};

    pub fn serialize<S: Serializer>(b: &[u8; 32], s: S) -> Result<S::Ok, S::Error> {
        s.serialize_str(&hex::encode(b))
    }

    pub fn deserialize<'de, D: Deserializer<'de>>(d: D) -> Result<[u8; 32], D::Error> {
        let s = String::deserialize(d)?;
        let v = hex::decode(&s).map_err(serde::de::Error::custom)?;
        v.try_into()
            .map_err(|_| serde::de::Error::custom("lattice id must be 32 bytes"))
    }
}

impl LatticeId {
    pub fn of_gram(rank: usize, gram: &[i64]) -> Self {
        let mut h = Sha256::new();
        h.update((rank as u64).to_le_bytes());
        for g in gram {
            h.update(g.to_le_bytes());
        }
        LatticeId(h.finalize().into())
    }

    pub fn hex(&self) -> String {
        hex::encode(self.0)
    }
}

impl fmt::Debug for LatticeId {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "LatticeId({})", &self.hex()[..12])
    }
}

/// Exact invariants recorded when a lattice is built.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "camelCase")]
pub struct Certificates {
    pub det: i128,
    pub even: bool,
    pub signature: (usize, usize),
    /// Minimal nonzero norm, positive-definite lattices only.
    pub min_norm: Option<i64>,
    /// `(norm, count)` pairs for every norm up to the certified radius.
    pub shell_counts: Vec<(i64, u64)>,
}

/// A nonsingular integral lattice `Z^m` with the bilinear form `x^T G y`.
#[derive(Debug, Clone)]
pub struct GramLattice {
    name: String,
    rank: usize,
    gram: Vec<i64>,
    id: LatticeId,
    certificates: Certificates,
}

#[derive(Debug, Clone, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct LatticeVector {
    pub lattice: LatticeId,
    pub coords: Vec<i64>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RealVector {
    pub lattice: LatticeId,
    pub coords: Vec<f64>,
}

/// Largest `c` with `v` in `c M`; the zero vector is divisible by everything.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "camelCase")]
pub enum Content {
    Value(u64),
    All,
}

impl Content {
    pub fn divisible_by(self, n: u64) -> bool {
        match self {
            Content::All => true,
            Content::Value(c) => c % n == 0,
        }
    }

    /// p-adic valuation, `None` for the zero vector.
    pub fn valuation(self, p: u64) -> Option<u32> {
        match self {
            Content::All => None,
            Content::Value(c) => Some(crate::arith::valuation(c, p)),
        }
    }
}

/// Serializable descriptor of a lattice.
#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(rename_all = "camelCase")]
pub struct LatticeDescriptor {
    pub name: String,
    pub rank: usize,
    pub gram: Vec<Vec<i64>>,
    pub id: String,
    pub certificates: Certificates,
}

impl GramLattice {
    /// Builds a lattice from a symmetric integer Gram matrix and checks the
    /// declared signature against the computed inertia.
    pub fn new(name: &str, gram: Vec<Vec<i64>>, signature_hint: (usize, usize)) -> Result<Self> {
        let rank = gram.len();
        if gram.iter().any(|row| row.len() != rank) {
            return usage("Gram matrix must be square");
        }
        let flat: Vec<i64> = gram.iter().flatten().copied().collect();
        Self::from_flat(name, rank, flat, signature_hint)
    }

    pub(crate) fn from_flat(
        name: &str,
        rank: usize,
        gram: Vec<i64>,
        signature_hint: (usize, usize),
    ) -> Result<Self> {
        for i in 0..rank {
            for j in 0..i {
                if gram[i * rank + j] != gram[j * rank + i] {
                    return usage(format!("Gram matrix is not symmetric at ({i}, {j})"));
                }
            }
        }
        let det = bareiss_det(rank, &gram)?;
        if det == 0 {
            return usage("Gram matrix is singular");
        }
        let signature = inertia(rank, &gram);
        if signature != signature_hint {
            return usage(format!(
                "declared signature {signature_hint:?} but the Gram matrix has {signature:?}"
            ));
        }
        let even = (0..rank).all(|i| gram[i * rank + i] % 2 == 0);
        let id = LatticeId::of_gram(rank, &gram);
        Ok(Self {
            name: name.to_string(),
            rank,
            gram,
            id,
            certificates: Certificates {
                det,
                even,
                signature,
                min_norm: None,
                shell_counts: Vec::new(),
            },
        })
    }

    pub fn name(&self) -> &str {
        &self.name
    }

    pub fn rank(&self) -> usize {
        self.rank
    }

    pub fn id(&self) -> LatticeId {
        self.id
    }

    pub fn gram(&self, i: usize, j: usize) -> i64 {
        self.gram[i * self.rank + j]
    }

    pub fn gram_flat(&self) -> &[i64] {
        &self.gram
    }

    pub fn gram_rows(&self) -> Vec<Vec<i64>> {
        self.gram.chunks(self.rank.max(1)).take(self.rank).map(|r| r.to_vec()).collect()
    }

    pub fn certificates(&self) -> &Certificates {
        &self.certificates
    }

    pub fn det(&self) -> i128 {
        self.certificates.det
    }

    pub fn is_even(&self) -> bool {
        self.certificates.even
    }

    pub fn is_unimodular(&self) -> bool {
        self.certificates.det.abs() == 1
    }

    pub fn signature(&self) -> (usize, usize) {
        self.certificates.signature
    }

    pub fn is_positive_definite(&self) -> bool {
        self.certificates.signature.1 == 0
    }

    pub fn descriptor(&self) -> LatticeDescriptor {
        LatticeDescriptor {
            name: self.name.clone(),
            rank: self.rank,
            gram: self.gram_rows(),
            id: self.id.hex(),
            certificates: self.certificates.clone(),
        }
    }

    pub fn vector(&self, coords: Vec<i64>) -> Result<LatticeVector> {
        if coords.len() != self.rank {
            return usage(format!(
                "vector has {} coordinates, lattice {} has rank {}",
                coords.len(),
                self.name,
                self.rank
            ));
        }
        Ok(LatticeVector { lattice: self.id, coords })
    }

    pub fn real_vector(&self, coords: Vec<f64>) -> Result<RealVector> {
        if coords.len() != self.rank {
            return usage(format!(
                "vector has {} coordinates, lattice {} has rank {}",
                coords.len(),
                self.name,
                self.rank
            ));
        }
        if coords.iter().any(|c| !c.is_finite()) {
            return usage("real vector has non-finite entries");
        }
        Ok(RealVector { lattice: self.id, coords })
    }

    pub fn zero(&self) -> LatticeVector {
        LatticeVector { lattice: self.id, coords: vec![0; self.rank] }
    }

    pub fn basis_vector(&self, i: usize) -> LatticeVector {
        let mut coords = vec![0; self.rank];
        coords[i] = 1;
        LatticeVector { lattice: self.id, coords }
    }

    fn check(&self, id: LatticeId) -> Result<()> {
        if id != self.id {
            return usage(format!("vector does not belong to lattice {}", self.name));
        }
        Ok(())
    }

    /// `x^T G y` for integer coordinate tuples.
    pub fn inner_coords(&self, x: &[i64], y: &[i64]) -> i64 {
        let m = self.rank;
        let mut acc = 0i64;
        for i in 0..m {
            if x[i] == 0 {
                continue;
            }
            let row = &self.gram[i * m..(i + 1) * m];
            let gy: i64 = row.iter().zip(y).map(|(g, b)| g * b).sum();
            acc += x[i] * gy;
        }
        acc
    }

    pub fn inner_real_coords(&self, x: &[f64], y: &[f64]) -> f64 {
        let m = self.rank;
        let mut acc = 0.0;
        for i in 0..m {
            let row = &self.gram[i * m..(i + 1) * m];
            let gy: f64 = row.iter().zip(y).map(|(&g, b)| g as f64 * b).sum();
            acc += x[i] * gy;
        }
        acc
    }

    pub fn inner(&self, x: &LatticeVector, y: &LatticeVector) -> Result<i64> {
        self.check(x.lattice)?;
        self.check(y.lattice)?;
        Ok(self.inner_coords(&x.coords, &y.coords))
    }

    pub fn norm(&self, x: &LatticeVector) -> Result<i64> {
        self.inner(x, x)
    }

    pub fn inner_real(&self, x: &RealVector, y: &RealVector) -> Result<f64> {
        self.check(x.lattice)?;
        self.check(y.lattice)?;
        Ok(self.inner_real_coords(&x.coords, &y.coords))
    }

    pub fn inner_mixed(&self, x: &LatticeVector, y: &RealVector) -> Result<f64> {
        self.check(x.lattice)?;
        self.check(y.lattice)?;
        let xr: Vec<f64> = x.coords.iter().map(|&c| c as f64).collect();
        Ok(self.inner_real_coords(&xr, &y.coords))
    }

    /// `G x`, used for incremental inner products.
    pub fn apply(&self, x: &[i64]) -> Vec<i64> {
        let m = self.rank;
        (0..m)
            .map(|i| self.gram[i * m..(i + 1) * m].iter().zip(x).map(|(g, b)| g * b).sum())
            .collect()
    }

    /// Orthogonal direct sum with block-diagonal Gram matrix.
    pub fn direct_sum(&self, other: &GramLattice) -> Result<GramLattice> {
        let (m1, m2) = (self.rank, other.rank);
        let m = m1 + m2;
        let mut gram = vec![0i64; m * m];
        for i in 0..m1 {
            for j in 0..m1 {
                gram[i * m + j] = self.gram(i, j);
            }
        }
        for i in 0..m2 {
            for j in 0..m2 {
                gram[(m1 + i) * m + m1 + j] = other.gram(i, j);
            }
        }
        let (p1, q1) = self.signature();
        let (p2, q2) = other.signature();
        let name = if m2 == 0 {
            self.name.clone()
        } else if m1 == 0 {
            other.name.clone()
        } else {
            format!("{}+{}", self.name, other.name)
        };
        let mut out = GramLattice::from_flat(&name, m, gram, (p1 + p2, q1 + q2))?;
        if out.certificates.det != self.det() * other.det() {
            return Err(Error::Integrity("determinant of direct sum is not multiplicative".into()));
        }
        if out.is_positive_definite()
            && !self.certificates.shell_counts.is_empty()
            && !other.certificates.shell_counts.is_empty()
        {
            out.certificates.min_norm = match (self.certificates.min_norm, other.certificates.min_norm) {
                (Some(a), Some(b)) => Some(a.min(b)),
                (a, b) => a.or(b),
            };
        }
        Ok(out)
    }

    /// The same lattice in the basis given by the rows of a unimodular `u`.
    pub fn change_basis(&self, name: &str, u: &[Vec<i64>]) -> Result<GramLattice> {
        let m = self.rank;
        if u.len() != m || u.iter().any(|r| r.len() != m) {
            return usage("change of basis must be a square matrix of the lattice rank");
        }
        let flat_u: Vec<i64> = u.iter().flatten().copied().collect();
        if bareiss_det(m, &flat_u)?.abs() != 1 {
            return usage("change of basis is not unimodular");
        }
        let gu: Vec<Vec<i64>> = u.iter().map(|r| self.apply(r)).collect();
        let mut gram = vec![0i64; m * m];
        for i in 0..m {
            for j in 0..m {
                gram[i * m + j] = u[i].iter().zip(&gu[j]).map(|(a, b)| a * b).sum();
            }
        }
        let mut out = GramLattice::from_flat(name, m, gram, self.signature())?;
        out.certificates.min_norm = self.certificates.min_norm;
        out.certificates.shell_counts = self.certificates.shell_counts.clone();
        Ok(out)
    }

    /// Records shell counts up to `radius_sq` by exhaustive enumeration.
    pub(crate) fn certify_shells(&mut self, radius_sq: i64) -> Result<()> {
        if !self.is_positive_definite() {
            return Ok(());
        }
        let zero = vec![0.0; self.rank];
        let mut counts = std::collections::BTreeMap::<i64, u64>::new();
        ShortVectorSearch::new(self)?.visit(&zero, radius_sq as f64, u64::MAX, |v| {
            *counts.entry(v.norm).or_default() += 1;
        })?;
        let mut shells = Vec::new();
        for norm in (0..=radius_sq).step_by(if self.is_even() { 2 } else { 1 }) {
            shells.push((norm, counts.get(&norm).copied().unwrap_or(0)));
        }
        self.certificates.min_norm = shells.iter().find(|&&(n, c)| n > 0 && c > 0).map(|&(n, _)| n);
        self.certificates.shell_counts = shells;
        Ok(())
    }

    pub fn shell_count(&self, norm: i64) -> Option<u64> {
        self.certificates
            .shell_counts
            .iter()
            .find(|&&(n, _)| n == norm)
            .map(|&(_, c)| c)
    }
}

/// gcd of the coordinates, `All` for the zero vector.
pub fn content(v: &LatticeVector) -> Content {
    content_of(&v.coords)
}

pub fn content_of(coords: &[i64]) -> Content {
    let g = coords.iter().fold(0i64, |g, &c| crate::arith::gcd(g, c));
    if g == 0 {
        Content::All
    } else {
        Content::Value(g as u64)
    }
}

/// Exact determinant by fraction-free Gaussian elimination.
pub fn bareiss_det(m: usize, a: &[i64]) -> Result<i128> {
    if m == 0 {
        return Ok(1);
    }
    let mut w: Vec<i128> = a.iter().map(|&x| x as i128).collect();
    let mut sign = 1i128;
    let mut prev = 1i128;
    for k in 0..m {
        if w[k * m + k] == 0 {
            let Some(r) = (k + 1..m).find(|&r| w[r * m + k] != 0) else {
                return Ok(0);
            };
            for c in 0..m {
                w.swap(k * m + c, r * m + c);
            }
            sign = -sign;
        }
        let pivot = w[k * m + k];
        for i in k + 1..m {
            for j in k + 1..m {
                let v = w[i * m + j]
                    .checked_mul(pivot)
                    .and_then(|x| x.checked_sub(w[i * m + k].checked_mul(w[k * m + j])?))
                    .ok_or_else(|| Error::Integrity("determinant overflow".into()))?;
                w[i * m + j] = v / prev;
            }
            w[i * m + k] = 0;
        }
        prev = pivot;
    }
    Ok(sign * w[m * m - 1])
}

/// Counts of positive and negative eigenvalues.
pub fn inertia(m: usize, gram: &[i64]) -> (usize, usize) {
    if m == 0 {
        return (0, 0);
    }
    let g = DMatrix::from_fn(m, m, |i, j| gram[i * m + j] as f64);
    let eig = SymmetricEigen::new(g);
    let pos = eig.eigenvalues.iter().filter(|&&e| e > 0.0).count();
    let neg = eig.eigenvalues.iter().filter(|&&e| e < 0.0).count();
    (pos, neg)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn ii11_pairing_convention() {
        let h = ii11();
        let e = h.basis_vector(0);
        let f = h.basis_vector(1);
        assert_eq!(h.inner(&e, &f).unwrap(), -1);
        // norm of (m, n) is -2mn
        let v = h.vector(vec![3, 5]).unwrap();
        assert_eq!(h.norm(&v).unwrap(), -30);
        assert_eq!(h.inner(&h.zero(), &v).unwrap(), 0);
    }

    #[test]
    fn e8_basis_vector_has_norm_two() {
        let k = e8();
        for i in 0..8 {
            assert_eq!(k.norm(&k.basis_vector(i)).unwrap(), 2);
        }
    }

    #[test]
    fn mismatched_lattices_are_rejected() {
        let a = e8();
        let b = ii11();
        assert!(matches!(a.inner(&a.zero(), &b.zero()), Err(Error::Usage(_))));
    }

    #[test]
    fn content_cases() {
        let k = e8();
        assert_eq!(content(&k.basis_vector(3)), Content::Value(1));
        let v = k.vector(vec![3, -6, 0, 9, 0, 0, 0, 3]).unwrap();
        assert_eq!(content(&v), Content::Value(3));
        assert_eq!(content(&k.zero()), Content::All);
        assert!(Content::All.divisible_by(17));
    }

    #[test]
    fn direct_sum_rank_det_signature() {
        let s = e8().direct_sum(ii11()).unwrap();
        assert_eq!(s.rank(), 10);
        assert_eq!(s.det(), -1);
        assert_eq!(s.signature(), (9, 1));
        let l = leech().direct_sum(ii11()).unwrap();
        assert_eq!(l.rank(), 26);
        assert_eq!(l.signature(), (25, 1));
        let empty = GramLattice::new("0", vec![], (0, 0)).unwrap();
        let same = e8().direct_sum(&empty).unwrap();
        assert_eq!(same.gram_flat(), e8().gram_flat());
    }

    #[test]
    fn bad_gram_matrices() {
        assert!(GramLattice::new("x", vec![vec![2, 1], vec![0, 2]], (2, 0)).is_err());
        assert!(GramLattice::new("x", vec![vec![2, 2], vec![2, 2]], (1, 0)).is_err());
        assert!(GramLattice::new("x", vec![vec![2, 1], vec![1, 2]], (1, 1)).is_err());
    }

    #[test]
    fn bareiss_small() {
        assert_eq!(bareiss_det(2, &[0, -1, -1, 0]).unwrap(), -1);
        assert_eq!(bareiss_det(3, &[2, 0, 1, 0, 3, 0, 1, 0, 4]).unwrap(), 21);
        assert_eq!(bareiss_det(2, &[1, 2, 2, 4]).unwrap(), 0);
    }
}
