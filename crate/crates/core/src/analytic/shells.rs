//! Exponential sums over Leech shells, `T(N, w) = sum_{lambda^2 = N} e(<lambda, w>)`,
//! computed from the Golay-code description of the lattice instead of by
//! enumerating vectors.
//!
//! In ambient coordinates `x in Z^24` with `lambda^2 = x.x/8`, Leech vectors
//! come in two types. Even type: `x = 2z` with `z = c mod 2` for a codeword
//! `c` and `sum z = 0 mod 4`. Odd type: every `x_i` odd, `x_i = 3 mod 4`
//! exactly on a codeword and `sum x = 4 mod 8`. The congruence on the sum is
//! a two-term character sum, so for a fixed codeword the shell generating
//! function factors over coordinates; a depth-first walk over codeword
//! prefixes shares the partial products between codewords.

use num_complex::Complex64;
use rayon::prelude::*;

use super::special::e_phase;
use crate::lattice::LeechFrame;

type Poly = Vec<Complex64>;

/// Sparse one-coordinate factor: `(degree, coefficient)` pairs.
type Factor = Vec<(usize, Complex64)>;

pub struct ShellEngine<'a> {
    frame: &'a LeechFrame,
    order: [usize; 24],
    /// `levels[d]`: sorted prefixes of length `d`, bit `j` = coordinate `order[j]`.
    levels: Vec<Vec<u32>>,
}

const SPLIT_DEPTH: usize = 6;

fn prefix_levels(words: &[u32], order: &[usize; 24]) -> Vec<Vec<u32>> {
    let permuted: Vec<u32> = words
        .iter()
        .map(|&w| order.iter().enumerate().fold(0u32, |acc, (j, &i)| acc | ((w >> i) & 1) << j))
        .collect();
    (0..=24)
        .map(|d| {
            let mask = ((1u64 << d) - 1) as u32;
            let mut v: Vec<u32> = permuted.iter().map(|&w| w & mask).collect();
            v.sort_unstable();
            v.dedup();
            v
        })
        .collect()
}

impl<'a> ShellEngine<'a> {
    /// Picks the coordinate order greedily so that the prefix tree stays small.
    pub fn new(frame: &'a LeechFrame) -> Self {
        let words = frame.code().words();
        let mut order = [0usize; 24];
        let mut used = 0u32;
        for d in 0..24 {
            let mut best = (usize::MAX, 0);
            for i in 0..24 {
                if used >> i & 1 == 1 {
                    continue;
                }
                let mask = used | 1 << i;
                let mut prefixes: Vec<u32> = words.iter().map(|w| w & mask).collect();
                prefixes.sort_unstable();
                prefixes.dedup();
                if prefixes.len() < best.0 {
                    best = (prefixes.len(), i);
                }
            }
            order[d] = best.1;
            used |= 1 << best.1;
        }
        let levels = prefix_levels(words, &order);
        Self { frame, order, levels }
    }

    pub fn frame(&self) -> &LeechFrame {
        self.frame
    }

    /// Number of nodes in the prefix tree.
    pub fn node_count(&self) -> usize {
        self.levels.iter().map(Vec::len).sum()
    }

    fn valid(&self, depth: usize, prefix: u32) -> bool {
        self.levels[depth].binary_search(&prefix).is_ok()
    }

    /// `T(N, w)` for `N = 0..=max_norm`, where `y` are the ambient
    /// coordinates of `w` (so `<lambda, w> = x.y/8`).
    pub fn shell_sums(&self, y: &[f64; 24], max_norm: usize) -> Vec<Complex64> {
        let mut out = vec![Complex64::new(0.0, 0.0); max_norm + 1];
        // even type: degree z.z = 2N
        let d0 = 2 * max_norm;
        let even = self.run(d0, |i, b, k| {
            let lim = (d0 as f64).sqrt() as i64 + 1;
            let mut f = Factor::new();
            for z in -lim..=lim {
                let zz = (z * z) as usize;
                if zz > d0 || z.rem_euclid(2) != b as i64 {
                    continue;
                }
                f.push((zz, e_phase(z as f64 * (y[i] + k as f64) / 4.0)));
            }
            f
        }, [0.5, 0.5]);
        for (deg, c) in even.iter().enumerate() {
            if deg % 2 == 0 {
                out[deg / 2] += c;
            }
        }
        // odd type: degree sum (x^2 - 1)/8 = N - 3
        if max_norm >= 3 {
            let d1 = max_norm - 3;
            let odd = self.run(d1, |i, b, k| {
                let lim = ((8 * d1 + 1) as f64).sqrt() as i64 + 1;
                let mut f = Factor::new();
                for x in -lim..=lim {
                    if x.rem_euclid(4) != if b == 1 { 3 } else { 1 } {
                        continue;
                    }
                    let deg = ((x * x - 1) / 8) as usize;
                    if deg > d1 {
                        continue;
                    }
                    f.push((deg, e_phase(x as f64 * (y[i] + k as f64) / 8.0)));
                }
                f
            }, [0.5, -0.5]);
            for (deg, c) in odd.iter().enumerate() {
                out[deg + 3] += c;
            }
        }
        out
    }

    /// Sum over codewords of `sum_k weights[k] prod_i factor(i, c_i, k)`,
    /// truncated at degree `max_deg`.
    fn run<F>(&self, max_deg: usize, factor: F, weights: [f64; 2]) -> Poly
    where
        F: Fn(usize, u32, usize) -> Factor + Sync,
    {
        // tables[depth][bit][k]
        let tables: Vec<[[Factor; 2]; 2]> = (0..24)
            .map(|d| {
                let i = self.order[d];
                [[factor(i, 0, 0), factor(i, 0, 1)], [factor(i, 1, 0), factor(i, 1, 1)]]
            })
            .collect();
        let split = SPLIT_DEPTH.min(24);
        let roots = &self.levels[split];
        let parts: Vec<Poly> = roots
            .par_iter()
            .map(|&prefix| {
                let mut walker = Walker::new(self, &tables, max_deg, weights);
                // product of the first `split` factors
                for k in 0..2 {
                    walker.bufs[0][k].fill(Complex64::new(0.0, 0.0));
                    walker.bufs[0][k][0] = Complex64::new(1.0, 0.0);
                }
                walker.his[0] = 0;
                for d in 0..split {
                    let bit = (prefix >> d & 1) as usize;
                    walker.step(d, bit);
                }
                walker.descend(split, prefix);
                walker.acc
            })
            .collect();
        let mut total = vec![Complex64::new(0.0, 0.0); max_deg + 1];
        for p in parts {
            for (t, v) in total.iter_mut().zip(p) {
                *t += v;
            }
        }
        total
    }
}

struct Walker<'e, 'a> {
    engine: &'e ShellEngine<'a>,
    tables: &'e [[[Factor; 2]; 2]],
    max_deg: usize,
    weights: [f64; 2],
    /// `bufs[d][k]`: product of the first `d` factors for character `k`.
    bufs: Vec<[Poly; 2]>,
    his: Vec<usize>,
    acc: Poly,
}

impl<'e, 'a> Walker<'e, 'a> {
    fn new(engine: &'e ShellEngine<'a>, tables: &'e [[[Factor; 2]; 2]], max_deg: usize, weights: [f64; 2]) -> Self {
        let zero = vec![Complex64::new(0.0, 0.0); max_deg + 1];
        Self {
            engine,
            tables,
            max_deg,
            weights,
            bufs: (0..=24).map(|_| [zero.clone(), zero.clone()]).collect(),
            his: vec![0; 25],
            acc: zero,
        }
    }

    /// `bufs[d+1] = bufs[d] * factor(d, bit)`.
    fn step(&mut self, d: usize, bit: usize) {
        let (lo, hi) = self.bufs.split_at_mut(d + 1);
        let src = &lo[d];
        let dst = &mut hi[0];
        let top = self.his[d];
        let reach = self.tables[d][bit].iter().flatten().map(|t| t.0).max().unwrap_or(0);
        let limit = (top + reach).min(self.max_deg);
        for k in 0..2 {
            let out = &mut dst[k];
            out[..=limit].fill(Complex64::new(0.0, 0.0));
            for &(e, c) in &self.tables[d][bit][k] {
                if e > self.max_deg {
                    continue;
                }
                let end = top.min(self.max_deg - e);
                let (o, s) = (&mut out[e..=e + end], &src[k][..=end]);
                for (a, b) in o.iter_mut().zip(s) {
                    *a += c * b;
                }
            }
        }
        self.his[d + 1] = limit;
    }

    fn descend(&mut self, d: usize, prefix: u32) {
        if d == 24 {
            let top = self.his[24];
            let [w0, w1] = self.weights;
            let (p0, p1) = (&self.bufs[24][0], &self.bufs[24][1]);
            for j in 0..=top {
                self.acc[j] += p0[j] * w0 + p1[j] * w1;
            }
            return;
        }
        for bit in 0..2u32 {
            let next = prefix | bit << d;
            if self.engine.valid(d + 1, next) {
                self.step(d, bit as usize);
                self.descend(d + 1, next);
            }
        }
    }
}

/// Number of Leech vectors of norm `N` for `N = 0..=max_norm`, from
/// `theta = 1 + (65520/691) sum_m (sigma_11(m) - tau(m)) q^m` with
/// `tau` from `Delta = (E4^3 - E6^2)/1728`.
pub fn leech_theta_counts(max_norm: usize) -> Vec<u128> {
    let m = max_norm / 2;
    let sigma = |k: u32, n: usize| -> i128 {
        (1..=n).filter(|d| n % d == 0).map(|d| (d as i128).pow(k)).sum()
    };
    let e4: Vec<i128> = (0..=m).map(|n| if n == 0 { 1 } else { 240 * sigma(3, n) }).collect();
    let e6: Vec<i128> = (0..=m).map(|n| if n == 0 { 1 } else { -504 * sigma(5, n) }).collect();
    let mul = |a: &[i128], b: &[i128]| -> Vec<i128> {
        (0..=m).map(|n| (0..=n).map(|i| a[i] * b[n - i]).sum()).collect()
    };
    let e4_3 = mul(&mul(&e4, &e4), &e4);
    let e6_2 = mul(&e6, &e6);
    let mut out = vec![0u128; max_norm + 1];
    out[0] = 1;
    for n in 1..=m {
        let diff = e4_3[n] - e6_2[n];
        assert_eq!(diff % 1728, 0, "Delta has integral coefficients");
        let tau = diff / 1728;
        let num = 65520 * (sigma(11, n) - tau);
        assert_eq!(num % 691, 0, "theta coefficients are integral");
        out[2 * n] = (num / 691) as u128;
    }
    out
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::lattice::{leech, leech_with_frame, short_vectors};
    use rand::{Rng, SeedableRng};
    use rand_chacha::ChaCha8Rng;

    #[test]
    fn theta_counts_match_known_values() {
        let c = leech_theta_counts(8);
        assert_eq!(c[..=8].to_vec(), vec![1, 0, 0, 0, 196_560, 0, 16_773_120, 0, 398_034_000]);
        assert_eq!(leech().shell_count(4), Some(196_560));
    }

    #[test]
    fn engine_counts_at_zero() {
        let (_, frame) = leech_with_frame();
        let engine = ShellEngine::new(frame);
        assert!(engine.node_count() < 80_000);
        let t = engine.shell_sums(&[0.0; 24], 40);
        let c = leech_theta_counts(40);
        for n in 0usize..=40 {
            // rounding scales with the neighbouring shells that cancel
            let scale = c[n.saturating_sub(1)..=(n + 1).min(40)].iter().copied().max().unwrap().max(1) as f64;
            assert!((t[n].re - c[n] as f64).abs() <= 1e-9 * scale, "N={n}");
            assert!(t[n].im.abs() <= 1e-9 * scale, "N={n}");
        }
    }

    #[test]
    fn engine_matches_enumeration() {
        let (lat, frame) = leech_with_frame();
        let engine = ShellEngine::new(frame);
        let mut rng = ChaCha8Rng::seed_from_u64(5);
        let w: Vec<f64> = (0..24).map(|_| rng.gen_range(-0.5..0.5)).collect();
        let y = frame.to_ambient_real(&w);
        let t = engine.shell_sums(&y, 6);
        let gw: Vec<f64> = (0..24).map(|i| (0..24).map(|j| lat.gram(i, j) as f64 * w[j]).sum()).collect();
        let vs = short_vectors(lat, &lat.real_vector(vec![0.0; 24]).unwrap(), 6.0, u64::MAX).unwrap();
        let mut by_norm = [Complex64::new(0.0, 0.0); 7];
        for v in &vs {
            let n = lat.norm(v).unwrap() as usize;
            let ip: f64 = v.coords.iter().zip(&gw).map(|(&a, b)| a as f64 * b).sum();
            by_norm[n] += e_phase(ip);
        }
        for n in 0..=6 {
            assert!((t[n] - by_norm[n]).norm() < 1e-7 * (1.0 + by_norm[n].norm()), "N={n}: {} vs {}", t[n], by_norm[n]);
        }
    }
}
