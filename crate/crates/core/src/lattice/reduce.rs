//! Basis reduction used internally to give enumeration a well-conditioned basis.

/// Row-style LLL with exact integer rows, floating Gram–Schmidt, and the
/// inner product `x . y` (any positive scale gives the same reduction).
pub(crate) fn lll_rows(rows: &mut [Vec<i64>], delta: f64) {
    let n = rows.len();
    if n < 2 {
        return;
    }
    let mut k = 1;
    let mut mu = vec![vec![0.0f64; n]; n];
    let mut bstar_sq = vec![0.0f64; n];
    let gso = |rows: &[Vec<i64>], mu: &mut Vec<Vec<f64>>, bstar_sq: &mut Vec<f64>| {
        let mut bstar: Vec<Vec<f64>> = Vec::with_capacity(n);
        for i in 0..n {
            let mut v: Vec<f64> = rows[i].iter().map(|&x| x as f64).collect();
            for j in 0..i {
                let m = dot_f(&rows[i], &bstar[j]) / bstar_sq[j];
                mu[i][j] = m;
                for (vi, bj) in v.iter_mut().zip(&bstar[j]) {
                    *vi -= m * bj;
                }
            }
            bstar_sq[i] = v.iter().map(|x| x * x).sum();
            bstar.push(v);
        }
    };
    gso(rows, &mut mu, &mut bstar_sq);
    while k < n {
        for j in (0..k).rev() {
            let q = mu[k][j].round();
            if q != 0.0 {
                let qi = q as i64;
                let (head, tail) = rows.split_at_mut(k);
                for (a, b) in tail[0].iter_mut().zip(&head[j]) {
                    *a -= qi * b;
                }
                gso(rows, &mut mu, &mut bstar_sq);
            }
        }
        if bstar_sq[k] >= (delta - mu[k][k - 1] * mu[k][k - 1]) * bstar_sq[k - 1] {
            k += 1;
        } else {
            rows.swap(k, k - 1);
            gso(rows, &mut mu, &mut bstar_sq);
            k = (k - 1).max(1);
        }
    }
}

fn dot_f(a: &[i64], b: &[f64]) -> f64 {
    a.iter().zip(b).map(|(&x, y)| x as f64 * y).sum()
}

/// Hermite-style row echelon form of an integer generating set; returns the
/// nonzero pivot rows, which form a basis of the generated lattice.
pub(crate) fn echelon_basis(mut rows: Vec<Vec<i64>>) -> Vec<Vec<i64>> {
    let dim = rows.first().map_or(0, |r| r.len());
    let mut basis = Vec::new();
    for col in 0..dim {
        loop {
            let mut live: Vec<usize> = (0..rows.len()).filter(|&i| rows[i][col] != 0).collect();
            if live.is_empty() {
                break;
            }
            live.sort_by_key(|&i| rows[i][col].abs());
            let p = live[0];
            if live.len() == 1 {
                let mut row = rows.swap_remove(p);
                if row[col] < 0 {
                    row.iter_mut().for_each(|x| *x = -*x);
                }
                basis.push(row);
                break;
            }
            let pivot = rows[p].clone();
            for &i in &live[1..] {
                let q = rows[i][col].div_euclid(pivot[col]);
                for (a, b) in rows[i].iter_mut().zip(&pivot) {
                    *a -= q * b;
                }
            }
        }
    }
    basis
}
