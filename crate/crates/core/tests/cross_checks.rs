use leech_poincare::analytic::{fourier_poincare_table, CoeffTable, FourierMethod};
use leech_poincare::geometry::SliceParams;
use leech_poincare::lattice::{leech, short_vectors};
use leech_poincare::report::{rel_diff, TruncationPolicy};
use leech_poincare::sums::{j_brute, j_closed};
use leech_poincare::verify::generic_point;
use leech_poincare::Complex64;

/// Permutation with sign flips mixed into a shear, as rows in old coordinates.
fn scrambled_basis(m: usize) -> Vec<Vec<i64>> {
    let mut u = vec![vec![0i64; m]; m];
    for (i, row) in u.iter_mut().enumerate() {
        let j = (7 * i + 3) % m;
        row[j] = if i % 3 == 0 { -1 } else { 1 };
    }
    let first = u[0].clone();
    for (k, x) in first.iter().enumerate() {
        u[m - 1][k] += x;
    }
    u
}

#[test]
fn leech_in_another_basis() {
    let base = leech();
    let u = scrambled_basis(24);
    let other = base.change_basis("Leech (scrambled)", &u).unwrap();
    assert_eq!(other.det().abs(), 1);
    assert!(other.is_even());
    assert_eq!(other.shell_count(2), Some(0));
    assert_eq!(other.shell_count(4), Some(196_560));

    let zero = other.real_vector(vec![0.0; 24]).unwrap();
    let shell = short_vectors(&other, &zero, 4.0, u64::MAX).unwrap();
    let lambda = shell.iter().find(|x| other.norm(x).unwrap() == 4).unwrap().clone();
    for n in [1, 2] {
        let brute = j_brute(&other, &lambda, n, 1, 1 << 25).unwrap().value;
        let closed = j_closed(&other, &lambda, n).unwrap().value;
        assert!(rel_diff(brute, closed) < 1e-6, "n={n}: {brute} vs {closed}");
    }
}

#[test]
fn shells_agree_with_enumeration() {
    let p = SliceParams::new(1.0, 0.6).unwrap();
    let s = Complex64::new(30.0, 0.0);
    let policy = TruncationPolicy { n_max: 20, lambda_radius_sq: Some(6.0), tol: 1e-9, ..Default::default() };
    let table = CoeffTable::new(24, p, s, policy.n_max);
    for v in [leech().real_vector(vec![0.0; 24]).unwrap(), generic_point()] {
        let a = fourier_poincare_table(&v, &table, &policy, FourierMethod::Shells).unwrap();
        let b = fourier_poincare_table(&v, &table, &policy, FourierMethod::Enumerated).unwrap();
        assert!(rel_diff(a.value, b.value) < 1e-9, "{} vs {}", a.value, b.value);
        assert_eq!(a.terms, b.terms);
    }
}

#[test]
fn fourier_tail_bounds_a_larger_cutoff() {
    let p = SliceParams::new(1.0, 0.6).unwrap();
    let s = Complex64::new(30.0, 0.0);
    let v = generic_point();
    let loose = TruncationPolicy { n_max: 20, tol: 1e-6, ..Default::default() };
    let tight = TruncationPolicy { tol: 1e-10, ..loose.clone() };
    let table = CoeffTable::new(24, p, s, loose.n_max);
    let a = fourier_poincare_table(&v, &table, &loose, FourierMethod::Shells).unwrap();
    let b = fourier_poincare_table(&v, &table, &tight, FourierMethod::Shells).unwrap();
    let change = (a.value - b.value).norm();
    assert!(change <= a.tail.estimate.max(1e-12 * a.value.norm()), "change {change} tail {}", a.tail.estimate);
}
