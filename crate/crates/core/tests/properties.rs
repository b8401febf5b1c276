use proptest::prelude::*;

use leech_poincare::geometry::{height, IntegralPoint, Lorentz, SliceParams};
use leech_poincare::lattice::{content_of, e8, ii11, leech, Content};
use leech_poincare::sums::{j_brute, j_closed, jordan_totient, kloosterman, weil_bound};

fn small_vec(len: usize) -> impl Strategy<Value = Vec<i64>> {
    prop::collection::vec(-3i64..=3, len)
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(64))]

    #[test]
    fn content_scales(x in small_vec(8), k in 1i64..6) {
        let scaled: Vec<i64> = x.iter().map(|a| a * k).collect();
        match content_of(&x) {
            Content::All => prop_assert_eq!(content_of(&scaled), Content::All),
            Content::Value(c) => prop_assert_eq!(content_of(&scaled), Content::Value(c * k as u64)),
        }
    }

    #[test]
    fn kloosterman_real_and_weil(a in -200i64..200, b in -200i64..200, n in 1u64..600) {
        let s = kloosterman(a, b, n);
        prop_assert!(s.value.im.abs() <= 1e-9 * (1.0 + s.value.re.abs()));
        prop_assert!(s.value.norm() <= weil_bound(a, b, n) * (1.0 + 1e-9) + 1e-9);
    }

    #[test]
    fn kloosterman_symmetric(a in -50i64..50, b in -50i64..50, n in 1u64..200) {
        let x = kloosterman(a, b, n).value;
        let y = kloosterman(b, a, n).value;
        prop_assert!((x - y).norm() <= 1e-9 * (1.0 + x.norm()));
    }

    #[test]
    fn jordan_multiplicative(k in 1u32..5, a in 1u64..40, b in 1u64..40) {
        prop_assume!(leech_poincare::arith::gcd(a as i64, b as i64) == 1);
        prop_assert_eq!(jordan_totient(k, a * b), jordan_totient(k, a) * jordan_totient(k, b));
    }

    #[test]
    fn j_closed_matches_brute_e8(x in small_vec(8), n in 1u64..=4) {
        let lat = e8();
        let l = lat.vector(x).unwrap();
        let brute = j_brute(lat, &l, n, 1, 1 << 20).unwrap().value;
        let closed = j_closed(lat, &l, n).unwrap().value;
        prop_assert!((brute - closed).norm() <= 1e-6 * (1.0 + brute.norm()), "{brute} vs {closed}");
    }

    #[test]
    fn j_periodic_and_bounded(x in small_vec(8), y in small_vec(8), n in 1u64..=12) {
        let lat = e8();
        let l = lat.vector(x.clone()).unwrap();
        let shifted = lat.vector(x.iter().zip(&y).map(|(a, b)| a + n as i64 * b).collect()).unwrap();
        let a = j_closed(lat, &l, n).unwrap().value;
        let b = j_closed(lat, &shifted, n).unwrap().value;
        prop_assert!((a - b).norm() <= 1e-9 * (1.0 + a.norm()));
        let zero = j_closed(lat, &lat.zero(), n).unwrap().value.re;
        prop_assert!(a.norm() <= zero * (1.0 + 1e-9));
    }

    #[test]
    fn j_ii11_matches_brute(x in small_vec(2), n in 1u64..=50) {
        let lat = ii11();
        let l = lat.vector(x).unwrap();
        let brute = j_brute(lat, &l, n, 1, 1 << 20).unwrap().value;
        let closed = j_closed(lat, &l, n).unwrap().value;
        prop_assert!((brute - closed).norm() <= 1e-6 * (1.0 + brute.norm()));
    }

    #[test]
    fn translations_compose_and_preserve(
        v in small_vec(24), w in small_vec(24), l in small_vec(24), m in -4i64..4, k in -4i64..4,
    ) {
        let g = Lorentz::new(leech()).unwrap();
        let x = IntegralPoint { leech: l, m, n: k };
        let vw: Vec<i64> = v.iter().zip(&w).map(|(a, b)| a + b).collect();
        let once = g.translate(&vw, &x).unwrap();
        let twice = g.translate(&v, &g.translate(&w, &x).unwrap()).unwrap();
        prop_assert_eq!(&once, &twice);
        prop_assert_eq!(g.norm(&once).unwrap(), g.norm(&x).unwrap());
        prop_assert_eq!(height(&once), height(&x));
        let back: Vec<i64> = vw.iter().map(|a| -a).collect();
        prop_assert_eq!(g.translate(&back, &once).unwrap(), x);
    }

    #[test]
    fn slice_round_trip(coords in prop::collection::vec(-0.5f64..0.5, 24), h in 0.2f64..0.7) {
        let g = Lorentz::new(leech()).unwrap();
        let p = SliceParams::new(1.0, h).unwrap();
        let v = leech().real_vector(coords.clone()).unwrap();
        let z = g.slice_point(&v, &p).unwrap();
        prop_assert!((g.inner_real(&z, &z).unwrap() + 1.0).abs() < 1e-9);
        let back = g.slice_inverse(&z).unwrap();
        for (a, b) in back.coords.iter().zip(&coords) {
            prop_assert!((a - b).abs() < 1e-9);
        }
    }
}
