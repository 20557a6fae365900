//! Randomised identities across the numerical layers.

use mesoscat_core::greens::{disk_laplace_green, helmholtz_free, DiskDomain, MediumParams};
use mesoscat_core::linalg::{signed_log_determinant, solve_dense, RealMatrix};
use mesoscat_core::oracle::{highprec_j_f64, highprec_y_f64};
use mesoscat_core::specfun::{bessel_j, bessel_y};
use mesoscat_core::{Exec, Point};
use proptest::prelude::*;
use std::f64::consts::PI;

proptest! {
    #![proptest_config(ProptestConfig::with_cases(64))]

    #[test]
    fn wronskian(n in 0i32..40, x in 1e-2f64..80.0) {
        let w = bessel_j(n + 1, x).unwrap() * bessel_y(n, x).unwrap() - bessel_j(n, x).unwrap() * bessel_y(n + 1, x).unwrap();
        let expect = 2.0 / (PI * x);
        let scale = (bessel_j(n + 1, x).unwrap() * bessel_y(n, x).unwrap()).abs().max(expect);
        prop_assert!((w - expect).abs() <= 1e-12 * scale);
    }

    #[test]
    fn bessel_matches_series(n in 0i32..12, x in 1e-3f64..40.0) {
        let j = highprec_j_f64(n, x).unwrap();
        let y = highprec_y_f64(n, x).unwrap();
        prop_assert!((bessel_j(n, x).unwrap() - j).abs() <= 1e-12 * j.abs().max(1.0));
        prop_assert!((bessel_y(n, x).unwrap() - y).abs() <= 1e-12 * y.abs().max(1.0));
    }

    #[test]
    fn free_green_reciprocity(ax in -5.0f64..5.0, ay in -5.0f64..5.0, bx in -5.0f64..5.0, by in -5.0f64..5.0, k in 0.1f64..5.0) {
        let a = Point::new(ax, ay);
        let b = Point::new(bx, by);
        prop_assume!(a.dist(b) > 1e-3);
        let m = MediumParams::unit(k).unwrap();
        prop_assert_eq!(helmholtz_free(a, b, &m).unwrap(), helmholtz_free(b, a, &m).unwrap());
    }

    #[test]
    fn laplace_green_symmetric(r1 in 0.0f64..0.95, t1 in 0.0f64..std::f64::consts::TAU, r2 in 0.0f64..0.95, t2 in 0.0f64..std::f64::consts::TAU) {
        let d = DiskDomain::new(1.0).unwrap();
        let a = Point::polar(r1, t1);
        let b = Point::polar(r2, t2);
        prop_assume!(a.dist(b) > 1e-3);
        let g1 = disk_laplace_green(a, b, &d).unwrap();
        let g2 = disk_laplace_green(b, a, &d).unwrap();
        prop_assert!((g1 - g2).abs() <= 1e-12 * g1.abs().max(1.0));
    }

    #[test]
    fn solve_inverts_diagonally_dominant(entries in prop::collection::vec(-1.0f64..1.0, 36), rhs in prop::collection::vec(-1.0f64..1.0, 6)) {
        let a = RealMatrix::from_fn(6, |i, j| entries[6 * i + j] + if i == j { 8.0 } else { 0.0 });
        let x = solve_dense(&a, &rhs).unwrap();
        let back = a.mul_vec(&x);
        for (p, q) in back.iter().zip(&rhs) {
            prop_assert!((p - q).abs() < 1e-12);
        }
        let (s, l) = signed_log_determinant(&a);
        prop_assert_eq!(s, 1.0);
        prop_assert!(l.is_finite());
    }

    #[test]
    fn reductions_are_policy_independent(v in prop::collection::vec(-1e6f64..1e6, 0..20_000)) {
        let a = Exec::Sequential.sum(v.len(), |i| v[i]);
        let b = Exec::Parallel.sum(v.len(), |i| v[i]);
        prop_assert_eq!(a.to_bits(), b.to_bits());
    }
}
