//! Property tests for the pure-math layer: distribution functions, the
//! semicircle transform, and the spectral region geometry.

use num_complex::Complex64;
use proptest::prelude::*;
use rml_core::semicircle;
use rml_core::stieltjes;

proptest! {
    #![proptest_config(ProptestConfig::with_cases(512))]

    #[test]
    fn cdf_monotone_and_bounded(a in -3.0f64..3.0, b in -3.0f64..3.0) {
        let (lo, hi) = if a <= b { (a, b) } else { (b, a) };
        let (fa, fb) = (semicircle::cdf(lo), semicircle::cdf(hi));
        prop_assert!((0.0..=1.0).contains(&fa));
        prop_assert!(fa <= fb + 1e-15);
    }

    #[test]
    fn pdf_integrates_cdf_increments(x in -1.95f64..1.9) {
        // G(x + h) − G(x) ≈ g(x)·h for small h
        let h = 1e-6;
        let inc = semicircle::cdf(x + h) - semicircle::cdf(x);
        prop_assert!((inc - semicircle::pdf(x) * h).abs() < 1e-10);
    }

    #[test]
    fn quantile_inverts_cdf(q in 0.001f64..0.999) {
        let x = semicircle::quantile(q);
        prop_assert!((semicircle::cdf(x) - q).abs() < 1e-12);
        prop_assert!((semicircle::quantile(1.0 - q) + x).abs() < 1e-9);
    }

    #[test]
    fn s_transform_herglotz(u in -5.0f64..5.0, v in 1e-4f64..4.0) {
        let z = Complex64::new(u, v);
        let s = stieltjes::s_transform(z);
        prop_assert!(s.im > 0.0);
        prop_assert!(s.norm() <= 1.0 + 1e-12);
        let resid = (s * s + z * s + Complex64::new(1.0, 0.0)).norm();
        prop_assert!(resid < 1e-11);
    }

    #[test]
    fn region_floor_respects_membership(
        u in -1.95f64..1.95,
        v in 1e-4f64..4.0,
        v0_scale in 0.5f64..20.0,
    ) {
        let n = 1000usize;
        let params = stieltjes::RegionParams::with_v0(n, v0_scale / n as f64);
        let z = Complex64::new(u, v);
        if params.contains(z) {
            prop_assert!(v >= params.v_floor(u) - 1e-15);
            prop_assert!(u.abs() <= 2.0 - params.eps + 1e-15);
        }
        // points above the cap are never members
        prop_assert!(!params.contains(Complex64::new(u, params.v_cap + 1e-9)));
    }

    #[test]
    fn edge_gap_symmetric(u in -6.0f64..6.0) {
        prop_assert_eq!(stieltjes::edge_gap(u), stieltjes::edge_gap(-u));
        prop_assert!(stieltjes::edge_gap(u) >= 0.0);
    }
}
