use ncg_core::geometry::{format_complex, parse_complex};
use ncg_core::kr;
use ncg_core::operator::{c, merge_multiplicities, residual_on_interior};
use ncg_core::projection::{decompose, standard_gamma};
use ncg_core::sphere::build_sphere;
use ncg_core::torus::{build_torus, theta2};
use ncg_core::verify::{check_first_order, check_order_zero};
use proptest::prelude::*;

proptest! {
    #![proptest_config(ProptestConfig::with_cases(12))]

    #[test]
    fn torus_commutation_relation_holds_for_any_theta(t in -1.0f64..1.0) {
        let g = build_torus(2, &theta2(t), 4).unwrap();
        let (u, v) = (&g.generators[0].op, &g.generators[1].op);
        let lam = c(0.0, 2.0 * std::f64::consts::PI * t).exp();
        let rel = u.mul(v).unwrap().sub(&v.mul(u).unwrap().scale(lam)).unwrap();
        let s = g.interior(2).unwrap();
        prop_assert!(residual_on_interior(&rel, &s).unwrap() < 1e-12);
    }

    #[test]
    fn torus_order_zero_and_first_order_for_any_theta(t in -1.0f64..1.0) {
        let g = build_torus(2, &theta2(t), 5).unwrap();
        prop_assert!(check_order_zero(&g, 2).unwrap().pass());
        prop_assert!(check_first_order(&g, 2).unwrap().pass());
    }

    #[test]
    fn sphere_split_identity_for_any_parameters(
        r in 0.1f64..3.0, sr in -2.0f64..2.0, si in -2.0f64..2.0, alpha in -3.0f64..3.0, t in 0.0f64..1.0
    ) {
        let g = build_sphere(7, t, r, c(sr, si), alpha).unwrap();
        let (gam, coef) = standard_gamma(&g).unwrap();
        prop_assert!((coef - r / 2.0).abs() < 1e-15);
        let pd = decompose(&g, &gam, coef).unwrap();
        prop_assert!(pd.report.pass(), "{:?}", pd.report.failures());
    }

    #[test]
    fn complex_notation_round_trips(re in -1e6f64..1e6, im in -1e6f64..1e6) {
        let z = c(re, im);
        prop_assert_eq!(parse_complex(&format_complex(z)).unwrap(), z);
    }

    #[test]
    fn merged_multiplicities_account_for_every_value(mut v in proptest::collection::vec(-5.0f64..5.0, 0..60)) {
        v.sort_by(|a, b| a.partial_cmp(b).unwrap());
        let merged = merge_multiplicities(&v, 1e-9);
        prop_assert_eq!(merged.iter().map(|m| m.1).sum::<usize>(), v.len());
        prop_assert!(merged.windows(2).all(|w| w[1].0 - w[0].0 > 1e-9));
    }

    #[test]
    fn kr_rows_are_periodic_mod_8(j in 0u8..64) {
        prop_assert_eq!(kr::lookup(j).unwrap(), kr::lookup(j % 8).unwrap());
    }
}
