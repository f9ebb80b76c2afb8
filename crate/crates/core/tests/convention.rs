//! The left-ordered GNS convention must give the same verdicts as the symmetric one.

use ncg_core::connection::{cosine, torus_connection, torus_twist_oracle, twisted_dirac};
use ncg_core::geometry::TorusConvention;
use ncg_core::operator::{hermitian_eigenvalues, residual_on_interior};
use ncg_core::projection::{check_t2_descent, decompose, search_gamma, split_even, standard_gamma, SearchOptions};
use ncg_core::torus::{build_torus_with, theta2};
use ncg_core::verify::verify_all;

const CONVENTIONS: [TorusConvention; 2] = [TorusConvention::WeylSymmetric, TorusConvention::LeftOrdered];

#[test]
fn t2_suite_is_convention_independent() {
    for conv in CONVENTIONS {
        let g = build_torus_with(2, &theta2(0.4142), 8, conv).unwrap();
        let rep = verify_all(&g).unwrap();
        assert!(rep.pass(), "{conv:?}: {:#?}", rep.failures());
        let res = search_gamma(&g, SearchOptions { starts: 16, ..Default::default() }).unwrap();
        assert_eq!(res.solutions.len(), 2, "{conv:?}");
        let (gam, coef) = standard_gamma(&g).unwrap();
        let pd = decompose(&g, &gam, coef).unwrap();
        assert!(pd.report.pass(), "{conv:?}");
        let split = split_even(&g, &pd).unwrap();
        assert!(check_t2_descent(&g, &split).unwrap().pass(), "{conv:?}");
        let w = torus_connection(&g, &[cosine(0)]).unwrap();
        let tw = twisted_dirac(&g, &pd, &w).unwrap();
        assert!(tw.report.pass(), "{conv:?}: {:#?}", tw.report.failures());
        let oracle = torus_twist_oracle(&g, &pd, &tw.j0, &[cosine(0)]).unwrap();
        let s = g.interior(w.margin() + 1).unwrap();
        assert!(residual_on_interior(&tw.d_omega.sub(&oracle).unwrap(), &s).unwrap() < 1e-10, "{conv:?}");
    }
}

#[test]
fn t3_suite_is_convention_independent() {
    let th = vec![vec![0.0, 0.13, 0.27], vec![-0.13, 0.0, 0.19], vec![-0.27, -0.19, 0.0]];
    for conv in CONVENTIONS {
        let g = build_torus_with(3, &th, 5, conv).unwrap();
        let rep = verify_all(&g).unwrap();
        assert!(rep.pass(), "{conv:?}: {:#?}", rep.failures());
    }
}

/// The conventions differ by a diagonal unitary, so D is literally the same matrix.
#[test]
fn dirac_spectrum_is_convention_independent() {
    let spectra: Vec<Vec<f64>> = CONVENTIONS
        .iter()
        .map(|&conv| hermitian_eigenvalues(&build_torus_with(2, &theta2(0.3), 4, conv).unwrap().dirac).unwrap())
        .collect();
    assert_eq!(spectra[0], spectra[1]);
}
