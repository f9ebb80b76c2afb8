use ncg_core::connection::{
    check_compatibility, check_leibniz, check_spectral_symmetry, check_strong_connection, compatible_dirac_family, cosine,
    torus_connection, torus_twist_oracle, twisted_dirac, StrongnessFamily,
};
use ncg_core::operator::residual_on_interior;
use ncg_core::projection::{decompose, standard_gamma};
use ncg_core::torus::build_torus;

fn theta4() -> Vec<Vec<f64>> {
    let up = [[0.0, 0.13, 0.27, 0.41], [0.0, 0.0, 0.19, 0.33], [0.0, 0.0, 0.0, 0.07], [0.0; 4]];
    (0..4).map(|i| (0..4).map(|j| if i < j { up[i][j] } else { -up[j][i] }).collect()).collect()
}

#[test]
fn t4_twisted_dirac_matches_three_term_formula() {
    let g = build_torus(4, &theta4(), 5).unwrap();
    let coeffs = [cosine(0), cosine(1), cosine(2)];
    let w = torus_connection(&g, &coeffs).unwrap();
    assert!(w.selfadjoint);
    let st = check_strong_connection(&g, &w, StrongnessFamily { base_len: 1, total_len: 2 }).unwrap();
    assert!(st.pass(), "{:#?}", st.failures());
    assert!(check_leibniz(&g, &w).unwrap().pass());
    let (gam, coef) = standard_gamma(&g).unwrap();
    let pd = decompose(&g, &gam, coef).unwrap();
    let tw = twisted_dirac(&g, &pd, &w).unwrap();
    assert!(tw.report.pass(), "{:#?}", tw.report.failures());
    assert_eq!(tw.eps_prime, 1);
    let oracle = torus_twist_oracle(&g, &pd, &tw.j0, &coeffs).unwrap();
    let s = g.interior(w.margin() + 1).unwrap();
    assert!(residual_on_interior(&tw.d_omega.sub(&oracle).unwrap(), &s).unwrap() < 1e-10);
    assert!(!check_compatibility(&g, &pd, &tw).unwrap().pass());
    let (_, fam) = compatible_dirac_family(&g, &pd, &w).unwrap();
    // base-algebra first order breaks: π(δ₄a)·ρ([b, ω_j]) ≠ 0 because T³ is noncommutative
    let failed: Vec<_> = fam.failures().into_iter().map(|r| r.name.clone()).collect();
    assert_eq!(failed.len(), 1, "{failed:?}");
    assert!(failed[0].starts_with("first order"));
    assert!(fam.get(&failed[0]).unwrap().residual > 0.1);
    assert!(check_spectral_symmetry(&g, &tw).unwrap().get("gamma D_omega + D_omega gamma").unwrap().pass);
}

#[test]
fn t4_flat_connection_is_compatible() {
    let g = build_torus(4, &theta4(), 4).unwrap();
    let empty = ncg_core::geometry::Expr(Vec::new());
    let w = torus_connection(&g, &[empty.clone(), empty.clone(), empty]).unwrap();
    let (gam, coef) = standard_gamma(&g).unwrap();
    let pd = decompose(&g, &gam, coef).unwrap();
    let tw = twisted_dirac(&g, &pd, &w).unwrap();
    assert!(tw.report.pass(), "{:#?}", tw.report.failures());
    assert!(check_compatibility(&g, &pd, &tw).unwrap().pass());
}
