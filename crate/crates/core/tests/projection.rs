use ncg_core::projection::{
    check_projected_calculus, check_t3_descent, check_t4_descent, decompose, gammacond_residuals, search_gamma, split_even,
    split_odd, standard_gamma, SearchOptions,
};
use ncg_core::spinor::{clifford4, dist, pauli_dense};
use ncg_core::torus::{build_torus, theta2};

fn theta4() -> Vec<Vec<f64>> {
    let up = [[0.0, 0.13, 0.27, 0.41], [0.0, 0.0, 0.19, 0.33], [0.0, 0.0, 0.0, 0.07], [0.0; 4]];
    (0..4).map(|i| (0..4).map(|j| if i < j { up[i][j] } else { -up[j][i] }).collect()).collect()
}

fn block(t: &[Vec<f64>], n: usize) -> Vec<Vec<f64>> {
    t[..n].iter().map(|r| r[..n].to_vec()).collect()
}

#[test]
fn t4_gamma_is_plus_minus_gamma4() {
    let g = build_torus(4, &theta4(), 3).unwrap();
    let res = search_gamma(&g, SearchOptions::default()).unwrap();
    assert_eq!(res.solutions.len(), 2, "{:?}", res.solutions.iter().map(|s| s.coefficient).collect::<Vec<_>>());
    let g4 = clifford4().gamma[3].clone();
    for s in &res.solutions {
        let m = s.spinor.as_ref().unwrap();
        let sign = s.coefficient.signum();
        assert!(dist(m, &(&g4 * ncg_core::operator::c(sign, 0.0))) < 1e-9);
        let conds = gammacond_residuals(m);
        assert!(conds[0].1 < 1e-9 && conds[1].1 < 1e-9 && conds[2].1 < 1e-9 && conds[3].1 < 1e-9, "{conds:?}");
    }
}

#[test]
fn t4_descends_to_t3() {
    let th = theta4();
    let g = build_torus(4, &th, 3).unwrap();
    let (gam, coef) = standard_gamma(&g).unwrap();
    let pd = decompose(&g, &gam, coef).unwrap();
    assert!(pd.report.pass(), "{:#?}", pd.report.failures());
    let split = split_even(&g, &pd).unwrap();
    for r in [&split.report, &split.plus.report, &split.minus.report] {
        assert!(r.pass(), "{:#?}", r.failures());
    }
    assert_eq!(split.plus.kr_dim, 3);
    let g3 = build_torus(3, &block(&th, 3), 3).unwrap();
    let r = check_t4_descent(&g, &split, &g3).unwrap();
    assert!(r.pass(), "{:#?}", r.failures());
}

#[test]
fn t3_descends_to_t2() {
    let th = theta4();
    let g3 = build_torus(3, &block(&th, 3), 4).unwrap();
    let res = search_gamma(&g3, SearchOptions { starts: 24, ..Default::default() }).unwrap();
    assert_eq!(res.solutions.len(), 2);
    let s3 = pauli_dense()[2].clone();
    assert!(dist(res.canonical().unwrap().spinor.as_ref().unwrap(), &s3) < 1e-9);
    let (gam, coef) = standard_gamma(&g3).unwrap();
    let pd = decompose(&g3, &gam, coef).unwrap();
    let t0 = split_odd(&g3, &pd, 0).unwrap();
    assert!(t0.report.pass(), "{:#?}", t0.report.failures());
    let g2 = build_torus(2, &theta2(th[0][1]), 4).unwrap();
    let r = check_t3_descent(&g3, &t0, &g2).unwrap();
    assert!(r.pass(), "{:#?}", r.failures());
    let t1 = split_odd(&g3, &pd, 1).unwrap();
    assert!(t1.report.pass(), "{:#?}", t1.report.failures());
    assert!(check_projected_calculus(&g3, &pd).unwrap().pass());
}
