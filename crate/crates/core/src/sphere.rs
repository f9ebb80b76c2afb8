//! The θ-deformed 3-sphere S³_θ with the equivariant Dirac family D(r, s, α).

use std::f64::consts::PI;
use std::sync::Arc;

use crate::basis::{Basis, BasisIndex};
use crate::error::{NcgError, Result};
use crate::geometry::{Expr, Generator, Geometry, GeometryParams, Letter};
use crate::operator::{c, commutator_residual, residual_on_interior, AntilinearOperator, SparseOperator, C64};
use crate::report::{VerificationReport, DEFAULT_TOL};

pub const MIN_TWICE_CUTOFF: i32 = 5;

/// Deformation exponent of the bi-charge phases.
const KAPPA: f64 = -0.25;

fn sq(x: f64) -> f64 {
    x.max(0.0).sqrt()
}

fn unpack(b: &BasisIndex) -> (i32, i32, i32, i8) {
    match b {
        BasisIndex::Sphere { twice_l, twice_m, twice_n, sign } => (*twice_l, *twice_m, *twice_n, *sign),
        _ => unreachable!("sphere basis"),
    }
}

pub fn build_sphere(twice_cutoff: i32, theta: f64, r: f64, s: C64, alpha: f64) -> Result<Geometry> {
    if twice_cutoff < MIN_TWICE_CUTOFF {
        return Err(NcgError::InvalidParameter(format!(
            "cutoff below minimum: L = {} < 5/2",
            twice_cutoff as f64 / 2.0
        )));
    }
    if !(r > 0.0) {
        return Err(NcgError::InvalidParameter(format!("r must be positive, got {r}")));
    }
    let basis = Arc::new(Basis::sphere(twice_cutoff));
    let dim = basis.dim();
    let lam_pow = |x: f64| C64::from_polar(1.0, 2.0 * PI * theta * x);

    let mut ta = Vec::new();
    let mut tb = Vec::new();
    let mut td = Vec::new();
    let mut tj = Vec::new();
    let mut delta_diag = Vec::with_capacity(dim);
    let push = |t: &mut Vec<(usize, usize, C64)>, target: BasisIndex, col: usize, v: C64| {
        if v.norm() < 1e-15 {
            return;
        }
        if let Some(row) = basis.position(&target) {
            t.push((row, col, v));
        }
    };
    for col in 0..dim {
        let (tl, tm, tn, sg) = unpack(basis.index(col));
        let (l, m, n) = (tl as f64 / 2.0, tm as f64 / 2.0, tn as f64 / 2.0);
        let charge = tm + sg as i32;
        delta_diag.push(charge as i64);
        let at = |dl: i32, dm: i32, dn: i32, sign: i8| BasisIndex::Sphere {
            twice_l: tl + dl,
            twice_m: tm + dm,
            twice_n: tn + dn,
            sign,
        };

        let n_up = sq(2.0 * l + 1.0) * sq(2.0 * l + 2.0);
        let n_dn = if tl > 0 { sq(2.0 * l) * sq(2.0 * l + 1.0) } else { 1.0 };
        let pa = lam_pow(KAPPA * (tn + charge) as f64);
        let pb = lam_pow(KAPPA * (charge - tn) as f64);
        push(&mut ta, at(1, 1, -1, sg), col, pa * (sq(l + 1.0 + m) * sq(l - n + 1.0) / n_up));
        push(&mut ta, at(-1, 1, -1, sg), col, -pa * (sq(l - m) * sq(l + n) / n_dn));
        push(&mut tb, at(1, -1, -1, sg), col, pb * (sq(l + 1.0 - m) * sq(l - n + 1.0) / n_up));
        push(&mut tb, at(-1, -1, -1, sg), col, pb * (sq(l + m) * sq(l + n) / n_dn));

        // i^{2(m+n)} = (−1)^{m+n}
        let parity = if ((tm + tn) / 2).rem_euclid(2) == 0 { 1.0 } else { -1.0 };
        if sg > 0 {
            push(&mut td, at(0, 0, 0, 1), col, c(r * (m + 0.5) + alpha / 4.0, 0.0));
            push(&mut td, at(0, 2, 0, -1), col, s * sq((l + 1.0 + m) * (l - m)));
            push(&mut tj, BasisIndex::Sphere { twice_l: tl, twice_m: -tm, twice_n: -tn, sign: -1 }, col, c(parity, 0.0));
        } else {
            push(&mut td, at(0, 0, 0, -1), col, c(-r * (m - 0.5) + alpha / 4.0, 0.0));
            push(&mut td, at(0, -2, 0, 1), col, s.conj() * sq((l - m + 1.0) * (l + m)));
            push(&mut tj, BasisIndex::Sphere { twice_l: tl, twice_m: -tm, twice_n: -tn, sign: 1 }, col, c(-parity, 0.0));
        }
    }
    let op = |t: Vec<(usize, usize, C64)>| SparseOperator::from_triplets(dim, dim, t);
    let (pa, pb) = (op(ta), op(tb));
    let generators = vec![
        Generator { name: "a".into(), adj: pa.adjoint(), op: pa, charge: 1 },
        Generator { name: "b".into(), adj: pb.adjoint(), op: pb, charge: -1 },
    ];
    let delta = SparseOperator::real_diagonal(&delta_diag.iter().map(|&q| q as f64).collect::<Vec<_>>());
    Ok(Geometry {
        params: GeometryParams::Sphere { twice_cutoff, theta, r, s, alpha },
        basis,
        generators,
        dirac: op(td),
        real: AntilinearOperator::new(op(tj)),
        grading: None,
        delta,
        delta_diag,
        derivations: Vec::new(),
        kr_dim: 3,
        base_generators: invariant_generators(),
        spinor_dim: 2,
    })
}

const A: Letter = Letter { gen: 0, adjoint: false };
const AS: Letter = Letter { gen: 0, adjoint: true };
const B: Letter = Letter { gen: 1, adjoint: false };
const BS: Letter = Letter { gen: 1, adjoint: true };

/// A = aa* − ½, B = ba, B* = a*b*.
pub fn invariant_generators() -> Vec<(String, Expr)> {
    vec![
        ("A".into(), Expr::word(vec![A, AS]).plus(Expr::one().scaled(c(-0.5, 0.0)))),
        ("B".into(), Expr::word(vec![B, A])),
        ("B*".into(), Expr::word(vec![AS, BS])),
    ]
}

/// Γ|l,m,n,±⟩ = ±|l,m,n,±⟩.
pub fn sphere_gamma(g: &Geometry) -> SparseOperator {
    SparseOperator::real_diagonal(
        &g.basis.entries().iter().map(|b| unpack(b).3 as f64).collect::<Vec<_>>(),
    )
}

pub fn sphere_params(g: &Geometry) -> (i32, f64, f64, C64, f64) {
    match &g.params {
        GeometryParams::Sphere { twice_cutoff, theta, r, s, alpha } => (*twice_cutoff, *theta, *r, *s, *alpha),
        _ => panic!("not a sphere geometry"),
    }
}

/// Indices spanned by |l,−½,n,+⟩ and |l,½,n,−⟩.
pub fn invariant_subspace(g: &Geometry) -> Vec<usize> {
    g.basis.indices_where(|b| {
        let (_, tm, _, sg) = unpack(b);
        (tm == -1 && sg > 0) || (tm == 1 && sg < 0)
    })
}

/// Eigenvalues of D, sorted.
pub fn dirac_block_spectrum(g: &Geometry) -> Result<Vec<f64>> {
    crate::operator::hermitian_eigenvalues(&g.dirac)
}

/// Closed-form spectrum: 2×2 blocks pairing |l,m,n,+⟩ with |l,m+1,n,−⟩, plus unpaired diagonal entries.
pub fn block_oracle_spectrum(g: &Geometry) -> Vec<f64> {
    let (tc, _, r, s, alpha) = sphere_params(g);
    let mut out = Vec::new();
    for tl in 0..=tc {
        let l = tl as f64 / 2.0;
        let mult = (tl + 1) as usize;
        for tm in (-tl..=tl).step_by(2) {
            let m = tm as f64 / 2.0;
            if tm < tl {
                let p = r * (m + 0.5);
                let w2 = (l + 1.0 + m) * (l - m);
                let root = (p * p + s.norm_sqr() * w2).sqrt();
                for _ in 0..mult {
                    out.push(alpha / 4.0 + root);
                    out.push(alpha / 4.0 - root);
                }
            } else {
                // |l,l,n,+⟩ unpaired
                out.extend(std::iter::repeat_n(r * (m + 0.5) + alpha / 4.0, mult));
            }
            if tm == -tl {
                // |l,−l,n,−⟩ unpaired
                out.extend(std::iter::repeat_n(-r * (m - 0.5) + alpha / 4.0, mult));
            }
        }
    }
    out.sort_by(|a, b| a.partial_cmp(b).unwrap());
    out
}

/// Relations of the invariant subalgebra generated by A, B, B*.
pub fn check_invariant_algebra(g: &Geometry) -> Result<VerificationReport> {
    let s = g.interior(4)?;
    let gens = invariant_generators();
    let a = g.expr_op(&gens[0].1);
    let b = g.expr_op(&gens[1].1);
    let bs = g.expr_op(&gens[2].1);
    let id = SparseOperator::identity(g.dim());
    let mut rep = VerificationReport::new(g.params.name(), g.params.to_json());
    rep.check_result("[A,B]", commutator_residual(&a, &b, &s), DEFAULT_TOL, 4);
    rep.check_result("[A,B*]", commutator_residual(&a, &bs, &s), DEFAULT_TOL, 4);
    let quad = SparseOperator::linear_combination(&[
        (c(1.0, 0.0), &a.mul(&a)?),
        (c(1.0, 0.0), &b.mul(&bs)?),
        (c(-0.25, 0.0), &id),
    ])?;
    rep.check_result("A^2+BB*-1/4", residual_on_interior(&quad, &s), DEFAULT_TOL, 4);
    rep.check_result("[delta,A]", commutator_residual(&g.delta, &a, &s), DEFAULT_TOL, 4);
    rep.check_result("[delta,B]", commutator_residual(&g.delta, &b, &s), DEFAULT_TOL, 4);
    Ok(rep)
}

/// Defining relations of S³_θ, equivariance of the generators and the Γ identity.
pub fn check_sphere_structure(g: &Geometry) -> Result<VerificationReport> {
    let (_, theta, ..) = sphere_params(g);
    let s2 = g.interior(2)?;
    let s1 = g.interior(1)?;
    let lam = C64::from_polar(1.0, 2.0 * PI * theta);
    let (a, as_) = (&g.generators[0].op, &g.generators[0].adj);
    let (b, bs) = (&g.generators[1].op, &g.generators[1].adj);
    let id = SparseOperator::identity(g.dim());
    let mut rep = VerificationReport::new(g.params.name(), g.params.to_json());
    let ab = a.mul(b)?.sub(&b.mul(a)?.scale(lam))?;
    rep.check_result("ab-lambda ba", residual_on_interior(&ab, &s2), DEFAULT_TOL, 2);
    let abs_ = a.mul(bs)?.sub(&bs.mul(a)?.scale(lam.conj()))?;
    rep.check_result("ab*-conj(lambda) b*a", residual_on_interior(&abs_, &s2), DEFAULT_TOL, 2);
    let sphere = SparseOperator::linear_combination(&[(c(1.0, 0.0), &a.mul(as_)?), (c(1.0, 0.0), &b.mul(bs)?), (c(-1.0, 0.0), &id)])?;
    rep.check_result("aa*+bb*-1", residual_on_interior(&sphere, &s2), DEFAULT_TOL, 2);
    rep.check_result("[a,a*]", commutator_residual(a, as_, &s2), DEFAULT_TOL, 2);
    rep.check_result("[b,b*]", commutator_residual(b, bs, &s2), DEFAULT_TOL, 2);

    let phi = PI / 3.0;
    let u = g.charge_rotation(phi);
    let ua = SparseOperator::chain(&[&u, a, &u.adjoint()])?.sub(&a.scale(C64::from_polar(1.0, phi)))?;
    let ub = SparseOperator::chain(&[&u, b, &u.adjoint()])?.sub(&b.scale(C64::from_polar(1.0, -phi)))?;
    rep.check_result("e^{i phi delta} a e^{-i phi delta} - e^{i phi} a", residual_on_interior(&ua, &s1), DEFAULT_TOL, 1);
    rep.check_result("e^{i phi delta} b e^{-i phi delta} - e^{-i phi} b", residual_on_interior(&ub, &s1), DEFAULT_TOL, 1);

    let gam = sphere_gamma(g);
    rep.check("Gamma^2-1", gam.mul(&gam)?.sub(&id)?.max_abs(), DEFAULT_TOL, 0);
    rep.check("Gamma-Gamma^dagger", gam.hermiticity_deviation(), DEFAULT_TOL, 0);
    let gj = g.real.matrix.clone();
    rep.check("Gamma J + J Gamma", gam.mul(&gj)?.add(&gj.mul(&gam)?)?.max_abs(), DEFAULT_TOL, 0);
    rep.check_result("[Gamma,a]", commutator_residual(&gam, a, &s1), DEFAULT_TOL, 1);
    rep.check_result("[Gamma,b]", commutator_residual(&gam, b, &s1), DEFAULT_TOL, 1);
    rep.check_result("[Gamma,delta]", commutator_residual(&gam, &g.delta, &s1), DEFAULT_TOL, 1);
    Ok(rep)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn geo(theta: f64) -> Geometry {
        build_sphere(7, theta, 1.3, c(0.7, 0.2), 0.4).unwrap()
    }

    #[test]
    fn dirac_diagonal_coefficient() {
        let g = geo(0.3);
        let i = g.basis.position(&BasisIndex::Sphere { twice_l: 3, twice_m: 1, twice_n: -1, sign: 1 }).unwrap();
        assert!((g.dirac.get(i, i) - c(1.3 * 1.0 + 0.1, 0.0)).norm() < 1e-15);
    }

    #[test]
    fn j_squares_to_minus_one() {
        let g = geo(0.3);
        let sq = g.real.square().unwrap();
        assert!(sq.add(&SparseOperator::identity(g.dim())).unwrap().max_abs() < 1e-15);
    }

    #[test]
    fn commutative_limit() {
        let g = geo(0.0);
        let s = g.interior(2).unwrap();
        assert!(commutator_residual(&g.generators[0].op, &g.generators[1].op, &s).unwrap() < 1e-14);
    }

    #[test]
    fn structure_relations() {
        for th in [0.0, 0.3, 0.4142] {
            let rep = check_sphere_structure(&geo(th)).unwrap();
            assert!(rep.pass(), "{:?}", rep.failures());
        }
    }

    #[test]
    fn invariant_algebra_relations() {
        let rep = check_invariant_algebra(&build_sphere(11, 0.4142, 1.0, c(1.0, 0.0), 1.0).unwrap()).unwrap();
        assert!(rep.pass(), "{:?}", rep.failures());
        let rep0 = check_invariant_algebra(&build_sphere(11, 0.0, 1.0, c(1.0, 0.0), 1.0).unwrap()).unwrap();
        assert!(rep0.max_residual() < 1e-12);
    }

    #[test]
    fn invariant_subspace_counting_oracle() {
        let g = build_sphere(9, 0.2, 1.0, c(1.0, 0.0), 1.0).unwrap();
        let h0 = invariant_subspace(&g);
        // Σ_{l=½,…,L} 2(2l+1)
        let want: usize = (1..=9).step_by(2).map(|tl| 2 * (tl as usize + 1)).sum();
        assert_eq!(h0.len(), want);
        assert!(h0.iter().all(|&i| g.delta_diag[i] == 0));
        assert_eq!(h0, g.charge_subspace(0));
    }

    #[test]
    fn block_spectrum_matches_oracle() {
        let g = geo(0.3);
        let ev = dirac_block_spectrum(&g).unwrap();
        let or = block_oracle_spectrum(&g);
        assert_eq!(ev.len(), or.len());
        for (x, y) in ev.iter().zip(or.iter()) {
            assert!((x - y).abs() < 1e-10);
        }
    }

    #[test]
    fn unit_parameters_give_quarter_plus_minus_half_integers() {
        let g = build_sphere(7, 0.0, 1.0, c(1.0, 0.0), 1.0).unwrap();
        for tl in 0..=7 {
            let l = tl as f64 / 2.0;
            for tm in (-tl..=tl).step_by(2) {
                let m = tm as f64 / 2.0;
                assert!(((m + 0.5).powi(2) + (l + 1.0 + m) * (l - m) - (l + 0.5).powi(2)).abs() < 1e-12);
            }
        }
        for e in dirac_block_spectrum(&g).unwrap() {
            // |e − ¼| = l + ½ for some l ∈ ½N
            let x = 2.0 * (e - 0.25).abs();
            assert!((x - x.round()).abs() < 1e-10 && x.round() >= 1.0, "eigenvalue {e}");
        }
    }

    #[test]
    fn rejects_bad_parameters() {
        assert!(build_sphere(4, 0.0, 1.0, c(1.0, 0.0), 0.0).is_err());
        assert!(build_sphere(5, 0.0, 0.0, c(1.0, 0.0), 0.0).is_err());
    }
}
