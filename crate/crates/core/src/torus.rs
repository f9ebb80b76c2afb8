//! Noncommutative tori T^n_θ (n = 2, 3, 4) with the flat Dirac operator.

use std::f64::consts::PI;
use std::sync::Arc;

use crate::basis::{Basis, BasisIndex};
use crate::error::{NcgError, Result};
use crate::geometry::{Expr, Generator, Geometry, GeometryParams, Letter, TorusConvention};
use crate::operator::{c, AntilinearOperator, SparseOperator, C64};
use crate::spinor::{clifford4, pauli_dense, Mat};

pub const MIN_CUTOFF: i32 = 3;

/// Spinor data of the flat triple: Clifford generators, chirality and the spinor part of J.
pub struct SpinorFactor {
    pub gammas: Vec<Mat>,
    pub chirality: Option<Mat>,
    /// J = J₀ ⊗ (C ∘ c.c.)
    pub real_factor: Mat,
}

pub fn spinor_factor(n: usize) -> SpinorFactor {
    let s = pauli_dense();
    let i = c(0.0, 1.0);
    match n {
        2 => SpinorFactor { gammas: vec![s[0].clone(), s[1].clone()], chirality: Some(s[2].clone()), real_factor: &s[1] * i },
        3 => SpinorFactor { gammas: s.to_vec(), chirality: None, real_factor: &s[1] * i },
        4 => {
            let cl = clifford4();
            SpinorFactor {
                real_factor: &cl.gamma[3] * &cl.gamma[1],
                chirality: Some(cl.gamma5.clone()),
                gammas: cl.gamma.to_vec(),
            }
        }
        _ => unreachable!("dimension validated by caller"),
    }
}

pub fn theta2(t: f64) -> Vec<Vec<f64>> {
    vec![vec![0.0, t], vec![-t, 0.0]]
}

fn validate(n: usize, theta: &[Vec<f64>], cutoff: i32) -> Result<()> {
    if !(2..=4).contains(&n) {
        return Err(NcgError::InvalidParameter(format!("torus dimension {n} not in 2..=4")));
    }
    if cutoff < MIN_CUTOFF {
        return Err(NcgError::InvalidParameter(format!("cutoff below minimum: K = {cutoff} < {MIN_CUTOFF}")));
    }
    if theta.len() != n || theta.iter().any(|r| r.len() != n) {
        return Err(NcgError::InvalidParameter(format!("theta must be {n}x{n}")));
    }
    for i in 0..n {
        for j in 0..n {
            if (theta[i][j] + theta[j][i]).abs() > 1e-12 {
                return Err(NcgError::InvalidParameter("theta is not antisymmetric".into()));
            }
        }
    }
    Ok(())
}

pub fn build_torus(n: usize, theta: &[Vec<f64>], cutoff: i32) -> Result<Geometry> {
    build_torus_with(n, theta, cutoff, TorusConvention::WeylSymmetric)
}

pub fn build_torus_with(n: usize, theta: &[Vec<f64>], cutoff: i32, convention: TorusConvention) -> Result<Geometry> {
    validate(n, theta, cutoff)?;
    let sp = spinor_factor(n);
    let d = sp.gammas[0].nrows();
    let basis = Arc::new(Basis::torus(n, cutoff, d));
    let dim = basis.dim();
    let ks: Vec<&Vec<i32>> = basis
        .entries()
        .iter()
        .map(|b| match b {
            BasisIndex::Torus { k, .. } => k,
            _ => unreachable!(),
        })
        .collect();
    let spin = |i: usize| i % d;
    let pos = |k: &[i32], s: usize| basis.position(&BasisIndex::Torus { k: k.to_vec(), s });

    let mut generators = Vec::with_capacity(n);
    for gi in 0..n {
        let mut trip = Vec::with_capacity(dim);
        for col in 0..dim {
            let k = ks[col];
            let mut kk = k.clone();
            kk[gi] += 1;
            if let Some(row) = pos(&kk, spin(col)) {
                let phase = match convention {
                    TorusConvention::WeylSymmetric => PI * (0..n).map(|j| theta[gi][j] * k[j] as f64).sum::<f64>(),
                    TorusConvention::LeftOrdered => 2.0 * PI * (0..gi).map(|j| theta[gi][j] * k[j] as f64).sum::<f64>(),
                };
                trip.push((row, col, C64::from_polar(1.0, phase)));
            }
        }
        let op = SparseOperator::from_triplets(dim, dim, trip);
        let name = match (n, gi) {
            (2, 0) => "U".to_string(),
            (2, 1) => "V".to_string(),
            _ => format!("U{}", gi + 1),
        };
        generators.push(Generator { adj: op.adjoint(), op, name, charge: if gi == n - 1 { 1 } else { 0 } });
    }

    let derivations: Vec<SparseOperator> =
        (0..n).map(|i| SparseOperator::real_diagonal(&ks.iter().map(|k| k[i] as f64).collect::<Vec<_>>())).collect();

    let dirac = SparseOperator::from_triplets(
        dim,
        dim,
        (0..dim).flat_map(|col| {
            let (k, s) = (ks[col], spin(col));
            let base = col - s;
            let g = &sp.gammas;
            (0..n).flat_map(move |i| (0..d).map(move |t| (base + t, col, g[i][(t, s)] * k[i] as f64)))
        }),
    );

    let grading = sp.chirality.as_ref().map(|g| spinor_lift(dim, d, g));

    let mut jt = Vec::with_capacity(dim * d);
    for col in 0..dim {
        let (k, s) = (ks[col], spin(col));
        let neg: Vec<i32> = k.iter().map(|x| -x).collect();
        let phase = match convention {
            TorusConvention::WeylSymmetric => c(1.0, 0.0),
            TorusConvention::LeftOrdered => {
                let mut q = 0.0;
                for i in 0..n {
                    for j in (i + 1)..n {
                        q += theta[i][j] * (k[i] * k[j]) as f64;
                    }
                }
                C64::from_polar(1.0, -2.0 * PI * q)
            }
        };
        for t in 0..d {
            let row = pos(&neg, t).expect("the cutoff box is symmetric");
            jt.push((row, col, sp.real_factor[(t, s)] * phase));
        }
    }
    let real = AntilinearOperator::new(SparseOperator::from_triplets(dim, dim, jt));

    let delta = derivations[n - 1].clone();
    let delta_diag = ks.iter().map(|k| k[n - 1] as i64).collect();
    let base_generators = (0..n - 1)
        .map(|g| (generators[g].name.clone(), Expr::word(vec![Letter { gen: g, adjoint: false }])))
        .collect();

    Ok(Geometry {
        params: GeometryParams::Torus { n, theta: theta.to_vec(), cutoff, convention },
        basis,
        generators,
        dirac,
        real,
        grading,
        delta,
        delta_diag,
        derivations,
        kr_dim: n as u8,
        base_generators,
        spinor_dim: d,
    })
}

/// id ⊗ M on a torus basis with spinor dimension `d`.
pub fn spinor_lift(dim: usize, d: usize, m: &Mat) -> SparseOperator {
    SparseOperator::from_triplets(
        dim,
        dim,
        (0..dim).flat_map(|col| {
            let s = col % d;
            let base = col - s;
            (0..d).map(move |t| (base + t, col, m[(t, s)]))
        }),
    )
}

/// Reads off the spinor matrix of an operator of the form id ⊗ M (from the block at k = 0).
pub fn spinor_block(g: &Geometry, x: &SparseOperator) -> Mat {
    let d = g.spinor_dim;
    let n = match &g.params {
        GeometryParams::Torus { n, .. } => *n,
        _ => panic!("spinor_block on a non-torus geometry"),
    };
    let base = g.basis.position(&BasisIndex::Torus { k: vec![0; n], s: 0 }).expect("k = 0 present");
    Mat::from_fn(d, d, |i, j| x.get(base + i, base + j))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::operator::{commutator, residual_on_interior};

    #[test]
    fn commutative_limit() {
        let g = build_torus(2, &theta2(0.0), 3).unwrap();
        let s = g.interior(2).unwrap();
        let x = commutator(&g.generators[0].op, &g.generators[1].op).unwrap();
        assert_eq!(residual_on_interior(&x, &s).unwrap(), 0.0);
    }

    #[test]
    fn weyl_relation_t2() {
        let t = 0.4142;
        let g = build_torus(2, &theta2(t), 4).unwrap();
        let s = g.interior(2).unwrap();
        let (u, v) = (&g.generators[0].op, &g.generators[1].op);
        let lam = C64::from_polar(1.0, 2.0 * PI * t);
        let x = u.mul(v).unwrap().sub(&v.mul(u).unwrap().scale(lam)).unwrap();
        assert!(residual_on_interior(&x, &s).unwrap() < 1e-12);
        // same identity in the form [U,V] − (λ−1)VU
        let y = commutator(u, v).unwrap().sub(&v.mul(u).unwrap().scale(lam - 1.0)).unwrap();
        assert!(residual_on_interior(&y, &s).unwrap() < 1e-12);
    }

    #[test]
    fn group_commutator_t4_is_scalar_phase() {
        let th = vec![
            vec![0.0, 0.13, 0.27, 0.41],
            vec![-0.13, 0.0, 0.35, 0.08],
            vec![-0.27, -0.35, 0.0, 0.19],
            vec![-0.41, -0.08, -0.19, 0.0],
        ];
        let g = build_torus(4, &th, 3).unwrap();
        let s = InteriorSubspace::new(&g.basis, 2);
        for i in 0..4 {
            for j in 0..4 {
                let (a, b) = (&g.generators[i], &g.generators[j]);
                let x = SparseOperator::chain(&[&a.op, &b.op, &a.adj, &b.adj]).unwrap();
                // oracle: exp(πi(θ_ij − θ_ji))
                let ph = C64::from_polar(1.0, PI * (th[i][j] - th[j][i]));
                let r = x.sub(&SparseOperator::identity(g.dim()).scale(ph)).unwrap();
                assert!(residual_on_interior(&r, &s).unwrap() < 1e-12);
            }
        }
    }
    use crate::basis::InteriorSubspace;

    #[test]
    fn flat_dirac_zero_mode_and_hermiticity() {
        let g = build_torus(2, &theta2(0.3), 3).unwrap();
        assert!(g.dirac.hermiticity_deviation() < 1e-15);
        for s in 0..2 {
            let i = g.basis.position(&BasisIndex::Torus { k: vec![0, 0], s }).unwrap();
            assert_eq!(g.dirac.column(i).len(), 0);
        }
    }

    #[test]
    fn t4_dirac_anticommutes_with_gamma5() {
        let th = vec![vec![0.0; 4]; 4];
        let g = build_torus(4, &th, 3).unwrap();
        let ac = crate::operator::anticommutator(&g.dirac, g.grading.as_ref().unwrap()).unwrap();
        assert_eq!(ac.max_abs(), 0.0);
    }

    #[test]
    fn rejects_bad_parameters() {
        assert!(build_torus(2, &theta2(0.1), 2).is_err());
        assert!(build_torus(2, &[vec![0.0, 0.1], vec![0.1, 0.0]], 3).is_err());
        assert!(build_torus(5, &vec![vec![0.0; 5]; 5], 3).is_err());
    }
}
