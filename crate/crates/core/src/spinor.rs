//! Pauli and Dirac matrices for the spinor factors.

use nalgebra::DMatrix;

use crate::operator::{c, SparseOperator, C64};

pub type Mat = DMatrix<C64>;

fn m2(a: [C64; 4]) -> Mat {
    Mat::from_row_slice(2, 2, &a)
}

pub fn pauli_dense() -> [Mat; 3] {
    let (o, z, i) = (c(1.0, 0.0), c(0.0, 0.0), c(0.0, 1.0));
    [m2([z, o, o, z]), m2([z, -i, i, z]), m2([o, z, z, -o])]
}

pub fn pauli() -> [SparseOperator; 3] {
    pauli_dense().map(|m| SparseOperator::from_dense(&m))
}

fn block(a: &Mat, b: &Mat, cc: &Mat, d: &Mat) -> Mat {
    let mut m = Mat::zeros(4, 4);
    m.view_mut((0, 0), (2, 2)).copy_from(a);
    m.view_mut((0, 2), (2, 2)).copy_from(b);
    m.view_mut((2, 0), (2, 2)).copy_from(cc);
    m.view_mut((2, 2), (2, 2)).copy_from(d);
    m
}

/// Dirac-representation gamma matrices and the sixteen-element basis of M₄(C).
#[derive(Clone, Debug)]
pub struct CliffordBasis4 {
    /// γ¹..γ⁴ at indices 0..3.
    pub gamma: [Mat; 4],
    pub gamma5: Mat,
    pub sixteen_basis: Vec<(String, Mat)>,
}

pub fn clifford4() -> CliffordBasis4 {
    let s = pauli_dense();
    let id2 = Mat::identity(2, 2);
    let z2 = Mat::zeros(2, 2);
    let i = c(0.0, 1.0);
    let mut gamma: Vec<Mat> = s
        .iter()
        .map(|sj| block(&z2, &(sj * i), &(sj * (-i)), &z2))
        .collect();
    gamma.push(block(&id2, &z2, &z2, &(-&id2)));
    let gamma: [Mat; 4] = gamma.try_into().expect("four gamma matrices");
    let gamma5 = &gamma[0] * &gamma[1] * &gamma[2] * &gamma[3];

    let mut basis = vec![("id".to_string(), Mat::identity(4, 4)), ("g5".to_string(), gamma5.clone())];
    for (k, g) in gamma.iter().enumerate() {
        basis.push((format!("g{}", k + 1), g.clone()));
    }
    for (k, g) in gamma.iter().enumerate() {
        basis.push((format!("g5g{}", k + 1), &gamma5 * g));
    }
    for a in 0..4 {
        for b in (a + 1)..4 {
            basis.push((format!("s{}{}", a + 1, b + 1), &gamma[a] * &gamma[b] - &gamma[b] * &gamma[a]));
        }
    }
    CliffordBasis4 { gamma, gamma5, sixteen_basis: basis }
}

impl CliffordBasis4 {
    /// Coefficients of `m` along γ^j (α) and γ⁵γ^j (β), using ⟨X,Y⟩ = tr(X†Y)/4.
    pub fn alpha_beta(&self, m: &Mat) -> ([C64; 4], [C64; 4]) {
        let ip = |x: &Mat| (x.adjoint() * m).trace() / c(4.0, 0.0);
        let mut alpha = [c(0.0, 0.0); 4];
        let mut beta = [c(0.0, 0.0); 4];
        for j in 0..4 {
            alpha[j] = ip(&self.gamma[j]);
            beta[j] = ip(&(&self.gamma5 * &self.gamma[j]));
        }
        (alpha, beta)
    }

    /// Full expansion of `m` over the sixteen basis elements (σ^{ij} normalized by tr(σ†σ)/4 = 4).
    pub fn expand(&self, m: &Mat) -> Vec<(String, C64)> {
        self.sixteen_basis
            .iter()
            .map(|(name, x)| {
                let norm = (x.adjoint() * x).trace() / c(4.0, 0.0);
                (name.clone(), (x.adjoint() * m).trace() / c(4.0, 0.0) / norm)
            })
            .collect()
    }
}

/// Frobenius distance between small dense matrices.
pub fn dist(a: &Mat, b: &Mat) -> f64 {
    (a - b).norm()
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn clifford_relations() {
        let cl = clifford4();
        let id = Mat::identity(4, 4);
        for i in 0..4 {
            assert!(dist(&(&cl.gamma[i] * &cl.gamma[i]), &id) < 1e-15);
            assert!(dist(&cl.gamma[i].adjoint(), &cl.gamma[i]) < 1e-15);
            for j in 0..4 {
                if i != j {
                    let ac = &cl.gamma[i] * &cl.gamma[j] + &cl.gamma[j] * &cl.gamma[i];
                    assert!(ac.norm() < 1e-15);
                }
            }
            let ac5 = &cl.gamma5 * &cl.gamma[i] + &cl.gamma[i] * &cl.gamma5;
            assert!(ac5.norm() < 1e-15);
        }
        assert!(dist(&(&cl.gamma5 * &cl.gamma5), &id) < 1e-15);
    }

    #[test]
    fn gamma5_is_antidiagonal_unit_blocks() {
        let cl = clifford4();
        let (o, z) = (c(1.0, 0.0), c(0.0, 0.0));
        let expected = Mat::from_row_slice(4, 4, &[z, z, o, z, z, z, z, o, o, z, z, z, z, o, z, z]);
        assert!(dist(&cl.gamma5, &expected) < 1e-15);
    }

    #[test]
    fn gamma4_squares_to_identity() {
        let cl = clifford4();
        assert!(dist(&(&cl.gamma[3] * &cl.gamma[3]), &Mat::identity(4, 4)) < 1e-15);
    }

    #[test]
    fn sixteen_basis_gram_matrix() {
        // σ^{ij} = [γ^i, γ^j] = 2γ^iγ^j has ⟨σ,σ⟩ = 4; rescale those by ½ for orthonormality.
        let cl = clifford4();
        let scaled: Vec<Mat> = cl
            .sixteen_basis
            .iter()
            .map(|(n, m)| if n.starts_with('s') { m * c(0.5, 0.0) } else { m.clone() })
            .collect();
        assert_eq!(scaled.len(), 16);
        for (a, x) in scaled.iter().enumerate() {
            for (b, y) in scaled.iter().enumerate() {
                let g = (x.adjoint() * y).trace() / c(4.0, 0.0);
                let want = if a == b { 1.0 } else { 0.0 };
                assert!((g - c(want, 0.0)).norm() < 1e-14, "gram[{a},{b}] = {g}");
            }
        }
    }
}
