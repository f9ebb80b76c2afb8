//! Sparse complex operators on a truncated basis.
//!
//! Storage is column-major: each column holds its nonzero `(row, value)`
//! pairs sorted by row. Entries below [`PRUNE`] in magnitude are dropped.

use nalgebra::DMatrix;
use num_complex::Complex64;
use rayon::prelude::*;

use crate::basis::InteriorSubspace;
use crate::error::{NcgError, Result};

pub type C64 = Complex64;

pub const PRUNE: f64 = 1e-15;

pub const fn c(re: f64, im: f64) -> C64 {
    Complex64::new(re, im)
}

#[derive(Clone, Debug, PartialEq)]
pub struct SparseOperator {
    rows: usize,
    cols: Vec<Vec<(usize, C64)>>,
}

impl SparseOperator {
    pub fn zeros(rows: usize, ncols: usize) -> Self {
        Self { rows, cols: vec![Vec::new(); ncols] }
    }

    pub fn identity(dim: usize) -> Self {
        Self::diagonal(&vec![C64::new(1.0, 0.0); dim])
    }

    pub fn diagonal(d: &[C64]) -> Self {
        let cols = d
            .iter()
            .enumerate()
            .map(|(i, &v)| if v.norm() > PRUNE { vec![(i, v)] } else { Vec::new() })
            .collect();
        Self { rows: d.len(), cols }
    }

    pub fn real_diagonal(d: &[f64]) -> Self {
        Self::diagonal(&d.iter().map(|&x| C64::new(x, 0.0)).collect::<Vec<_>>())
    }

    /// Builds from `(row, col, value)` triplets; duplicates are summed.
    pub fn from_triplets(rows: usize, ncols: usize, t: impl IntoIterator<Item = (usize, usize, C64)>) -> Self {
        let mut cols: Vec<Vec<(usize, C64)>> = vec![Vec::new(); ncols];
        for (r, col, v) in t {
            assert!(r < rows && col < ncols, "triplet ({r},{col}) out of range");
            cols[col].push((r, v));
        }
        for col in cols.iter_mut() {
            normalize_column(col);
        }
        Self { rows, cols }
    }

    /// Dense row-major input, mainly for small spinor matrices.
    pub fn from_dense(m: &DMatrix<C64>) -> Self {
        Self::from_triplets(
            m.nrows(),
            m.ncols(),
            (0..m.ncols()).flat_map(|j| (0..m.nrows()).map(move |i| (i, j, m[(i, j)]))),
        )
    }

    pub fn nrows(&self) -> usize {
        self.rows
    }

    pub fn ncols(&self) -> usize {
        self.cols.len()
    }

    /// Square dimension; panics on rectangular operators.
    pub fn dim(&self) -> usize {
        assert_eq!(self.rows, self.cols.len(), "dim() on a rectangular operator");
        self.rows
    }

    pub fn is_square(&self) -> bool {
        self.rows == self.cols.len()
    }

    pub fn nnz(&self) -> usize {
        self.cols.iter().map(Vec::len).sum()
    }

    pub fn column(&self, j: usize) -> &[(usize, C64)] {
        &self.cols[j]
    }

    pub fn get(&self, r: usize, col: usize) -> C64 {
        match self.cols[col].binary_search_by_key(&r, |e| e.0) {
            Ok(p) => self.cols[col][p].1,
            Err(_) => C64::new(0.0, 0.0),
        }
    }

    /// All stored entries as `(row, col, value)`, ordered by column then row.
    pub fn entries(&self) -> impl Iterator<Item = (usize, usize, C64)> + '_ {
        self.cols
            .iter()
            .enumerate()
            .flat_map(|(j, col)| col.iter().map(move |&(i, v)| (i, j, v)))
    }

    pub fn to_dense(&self) -> DMatrix<C64> {
        let mut m = DMatrix::zeros(self.rows, self.ncols());
        for (i, j, v) in self.entries() {
            m[(i, j)] = v;
        }
        m
    }

    pub fn adjoint(&self) -> Self {
        Self::from_triplets(self.ncols(), self.rows, self.entries().map(|(i, j, v)| (j, i, v.conj())))
    }

    pub fn transpose(&self) -> Self {
        Self::from_triplets(self.ncols(), self.rows, self.entries().map(|(i, j, v)| (j, i, v)))
    }

    /// Entrywise complex conjugate.
    pub fn conj(&self) -> Self {
        Self {
            rows: self.rows,
            cols: self.cols.iter().map(|col| col.iter().map(|&(i, v)| (i, v.conj())).collect()).collect(),
        }
    }

    pub fn scale(&self, s: C64) -> Self {
        let mut out = Self {
            rows: self.rows,
            cols: self.cols.iter().map(|col| col.iter().map(|&(i, v)| (i, v * s)).collect()).collect(),
        };
        for col in out.cols.iter_mut() {
            col.retain(|e| e.1.norm() > PRUNE);
        }
        out
    }

    pub fn scale_re(&self, s: f64) -> Self {
        self.scale(C64::new(s, 0.0))
    }

    /// Σ cᵢ Xᵢ for operators of equal shape.
    pub fn linear_combination(terms: &[(C64, &SparseOperator)]) -> Result<Self> {
        let first = terms
            .first()
            .ok_or_else(|| NcgError::Structural("empty linear combination".into()))?;
        let (rows, ncols) = (first.1.rows, first.1.ncols());
        for (_, x) in terms {
            if x.rows != rows || x.ncols() != ncols {
                return Err(NcgError::DimensionMismatch(format!(
                    "{}x{} vs {}x{}",
                    rows,
                    ncols,
                    x.rows,
                    x.ncols()
                )));
            }
        }
        let cols = (0..ncols)
            .map(|j| {
                let mut col: Vec<(usize, C64)> = terms
                    .iter()
                    .flat_map(|(s, x)| x.cols[j].iter().map(move |&(i, v)| (i, v * s)))
                    .collect();
                normalize_column(&mut col);
                col
            })
            .collect();
        Ok(Self { rows, cols })
    }

    pub fn add(&self, other: &Self) -> Result<Self> {
        Self::linear_combination(&[(C64::new(1.0, 0.0), self), (C64::new(1.0, 0.0), other)])
    }

    pub fn sub(&self, other: &Self) -> Result<Self> {
        Self::linear_combination(&[(C64::new(1.0, 0.0), self), (C64::new(-1.0, 0.0), other)])
    }

    /// Matrix product `self · other`.
    pub fn mul(&self, other: &Self) -> Result<Self> {
        if self.ncols() != other.rows {
            return Err(NcgError::DimensionMismatch(format!(
                "product of {}x{} and {}x{}",
                self.rows,
                self.ncols(),
                other.rows,
                other.ncols()
            )));
        }
        let rows = self.rows;
        let cols = other
            .cols
            .par_iter()
            .map_init(
                || (vec![C64::new(0.0, 0.0); rows], vec![false; rows], Vec::<usize>::new()),
                |(acc, seen, touched), col| {
                    for &(k, b) in col {
                        for &(i, a) in &self.cols[k] {
                            if !seen[i] {
                                seen[i] = true;
                                touched.push(i);
                            }
                            acc[i] += a * b;
                        }
                    }
                    touched.sort_unstable();
                    let mut out = Vec::with_capacity(touched.len());
                    for &i in touched.iter() {
                        if acc[i].norm() > PRUNE {
                            out.push((i, acc[i]));
                        }
                        acc[i] = C64::new(0.0, 0.0);
                        seen[i] = false;
                    }
                    touched.clear();
                    out
                },
            )
            .collect();
        Ok(Self { rows, cols })
    }

    /// Product of a chain `x₀ · x₁ · … · xₖ`, evaluated right to left.
    pub fn chain(ops: &[&SparseOperator]) -> Result<Self> {
        let (last, rest) = ops
            .split_last()
            .ok_or_else(|| NcgError::Structural("empty product".into()))?;
        let mut acc = (*last).clone();
        for x in rest.iter().rev() {
            acc = x.mul(&acc)?;
        }
        Ok(acc)
    }

    pub fn apply(&self, v: &[C64]) -> Vec<C64> {
        assert_eq!(v.len(), self.ncols());
        let mut out = vec![C64::new(0.0, 0.0); self.rows];
        for (j, col) in self.cols.iter().enumerate() {
            if v[j] == C64::new(0.0, 0.0) {
                continue;
            }
            for &(i, a) in col {
                out[i] += a * v[j];
            }
        }
        out
    }

    /// Keeps only the listed columns, in the given order.
    pub fn select_columns(&self, idx: &[usize]) -> Self {
        Self { rows: self.rows, cols: idx.iter().map(|&j| self.cols[j].clone()).collect() }
    }

    /// Compression to the coordinate subset `idx` (rows and columns), in the order given.
    pub fn restrict(&self, idx: &[usize]) -> Result<Self> {
        let mut pos = vec![usize::MAX; self.rows];
        for (p, &i) in idx.iter().enumerate() {
            if i >= self.rows || i >= self.ncols() {
                return Err(NcgError::InvalidParameter(format!("index {i} out of range")));
            }
            pos[i] = p;
        }
        Ok(Self::from_triplets(
            idx.len(),
            idx.len(),
            idx.iter().enumerate().flat_map(|(pj, &j)| {
                let pos = &pos;
                self.cols[j]
                    .iter()
                    .filter(move |e| pos[e.0] != usize::MAX)
                    .map(move |&(i, v)| (pos[i], pj, v))
            }),
        ))
    }

    /// Compression `V† X V` onto the range of an isometry `V`.
    pub fn compress(&self, v: &SparseOperator) -> Result<Self> {
        v.adjoint().mul(&self.mul(v)?)
    }

    pub fn max_abs(&self) -> f64 {
        self.entries().map(|e| e.2.norm()).fold(0.0, f64::max)
    }

    pub fn frobenius(&self) -> f64 {
        self.entries().map(|e| e.2.norm_sqr()).sum::<f64>().sqrt()
    }

    /// Largest column 2-norm.
    pub fn max_column_norm(&self) -> f64 {
        self.cols
            .iter()
            .map(|col| col.iter().map(|e| e.1.norm_sqr()).sum::<f64>().sqrt())
            .fold(0.0, f64::max)
    }

    pub fn hermiticity_deviation(&self) -> f64 {
        match self.sub(&self.adjoint()) {
            Ok(d) => d.max_abs(),
            Err(_) => f64::INFINITY,
        }
    }

    /// Adds `eps` at entry `(r, col)`; used for mutation tests.
    pub fn perturbed(&self, r: usize, col: usize, eps: C64) -> Self {
        let mut out = self.clone();
        out.cols[col].push((r, eps));
        normalize_column(&mut out.cols[col]);
        out
    }

    /// Kronecker product `self ⊗ other` in row-major block order.
    pub fn kron(&self, other: &Self) -> Self {
        let (r2, c2) = (other.rows, other.ncols());
        Self::from_triplets(
            self.rows * r2,
            self.ncols() * c2,
            self.entries().flat_map(|(i, j, a)| {
                other.entries().map(move |(k, l, b)| (i * r2 + k, j * c2 + l, a * b))
            }),
        )
    }
}

fn normalize_column(col: &mut Vec<(usize, C64)>) {
    col.sort_by_key(|e| e.0);
    let mut out: Vec<(usize, C64)> = Vec::with_capacity(col.len());
    for &(i, v) in col.iter() {
        match out.last_mut() {
            Some(last) if last.0 == i => last.1 += v,
            _ => out.push((i, v)),
        }
    }
    out.retain(|e| e.1.norm() > PRUNE);
    *col = out;
}

pub fn commutator(x: &SparseOperator, y: &SparseOperator) -> Result<SparseOperator> {
    check_square_pair(x, y)?;
    x.mul(y)?.sub(&y.mul(x)?)
}

pub fn anticommutator(x: &SparseOperator, y: &SparseOperator) -> Result<SparseOperator> {
    check_square_pair(x, y)?;
    x.mul(y)?.add(&y.mul(x)?)
}

fn check_square_pair(x: &SparseOperator, y: &SparseOperator) -> Result<()> {
    if !x.is_square() || !y.is_square() || x.nrows() != y.nrows() {
        return Err(NcgError::DimensionMismatch(format!(
            "{}x{} vs {}x{}",
            x.nrows(),
            x.ncols(),
            y.nrows(),
            y.ncols()
        )));
    }
    Ok(())
}

/// max over interior basis vectors v of ‖Xv‖.
pub fn residual_on_interior(x: &SparseOperator, s: &InteriorSubspace) -> Result<f64> {
    s.require_nonempty()?;
    if x.ncols() != s.parent_dim() {
        return Err(NcgError::DimensionMismatch(format!(
            "operator has {} columns, basis has {}",
            x.ncols(),
            s.parent_dim()
        )));
    }
    Ok(x.select_columns(s.indices()).max_column_norm())
}

/// Residual of the commutator `[X, Y]` on the interior, without forming it in full.
pub fn commutator_residual(x: &SparseOperator, y: &SparseOperator, s: &InteriorSubspace) -> Result<f64> {
    s.require_nonempty()?;
    let xe = x.select_columns(s.indices());
    let ye = y.select_columns(s.indices());
    Ok(x.mul(&ye)?.sub(&y.mul(&xe)?)?.max_column_norm())
}

/// An antilinear operator `v ↦ M · conj(v)`.
#[derive(Clone, Debug, PartialEq)]
pub struct AntilinearOperator {
    pub matrix: SparseOperator,
}

impl AntilinearOperator {
    pub fn new(matrix: SparseOperator) -> Self {
        Self { matrix }
    }

    pub fn apply(&self, v: &[C64]) -> Vec<C64> {
        let cv: Vec<C64> = v.iter().map(|z| z.conj()).collect();
        self.matrix.apply(&cv)
    }

    /// The linear operator `J²`, with matrix `M · conj(M)`.
    pub fn square(&self) -> Result<SparseOperator> {
        self.matrix.mul(&self.matrix.conj())
    }

    /// `J X J⁻¹` for antiunitary `J`, i.e. `M · conj(X) · M†`.
    pub fn conjugate(&self, x: &SparseOperator) -> Result<SparseOperator> {
        SparseOperator::chain(&[&self.matrix, &x.conj(), &self.matrix.adjoint()])
    }

    /// `J X` as a linear map composed with `J`: returns the linear operator `M · conj(X)`.
    pub fn after(&self, x: &SparseOperator) -> Result<SparseOperator> {
        self.matrix.mul(&x.conj())
    }

    /// `L ∘ J` is again antilinear with matrix `L · M`.
    pub fn premultiply(&self, l: &SparseOperator) -> Result<Self> {
        Ok(Self::new(l.mul(&self.matrix)?))
    }

    /// The right action `J π(b)* J⁻¹`.
    pub fn opposite(&self, b: &SparseOperator) -> Result<SparseOperator> {
        self.conjugate(&b.adjoint())
    }

    pub fn inverse(&self) -> Self {
        Self::new(self.matrix.transpose())
    }
}

/// Eigenvalues of a Hermitian operator, ascending with multiplicity.
///
/// The matrix is split into the connected components of its sparsity graph and
/// each block is densified separately.
pub fn hermitian_eigenvalues(x: &SparseOperator) -> Result<Vec<f64>> {
    if !x.is_square() {
        return Err(NcgError::DimensionMismatch("eigenvalues of a rectangular operator".into()));
    }
    let n = x.dim();
    let dev = x.hermiticity_deviation();
    if dev > 1e-12 * (n.max(1) as f64) {
        return Err(NcgError::NotHermitian { deviation: dev });
    }
    let blocks = connected_blocks(x);
    let mut vals: Vec<f64> = blocks
        .par_iter()
        .flat_map_iter(|block| {
            if block.len() == 1 {
                return vec![x.get(block[0], block[0]).re];
            }
            let sub = x.restrict(block).expect("block indices are valid").to_dense();
            let herm = (&sub + sub.adjoint()) * C64::new(0.5, 0.0);
            herm.symmetric_eigenvalues().iter().copied().collect()
        })
        .collect();
    vals.sort_by(|a, b| a.partial_cmp(b).expect("finite eigenvalues"));
    Ok(vals)
}

/// Index sets of the connected components of the (symmetrized) sparsity graph.
pub fn connected_blocks(x: &SparseOperator) -> Vec<Vec<usize>> {
    let n = x.nrows().max(x.ncols());
    let mut parent: Vec<usize> = (0..n).collect();
    fn find(p: &mut [usize], mut i: usize) -> usize {
        while p[i] != i {
            p[i] = p[p[i]];
            i = p[i];
        }
        i
    }
    for (i, j, _) in x.entries() {
        let (a, b) = (find(&mut parent, i), find(&mut parent, j));
        if a != b {
            parent[a.max(b)] = a.min(b);
        }
    }
    let mut groups: std::collections::BTreeMap<usize, Vec<usize>> = Default::default();
    for i in 0..n {
        let r = find(&mut parent, i);
        groups.entry(r).or_default().push(i);
    }
    groups.into_values().collect()
}

/// Merges sorted eigenvalues closer than `tol` into `(value, multiplicity)` pairs.
pub fn merge_multiplicities(vals: &[f64], tol: f64) -> Vec<(f64, usize)> {
    let mut out: Vec<(f64, usize, f64)> = Vec::new();
    for &v in vals {
        match out.last_mut() {
            Some(last) if (v - last.2).abs() <= tol => {
                last.1 += 1;
                last.2 = v;
            }
            _ => out.push((v, 1, v)),
        }
    }
    out.into_iter().map(|(v, m, _)| (v, m)).collect()
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::spinor::pauli;

    fn dense2(a: [[C64; 2]; 2]) -> SparseOperator {
        SparseOperator::from_triplets(2, 2, (0..2).flat_map(|i| (0..2).map(move |j| (i, j, a[i][j]))))
    }

    #[test]
    fn pauli_commutator_is_two_i_sigma3() {
        let [s1, s2, s3] = pauli();
        let lhs = commutator(&s1, &s2).unwrap();
        let expected = dense2([[c(0.0, 2.0), c(0.0, 0.0)], [c(0.0, 0.0), c(0.0, -2.0)]]);
        assert!(lhs.sub(&expected).unwrap().max_abs() < 1e-15);
        assert!(lhs.sub(&s3.scale(c(0.0, 2.0))).unwrap().max_abs() < 1e-15);
    }

    #[test]
    fn commutator_with_identity_vanishes() {
        let [s1, _, _] = pauli();
        let x = s1.kron(&dense2([[c(1.0, 2.0), c(3.0, 0.0)], [c(0.0, -1.0), c(0.5, 0.5)]]));
        assert_eq!(commutator(&x, &SparseOperator::identity(4)).unwrap().nnz(), 0);
    }

    #[test]
    fn dimension_mismatch_is_an_error() {
        let e = commutator(&SparseOperator::identity(2), &SparseOperator::identity(3));
        assert!(matches!(e, Err(NcgError::DimensionMismatch(_))));
    }

    #[test]
    fn pruning_drops_tiny_entries() {
        let x = SparseOperator::from_triplets(2, 2, [(0, 0, c(1e-16, 0.0)), (1, 1, c(1.0, 0.0)), (1, 1, c(-1.0, 1e-17))]);
        assert_eq!(x.nnz(), 0);
    }

    #[test]
    fn two_by_two_block_eigenvalues() {
        let [s1, s2, _] = pauli();
        let x = s1.add(&s2.scale_re(2.0)).unwrap();
        let ev = hermitian_eigenvalues(&x).unwrap();
        let r5 = 5f64.sqrt();
        assert!((ev[0] + r5).abs() < 1e-12 && (ev[1] - r5).abs() < 1e-12);
    }

    #[test]
    fn identity_eigenvalues() {
        let ev = hermitian_eigenvalues(&SparseOperator::identity(7)).unwrap();
        assert_eq!(ev, vec![1.0; 7]);
    }

    #[test]
    fn non_hermitian_input_rejected() {
        let x = SparseOperator::from_triplets(2, 2, [(0, 1, c(1.0, 0.0))]);
        match hermitian_eigenvalues(&x) {
            Err(NcgError::NotHermitian { deviation }) => assert!((deviation - 1.0).abs() < 1e-15),
            other => panic!("unexpected {other:?}"),
        }
    }

    #[test]
    fn antilinear_square_and_inverse() {
        let [_, s2, _] = pauli();
        let j = AntilinearOperator::new(s2.scale(c(0.0, 1.0)));
        let sq = j.square().unwrap();
        assert!(sq.add(&SparseOperator::identity(2)).unwrap().max_abs() < 1e-15);
        let v = vec![c(0.3, -1.2), c(2.0, 0.7)];
        let back = j.inverse().apply(&j.apply(&v));
        assert!((back[0] - v[0]).norm() < 1e-15 && (back[1] - v[1]).norm() < 1e-15);
    }

    #[test]
    fn restrict_identity_is_identity() {
        let x = SparseOperator::identity(6).restrict(&[4, 1, 2]).unwrap();
        assert_eq!(x, SparseOperator::identity(3));
    }

    #[test]
    fn merge_multiplicities_groups_close_values() {
        let m = merge_multiplicities(&[-1.0, -1.0 + 1e-11, 0.5, 2.0, 2.0], 1e-9);
        assert_eq!(m.iter().map(|e| e.1).collect::<Vec<_>>(), vec![2, 1, 2]);
    }
}
