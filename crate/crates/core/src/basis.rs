//! Truncated orthonormal bases and their interior subspaces.
//!
//! Half-integers on the sphere are stored doubled so index arithmetic stays exact.

use std::collections::HashMap;
use std::sync::Arc;

use crate::error::{NcgError, Result};

#[derive(Clone, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum BasisIndex {
    Torus { k: Vec<i32>, s: usize },
    Sphere { twice_l: i32, twice_m: i32, twice_n: i32, sign: i8 },
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum BasisKind {
    Torus { n: usize, cutoff: i32, spinor_dim: usize },
    Sphere { twice_cutoff: i32 },
}

#[derive(Debug)]
pub struct Basis {
    pub kind: BasisKind,
    entries: Vec<BasisIndex>,
    lookup: HashMap<BasisIndex, usize>,
}

impl Basis {
    /// {k ∈ Zⁿ : |k_j| ≤ K} ⊗ C^d, lexicographic in (k, s).
    pub fn torus(n: usize, cutoff: i32, spinor_dim: usize) -> Self {
        let side = (2 * cutoff + 1) as usize;
        let count = side.pow(n as u32);
        let mut entries = Vec::with_capacity(count * spinor_dim);
        for flat in 0..count {
            let mut rem = flat;
            let mut k = vec![0i32; n];
            for j in (0..n).rev() {
                k[j] = (rem % side) as i32 - cutoff;
                rem /= side;
            }
            for s in 0..spinor_dim {
                entries.push(BasisIndex::Torus { k: k.clone(), s });
            }
        }
        Self::from_entries(BasisKind::Torus { n, cutoff, spinor_dim }, entries)
    }

    /// |l,m,n,±⟩ with l ≤ L, ordered by (twice_l, twice_m, twice_n, sign) with + before −.
    pub fn sphere(twice_cutoff: i32) -> Self {
        let mut entries = Vec::new();
        for tl in 0..=twice_cutoff {
            for tm in (-tl..=tl).step_by(2) {
                for tn in (-tl..=tl).step_by(2) {
                    for sign in [1i8, -1] {
                        entries.push(BasisIndex::Sphere { twice_l: tl, twice_m: tm, twice_n: tn, sign });
                    }
                }
            }
        }
        Self::from_entries(BasisKind::Sphere { twice_cutoff }, entries)
    }

    fn from_entries(kind: BasisKind, entries: Vec<BasisIndex>) -> Self {
        let lookup = entries.iter().enumerate().map(|(i, e)| (e.clone(), i)).collect();
        Self { kind, entries, lookup }
    }

    pub fn dim(&self) -> usize {
        self.entries.len()
    }

    pub fn index(&self, i: usize) -> &BasisIndex {
        &self.entries[i]
    }

    pub fn entries(&self) -> &[BasisIndex] {
        &self.entries
    }

    pub fn position(&self, b: &BasisIndex) -> Option<usize> {
        self.lookup.get(b).copied()
    }

    /// Whether index `i` lies in the margin-`m` interior.
    pub fn in_interior(&self, i: usize, margin: usize) -> bool {
        let m = margin as i32;
        match (&self.kind, &self.entries[i]) {
            (BasisKind::Torus { cutoff, .. }, BasisIndex::Torus { k, .. }) => k.iter().all(|kj| kj.abs() <= cutoff - m),
            (BasisKind::Sphere { twice_cutoff }, BasisIndex::Sphere { twice_l, .. }) => *twice_l <= twice_cutoff - 2 * m,
            _ => unreachable!("basis kind and index kind always agree"),
        }
    }

    pub fn indices_where(&self, pred: impl Fn(&BasisIndex) -> bool) -> Vec<usize> {
        (0..self.dim()).filter(|&i| pred(&self.entries[i])).collect()
    }
}

/// The span of basis vectors at distance at least `margin` from the cutoff.
#[derive(Clone, Debug)]
pub struct InteriorSubspace {
    pub margin: usize,
    parent_dim: usize,
    indices: Arc<Vec<usize>>,
}

impl InteriorSubspace {
    pub fn new(basis: &Basis, margin: usize) -> Self {
        Self {
            margin,
            parent_dim: basis.dim(),
            indices: Arc::new((0..basis.dim()).filter(|&i| basis.in_interior(i, margin)).collect()),
        }
    }

    /// An arbitrary coordinate subset treated as the interior (used on descended spaces).
    pub fn from_indices(parent_dim: usize, margin: usize, indices: Vec<usize>) -> Self {
        Self { margin, parent_dim, indices: Arc::new(indices) }
    }

    /// Intersection with a coordinate subset, re-indexed into the subset's enumeration.
    pub fn within(&self, subset: &[usize]) -> Self {
        let members: std::collections::HashSet<usize> = self.indices.iter().copied().collect();
        let idx = subset
            .iter()
            .enumerate()
            .filter(|(_, i)| members.contains(i))
            .map(|(p, _)| p)
            .collect();
        Self::from_indices(subset.len(), self.margin, idx)
    }

    /// Interior indices that also lie in `subset`, still indexed in the parent space.
    pub fn intersect(&self, subset: &[usize]) -> Self {
        let keep: std::collections::HashSet<usize> = subset.iter().copied().collect();
        let idx = self.indices.iter().copied().filter(|i| keep.contains(i)).collect();
        Self::from_indices(self.parent_dim, self.margin, idx)
    }

    pub fn indices(&self) -> &[usize] {
        &self.indices
    }

    pub fn len(&self) -> usize {
        self.indices.len()
    }

    pub fn is_empty(&self) -> bool {
        self.indices.is_empty()
    }

    pub fn parent_dim(&self) -> usize {
        self.parent_dim
    }

    pub fn require_nonempty(&self) -> Result<()> {
        if self.indices.is_empty() {
            Err(NcgError::EmptyInterior { margin: self.margin })
        } else {
            Ok(())
        }
    }
}
