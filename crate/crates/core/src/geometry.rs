//! Common carrier for a truncated geometry: basis, algebra generators and the
//! operators D, J, γ, δ.

use std::collections::BTreeMap;
use std::fmt;
use std::sync::Arc;

use serde_json::{json, Value};

use crate::basis::{Basis, InteriorSubspace};
use crate::error::{NcgError, Result};
use crate::operator::{c, AntilinearOperator, SparseOperator, C64};

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct Letter {
    pub gen: usize,
    pub adjoint: bool,
}

/// A product of generators and their adjoints, leftmost factor first.
pub type Word = Vec<Letter>;

/// A finite linear combination of words.
#[derive(Clone, Debug, PartialEq)]
pub struct Expr(pub Vec<(C64, Word)>);

impl Expr {
    pub fn word(w: Word) -> Self {
        Expr(vec![(c(1.0, 0.0), w)])
    }

    pub fn one() -> Self {
        Self::word(Vec::new())
    }

    pub fn scaled(mut self, s: C64) -> Self {
        for t in self.0.iter_mut() {
            t.0 *= s;
        }
        self
    }

    pub fn plus(mut self, other: Expr) -> Self {
        self.0.extend(other.0);
        self
    }

    /// Product of expressions (concatenation of words).
    pub fn times(&self, other: &Expr) -> Self {
        Expr(
            self.0
                .iter()
                .flat_map(|(a, u)| {
                    other.0.iter().map(move |(b, v)| {
                        let mut w = u.clone();
                        w.extend_from_slice(v);
                        (a * b, w)
                    })
                })
                .collect(),
        )
    }

    pub fn adjoint(&self) -> Self {
        Expr(
            self.0
                .iter()
                .map(|(a, w)| (a.conj(), w.iter().rev().map(|l| Letter { gen: l.gen, adjoint: !l.adjoint }).collect()))
                .collect(),
        )
    }

    pub fn max_len(&self) -> usize {
        self.0.iter().map(|t| t.1.len()).max().unwrap_or(0)
    }
}

#[derive(Clone, Debug)]
pub struct Generator {
    pub name: String,
    pub op: SparseOperator,
    pub adj: SparseOperator,
    /// U(1) charge: δ(x) = charge · x.
    pub charge: i32,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum TorusConvention {
    /// π(U_i)|k⟩ = exp(πi Σ_j θ_ij k_j)|k+e_i⟩.
    WeylSymmetric,
    /// GNS basis of ordered monomials U₁^{k₁}⋯U_n^{k_n}.
    LeftOrdered,
}

#[derive(Clone, Debug, PartialEq)]
pub enum GeometryParams {
    Torus { n: usize, theta: Vec<Vec<f64>>, cutoff: i32, convention: TorusConvention },
    Sphere { twice_cutoff: i32, theta: f64, r: f64, s: C64, alpha: f64 },
}

impl GeometryParams {
    pub fn name(&self) -> String {
        match self {
            GeometryParams::Torus { n, .. } => format!("torus{n}"),
            GeometryParams::Sphere { .. } => "sphere3".into(),
        }
    }

    pub fn to_json(&self) -> Value {
        match self {
            GeometryParams::Torus { n, theta, cutoff, convention } => json!({
                "n": n, "theta": theta, "K": cutoff,
                "convention": format!("{convention:?}"),
            }),
            GeometryParams::Sphere { twice_cutoff, theta, r, s, alpha } => json!({
                "L": *twice_cutoff as f64 / 2.0, "theta": theta, "r": r,
                "s": format_complex(*s), "alpha": alpha,
            }),
        }
    }
}

pub fn format_complex(z: C64) -> String {
    if z.im < 0.0 {
        format!("{}{}j", z.re, z.im)
    } else {
        format!("{}+{}j", z.re, z.im)
    }
}

/// Parses `"re+imj"`, `"re-imj"`, `"re"` or `"imj"`.
pub fn parse_complex(s: &str) -> Result<C64> {
    let t: String = s.chars().filter(|ch| !ch.is_whitespace()).collect();
    let bad = || NcgError::InvalidParameter(format!("cannot parse complex number `{s}`"));
    let num = |x: &str| -> Result<f64> {
        match x {
            "" | "+" => Ok(1.0),
            "-" => Ok(-1.0),
            _ => x.parse::<f64>().map_err(|_| bad()),
        }
    };
    let Some(body) = t.strip_suffix('j') else {
        return Ok(c(t.parse::<f64>().map_err(|_| bad())?, 0.0));
    };
    let bytes = body.as_bytes();
    // last sign that is not a leading sign or an exponent sign
    let split = (1..bytes.len()).rev().find(|&i| (bytes[i] == b'+' || bytes[i] == b'-') && !matches!(bytes[i - 1], b'e' | b'E'));
    match split {
        Some(i) => Ok(c(body[..i].parse::<f64>().map_err(|_| bad())?, num(&body[i..])?)),
        None => Ok(c(0.0, num(body)?)),
    }
}

/// A truncated U(1)-equivariant candidate real spectral triple.
#[derive(Clone, Debug)]
pub struct Geometry {
    pub params: GeometryParams,
    pub basis: Arc<Basis>,
    pub generators: Vec<Generator>,
    pub dirac: SparseOperator,
    pub real: AntilinearOperator,
    pub grading: Option<SparseOperator>,
    /// The charge operator δ (diagonal, integer spectrum).
    pub delta: SparseOperator,
    pub delta_diag: Vec<i64>,
    /// Torus derivations δ₁..δ_n; empty for the sphere.
    pub derivations: Vec<SparseOperator>,
    pub kr_dim: u8,
    /// Generators of the invariant subalgebra B as expressions in the letters.
    pub base_generators: Vec<(String, Expr)>,
    pub spinor_dim: usize,
}

impl Geometry {
    pub fn dim(&self) -> usize {
        self.basis.dim()
    }

    pub fn is_even(&self) -> bool {
        self.kr_dim % 2 == 0
    }

    pub fn interior(&self, margin: usize) -> Result<InteriorSubspace> {
        let s = InteriorSubspace::new(&self.basis, margin);
        s.require_nonempty()?;
        Ok(s)
    }

    pub fn letter_op(&self, l: Letter) -> &SparseOperator {
        let g = &self.generators[l.gen];
        if l.adjoint {
            &g.adj
        } else {
            &g.op
        }
    }

    pub fn word_op(&self, w: &[Letter]) -> SparseOperator {
        if w.is_empty() {
            return SparseOperator::identity(self.dim());
        }
        let ops: Vec<&SparseOperator> = w.iter().map(|&l| self.letter_op(l)).collect();
        SparseOperator::chain(&ops).expect("generators share the basis dimension")
    }

    pub fn expr_op(&self, e: &Expr) -> SparseOperator {
        if e.0.is_empty() {
            return SparseOperator::zeros(self.dim(), self.dim());
        }
        let ops: Vec<(C64, SparseOperator)> = e.0.iter().map(|(a, w)| (*a, self.word_op(w))).collect();
        let refs: Vec<(C64, &SparseOperator)> = ops.iter().map(|(a, x)| (*a, x)).collect();
        SparseOperator::linear_combination(&refs).expect("equal shapes")
    }

    pub fn letter_charge(&self, l: Letter) -> i32 {
        let q = self.generators[l.gen].charge;
        if l.adjoint {
            -q
        } else {
            q
        }
    }

    pub fn word_charge(&self, w: &[Letter]) -> i32 {
        w.iter().map(|&l| self.letter_charge(l)).sum()
    }

    /// π(δ(x)), applying δ chargewise to each word.
    pub fn expr_delta(&self, e: &Expr) -> SparseOperator {
        let scaled = Expr(
            e.0.iter()
                .map(|(a, w)| (a * self.word_charge(w) as f64, w.clone()))
                .filter(|t| t.0.norm() > 0.0)
                .collect(),
        );
        self.expr_op(&scaled)
    }

    /// Splits an expression into charge-homogeneous parts.
    pub fn charge_parts(&self, e: &Expr) -> BTreeMap<i32, Expr> {
        let mut out: BTreeMap<i32, Expr> = BTreeMap::new();
        for (a, w) in &e.0 {
            out.entry(self.word_charge(w)).or_insert_with(|| Expr(Vec::new())).0.push((*a, w.clone()));
        }
        out
    }

    pub fn letters(&self) -> Vec<Letter> {
        (0..self.generators.len())
            .flat_map(|g| [Letter { gen: g, adjoint: false }, Letter { gen: g, adjoint: true }])
            .collect()
    }

    /// All words of length ≤ `max_len`, shortest first.
    pub fn all_words(&self, max_len: usize) -> Vec<Word> {
        let letters = self.letters();
        let mut out: Vec<Word> = vec![Vec::new()];
        let mut layer: Vec<Word> = vec![Vec::new()];
        for _ in 0..max_len {
            layer = layer
                .iter()
                .flat_map(|w| {
                    letters.iter().map(move |&l| {
                        let mut v = w.clone();
                        v.push(l);
                        v
                    })
                })
                .collect();
            out.extend(layer.iter().cloned());
        }
        out
    }

    pub fn word_name(&self, w: &[Letter]) -> String {
        if w.is_empty() {
            return "1".into();
        }
        w.iter()
            .map(|l| format!("{}{}", self.generators[l.gen].name, if l.adjoint { "*" } else { "" }))
            .collect::<Vec<_>>()
            .join(" ")
    }

    /// Parses a word such as `"U V*"` or `"a a* b"`; `"1"` or `""` is the unit.
    pub fn parse_word(&self, s: &str) -> Result<Word> {
        let mut w = Vec::new();
        for tok in s.split_whitespace() {
            if tok == "1" {
                continue;
            }
            let (name, adjoint) = match tok.strip_suffix('*') {
                Some(n) => (n, true),
                None => (tok, false),
            };
            let gen = self
                .generators
                .iter()
                .position(|g| g.name == name)
                .ok_or_else(|| NcgError::InvalidParameter(format!("unknown generator `{name}`")))?;
            w.push(Letter { gen, adjoint });
        }
        Ok(w)
    }

    /// A copy with a different Dirac operator.
    pub fn with_dirac(&self, d: SparseOperator) -> Self {
        let mut g = self.clone();
        g.dirac = d;
        g
    }

    pub fn with_real(&self, j: AntilinearOperator) -> Self {
        let mut g = self.clone();
        g.real = j;
        g
    }

    /// Indices of the δ-eigenspace with eigenvalue `k`.
    pub fn charge_subspace(&self, k: i64) -> Vec<usize> {
        (0..self.dim()).filter(|&i| self.delta_diag[i] == k).collect()
    }

    /// `e^{iφδ}` as a diagonal unitary.
    pub fn charge_rotation(&self, phi: f64) -> SparseOperator {
        SparseOperator::diagonal(
            &self.delta_diag.iter().map(|&q| C64::from_polar(1.0, phi * q as f64)).collect::<Vec<_>>(),
        )
    }
}

impl fmt::Display for Letter {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "g{}{}", self.gen, if self.adjoint { "*" } else { "" })
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn complex_strings_round_trip() {
        for z in [c(1.0, 0.0), c(0.5, -2.0), c(-1e-3, 2.5e-7), c(0.0, -1.0)] {
            assert_eq!(parse_complex(&format_complex(z)).unwrap(), z);
        }
        assert_eq!(parse_complex("j").unwrap(), c(0.0, 1.0));
        assert_eq!(parse_complex("-2.5").unwrap(), c(-2.5, 0.0));
        assert_eq!(parse_complex("1e-3-4E+2j").unwrap(), c(1e-3, -400.0));
        assert!(parse_complex("1+2i").is_err());
    }
}
