//! Axiom checks for a truncated real spectral triple.
//!
//! Word products are applied to the interior column slice only, so that long
//! words never need to be formed as full operators.

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;

use crate::basis::InteriorSubspace;
use crate::error::{NcgError, Result};
use crate::geometry::{Expr, Geometry, GeometryParams, Letter, Word};
use crate::kr::{self, KRSignRow};
use crate::operator::{c, AntilinearOperator, SparseOperator, C64};
use crate::report::{CheckRecord, VerificationReport, DEFAULT_TOL};

/// Left and right (opposite) actions of single letters.
pub struct WordAlgebra<'g> {
    pub g: &'g Geometry,
    pi: Vec<SparseOperator>,
    rho: Vec<SparseOperator>,
}

fn lidx(l: Letter) -> usize {
    2 * l.gen + l.adjoint as usize
}

impl<'g> WordAlgebra<'g> {
    pub fn new(g: &'g Geometry) -> Result<Self> {
        Self::with_real(g, &g.real)
    }

    /// Uses `j` for the right action instead of the geometry's J.
    pub fn with_real(g: &'g Geometry, j: &AntilinearOperator) -> Result<Self> {
        let letters = g.letters();
        let pi: Vec<SparseOperator> = letters.iter().map(|&l| g.letter_op(l).clone()).collect();
        let rho = letters
            .iter()
            .map(|&l| j.opposite(g.letter_op(l)))
            .collect::<Result<Vec<_>>>()?;
        Ok(Self { g, pi, rho })
    }

    /// π(w)·x
    pub fn pi_apply(&self, w: &[Letter], x: &SparseOperator) -> SparseOperator {
        let mut acc = x.clone();
        for &l in w.iter().rev() {
            acc = self.pi[lidx(l)].mul(&acc).expect("shapes agree");
        }
        acc
    }

    /// ρ(w)·x with ρ(w) = J w* J⁻¹ = ρ(l_k)⋯ρ(l_1).
    pub fn rho_apply(&self, w: &[Letter], x: &SparseOperator) -> SparseOperator {
        let mut acc = x.clone();
        for &l in w.iter() {
            acc = self.rho[lidx(l)].mul(&acc).expect("shapes agree");
        }
        acc
    }

    pub fn pi_expr_apply(&self, e: &Expr, x: &SparseOperator) -> SparseOperator {
        sum(e.0.iter().map(|(a, w)| self.pi_apply(w, x).scale(*a)), x)
    }

    pub fn rho_expr_apply(&self, e: &Expr, x: &SparseOperator) -> SparseOperator {
        sum(e.0.iter().map(|(a, w)| self.rho_apply(w, x).scale(*a)), x)
    }
}

fn sum(it: impl Iterator<Item = SparseOperator>, shape: &SparseOperator) -> SparseOperator {
    let parts: Vec<SparseOperator> = it.collect();
    if parts.is_empty() {
        return SparseOperator::zeros(shape.nrows(), shape.ncols());
    }
    let refs: Vec<(C64, &SparseOperator)> = parts.iter().map(|x| (c(1.0, 0.0), x)).collect();
    SparseOperator::linear_combination(&refs).expect("equal shapes")
}

/// Columns of the identity at the interior indices.
pub fn interior_frame(s: &InteriorSubspace) -> SparseOperator {
    SparseOperator::identity(s.parent_dim()).select_columns(s.indices())
}

pub fn report_for(g: &Geometry) -> VerificationReport {
    VerificationReport::new(g.params.name(), g.params.to_json())
}

/// J², JD, Jγ, γD, γ² relations for one row of the KR table.
pub fn kr_relations(
    prefix: &str,
    j: &AntilinearOperator,
    d: &SparseOperator,
    gamma: Option<&SparseOperator>,
    row: &KRSignRow,
) -> Result<Vec<CheckRecord>> {
    let n = d.dim();
    let id = SparseOperator::identity(n);
    let eps = c(row.eps as f64, 0.0);
    let epsp = c(row.eps_prime as f64, 0.0);
    let m = &j.matrix;
    let mut out = vec![
        CheckRecord::new(
            format!("{prefix}J antiunitary"),
            m.mul(&m.adjoint())?.sub(&id)?.max_abs(),
            DEFAULT_TOL,
            0,
        ),
        CheckRecord::new(
            format!("{prefix}J^2 = ({})1", kr::sign_str(row.eps)),
            j.square()?.sub(&id.scale(eps))?.max_abs(),
            DEFAULT_TOL,
            0,
        ),
        CheckRecord::new(
            format!("{prefix}JD = ({})DJ", kr::sign_str(row.eps_prime)),
            j.after(d)?.sub(&d.mul(m)?.scale(epsp))?.max_abs(),
            DEFAULT_TOL,
            0,
        ),
    ];
    if let Some(epp) = row.eps_double_prime {
        let gam = gamma.ok_or_else(|| NcgError::MissingPrerequisite("even KR dimension needs a grading".into()))?;
        out.push(CheckRecord::new(
            format!("{prefix}J gamma = ({})gamma J", kr::sign_str(epp)),
            j.after(gam)?.sub(&gam.mul(m)?.scale(c(epp as f64, 0.0)))?.max_abs(),
            DEFAULT_TOL,
            0,
        ));
        out.push(CheckRecord::new(
            format!("{prefix}gamma D + D gamma"),
            gam.mul(d)?.add(&d.mul(gam)?)?.max_abs(),
            DEFAULT_TOL,
            0,
        ));
        out.push(CheckRecord::new(format!("{prefix}gamma^2 - 1"), gam.mul(gam)?.sub(&id)?.max_abs(), DEFAULT_TOL, 0));
        out.push(CheckRecord::new(format!("{prefix}gamma selfadjoint"), gam.hermiticity_deviation(), DEFAULT_TOL, 0));
    }
    out.push(CheckRecord::new(format!("{prefix}D selfadjoint"), d.hermiticity_deviation(), DEFAULT_TOL, 0));
    Ok(out)
}

/// Sign relations for the geometry's KR dimension plus order zero over words of length ≤ 2.
pub fn check_real_triple(g: &Geometry) -> Result<VerificationReport> {
    let row = kr::lookup(g.kr_dim)?;
    let mut rep = report_for(g);
    for r in kr_relations("", &g.real, &g.dirac, g.grading.as_ref(), &row)? {
        rep.push(r);
    }
    rep.merge(check_order_zero(g, 2)?);
    Ok(rep)
}

/// max over word pairs (a, b) of ‖[π(a), Jπ(b)*J⁻¹]‖ on the margin-2·len interior.
pub fn check_order_zero(g: &Geometry, word_len: usize) -> Result<VerificationReport> {
    let margin = 2 * word_len;
    let s = g.interior(margin)?;
    let alg = WordAlgebra::new(g)?;
    let e = interior_frame(&s);
    let words = g.all_words(word_len);
    let res = words
        .par_iter()
        .map(|b| {
            let rb = alg.rho_apply(b, &e);
            words
                .iter()
                .map(|a| {
                    let x = alg.pi_apply(a, &rb);
                    let y = alg.rho_apply(b, &alg.pi_apply(a, &e));
                    x.sub(&y).expect("shapes").max_column_norm()
                })
                .fold(0.0, f64::max)
        })
        .reduce(|| 0.0, f64::max);
    let mut rep = report_for(g);
    rep.check(format!("order zero (words <= {word_len})"), res, DEFAULT_TOL, margin);
    Ok(rep)
}

/// First-order condition in both forms over word pairs of length ≤ `word_len`.
pub fn check_first_order(g: &Geometry, word_len: usize) -> Result<VerificationReport> {
    let words = g.all_words(word_len);
    check_first_order_words(g, &words, &words, word_len, "")
}

/// First-order residuals for explicit left words `avec` and right words `bvec`.
pub fn check_first_order_words(
    g: &Geometry,
    avec: &[Word],
    bvec: &[Word],
    word_len: usize,
    label: &str,
) -> Result<VerificationReport> {
    let margin = 2 * word_len + 1;
    let s = g.interior(margin)?;
    let alg = WordAlgebra::new(g)?;
    let e = interior_frame(&s);
    let d = &g.dirac;
    let de = d.mul(&e)?;
    let (r1, r2) = bvec
        .par_iter()
        .map(|b| {
            let rb = alg.rho_apply(b, &e);
            let drb = d.mul(&rb).expect("shapes");
            let rbd = alg.rho_apply(b, &de);
            let mut m1: f64 = 0.0;
            let mut m2: f64 = 0.0;
            for a in avec {
                let ae = alg.pi_apply(a, &e);
                let dae = d.mul(&ae).expect("shapes");
                // [[D,a],ρ] = Daρ − aDρ − ρDa + ρaD
                let t1 = d.mul(&alg.pi_apply(a, &rb)).expect("shapes");
                let t2 = alg.pi_apply(a, &drb);
                let t3 = alg.rho_apply(b, &dae);
                let t4 = alg.rho_apply(b, &alg.pi_apply(a, &de));
                let f = SparseOperator::linear_combination(&[(c(1.0, 0.0), &t1), (c(-1.0, 0.0), &t2), (c(-1.0, 0.0), &t3), (c(1.0, 0.0), &t4)])
                    .expect("shapes");
                m1 = m1.max(f.max_column_norm());
                // [[D,ρ],a] = Dρa − ρDa − aDρ + aρD
                let u1 = d.mul(&alg.rho_apply(b, &ae)).expect("shapes");
                let u4 = alg.pi_apply(a, &rbd);
                let f2 = SparseOperator::linear_combination(&[(c(1.0, 0.0), &u1), (c(-1.0, 0.0), &t3), (c(-1.0, 0.0), &t2), (c(1.0, 0.0), &u4)])
                    .expect("shapes");
                m2 = m2.max(f2.max_column_norm());
            }
            (m1, m2)
        })
        .reduce(|| (0.0, 0.0), |x, y| (x.0.max(y.0), x.1.max(y.1)));
    let mut rep = report_for(g);
    rep.check(format!("first order [[D,a],Jb*J^-1]{label} (words <= {word_len})"), r1, DEFAULT_TOL, margin);
    rep.check(format!("first order [[D,Jb*J^-1],a]{label} (words <= {word_len})"), r2, DEFAULT_TOL, margin);
    Ok(rep)
}

/// U(1)-equivariance of the triple under the charge operator δ.
pub fn check_equivariance(g: &Geometry) -> Result<VerificationReport> {
    let mut rep = report_for(g);
    let d = &g.delta;
    let m = &g.real.matrix;
    rep.check("delta J + J delta", m.mul(&d.conj())?.add(&d.mul(m)?)?.max_abs(), DEFAULT_TOL, 0);
    rep.check("[delta,D]", crate::operator::commutator(d, &g.dirac)?.max_abs(), DEFAULT_TOL, 0);
    if let Some(gam) = &g.grading {
        rep.check("[delta,gamma]", crate::operator::commutator(d, gam)?.max_abs(), DEFAULT_TOL, 0);
    }
    rep.check("delta selfadjoint", d.hermiticity_deviation(), DEFAULT_TOL, 0);
    let s = g.interior(1)?;
    let e = interior_frame(&s);
    let mut worst: f64 = 0.0;
    for (gi, gen) in g.generators.iter().enumerate() {
        for (adj, op) in [(false, &gen.op), (true, &gen.adj)] {
            let q = g.letter_charge(Letter { gen: gi, adjoint: adj }) as f64;
            let x = d.mul(&op.mul(&e)?)?.sub(&op.mul(&d.mul(&e)?)?)?.sub(&op.mul(&e)?.scale_re(q))?;
            worst = worst.max(x.max_column_norm());
        }
    }
    rep.check("[delta,pi(x)] = delta(x)", worst, DEFAULT_TOL, 1);
    let dev = (0..g.dim())
        .map(|i| (d.get(i, i).re - g.delta_diag[i] as f64).abs() + d.get(i, i).im.abs())
        .fold(0.0, f64::max);
    rep.check("delta integer spectrum", dev, 1e-12, 0);
    if let GeometryParams::Torus { cutoff, .. } = g.params {
        let mut vals: Vec<i64> = g.delta_diag.clone();
        vals.sort_unstable();
        vals.dedup();
        let want: Vec<i64> = (-cutoff as i64..=cutoff as i64).collect();
        rep.push(CheckRecord::flag("delta spectrum = Z cap [-K,K]", vals == want));
    }
    Ok(rep)
}

/// Partition of basis indices by δ-eigenvalue.
pub fn charge_decomposition(g: &Geometry) -> Result<Vec<(i64, Vec<usize>)>> {
    let mut map: std::collections::BTreeMap<i64, Vec<usize>> = Default::default();
    for i in 0..g.dim() {
        let v = g.delta.get(i, i);
        let k = v.re.round();
        if (v.re - k).abs() > 1e-12 || v.im.abs() > 1e-12 {
            return Err(NcgError::Structural(format!("non-integer charge {v} at index {i}")));
        }
        map.entry(k as i64).or_default().push(i);
    }
    Ok(map.into_iter().collect())
}

/// D preserves H_k, J maps H_k to H_{−k}, words of charge q map H_l into H_{l+q}.
pub fn check_charge_decomposition(g: &Geometry) -> Result<VerificationReport> {
    charge_decomposition(g)?;
    let q = &g.delta_diag;
    let off = |x: &SparseOperator, shift: &dyn Fn(i64) -> i64| {
        x.entries().filter(|&(i, j, _)| q[i] != shift(q[j])).map(|e| e.2.norm()).fold(0.0, f64::max)
    };
    let mut rep = report_for(g);
    rep.check("D preserves H_k", off(&g.dirac, &|k| k), 0.0, 0);
    rep.check("J(H_k) in H_-k", off(&g.real.matrix, &|k| -k), 0.0, 0);
    let mut worst: f64 = 0.0;
    for w in g.all_words(2) {
        let qw = g.word_charge(&w) as i64;
        worst = worst.max(off(&g.word_op(&w), &|k| k + qw));
    }
    rep.check("pi(A^(k)) H_l in H_k+l", worst, 0.0, 0);
    Ok(rep)
}

/// A presentation Σ pᵢ[D, qᵢ] of a one-form.
pub type Presentation = Vec<(Expr, Expr)>;

/// All single-pair presentations with words of length ≤ 2 plus `n_random` seeded combinations.
pub fn sample_presentations(g: &Geometry, seed: u64, n_random: usize) -> Vec<Presentation> {
    let words = g.all_words(2);
    let mut out: Vec<Presentation> = Vec::new();
    for p in &words {
        for q in &words {
            out.push(vec![(Expr::word(p.clone()), Expr::word(q.clone()))]);
        }
    }
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    for _ in 0..n_random {
        let terms = rng.random_range(1..=3);
        let pres = (0..terms)
            .map(|_| {
                let p = words[rng.random_range(0..words.len())].clone();
                let q = words[rng.random_range(0..words.len())].clone();
                let z = c(rng.random_range(-1.0..1.0), rng.random_range(-1.0..1.0));
                (Expr::word(p).scaled(z), Expr::word(q))
            })
            .collect();
        out.push(pres);
    }
    out
}

/// v(ρ) = {Γ, ρ}/(2c) must equal Σ pᵢ δ(qᵢ) for ρ = Σ pᵢ[D, qᵢ].
pub fn check_calculus_compatibility(
    g: &Geometry,
    gamma: &SparseOperator,
    vertical_coefficient: f64,
    presentations: &[Presentation],
) -> Result<VerificationReport> {
    let len = presentations
        .iter()
        .flat_map(|p| p.iter().map(|(a, b)| a.max_len() + b.max_len()))
        .max()
        .unwrap_or(0);
    let s = g.interior(len)?;
    let alg = WordAlgebra::new(g)?;
    let e = interior_frame(&s);
    let ge = gamma.mul(&e)?;
    let d = &g.dirac;
    let rho_apply = |pres: &Presentation, x: &SparseOperator| -> SparseOperator {
        let dx = d.mul(x).expect("shapes");
        sum(
            pres.iter().map(|(p, q)| {
                let dq = d.mul(&alg.pi_expr_apply(q, x)).expect("shapes");
                let qd = alg.pi_expr_apply(q, &dx);
                alg.pi_expr_apply(p, &dq.sub(&qd).expect("shapes"))
            }),
            x,
        )
    };
    let results: Vec<(f64, f64, f64)> = presentations
        .par_iter()
        .map(|pres| {
            let rho_e = rho_apply(pres, &e);
            let anti = gamma.mul(&rho_e).expect("shapes").add(&rho_apply(pres, &ge)).expect("shapes");
            let v = anti.scale_re(1.0 / (2.0 * vertical_coefficient));
            let target = sum(pres.iter().map(|(p, q)| alg.pi_expr_apply(p, &alg.pi_expr_apply(&vertical_expr(g, q), &e))), &e);
            (v.sub(&target).expect("shapes").max_column_norm(), rho_e.max_column_norm(), target.max_column_norm())
        })
        .collect();
    let worst = results.iter().map(|r| r.0).fold(0.0, f64::max);
    let zero_case = results.iter().filter(|r| r.1 < 1e-12).map(|r| r.2).fold(0.0, f64::max);
    let n_zero = results.iter().filter(|r| r.1 < 1e-12).count();
    let mut rep = report_for(g);
    rep.check("v(rho) = sum p delta(q)", worst, DEFAULT_TOL, len);
    rep.check(format!("rho = 0 => sum p delta(q) = 0 ({n_zero} samples)"), zero_case, DEFAULT_TOL, len);
    Ok(rep)
}

/// δ(q) as an expression (chargewise).
pub fn vertical_expr(g: &Geometry, q: &Expr) -> Expr {
    Expr(q.0.iter().map(|(a, w)| (a * g.word_charge(w) as f64, w.clone())).collect())
}

/// Full axiom suite for a geometry without projection data.
pub fn verify_all(g: &Geometry) -> Result<VerificationReport> {
    let mut rep = check_real_triple(g)?;
    rep.merge(check_first_order(g, 2)?);
    rep.merge(check_equivariance(g)?);
    rep.merge(check_charge_decomposition(g)?);
    Ok(rep)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::sphere::build_sphere;
    use crate::torus::{build_torus, theta2};

    #[test]
    fn t2_real_triple() {
        let g = build_torus(2, &theta2(0.4142), 6).unwrap();
        let rep = verify_all(&g).unwrap();
        assert!(rep.pass(), "{:#?}", rep.failures());
    }

    #[test]
    fn t3_real_triple() {
        let th = vec![vec![0.0, 0.2, 0.31], vec![-0.2, 0.0, 0.17], vec![-0.31, -0.17, 0.0]];
        let g = build_torus(3, &th, 5).unwrap();
        let rep = verify_all(&g).unwrap();
        assert!(rep.pass(), "{:#?}", rep.failures());
    }

    #[test]
    fn sphere_real_triple() {
        let g = build_sphere(11, 0.4142, 1.3, c(0.7, 0.2), 0.4).unwrap();
        let rep = verify_all(&g).unwrap();
        assert!(rep.pass(), "{:#?}", rep.failures());
    }

    #[test]
    fn corrupted_j_breaks_order_zero() {
        let g = build_torus(2, &theta2(0.4142), 6).unwrap();
        let s = g.interior(4).unwrap();
        let i = s.indices()[s.len() / 2];
        // flip the sign of J on one basis vector
        let m = g.real.matrix.clone();
        let col = m.column(i).to_vec();
        let mut flipped = m.clone();
        for (r, v) in col {
            flipped = flipped.perturbed(r, i, -v * 2.0);
        }
        let bad = g.with_real(AntilinearOperator::new(flipped));
        let r = check_order_zero(&bad, 2).unwrap();
        assert!(r.checks[0].residual >= 0.5, "{}", r.checks[0].residual);
    }

    #[test]
    fn unit_word_gives_zero_first_order() {
        let g = build_sphere(11, 0.3, 1.0, c(1.0, 0.0), 1.0).unwrap();
        let words = g.all_words(2);
        let rep = check_first_order_words(&g, &words, &[Vec::new()], 2, "").unwrap();
        assert!(rep.max_residual() < 1e-12);
    }

    #[test]
    fn charge_sectors_t2() {
        let g = build_torus(2, &theta2(0.3), 3).unwrap();
        for (k, idx) in charge_decomposition(&g).unwrap() {
            for i in idx {
                match g.basis.index(i) {
                    crate::basis::BasisIndex::Torus { k: kv, .. } => assert_eq!(kv[1] as i64, k),
                    _ => unreachable!(),
                }
            }
        }
        assert!(check_charge_decomposition(&g).unwrap().pass());
    }
}
