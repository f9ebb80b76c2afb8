//! Strong connections in the Dirac calculus, covariant derivatives and twisted Dirac operators.

use nalgebra::DMatrix;
use rayon::prelude::*;
use std::collections::HashMap;

use crate::basis::InteriorSubspace;
use crate::error::{NcgError, Result};
use crate::geometry::{Expr, Geometry, GeometryParams, Letter};
use crate::operator::{anticommutator, c, commutator, hermitian_eigenvalues, residual_on_interior, AntilinearOperator, SparseOperator, C64};
use crate::projection::{horizontal, ProjectionData};
use crate::report::{VerificationReport, DEFAULT_TOL};
use crate::torus::{spinor_factor, spinor_lift};
use crate::verify::{check_equivariance, interior_frame, report_for, vertical_expr, Presentation, WordAlgebra};

pub const STRONG_TOL: f64 = 1e-8;

#[derive(Clone, Debug)]
pub struct OneForm {
    pub op: SparseOperator,
    /// ω* assembled from the adjoint presentation, column-exact on the same interior as `op`.
    pub adjoint: SparseOperator,
    pub presentation: Option<Presentation>,
    pub selfadjoint: bool,
}

/// Σ π(p)[D, π(q)] as a full operator.
pub fn presentation_op(g: &Geometry, pres: &Presentation) -> Result<SparseOperator> {
    let mut acc = SparseOperator::zeros(g.dim(), g.dim());
    for (p, q) in pres {
        let dq = commutator(&g.dirac, &g.expr_op(q))?;
        acc = acc.add(&g.expr_op(p).mul(&dq)?)?;
    }
    Ok(acc)
}

/// Σ (q*D − Dq*)p*
pub fn presentation_adjoint_op(g: &Geometry, pres: &Presentation) -> Result<SparseOperator> {
    let mut acc = SparseOperator::zeros(g.dim(), g.dim());
    for (p, q) in pres {
        let qs = g.expr_op(&q.adjoint());
        let ps = g.expr_op(&p.adjoint());
        acc = acc.add(&commutator(&qs, &g.dirac)?.mul(&ps)?)?;
    }
    Ok(acc)
}

fn presentation_margin(pres: &Presentation) -> usize {
    pres.iter().map(|(p, q)| p.max_len() + q.max_len()).max().unwrap_or(0).max(1)
}

/// Hermiticity of the block of `x` on interior indices.
pub fn interior_hermiticity(x: &SparseOperator, s: &InteriorSubspace) -> Result<f64> {
    Ok(x.restrict(s.indices())?.hermiticity_deviation())
}

impl OneForm {
    pub fn from_presentation(g: &Geometry, pres: Presentation) -> Result<Self> {
        let op = presentation_op(g, &pres)?;
        let adjoint = presentation_adjoint_op(g, &pres)?;
        let s = g.interior(presentation_margin(&pres))?;
        let selfadjoint = residual_on_interior(&op.sub(&adjoint)?, &s)? <= 1e-12;
        Ok(Self { op, adjoint, presentation: Some(pres), selfadjoint })
    }

    pub fn zero(g: &Geometry) -> Self {
        let z = SparseOperator::zeros(g.dim(), g.dim());
        Self { op: z.clone(), adjoint: z, presentation: Some(Vec::new()), selfadjoint: true }
    }

    pub fn margin(&self) -> usize {
        self.presentation.as_ref().map(presentation_margin).unwrap_or(1)
    }
}

fn letter(gen: usize, adjoint: bool) -> Letter {
    Letter { gen, adjoint }
}

/// ω = Σ_j ω_j U_j*[D, U_j] with ω_n = 1 and base coefficients ω_1..ω_{n−1}.
pub fn torus_connection(g: &Geometry, base_coefficients: &[Expr]) -> Result<OneForm> {
    let n = match g.params {
        GeometryParams::Torus { n, .. } => n,
        _ => return Err(NcgError::InvalidParameter("torus_connection on a non-torus geometry".into())),
    };
    if base_coefficients.len() != n - 1 {
        return Err(NcgError::DimensionMismatch(format!("expected {} base coefficients, got {}", n - 1, base_coefficients.len())));
    }
    let mut pres: Presentation = Vec::new();
    for (j, w) in base_coefficients.iter().enumerate() {
        for (a, word) in &w.0 {
            // U_j σ^j = [D, U_j] and U_j* σ^j = −[D, U_j*]
            match word.as_slice() {
                [l] if l.gen == j => {
                    let sign = if l.adjoint { -1.0 } else { 1.0 };
                    pres.push((Expr::one().scaled(a * sign), Expr::word(vec![*l])));
                }
                _ => pres.push((Expr(vec![(*a, word.clone())]).times(&Expr::word(vec![letter(j, true)])), Expr::word(vec![letter(j, false)]))),
            }
        }
    }
    pres.push((Expr::word(vec![letter(n - 1, true)]), Expr::word(vec![letter(n - 1, false)])));
    OneForm::from_presentation(g, pres)
}

/// (U_j + U_j*)/2
pub fn cosine(j: usize) -> Expr {
    Expr::word(vec![letter(j, false)]).plus(Expr::word(vec![letter(j, true)])).scaled(c(0.5, 0.0))
}

/// ω = a*[D,a] + b[D,b*]
pub fn sphere_connection(g: &Geometry) -> Result<OneForm> {
    let pres = vec![
        (Expr::word(vec![letter(0, true)]), Expr::word(vec![letter(0, false)])),
        (Expr::word(vec![letter(1, false)]), Expr::word(vec![letter(1, true)])),
    ];
    OneForm::from_presentation(g, pres)
}

/// [D, π(x)] − π(δ(x))·ω, with δ applied chargewise.
pub fn covariant_derivative(g: &Geometry, omega: &OneForm, x: &Expr) -> Result<SparseOperator> {
    let dx = commutator(&g.dirac, &g.expr_op(x))?;
    let vx = g.expr_op(&vertical_expr(g, x));
    dx.sub(&vx.mul(&omega.op)?)
}

/// ∇_ω(x)* = (x*D − Dx*) − ω*·δ(x)*
pub fn covariant_derivative_adjoint(g: &Geometry, omega: &OneForm, x: &Expr) -> Result<SparseOperator> {
    let xs = g.expr_op(&x.adjoint());
    let vs = g.expr_op(&vertical_expr(g, x).adjoint());
    commutator(&xs, &g.dirac)?.sub(&omega.adjoint.mul(&vs)?)
}

fn generator_exprs(g: &Geometry) -> Vec<(String, Expr)> {
    g.letters().into_iter().map(|l| (g.word_name(&[l]), Expr::word(vec![l]))).collect()
}

/// Spanning family {[D, π(b)]·π(c)} for the strongness test.
#[derive(Clone, Copy, Debug)]
pub struct StrongnessFamily {
    /// Products of at most this many base generators (or adjoints).
    pub base_len: usize,
    /// Algebra words of at most this length.
    pub total_len: usize,
}

impl Default for StrongnessFamily {
    fn default() -> Self {
        Self { base_len: 2, total_len: 2 }
    }
}

fn base_exprs(g: &Geometry, len: usize) -> Vec<Expr> {
    let mut gens: Vec<Expr> = Vec::new();
    for (_, e) in &g.base_generators {
        gens.push(e.clone());
        gens.push(e.adjoint());
    }
    let mut out = gens.clone();
    let mut layer = gens.clone();
    for _ in 1..len {
        layer = layer.iter().flat_map(|a| gens.iter().map(move |b| a.times(b))).collect();
        out.extend(layer.iter().cloned());
    }
    out
}

/// Least-squares distance of each r(x) = ∇_ω(x) from the span of the family, on interior columns.
pub fn strongness_residuals(g: &Geometry, omega: &OneForm, family: StrongnessFamily) -> Result<Vec<(String, f64)>> {
    let bases = base_exprs(g, family.base_len);
    let words = g.all_words(family.total_len);
    let bmax = bases.iter().map(|e| e.max_len()).max().unwrap_or(0);
    let margin = (bmax + family.total_len).max(omega.margin() + 1);
    let s = g.interior(margin)?;
    let alg = WordAlgebra::new(g)?;
    let e = interior_frame(&s);
    let d = &g.dirac;
    // [D, π(b)] π(c) E
    let members: Vec<SparseOperator> = bases
        .par_iter()
        .flat_map_iter(|b| {
            let alg = &alg;
            let e = &e;
            words.iter().map(move |w| {
                let ce = alg.pi_apply(w, e);
                let t1 = d.mul(&alg.pi_expr_apply(b, &ce)).expect("shapes");
                let t2 = alg.pi_expr_apply(b, &d.mul(&ce).expect("shapes"));
                t1.sub(&t2).expect("shapes")
            })
        })
        .collect();
    let p = members.len();
    // Gram matrix through an index of shared positions.
    let mut by_pos: HashMap<(usize, usize), Vec<(usize, C64)>> = HashMap::new();
    for (i, m) in members.iter().enumerate() {
        for (r, col, v) in m.entries() {
            by_pos.entry((r, col)).or_default().push((i, v));
        }
    }
    let mut gram = DMatrix::<C64>::zeros(p, p);
    for list in by_pos.values() {
        for &(i, vi) in list {
            for &(j, vj) in list {
                gram[(i, j)] += vi.conj() * vj;
            }
        }
    }
    let eig = gram.symmetric_eigen();
    let top = eig.eigenvalues.iter().fold(0.0f64, |a, &v| a.max(v));
    let thr = top * 1e-13;
    let mut out = Vec::new();
    for (name, x) in generator_exprs(g) {
        let r = covariant_derivative(g, omega, &x)?.mul(&e)?;
        let rhs = nalgebra::DVector::from_iterator(
            p,
            members.iter().map(|m| m.entries().map(|(i, j, v)| v.conj() * r.get(i, j)).sum::<C64>()),
        );
        let mut coeff = nalgebra::DVector::<C64>::zeros(p);
        for k in 0..p {
            let lam = eig.eigenvalues[k];
            if lam > thr {
                let u = eig.eigenvectors.column(k);
                let proj = u.dotc(&rhs) / lam;
                coeff += u * proj;
            }
        }
        let terms: Vec<(C64, &SparseOperator)> = coeff.iter().zip(&members).filter(|(a, _)| a.norm() > 0.0).map(|(a, m)| (-*a, m)).collect();
        let mut resid = r.clone();
        if !terms.is_empty() {
            resid = resid.add(&SparseOperator::linear_combination(&terms)?)?;
        }
        out.push((name, resid.max_column_norm()));
    }
    Ok(out)
}

/// The three conditions: invariance, vertical normalization, strongness.
pub fn check_strong_connection(g: &Geometry, omega: &OneForm, family: StrongnessFamily) -> Result<VerificationReport> {
    let pres = omega
        .presentation
        .as_ref()
        .ok_or_else(|| NcgError::MissingPrerequisite("one-form has no presentation".into()))?;
    let m = omega.margin();
    let s = g.interior(m)?;
    let mut rep = report_for(g);
    rep.check_result("[delta,omega]", residual_on_interior(&commutator(&g.delta, &omega.op)?, &s), DEFAULT_TOL, m);
    let mut vert = SparseOperator::identity(g.dim()).scale_re(-1.0);
    for (p, q) in pres {
        vert = vert.add(&g.expr_op(p).mul(&g.expr_op(&vertical_expr(g, q)))?)?;
    }
    rep.check_result("sum p delta(q) = 1", residual_on_interior(&vert, &s), DEFAULT_TOL, m);
    let worst = strongness_residuals(g, omega, family)?.into_iter().map(|r| r.1).fold(0.0, f64::max);
    rep.check(
        format!("nabla(x) in Omega_D(B)A (base words <= {}, words <= {})", family.base_len, family.total_len),
        worst,
        STRONG_TOL,
        m,
    );
    Ok(rep)
}

/// ∇_ω(ba) = [D,b]a + b∇_ω(a) for base words b and generators a.
pub fn check_leibniz(g: &Geometry, omega: &OneForm) -> Result<VerificationReport> {
    let bases = base_exprs(g, 1);
    let m = bases.iter().map(|e| e.max_len()).max().unwrap_or(0) + 1 + omega.margin();
    let s = g.interior(m)?;
    let mut worst: f64 = 0.0;
    for b in &bases {
        let bop = g.expr_op(b);
        let db = commutator(&g.dirac, &bop)?;
        for (_, a) in generator_exprs(g) {
            let lhs = covariant_derivative(g, omega, &b.times(&a))?;
            let rhs = db.mul(&g.expr_op(&a))?.add(&bop.mul(&covariant_derivative(g, omega, &a)?)?)?;
            worst = worst.max(residual_on_interior(&lhs.sub(&rhs)?, &s)?);
        }
    }
    let mut rep = report_for(g);
    rep.check("nabla(ba) = [D,b]a + b nabla(a)", worst, DEFAULT_TOL, m);
    Ok(rep)
}

/// Sphere: witness identities, ω = (r/2)Γ, centrality and bimodule relations.
pub fn check_sphere_connection(g: &Geometry, omega: &OneForm) -> Result<VerificationReport> {
    let (_, theta, r, ..) = crate::sphere::sphere_params(g);
    let lam = C64::from_polar(1.0, 2.0 * std::f64::consts::PI * theta);
    let s4 = g.interior(4)?;
    let gens = crate::sphere::invariant_generators();
    let d = &g.dirac;
    let da = commutator(d, &g.expr_op(&gens[0].1))?;
    let db = commutator(d, &g.expr_op(&gens[1].1))?;
    let (a, as_) = (&g.generators[0].op, &g.generators[0].adj);
    let (b, bs) = (&g.generators[1].op, &g.generators[1].adj);
    let mut rep = report_for(g);
    let na = covariant_derivative(g, omega, &Expr::word(vec![letter(0, false)]))?;
    let wa = a.mul(&da)?.add(&bs.mul(&db)?)?;
    rep.check_result("da - delta(a)omega = a dA + b* dB", residual_on_interior(&na.sub(&wa)?, &s4), DEFAULT_TOL, 4);
    let nb = covariant_derivative(g, omega, &Expr::word(vec![letter(1, false)]))?;
    let wb = as_.mul(&db)?.scale(lam).sub(&b.mul(&da)?)?;
    rep.check_result("db - delta(b)omega = lambda a* dB - b dA", residual_on_interior(&nb.sub(&wb)?, &s4), DEFAULT_TOL, 4);
    let gam = crate::sphere::sphere_gamma(g);
    let s2 = g.interior(2)?;
    rep.check_result("omega - (r/2)Gamma", residual_on_interior(&omega.op.sub(&gam.scale_re(r / 2.0))?, &s2), 1e-12, 2);
    let mut central: f64 = 0.0;
    let mut da_central: f64 = 0.0;
    let mut twisted: f64 = 0.0;
    let mut right: f64 = 0.0;
    let mut plain: f64 = 0.0;
    let dbs = commutator(d, &g.expr_op(&gens[2].1))?;
    for (gi, gen) in g.generators.iter().enumerate() {
        for (adj, x) in [(false, &gen.op), (true, &gen.adj)] {
            central = central.max(residual_on_interior(&commutator(&omega.op, x)?, &s4)?);
            da_central = da_central.max(residual_on_interior(&commutator(&da, x)?, &s4)?);
            // x·B = λ^{δ(x)} B·x, and the same for dB; dB* picks up λ^{−δ(x)}
            let q = g.letter_charge(letter(gi, adj)) as f64;
            let f = C64::from_polar(1.0, 2.0 * std::f64::consts::PI * theta * q);
            for (form, z) in [(&db, f), (&dbs, f.conj())] {
                let t = x.mul(form)?.sub(&form.mul(x)?.scale(z))?;
                twisted = twisted.max(residual_on_interior(&t, &s4)?);
                plain = plain.max(residual_on_interior(&commutator(form, x)?, &s4)?);
            }
            let rx = g.real.opposite(x)?;
            for form in [&da, &db, &dbs] {
                right = right.max(residual_on_interior(&commutator(form, &rx)?, &s4)?);
            }
        }
    }
    rep.check("[omega,pi(x)]", central, DEFAULT_TOL, 4);
    rep.check("[dA,pi(x)]", da_central, DEFAULT_TOL, 4);
    rep.check("x dB = lambda^q(x) dB x, x dB* = lambda^-q(x) dB* x", twisted, DEFAULT_TOL, 4);
    rep.check("[dA|dB|dB*, J x* J^-1]", right, DEFAULT_TOL, 4);
    rep.info("[dB,pi(x)], [dB*,pi(x)] (central only at theta = 0)", plain, DEFAULT_TOL, 4);
    let dsa = commutator(d, a)?;
    let dsb = commutator(d, b)?;
    rep.check_result("a da - da a", residual_on_interior(&commutator(a, &dsa)?, &s4), DEFAULT_TOL, 4);
    rep.check_result(
        "a db - lambda db a",
        residual_on_interior(&a.mul(&dsb)?.sub(&dsb.mul(a)?.scale(lam))?, &s4),
        DEFAULT_TOL,
        4,
    );
    // Leibniz for x ↦ dx − δ(x)ω on products of generators
    let mut leib: f64 = 0.0;
    let lets = generator_exprs(g);
    for (_, x) in &lets {
        for (_, y) in &lets {
            let lhs = covariant_derivative(g, omega, &x.times(y))?;
            let rhs = covariant_derivative(g, omega, x)?
                .mul(&g.expr_op(y))?
                .add(&g.expr_op(x).mul(&covariant_derivative(g, omega, y)?)?)?;
            leib = leib.max(residual_on_interior(&lhs.sub(&rhs)?, &s4)?);
        }
    }
    rep.check("nabla(xy) = nabla(x)y + x nabla(y)", leib, DEFAULT_TOL, 4);
    Ok(rep)
}

/// Real structure used for base one-forms: γJ for KR 2, 6; ΓJ for KR 1, 5; J otherwise.
pub fn base_real_structure(g: &Geometry, pd: &ProjectionData) -> Result<AntilinearOperator> {
    match g.kr_dim % 8 {
        2 | 6 => g.real.premultiply(g.grading.as_ref().ok_or_else(|| NcgError::MissingPrerequisite("grading".into()))?),
        1 | 5 => g.real.premultiply(&pd.gamma),
        _ => Ok(g.real.clone()),
    }
}

/// Sign ε′ with j D j⁻¹ = ε′D, measured.
pub fn measured_sign(j: &AntilinearOperator, d: &SparseOperator) -> Result<i8> {
    let x = j.conjugate(d)?;
    if x.sub(d)?.max_abs() <= 1e-10 {
        Ok(1)
    } else if x.add(d)?.max_abs() <= 1e-10 {
        Ok(-1)
    } else {
        Err(NcgError::Structural("j neither commutes nor anticommutes with D".into()))
    }
}

#[derive(Clone, Debug)]
pub struct TwistData {
    pub omega: OneForm,
    pub j0: AntilinearOperator,
    pub eps_prime: i8,
    pub d_omega: SparseOperator,
    pub script_d_omega: SparseOperator,
    pub z_prime: SparseOperator,
    pub report: VerificationReport,
}

/// D_ω = D + ε′ j₀ω*j₀⁻¹δ − Z′ and 𝒟_ω = cΓδ + D_ω + Z′.
pub fn twisted_dirac(g: &Geometry, pd: &ProjectionData, omega: &OneForm) -> Result<TwistData> {
    let j0 = base_real_structure(g, pd)?;
    let eps = measured_sign(&j0, &g.dirac)?;
    let m = omega.margin() + 1;
    let s = g.interior(m)?;
    let mut rep = report_for(g);
    let mut zcomm: f64 = 0.0;
    for gen in &g.generators {
        for x in [&gen.op, &gen.adj] {
            zcomm = zcomm.max(residual_on_interior(&commutator(&pd.z, &g.real.opposite(x)?)?, &s)?);
        }
    }
    rep.check("[Z, J pi(x) J^-1] (Z' = Z)", zcomm, DEFAULT_TOL, m);
    let z_prime = pd.z.clone();
    let twist = j0.conjugate(&omega.adjoint)?.mul(&g.delta)?;
    let d_omega = g.dirac.add(&twist.scale_re(eps as f64))?.sub(&z_prime)?;
    let herm = interior_hermiticity(&d_omega, &s)?;
    if omega.selfadjoint {
        rep.check("D_omega selfadjoint", herm, DEFAULT_TOL, m);
    } else {
        rep.info("D_omega selfadjoint (omega not selfadjoint)", herm, DEFAULT_TOL, m);
    }
    let script = pd.gamma.mul(&g.delta)?.scale_re(pd.coefficient).add(&d_omega)?.add(&z_prime)?;
    let hs = horizontal(&g.with_dirac(script.clone()), &pd.gamma)?;
    rep.check_result("horizontal(script D_omega) - D_omega", residual_on_interior(&hs.sub(&d_omega)?, &s), DEFAULT_TOL, m);
    let alt = g.real.conjugate(&omega.adjoint)?.mul(&g.delta)?;
    let d_alt = g.dirac.add(&alt.scale_re(measured_sign(&g.real, &g.dirac)? as f64))?.sub(&z_prime)?;
    rep.info("D_omega(J) - D_omega(j0)", residual_on_interior(&d_alt.sub(&d_omega)?, &s)?, DEFAULT_TOL, m);
    match chargewise_cross_check(g, pd, omega, &j0, eps, &d_omega) {
        Ok(r) => rep.merge(r),
        Err(NcgError::EmptyInterior { margin }) => rep.info(format!("chargewise cross-check skipped (margin {margin} exceeds cutoff)"), 0.0, 0.0, margin),
        Err(e) => return Err(e),
    }
    Ok(TwistData { omega: omega.clone(), j0, eps_prime: eps, d_omega, script_d_omega: script, z_prime, report: rep })
}

/// D_ω(hp) = (D₀h)p + h∇_ω(p) on H₀ vectors and words of charge 0, ±1.
fn chargewise_cross_check(
    g: &Geometry,
    pd: &ProjectionData,
    omega: &OneForm,
    j0: &AntilinearOperator,
    eps: i8,
    d_omega: &SparseOperator,
) -> Result<VerificationReport> {
    let m = omega.margin() + 3;
    let s = g.interior(m)?;
    let h0: Vec<usize> = g.charge_subspace(0);
    let sub = s.intersect(&h0);
    let mut rep = report_for(g);
    if sub.is_empty() {
        return Err(NcgError::EmptyInterior { margin: m });
    }
    let e = interior_frame(&sub);
    let alg = WordAlgebra::new(g)?;
    let words: Vec<_> = g.all_words(2).into_iter().filter(|w| g.word_charge(w).abs() <= 1).collect();
    let worst = words
        .par_iter()
        .map(|w| -> Result<f64> {
            let x = Expr::word(w.clone());
            let hp = alg.rho_apply(w, &e);
            let lhs = d_omega.mul(&hp)?;
            let d0 = alg.rho_apply(w, &pd.d_h.mul(&e)?);
            let nab_adj = covariant_derivative_adjoint(g, omega, &x)?;
            let act = j0.conjugate(&nab_adj)?.mul(&e)?.scale_re(-(eps as f64));
            Ok(lhs.sub(&d0.add(&act)?)?.max_column_norm())
        })
        .collect::<Result<Vec<f64>>>()?
        .into_iter()
        .fold(0.0, f64::max);
    rep.check("D_omega(hp) = (D0 h)p + h nabla(p) (charge 0, +-1)", worst, DEFAULT_TOL, m);
    Ok(rep)
}

/// D_ω − D_h on the interior.
pub fn check_compatibility(g: &Geometry, pd: &ProjectionData, tw: &TwistData) -> Result<VerificationReport> {
    let m = tw.omega.margin() + 1;
    let s = g.interior(m)?;
    let mut rep = report_for(g);
    rep.check_result("D_omega - D_h", residual_on_interior(&tw.d_omega.sub(&pd.d_h)?, &s), DEFAULT_TOL, m);
    Ok(rep)
}

/// D_h − Σ_j g_j (j₀ω_j j₀⁻¹) δ_n on a torus.
pub fn torus_twist_oracle(g: &Geometry, pd: &ProjectionData, j0: &AntilinearOperator, base_coefficients: &[Expr]) -> Result<SparseOperator> {
    let n = match g.params {
        GeometryParams::Torus { n, .. } => n,
        _ => return Err(NcgError::InvalidParameter("torus oracle on a non-torus geometry".into())),
    };
    let sp = spinor_factor(n);
    let mut acc = pd.d_h.clone();
    for (j, w) in base_coefficients.iter().enumerate() {
        if w.0.is_empty() {
            continue;
        }
        let lift = spinor_lift(g.dim(), g.spinor_dim, &sp.gammas[j]);
        let t = SparseOperator::chain(&[&lift, &j0.conjugate(&g.expr_op(w))?, &g.delta])?;
        acc = acc.sub(&t)?;
    }
    Ok(acc)
}

/// 𝒟_ω as a new Dirac operator, with the checks that it still gives a triple.
pub fn compatible_dirac_family(g: &Geometry, pd: &ProjectionData, omega: &OneForm) -> Result<(SparseOperator, VerificationReport)> {
    let tw = twisted_dirac(g, pd, omega)?;
    let dd = tw.script_d_omega.clone();
    let g2 = g.with_dirac(dd.clone());
    let m = omega.margin() + 1;
    let s = g.interior(m)?;
    let mut rep = report_for(g);
    rep.check_result("script D_omega selfadjoint", interior_hermiticity(&dd, &s), DEFAULT_TOL, m);
    rep.check_result(
        "horizontal(script D_omega) = D_omega",
        residual_on_interior(&horizontal(&g2, &pd.gamma)?.sub(&tw.d_omega)?, &s),
        DEFAULT_TOL,
        m,
    );
    let eq = check_equivariance(&g2)?;
    for r in eq.checks {
        // boundary truncation of ρ(ω) can break selfadjointness off the interior
        if r.name == "[delta,D]" {
            rep.push(r);
        }
    }
    let base_words: Vec<Expr> = std::iter::once(Expr::one()).chain(base_exprs(g, 1)).collect();
    // words of length 2 when the cutoff leaves room, else single letters
    let len = if g.interior(4 + m).is_ok() { 2 } else { 1 };
    let all: Vec<Expr> = g.all_words(len).into_iter().map(Expr::word).collect();
    let fo = first_order_exprs(&g2, &all, &base_words, m)?;
    rep.check(format!("first order [[D',a],Jb*J^-1], |a| <= {len}, b in base algebra"), fo, DEFAULT_TOL, 2 * len + m);
    let fo_full = first_order_exprs(&g2, &all, &all, m)?;
    rep.info(format!("first order, full algebra, |a|,|b| <= {len}"), fo_full, DEFAULT_TOL, 2 * len + m);
    let jd = g.real.conjugate(&dd)?.sub(&dd.scale_re(measured_sign(&g.real, &g.dirac)? as f64))?;
    rep.info_result("J-reality of script D_omega", residual_on_interior(&jd, &s), m);
    if let Some(chi) = &g.grading {
        rep.check_result("gamma D_omega + D_omega gamma", residual_on_interior(&anticommutator(chi, &tw.d_omega)?, &s), DEFAULT_TOL, m);
    }
    Ok((dd, rep))
}

fn first_order_exprs(g: &Geometry, avec: &[Expr], bvec: &[Expr], extra: usize) -> Result<f64> {
    let len = avec.iter().chain(bvec).map(|e| e.max_len()).max().unwrap_or(0);
    let s = g.interior(2 * len + extra)?;
    let alg = WordAlgebra::new(g)?;
    let e = interior_frame(&s);
    let d = &g.dirac;
    let de = d.mul(&e)?;
    Ok(bvec
        .par_iter()
        .map(|b| {
            let rb = alg.rho_expr_apply(b, &e);
            let drb = d.mul(&rb).expect("shapes");
            avec.iter()
                .map(|a| {
                    let t1 = d.mul(&alg.pi_expr_apply(a, &rb)).expect("shapes");
                    let t2 = alg.pi_expr_apply(a, &drb);
                    let t3 = alg.rho_expr_apply(b, &d.mul(&alg.pi_expr_apply(a, &e)).expect("shapes"));
                    let t4 = alg.rho_expr_apply(b, &alg.pi_expr_apply(a, &de));
                    SparseOperator::linear_combination(&[(c(1.0, 0.0), &t1), (c(-1.0, 0.0), &t2), (c(-1.0, 0.0), &t3), (c(1.0, 0.0), &t4)])
                        .expect("shapes")
                        .max_column_norm()
                })
                .fold(0.0, f64::max)
        })
        .reduce(|| 0.0, f64::max))
}

const SPECTRUM_DIM_LIMIT: usize = 6000;

/// γD_ω + D_ωγ = 0 and the resulting ± symmetry of the spectrum (tori).
pub fn check_spectral_symmetry(g: &Geometry, tw: &TwistData) -> Result<VerificationReport> {
    let chi = g.grading.as_ref().ok_or_else(|| NcgError::MissingPrerequisite("grading".into()))?;
    let mut rep = report_for(g);
    rep.check("gamma D_omega + D_omega gamma", anticommutator(chi, &tw.d_omega)?.max_abs(), DEFAULT_TOL, 0);
    let d = &tw.d_omega;
    if d.nrows() <= SPECTRUM_DIM_LIMIT {
        let sym = d.add(&d.adjoint())?.scale_re(0.5);
        let ev = hermitian_eigenvalues(&sym)?;
        let dev = ev.iter().zip(ev.iter().rev()).map(|(a, b)| (a + b).abs()).fold(0.0, f64::max);
        rep.info("spectrum of D_omega symmetric about 0", dev, 1e-9, 0);
    } else {
        rep.info(format!("spectrum of D_omega skipped (dim {} > {SPECTRUM_DIM_LIMIT})", d.nrows()), 0.0, 0.0, 0);
    }
    Ok(rep)
}

/// Span of π(A^(k))·H₀ covers H_k on the interior (numerical rank).
pub fn density_rank_deficit(g: &Geometry, k: i64, margin: usize) -> Result<usize> {
    let s: InteriorSubspace = g.interior(margin)?;
    let h0 = s.intersect(&g.charge_subspace(0));
    let target = s.intersect(&g.charge_subspace(k));
    let e = interior_frame(&h0);
    let words: Vec<_> = g.all_words(2).into_iter().filter(|w| g.word_charge(w) as i64 == k).collect();
    let pos: HashMap<usize, usize> = target.indices().iter().enumerate().map(|(a, &b)| (b, a)).collect();
    let mut cols: Vec<Vec<C64>> = Vec::new();
    for w in &words {
        let x = g.word_op(w).mul(&e)?;
        for j in 0..x.ncols() {
            let mut v = vec![c(0.0, 0.0); pos.len()];
            for &(r, val) in x.column(j) {
                if let Some(&p) = pos.get(&r) {
                    v[p] = val;
                }
            }
            cols.push(v);
        }
    }
    if pos.is_empty() {
        return Ok(0);
    }
    let mat = DMatrix::from_fn(pos.len(), cols.len(), |i, j| cols[j][i]);
    let gram = &mat * mat.adjoint();
    let ev = gram.symmetric_eigen().eigenvalues;
    let top = ev.iter().fold(0.0f64, |a, &v| a.max(v));
    Ok(ev.iter().filter(|&&v| v <= top * 1e-12).count())
}
