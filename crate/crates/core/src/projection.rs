//! Projectable gradings Γ, the horizontal/vertical split of D and the descended triples.

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;

use crate::basis::BasisIndex;
use crate::error::{NcgError, Result};
use crate::geometry::{Expr, Geometry, GeometryParams};
use crate::kr::{self, KRSignRow};
use crate::lm::{minimize, LmOptions};
use crate::operator::{anticommutator, c, commutator, hermitian_eigenvalues, residual_on_interior, AntilinearOperator, SparseOperator, C64};
use crate::report::{CheckRecord, VerificationReport, DEFAULT_TOL};
use crate::spinor::{clifford4, Mat};
use crate::torus::{spinor_block, spinor_factor, spinor_lift};
use crate::verify::{interior_frame, kr_relations, report_for, WordAlgebra};

pub const ACCEPT_TOL: f64 = 1e-9;
pub const CLUSTER_RADIUS: f64 = 1e-6;

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Parity {
    Odd,
    Even,
}

/// The sign s in ΓJ = sJΓ required of an admissible grading.
pub fn gamma_j_sign(g: &Geometry) -> i8 {
    if g.is_even() || g.kr_dim % 4 == 3 {
        -1
    } else {
        1
    }
}

#[derive(Clone, Debug)]
pub struct GammaSolution {
    pub gamma: SparseOperator,
    /// Spinor factor M of Γ = id ⊗ M (tori).
    pub spinor: Option<Mat>,
    /// Coefficients (x₊, x₋) of Γ = x₊P₊ + x₋P₋ (sphere).
    pub sign_coefficients: Option<(C64, C64)>,
    /// Signed c in D_v = cΓδ.
    pub coefficient: f64,
    pub fiber_length: f64,
    /// Operator-level re-verification residual.
    pub residual: f64,
    /// Number of starts that landed in this cluster.
    pub hits: usize,
}

#[derive(Clone, Debug)]
pub struct GammaSearch {
    pub solutions: Vec<GammaSolution>,
    pub ambiguous: bool,
    pub starts: usize,
    pub converged: usize,
}

impl GammaSearch {
    /// The solution with c > 0.
    pub fn canonical(&self) -> Option<&GammaSolution> {
        self.solutions.iter().find(|s| s.coefficient > 0.0)
    }
}

#[derive(Clone, Copy, Debug)]
pub struct SearchOptions {
    pub starts: usize,
    pub seed: u64,
    pub accept_tol: f64,
}

impl Default for SearchOptions {
    fn default() -> Self {
        Self { starts: 64, seed: 0x5eed, accept_tol: ACCEPT_TOL }
    }
}

fn push_mat(out: &mut Vec<f64>, m: &Mat) {
    for z in m.iter() {
        out.push(z.re);
        out.push(z.im);
    }
}

fn mat_from(p: &[f64], d: usize) -> Mat {
    Mat::from_fn(d, d, |i, j| {
        let k = 2 * (j * d + i);
        c(p[k], p[k + 1])
    })
}

/// Reduced residuals for Γ = id ⊗ M on a torus.
pub fn torus_gamma_residuals(g: &Geometry, m: &Mat, coef: f64) -> Vec<f64> {
    let n = match g.params {
        GeometryParams::Torus { n, .. } => n,
        _ => unreachable!(),
    };
    let sp = spinor_factor(n);
    let d = g.spinor_dim;
    let id = Mat::identity(d, d);
    let mut out = Vec::new();
    push_mat(&mut out, &(m * m - &id));
    push_mat(&mut out, &(m - m.adjoint()));
    if let Some(chi) = &sp.chirality {
        push_mat(&mut out, &(m * chi + chi * m));
    }
    let s = c(gamma_j_sign(g) as f64, 0.0);
    let cc = &sp.real_factor;
    // ΓJ = sJΓ ⇔ M C = s C conj(M)
    push_mat(&mut out, &(m * cc - cc * m.map(|z| z.conj()) * s));
    for (j, gj) in sp.gammas.iter().enumerate() {
        let dh = (m * m * gj - m * gj * m) * c(0.5, 0.0);
        let mut r = gj - dh;
        if j == n - 1 {
            r -= m * c(coef, 0.0);
        }
        push_mat(&mut out, &r);
    }
    out
}

/// T⁴ constraint residuals at M: α₄² = 1 with every other α, β vanishing.
pub fn gammacond_residuals(m: &Mat) -> Vec<(String, f64)> {
    let cl = clifford4();
    let (alpha, beta) = cl.alpha_beta(m);
    let mut cross: f64 = 0.0;
    for i in 0..4 {
        for j in 0..4 {
            cross = cross.max((alpha[i] * beta[j] - alpha[j] * beta[i]).norm());
        }
    }
    let others = (0..3).map(|j| alpha[j].norm()).chain((0..4).map(|j| beta[j].norm())).fold(0.0, f64::max);
    vec![
        ("alpha_i beta_j - alpha_j beta_i".into(), cross),
        ("alpha_4^2 + beta_4^2/2 - 1".into(), (alpha[3] * alpha[3] + beta[3] * beta[3] * 0.5 - 1.0).norm()),
        ("alpha_4^2 - 1".into(), (alpha[3] * alpha[3] - 1.0).norm()),
        ("max other alpha, beta".into(), others),
    ]
}

struct SphereProbe {
    vecs: Vec<Vec<C64>>,
    sign: Vec<f64>,
}

fn sphere_probe(g: &Geometry, seed: u64) -> Result<SphereProbe> {
    let s = g.interior(2)?;
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let vecs = (0..2)
        .map(|_| {
            let mut v = vec![c(0.0, 0.0); g.dim()];
            for &i in s.indices() {
                v[i] = c(rng.random_range(-1.0..1.0), rng.random_range(-1.0..1.0));
            }
            v
        })
        .collect();
    let sign = g
        .basis
        .entries()
        .iter()
        .map(|b| match b {
            BasisIndex::Sphere { sign, .. } => *sign as f64,
            _ => unreachable!(),
        })
        .collect();
    Ok(SphereProbe { vecs, sign })
}

/// Operator-level residuals of Γ = x₊P₊ + x₋P₋ on probe vectors.
fn sphere_gamma_residuals(g: &Geometry, probe: &SphereProbe, p: &[f64]) -> Vec<f64> {
    let (xp, xm, coef) = (c(p[0], p[1]), c(p[2], p[3]), p[4]);
    let gd: Vec<C64> = probe.sign.iter().map(|&s| if s > 0.0 { xp } else { xm }).collect();
    let gam = |v: &[C64]| -> Vec<C64> { v.iter().zip(&gd).map(|(a, b)| a * b).collect() };
    let gam_adj = |v: &[C64]| -> Vec<C64> { v.iter().zip(&gd).map(|(a, b)| a * b.conj()).collect() };
    let d = |v: &[C64]| g.dirac.apply(v);
    let delta = |v: &[C64]| g.delta.apply(v);
    let jay = |v: &[C64]| g.real.apply(v);
    let sub = |a: &[C64], b: &[C64]| -> Vec<C64> { a.iter().zip(b).map(|(x, y)| x - y).collect() };
    let dh = |v: &[C64]| -> Vec<C64> {
        let t = sub(&gam(&d(v)), &d(&gam(v)));
        gam(&t).into_iter().map(|z| z * 0.5).collect()
    };
    let z = |v: &[C64]| -> Vec<C64> {
        let a = sub(&d(v), &dh(v));
        sub(&a, &gam(&delta(v)).into_iter().map(|x| x * coef).collect::<Vec<_>>())
    };
    let s = gamma_j_sign(g) as f64;
    let mut out = Vec::new();
    let mut push = |w: Vec<C64>| {
        for x in w {
            out.push(x.re);
            out.push(x.im);
        }
    };
    for v in &probe.vecs {
        push(sub(&gam(&gam(v)), v));
        push(sub(&gam(v), &gam_adj(v)));
        let gj = gam(&jay(v));
        let jg: Vec<C64> = jay(&gam(v)).into_iter().map(|x| x * s).collect();
        push(sub(&gj, &jg));
        for gen in &g.generators {
            for op in [&gen.op, &gen.adj] {
                push(sub(&z(&op.apply(v)), &op.apply(&z(v))));
            }
        }
    }
    out
}

fn sphere_gamma_operator(g: &Geometry, xp: C64, xm: C64) -> SparseOperator {
    SparseOperator::diagonal(
        &g.basis
            .entries()
            .iter()
            .map(|b| match b {
                BasisIndex::Sphere { sign, .. } if *sign > 0 => xp,
                _ => xm,
            })
            .collect::<Vec<_>>(),
    )
}

/// Operator-level conditions on a candidate Γ with vertical coefficient c.
pub fn verify_gamma(g: &Geometry, gamma: &SparseOperator, coef: f64, tol: f64) -> Result<VerificationReport> {
    let id = SparseOperator::identity(g.dim());
    let mut rep = report_for(g);
    rep.check("Gamma^2 - 1", gamma.mul(gamma)?.sub(&id)?.max_abs(), tol, 0);
    rep.check("Gamma selfadjoint", gamma.hermiticity_deviation(), tol, 0);
    rep.check("[Gamma,delta]", commutator(gamma, &g.delta)?.max_abs(), tol, 0);
    if let Some(chi) = &g.grading {
        rep.check("Gamma gamma + gamma Gamma", anticommutator(gamma, chi)?.max_abs(), tol, 0);
    }
    let s = gamma_j_sign(g);
    let m = &g.real.matrix;
    rep.check(
        format!("Gamma J = ({})J Gamma", kr::sign_str(s)),
        gamma.mul(m)?.sub(&g.real.after(gamma)?.scale_re(s as f64))?.max_abs(),
        tol,
        0,
    );
    let s1 = g.interior(1)?;
    let s2 = g.interior(2)?;
    let z = z_operator(g, gamma, coef)?;
    let mut wg: f64 = 0.0;
    let mut wz: f64 = 0.0;
    for gen in &g.generators {
        for op in [&gen.op, &gen.adj] {
            wg = wg.max(residual_on_interior(&commutator(gamma, op)?, &s1)?);
            wz = wz.max(residual_on_interior(&commutator(&z, op)?, &s2)?);
        }
    }
    rep.check("[Gamma,pi(x)]", wg, tol, 1);
    rep.check("[Z,pi(x)]", wz, tol, 2);
    Ok(rep)
}

/// ½Γ[Γ,D]
pub fn horizontal(g: &Geometry, gamma: &SparseOperator) -> Result<SparseOperator> {
    Ok(gamma.mul(&commutator(gamma, &g.dirac)?)?.scale_re(0.5))
}

pub fn z_operator(g: &Geometry, gamma: &SparseOperator, coef: f64) -> Result<SparseOperator> {
    let dh = horizontal(g, gamma)?;
    let dv = gamma.mul(&g.delta)?.scale_re(coef);
    g.dirac.sub(&dh)?.sub(&dv)
}

/// Multi-start search for admissible gradings over the commutant ansatz.
pub fn search_gamma(g: &Geometry, opts: SearchOptions) -> Result<GammaSearch> {
    let is_torus = matches!(g.params, GeometryParams::Torus { .. });
    let d = g.spinor_dim;
    let probe = if is_torus { None } else { Some(sphere_probe(g, opts.seed ^ 0x9e37_79b9)?) };
    let nparams = if is_torus { 2 * d * d + 1 } else { 5 };
    let f = |p: &[f64]| -> Vec<f64> {
        if is_torus {
            torus_gamma_residuals(g, &mat_from(p, d), p[nparams - 1])
        } else {
            sphere_gamma_residuals(g, probe.as_ref().unwrap(), p)
        }
    };
    let runs: Vec<(Vec<f64>, f64)> = (0..opts.starts)
        .into_par_iter()
        .map(|k| {
            let mut rng = ChaCha8Rng::seed_from_u64(opts.seed.wrapping_add(k as u64));
            let mut x0: Vec<f64> = (0..nparams - 1).map(|_| rng.random_range(-1.0..1.0)).collect();
            let e = rng.random_range(-6..=6);
            let sign = if rng.random_bool(0.5) { 1.0 } else { -1.0 };
            x0.push(sign * 2f64.powi(e));
            let res = minimize(&f, &x0, LmOptions::default());
            (res.x, res.residual)
        })
        .collect();
    let converged: Vec<&(Vec<f64>, f64)> = runs.iter().filter(|r| r.1 <= opts.accept_tol).collect();
    let mut clusters: Vec<(Vec<f64>, usize, f64)> = Vec::new();
    let mut ambiguous = false;
    for (x, _) in &converged {
        let hit = clusters.iter_mut().find(|(y, ..)| dist(x, y) < CLUSTER_RADIUS);
        match hit {
            Some((y, n, spread)) => {
                *spread = spread.max(dist(x, y));
                *n += 1;
            }
            None => {
                if clusters.iter().any(|(y, ..)| dist(x, y) < 100.0 * CLUSTER_RADIUS) {
                    ambiguous = true;
                }
                clusters.push((x.clone(), 1, 0.0));
            }
        }
    }
    let mut solutions = Vec::new();
    for (x, hits, _) in clusters {
        let coef = x[nparams - 1];
        let (gamma, spinor, signs) = if is_torus {
            let m = mat_from(&x, d);
            (spinor_lift(g.dim(), d, &m), Some(m), None)
        } else {
            let (xp, xm) = (c(x[0], x[1]), c(x[2], x[3]));
            (sphere_gamma_operator(g, xp, xm), None, Some((xp, xm)))
        };
        let rep = verify_gamma(g, &gamma, coef, opts.accept_tol)?;
        if rep.pass() {
            solutions.push(GammaSolution {
                gamma,
                spinor,
                sign_coefficients: signs,
                coefficient: coef,
                fiber_length: 1.0 / coef.abs(),
                residual: rep.max_residual(),
                hits,
            });
        }
    }
    solutions.sort_by(|a, b| b.coefficient.partial_cmp(&a.coefficient).unwrap());
    Ok(GammaSearch { solutions, ambiguous, starts: opts.starts, converged: converged.len() })
}

fn dist(a: &[f64], b: &[f64]) -> f64 {
    a.iter().zip(b).map(|(x, y)| (x - y) * (x - y)).sum::<f64>().sqrt()
}

/// The grading used by the pipelines: σ² on T², γ⁴ on T⁴, σ³ on T³, sign label on S³_θ.
pub fn standard_gamma(g: &Geometry) -> Result<(SparseOperator, f64)> {
    match &g.params {
        GeometryParams::Torus { n, .. } => {
            let sp = spinor_factor(*n);
            let m = sp.gammas[n - 1].clone();
            Ok((spinor_lift(g.dim(), g.spinor_dim, &m), 1.0))
        }
        GeometryParams::Sphere { r, .. } => Ok((crate::sphere::sphere_gamma(g), r / 2.0)),
    }
}

#[derive(Clone, Debug)]
pub struct ProjectionData {
    pub gamma: SparseOperator,
    pub d_h: SparseOperator,
    pub d_v: SparseOperator,
    pub z: SparseOperator,
    pub coefficient: f64,
    pub fiber_length: f64,
    pub parity: Parity,
    pub report: VerificationReport,
}

/// D = D_h + cΓδ + Z with checks that Z commutes with the algebra.
pub fn decompose(g: &Geometry, gamma: &SparseOperator, coef: f64) -> Result<ProjectionData> {
    if coef == 0.0 {
        return Err(NcgError::InvalidParameter("vertical coefficient must be nonzero".into()));
    }
    let d_h = horizontal(g, gamma)?;
    let d_v = gamma.mul(&g.delta)?.scale_re(coef);
    let z = g.dirac.sub(&d_h)?.sub(&d_v)?;
    let mut rep = verify_gamma(g, gamma, coef, DEFAULT_TOL)?;
    rep.check("D_h Gamma + Gamma D_h", anticommutator(&d_h, gamma)?.max_abs(), DEFAULT_TOL, 0);
    rep.check("[D_h,delta]", commutator(&d_h, &g.delta)?.max_abs(), DEFAULT_TOL, 0);
    let s1 = g.interior(1)?;
    match &g.params {
        GeometryParams::Torus { .. } => rep.check("Z = 0", z.max_abs(), DEFAULT_TOL, 0),
        GeometryParams::Sphere { alpha, .. } => {
            let shifted = z.sub(&SparseOperator::identity(g.dim()).scale_re(alpha / 4.0))?;
            rep.check_result("D - D_h - (r/2)Gamma delta - (alpha/4)id", residual_on_interior(&shifted, &s1), 1e-12, 1);
        }
    }
    Ok(ProjectionData {
        gamma: gamma.clone(),
        d_h,
        d_v,
        z,
        coefficient: coef,
        fiber_length: 1.0 / coef.abs(),
        parity: if g.is_even() { Parity::Even } else { Parity::Odd },
        report: rep,
    })
}

/// Z-boundedness proxy: ‖Z‖ at two cutoffs agree within a factor of two.
pub fn z_stability(small: &ProjectionData, large: &ProjectionData) -> CheckRecord {
    let (a, b) = (small.z.max_column_norm(), large.z.max_column_norm());
    let ratio = if a == 0.0 && b == 0.0 { 1.0 } else { b / a };
    CheckRecord::flag(format!("|Z| cutoff ratio {ratio:.6} in [0.5,2]"), (0.5..=2.0).contains(&ratio))
}

/// [D_h, π(b)] = [D, π(b)] for base words of length ≤ 2.
pub fn check_projected_calculus(g: &Geometry, pd: &ProjectionData) -> Result<VerificationReport> {
    let words = base_words(g);
    let len = words.iter().map(|e| e.max_len()).max().unwrap_or(0);
    let margin = len + 1;
    let s = g.interior(margin)?;
    let alg = WordAlgebra::new(g)?;
    let e = interior_frame(&s);
    let x = g.dirac.sub(&pd.d_h)?;
    let xe = x.mul(&e)?;
    let worst = words
        .par_iter()
        .map(|w| {
            let a = x.mul(&alg.pi_expr_apply(w, &e)).expect("shapes");
            let b = alg.pi_expr_apply(w, &xe);
            a.sub(&b).expect("shapes").max_column_norm()
        })
        .reduce(|| 0.0, f64::max);
    let mut rep = report_for(g);
    rep.check("[D_h,pi(b)] = [D,pi(b)] (base words <= 2)", worst, DEFAULT_TOL, margin);
    Ok(rep)
}

/// Base generators, their adjoints and all products of two.
pub fn base_words(g: &Geometry) -> Vec<Expr> {
    let mut gens: Vec<Expr> = Vec::new();
    for (_, e) in &g.base_generators {
        gens.push(e.clone());
        gens.push(e.adjoint());
    }
    let mut out = vec![Expr::one()];
    out.extend(gens.iter().cloned());
    for a in &gens {
        for b in &gens {
            out.push(a.times(b));
        }
    }
    out
}

#[derive(Clone, Debug)]
pub struct DescendedTriple {
    pub label: String,
    /// Parent-space isometry onto the subspace.
    pub isometry: SparseOperator,
    pub dirac: SparseOperator,
    pub real: AntilinearOperator,
    pub grading: Option<SparseOperator>,
    pub generators: Vec<(String, SparseOperator)>,
    pub kr_dim: u8,
    pub orientation: i8,
    pub report: VerificationReport,
}

fn compress_antilinear(j: &AntilinearOperator, v: &SparseOperator) -> Result<(AntilinearOperator, f64)> {
    let image = j.matrix.mul(&v.conj())?;
    let back = v.mul(&v.adjoint().mul(&image)?)?;
    let leak = image.sub(&back)?.max_abs();
    Ok((AntilinearOperator::new(v.adjoint().mul(&image)?), leak))
}

fn compress_checked(x: &SparseOperator, v: &SparseOperator) -> Result<(SparseOperator, f64)> {
    let image = x.mul(v)?;
    let c = v.adjoint().mul(&image)?;
    let leak = image.sub(&v.mul(&c)?)?.max_abs();
    Ok((c, leak))
}

fn descended(
    g: &Geometry,
    label: &str,
    v: SparseOperator,
    d_h: &SparseOperator,
    j: &AntilinearOperator,
    grading: Option<&SparseOperator>,
    orientation: i8,
) -> Result<DescendedTriple> {
    let kr_dim = (g.kr_dim + 7) % 8;
    let row: KRSignRow = kr::lookup(kr_dim)?;
    let mut rep = report_for(g);
    let (d0, leak_d) = compress_checked(d_h, &v)?;
    rep.check(format!("{label}: D_h preserves subspace"), leak_d, DEFAULT_TOL, 0);
    let (j0, leak_j) = compress_antilinear(j, &v)?;
    rep.check(format!("{label}: j preserves subspace"), leak_j, DEFAULT_TOL, 0);
    let gam0 = match grading {
        Some(x) => {
            let (x0, leak) = compress_checked(x, &v)?;
            rep.check(format!("{label}: grading preserves subspace"), leak, DEFAULT_TOL, 0);
            Some(x0)
        }
        None => None,
    };
    let mut gens = Vec::new();
    let mut worst: f64 = 0.0;
    for (name, e) in &g.base_generators {
        let (x0, leak) = compress_checked(&g.expr_op(e), &v)?;
        worst = worst.max(leak);
        gens.push((name.clone(), x0));
    }
    rep.check(format!("{label}: base algebra preserves subspace"), worst, DEFAULT_TOL, 0);
    for r in kr_relations(&format!("{label}: "), &j0, &d0, gam0.as_ref(), &row)? {
        rep.push(r);
    }
    Ok(DescendedTriple {
        label: label.into(),
        isometry: v,
        dirac: d0,
        real: j0,
        grading: gam0,
        generators: gens,
        kr_dim,
        orientation,
        report: rep,
    })
}

/// Orthonormal basis of the range of a projector, from projected standard vectors.
fn eigenspace(p: &Mat) -> Vec<nalgebra::DVector<C64>> {
    let n = p.nrows();
    let mut out: Vec<nalgebra::DVector<C64>> = Vec::new();
    for s in 0..n {
        let mut v = p.column(s).into_owned();
        for u in &out {
            let proj = u.dotc(&v);
            v -= u * proj;
        }
        let nv = v.norm();
        if nv > 1e-8 {
            out.push(v / c(nv, 0.0));
        }
    }
    out
}

#[derive(Clone, Debug)]
pub struct EvenSplit {
    pub plus: DescendedTriple,
    pub minus: DescendedTriple,
    /// Γ restricted as a map H₀^(+) → H₀^(−).
    pub intertwiner: SparseOperator,
    pub report: VerificationReport,
}

/// ν = iΓγ on H₀, ν-eigenspaces, D₀^(±) and j₀ (torus parents).
pub fn split_even(g: &Geometry, pd: &ProjectionData) -> Result<EvenSplit> {
    if !matches!(g.params, GeometryParams::Torus { .. }) || !g.is_even() {
        return Err(NcgError::MissingPrerequisite("split_even needs an even torus parent".into()));
    }
    let chi = g.grading.as_ref().ok_or_else(|| NcgError::MissingPrerequisite("grading".into()))?;
    let nu = pd.gamma.mul(chi)?.scale(c(0.0, 1.0));
    let id = SparseOperator::identity(g.dim());
    let nu_dev = nu.mul(&nu)?.sub(&id)?.max_abs().max(nu.hermiticity_deviation());
    if nu_dev > 1e-10 {
        return Err(NcgError::Structural(format!("nu fails nu^2 = 1, nu* = nu (deviation {nu_dev:.3e})")));
    }
    let mut rep = report_for(g);
    rep.check("nu^2 - 1", nu.mul(&nu)?.sub(&id)?.max_abs(), DEFAULT_TOL, 0);
    rep.check("nu selfadjoint", nu.hermiticity_deviation(), DEFAULT_TOL, 0);
    let h0 = g.charge_subspace(0);
    let cols = SparseOperator::identity(g.dim()).select_columns(&h0);
    let comm = commutator(&pd.d_h, &nu)?.mul(&cols)?;
    rep.check("[D_h,nu] on H0", comm.max_abs(), DEFAULT_TOL, 0);

    let nm = spinor_block(g, &nu);
    let d = g.spinor_dim;
    let eye = Mat::identity(d, d);
    let wp = eigenspace(&((&eye + &nm) * c(0.5, 0.0)));
    let wm = eigenspace(&((&eye - &nm) * c(0.5, 0.0)));
    let bases: Vec<usize> = h0.iter().copied().filter(|&i| i % d == 0).collect();
    let iso = |ws: &[nalgebra::DVector<C64>]| {
        let mut t = Vec::new();
        let mut col = 0;
        for &b in &bases {
            for w in ws {
                for s in 0..d {
                    t.push((b + s, col, w[s]));
                }
                col += 1;
            }
        }
        SparseOperator::from_triplets(g.dim(), col, t)
    };
    let (vp, vm) = (iso(&wp), iso(&wm));
    let j0 = match g.kr_dim % 8 {
        0 | 4 => g.real.clone(),
        _ => g.real.premultiply(chi)?,
    };
    let plus = descended(g, "H0(+)", vp.clone(), &pd.d_h, &j0, None, 1)?;
    let minus = descended(g, "H0(-)", vm.clone(), &pd.d_h, &j0, None, -1)?;
    let w = SparseOperator::chain(&[&vm.adjoint(), &pd.gamma, &vp])?;
    let wid = SparseOperator::identity(w.ncols());
    rep.check("Gamma: H0(+) -> H0(-) unitary", w.adjoint().mul(&w)?.sub(&wid)?.max_abs(), DEFAULT_TOL, 0);
    let flip = SparseOperator::chain(&[&w, &plus.dirac, &w.adjoint()])?.add(&minus.dirac)?;
    rep.check("Gamma D0(+) Gamma^-1 + D0(-)", flip.max_abs(), DEFAULT_TOL, 0);
    Ok(EvenSplit { plus, minus, intertwiner: w, report: rep })
}

/// Descended triple on H₀ (k = 0) or on H_k ⊕ H_{−k}, for odd parents.
pub fn split_odd(g: &Geometry, pd: &ProjectionData, k: i64) -> Result<DescendedTriple> {
    if g.is_even() {
        return Err(NcgError::MissingPrerequisite("split_odd needs an odd parent".into()));
    }
    let k = k.abs();
    let mut idx = g.charge_subspace(k);
    if k > 0 {
        idx.extend(g.charge_subspace(-k));
        idx.sort_unstable();
    }
    if idx.is_empty() {
        return Err(NcgError::EmptyInterior { margin: k as usize });
    }
    let v = SparseOperator::identity(g.dim()).select_columns(&idx);
    let jk = if g.kr_dim % 4 == 1 { g.real.premultiply(&pd.gamma)? } else { g.real.clone() };
    let label = if k == 0 { "H0".to_string() } else { format!("H{k}+H-{k}") };
    descended(g, &label, v, &pd.d_h, &jk, Some(&pd.gamma), 1)
}

fn entrywise(a: &SparseOperator, b: &SparseOperator) -> f64 {
    if a.nrows() != b.nrows() || a.ncols() != b.ncols() {
        return f64::INFINITY;
    }
    a.sub(b).map(|x| x.max_abs()).unwrap_or(f64::INFINITY)
}

/// Best global phase z with j₀ ≈ z·j, and the remaining deviation.
fn phase_fit(j0: &SparseOperator, j: &SparseOperator) -> (C64, f64) {
    if j0.nrows() != j.nrows() || j0.ncols() != j.ncols() {
        return (c(0.0, 0.0), f64::INFINITY);
    }
    let num: C64 = j.entries().map(|(r, cc, v)| v.conj() * j0.get(r, cc)).sum();
    let den: f64 = j.entries().map(|e| e.2.norm_sqr()).sum();
    let z = num / den;
    let z = z / z.norm();
    (z, entrywise(j0, &j.scale(z)))
}

/// T² descent: D₀^(±) = ∓δ₁, with j₀ = γJ giving KR-dimension 1.
pub fn check_t2_descent(g: &Geometry, split: &EvenSplit) -> Result<VerificationReport> {
    let mut rep = report_for(g);
    let d1 = &g.derivations[0];
    for (t, sign) in [(&split.plus, -1.0), (&split.minus, 1.0)] {
        let want = SparseOperator::chain(&[&t.isometry.adjoint(), d1, &t.isometry])?.scale_re(sign);
        rep.check(format!("{}: D0 = {}delta_1", t.label, if sign < 0.0 { "-" } else { "+" }), entrywise(&t.dirac, &want), DEFAULT_TOL, 0);
    }
    Ok(rep)
}

/// T⁴ descent compared with a directly built T³ triple.
pub fn check_t4_descent(g4: &Geometry, split: &EvenSplit, g3: &Geometry) -> Result<VerificationReport> {
    let mut rep = report_for(g4);
    rep.check("D0(+) = +sum sigma^j delta_j", entrywise(&split.plus.dirac, &g3.dirac), DEFAULT_TOL, 0);
    rep.check("D0(-) = -sum sigma^j delta_j", entrywise(&split.minus.dirac, &g3.dirac.scale_re(-1.0)), DEFAULT_TOL, 0);
    let mut worst: f64 = 0.0;
    for (i, (_, x)) in split.plus.generators.iter().enumerate() {
        worst = worst.max(entrywise(x, &g3.generators[i].op));
    }
    rep.check("H0(+) base generators = T3 generators", worst, DEFAULT_TOL, 0);
    let (z, dev) = phase_fit(&split.plus.real.matrix, &g3.real.matrix);
    rep.check(format!("j0 = z J_T3 (z = {:.6}{:+.6}i)", z.re, z.im), dev, DEFAULT_TOL, 0);
    Ok(rep)
}

/// T³ → T² descent on H₀ compared entrywise with a directly built T².
pub fn check_t3_descent(g3: &Geometry, t: &DescendedTriple, g2: &Geometry) -> Result<VerificationReport> {
    let mut rep = report_for(g3);
    rep.check("D0 = D_T2", entrywise(&t.dirac, &g2.dirac), DEFAULT_TOL, 0);
    let gam2 = g2.grading.as_ref().ok_or_else(|| NcgError::MissingPrerequisite("T2 grading".into()))?;
    rep.check("gamma0 = gamma_T2", entrywise(t.grading.as_ref().unwrap(), gam2), DEFAULT_TOL, 0);
    rep.check("j0 = J_T2", entrywise(&t.real.matrix, &g2.real.matrix), DEFAULT_TOL, 0);
    let mut worst: f64 = 0.0;
    for (i, (_, x)) in t.generators.iter().enumerate() {
        worst = worst.max(entrywise(x, &g2.generators[i].op));
    }
    rep.check("H0 base generators = T2 generators", worst, DEFAULT_TOL, 0);
    Ok(rep)
}

/// Spectrum of D₀ on H₀ from counting: ±|s|(l+½) with multiplicity 2l+1, for l ∈ ½ + N.
pub fn sphere_h0_oracle(twice_cutoff: i32, s: C64) -> Vec<f64> {
    let mut out = Vec::new();
    for tl in (1..=twice_cutoff).step_by(2) {
        let v = s.norm() * (tl as f64 / 2.0 + 0.5);
        for _ in 0..(tl + 1) {
            out.push(v);
            out.push(-v);
        }
    }
    out.sort_by(|a, b| a.partial_cmp(b).unwrap());
    out
}

/// Restriction of the sphere triple to H₀ against the closed forms.
pub fn check_sphere_descent(g: &Geometry, pd: &ProjectionData, t: &DescendedTriple) -> Result<VerificationReport> {
    let (tc, _, _, s, alpha) = crate::sphere::sphere_params(g);
    let mut rep = report_for(g);
    let inv = crate::sphere::invariant_subspace(g);
    rep.push(CheckRecord::flag("H0 = span{|l,-1/2,n,+>, |l,1/2,n,->}", inv == g.charge_subspace(0)));
    let v = &t.isometry;
    let restricted = SparseOperator::chain(&[&v.adjoint(), &g.dirac, v])?;
    let shift = SparseOperator::identity(t.dirac.dim()).scale_re(alpha / 4.0);
    rep.check("restrict(D) - D0 - alpha/4", entrywise(&restricted, &t.dirac.add(&shift)?), 1e-12, 0);
    let mut worst: f64 = 0.0;
    for &col in &inv {
        if let BasisIndex::Sphere { twice_l, twice_m, twice_n, sign } = *g.basis.index(col) {
            let l1 = twice_l as f64 / 2.0 + 0.5;
            let (partner, want) = if sign > 0 {
                (BasisIndex::Sphere { twice_l, twice_m: twice_m + 2, twice_n, sign: -1 }, s * l1)
            } else {
                (BasisIndex::Sphere { twice_l, twice_m: twice_m - 2, twice_n, sign: 1 }, s.conj() * l1)
            };
            let p = g.basis.position(&partner).ok_or_else(|| NcgError::Structural("missing H0 partner".into()))?;
            for &(r, val) in pd.d_h.column(col) {
                let target = if r == p { want } else { c(0.0, 0.0) };
                worst = worst.max((val - target).norm());
            }
            if pd.d_h.get(p, col) == c(0.0, 0.0) {
                worst = worst.max(want.norm());
            }
        }
    }
    rep.check("D_h|l,-1/2,n,+> = s(l+1/2)|l,1/2,n,->", worst, 0.0, 0);
    let spectrum = hermitian_eigenvalues(&t.dirac)?;
    let oracle = sphere_h0_oracle(tc, s);
    let dev = if spectrum.len() == oracle.len() {
        spectrum.iter().zip(&oracle).map(|(a, b)| (a - b).abs()).fold(0.0, f64::max)
    } else {
        f64::INFINITY
    };
    rep.check("spectrum D0 = {+-|s|(l+1/2)} x (2l+1)", dev, DEFAULT_TOL, 0);
    Ok(rep)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::sphere::build_sphere;
    use crate::spinor::{dist, pauli_dense};
    use crate::torus::{build_torus, theta2};

    #[test]
    fn t2_search_finds_plus_minus_sigma2() {
        let g = build_torus(2, &theta2(0.4142), 4).unwrap();
        let res = search_gamma(&g, SearchOptions { starts: 16, ..Default::default() }).unwrap();
        assert_eq!(res.solutions.len(), 2);
        let s2 = pauli_dense()[1].clone();
        let p = res.canonical().unwrap();
        assert!(dist(p.spinor.as_ref().unwrap(), &s2) < 1e-9);
        assert!((p.coefficient - 1.0).abs() < 1e-9);
    }

    #[test]
    fn sphere_search_finds_sign_grading() {
        let g = build_sphere(7, 0.3, 1.5, c(0.8, 0.1), 0.2).unwrap();
        let res = search_gamma(&g, SearchOptions { starts: 12, ..Default::default() }).unwrap();
        assert_eq!(res.solutions.len(), 2);
        let p = res.canonical().unwrap();
        let (xp, xm) = p.sign_coefficients.unwrap();
        assert!((xp - 1.0).norm() < 1e-9 && (xm + 1.0).norm() < 1e-9);
        assert!((p.fiber_length - 2.0 / 1.5).abs() < 1e-9);
    }

    #[test]
    fn t2_decompose_and_descend() {
        let g = build_torus(2, &theta2(0.4142), 5).unwrap();
        let (gam, coef) = standard_gamma(&g).unwrap();
        let pd = decompose(&g, &gam, coef).unwrap();
        assert!(pd.report.pass(), "{:#?}", pd.report.failures());
        let split = split_even(&g, &pd).unwrap();
        assert!(split.report.pass(), "{:#?}", split.report.failures());
        assert!(split.plus.report.pass(), "{:#?}", split.plus.report.failures());
        assert_eq!(split.plus.kr_dim, 1);
        assert!(check_t2_descent(&g, &split).unwrap().pass());
        assert!(check_projected_calculus(&g, &pd).unwrap().pass());
    }

    #[test]
    fn wrong_coefficient_fails_decompose() {
        let g = build_torus(2, &theta2(0.4142), 4).unwrap();
        let (gam, _) = standard_gamma(&g).unwrap();
        assert!(!decompose(&g, &gam, 0.5).unwrap().report.pass());
    }

    #[test]
    fn sphere_h0_oracle_counts() {
        // 2L = 3: l = 1/2 (2 copies of ±|s|) and l = 3/2 (4 copies of ±2|s|)
        let o = sphere_h0_oracle(3, c(1.0, 0.0));
        assert_eq!(o.len(), 12);
        assert_eq!(o.iter().filter(|&&x| x == 2.0).count(), 4);
    }

    #[test]
    fn sphere_descent() {
        let g = build_sphere(9, 0.4142, 1.2, c(0.6, -0.3), 0.7).unwrap();
        let (gam, coef) = standard_gamma(&g).unwrap();
        let pd = decompose(&g, &gam, coef).unwrap();
        assert!(pd.report.pass(), "{:#?}", pd.report.failures());
        let t0 = split_odd(&g, &pd, 0).unwrap();
        assert!(t0.report.pass(), "{:#?}", t0.report.failures());
        assert_eq!(t0.kr_dim, 2);
        let r = check_sphere_descent(&g, &pd, &t0).unwrap();
        assert!(r.pass(), "{:#?}", r.failures());
        let t1 = split_odd(&g, &pd, 1).unwrap();
        assert!(t1.report.pass(), "{:#?}", t1.report.failures());
    }
}
