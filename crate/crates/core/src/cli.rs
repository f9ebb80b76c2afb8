//! Config loading, suites and report/CSV emission behind the `ncg` binary.
//!
//! Config grammar (TOML, unknown keys rejected):
//!
//! ```toml
//! seed = 7                       # optional, default 0x5eed
//! suite = ["triple", "gamma"]    # optional, default ["triple"]
//!
//! [geometry]                     # a torus ...
//! type = "torus"
//! n = 2
//! theta = [[0.0, 0.4142], [-0.4142, 0.0]]
//! K = 6
//! convention = "weyl"            # or "left-ordered"; optional
//!
//! # ... or a sphere
//! # type = "sphere"
//! # L = 7.5
//! # theta = 0.3
//! # r = 1.0
//! # s = "1+0j"
//! # alpha = 1.0
//!
//! [omega]                        # optional; exactly one of the three forms
//! standard = true                # flat σⁿ on tori, a*[D,a] + b[D,b*] on the sphere
//! # base = [[["0.5", "U"], ["0.5", "U*"]]]        # tori: ω_j per base direction
//! # pairs = [{ p = [["1", "a*"]], q = [["1", "a"]] }]
//!
//! [tolerances]
//! identity = 1e-10               # replaces the default tolerance of every check using it
//!
//! [search]
//! starts = 64
//!
//! [spectrum]
//! operator = "D"
//!
//! [output]
//! report = "report.json"
//! spectrum = "spectrum.csv"
//! ```
//!
//! Terms are `[coefficient, word]` with complex coefficients written `"re+imj"` and
//! words as space-separated generator names with `*` for adjoints (`"U V*"`, `"a b*"`, `"1"`).

use std::collections::BTreeMap;

use serde::Deserialize;
use serde_json::{json, Value};
use sha2::{Digest, Sha256};

use crate::connection::{
    check_compatibility, check_leibniz, check_sphere_connection, check_spectral_symmetry, check_strong_connection,
    compatible_dirac_family, sphere_connection, torus_connection, torus_twist_oracle, twisted_dirac, OneForm, StrongnessFamily,
};
use crate::error::{NcgError, Result};
use crate::geometry::{format_complex, parse_complex, Expr, Geometry, GeometryParams, TorusConvention};
use crate::operator::{hermitian_eigenvalues, merge_multiplicities, SparseOperator};
use crate::projection::{
    check_projected_calculus, check_sphere_descent, check_t2_descent, check_t3_descent, check_t4_descent, decompose,
    search_gamma, split_even, split_odd, standard_gamma, ProjectionData, SearchOptions,
};
use crate::report::{to_sorted_json_string, VerificationReport, DEFAULT_TOL};
use crate::sphere::{build_sphere, check_invariant_algebra, check_sphere_structure};
use crate::torus::{build_torus_with, theta2};
use crate::verify::{check_first_order, check_order_zero, check_real_triple, verify_all};

pub const EXIT_PASS: i32 = 0;
pub const EXIT_FAIL: i32 = 1;
pub const EXIT_CONFIG: i32 = 2;
pub const EXIT_PREREQUISITE: i32 = 3;

pub const SUITES: [&str; 12] = [
    "triple",
    "real",
    "order_zero",
    "first_order",
    "sphere",
    "gamma",
    "projection",
    "descent",
    "connection",
    "twist",
    "family",
    "symmetry",
];

pub const OPERATORS: [&str; 7] = ["D", "D_h", "D_v", "D_omega", "script_D_omega", "D0_plus", "D0_minus"];

#[derive(Clone, Debug, Deserialize)]
#[serde(tag = "type", rename_all = "lowercase", deny_unknown_fields)]
pub enum GeometryConfig {
    Torus {
        n: usize,
        theta: Vec<Vec<f64>>,
        #[serde(rename = "K")]
        k: i32,
        #[serde(default)]
        convention: Option<String>,
    },
    Sphere {
        #[serde(rename = "L")]
        l: f64,
        theta: f64,
        r: f64,
        s: String,
        alpha: f64,
    },
}

pub type TermList = Vec<(String, String)>;

#[derive(Clone, Debug, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct PairConfig {
    pub p: TermList,
    pub q: TermList,
}

#[derive(Clone, Debug, Default, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct OmegaConfig {
    #[serde(default)]
    pub standard: bool,
    pub base: Option<Vec<TermList>>,
    pub pairs: Option<Vec<PairConfig>>,
}

#[derive(Clone, Debug, Default, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct Tolerances {
    pub identity: Option<f64>,
}

#[derive(Clone, Debug, Default, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct SearchConfig {
    pub starts: Option<usize>,
}

#[derive(Clone, Debug, Default, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct SpectrumConfig {
    pub operator: Option<String>,
}

#[derive(Clone, Debug, Default, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct OutputConfig {
    pub report: Option<String>,
    pub spectrum: Option<String>,
}

#[derive(Clone, Debug, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct RunConfig {
    pub geometry: GeometryConfig,
    #[serde(default)]
    pub suite: Option<Vec<String>>,
    #[serde(default)]
    pub omega: Option<OmegaConfig>,
    #[serde(default)]
    pub tolerances: Tolerances,
    #[serde(default)]
    pub seed: Option<u64>,
    #[serde(default)]
    pub search: SearchConfig,
    #[serde(default)]
    pub spectrum: SpectrumConfig,
    #[serde(default)]
    pub output: OutputConfig,
}

/// Command-line overrides applied on top of a config.
#[derive(Clone, Debug, Default)]
pub struct Overrides {
    pub suite: Option<Vec<String>>,
    pub seed: Option<u64>,
    pub tol: Option<f64>,
    /// K for tori, 2L for the sphere.
    pub cutoff: Option<i32>,
    pub operator: Option<String>,
}

/// Outcome of one command: exit code plus the text to emit.
#[derive(Clone, Debug, PartialEq)]
pub struct Outcome {
    pub code: i32,
    pub output: String,
    /// Destination from the config's [output] section, used when no --out is given.
    pub path: Option<String>,
}

impl Outcome {
    fn error(code: i32, msg: impl Into<String>) -> Self {
        Self { code, output: msg.into(), path: None }
    }
}

pub fn parse_config(text: &str) -> Result<RunConfig> {
    toml::from_str(text).map_err(|e| NcgError::InvalidParameter(format!("config: {e}")))
}

impl RunConfig {
    pub fn apply(&mut self, o: &Overrides) {
        if let Some(s) = &o.suite {
            self.suite = Some(s.clone());
        }
        if o.seed.is_some() {
            self.seed = o.seed;
        }
        if o.tol.is_some() {
            self.tolerances.identity = o.tol;
        }
        if let Some(op) = &o.operator {
            self.spectrum.operator = Some(op.clone());
        }
        if let Some(n) = o.cutoff {
            match &mut self.geometry {
                GeometryConfig::Torus { k, .. } => *k = n,
                GeometryConfig::Sphere { l, .. } => *l = n as f64 / 2.0,
            }
        }
    }

    pub fn seed(&self) -> u64 {
        self.seed.unwrap_or(SearchOptions::default().seed)
    }

    pub fn suites(&self) -> Result<Vec<String>> {
        let s = self.suite.clone().unwrap_or_else(|| vec!["triple".into()]);
        for name in &s {
            if !SUITES.contains(&name.as_str()) {
                return Err(NcgError::InvalidParameter(format!("unknown suite `{name}` (known: {})", SUITES.join(", "))));
            }
        }
        Ok(s)
    }

    pub fn build(&self) -> Result<Geometry> {
        match &self.geometry {
            GeometryConfig::Torus { n, theta, k, convention } => {
                let conv = match convention.as_deref() {
                    None | Some("weyl") => TorusConvention::WeylSymmetric,
                    Some("left-ordered") => TorusConvention::LeftOrdered,
                    Some(other) => return Err(NcgError::InvalidParameter(format!("unknown convention `{other}`"))),
                };
                build_torus_with(*n, theta, *k, conv)
            }
            GeometryConfig::Sphere { l, theta, r, s, alpha } => {
                let twice = 2.0 * l;
                if (twice - twice.round()).abs() > 1e-12 || (twice.round() as i64) % 2 == 0 {
                    return Err(NcgError::InvalidParameter(format!("L must be a positive half-odd integer, got {l}")));
                }
                build_sphere(twice.round() as i32, *theta, *r, parse_complex(s)?, *alpha)
            }
        }
    }

    pub fn omega(&self, g: &Geometry) -> Result<Option<OneForm>> {
        let Some(o) = &self.omega else { return Ok(None) };
        let forms = o.standard as usize + o.base.is_some() as usize + o.pairs.is_some() as usize;
        if forms != 1 {
            return Err(NcgError::InvalidParameter("omega needs exactly one of standard, base, pairs".into()));
        }
        let is_torus = matches!(g.params, GeometryParams::Torus { .. });
        if o.standard {
            return if is_torus {
                let empty = vec![Expr(Vec::new()); g.generators.len() - 1];
                torus_connection(g, &empty).map(Some)
            } else {
                sphere_connection(g).map(Some)
            };
        }
        if let Some(base) = &o.base {
            if !is_torus || base.len() != g.generators.len() - 1 {
                return Err(NcgError::InvalidParameter(format!(
                    "omega.base needs one entry per base direction of a torus ({} expected)",
                    g.generators.len().saturating_sub(1)
                )));
            }
            let coeffs = base.iter().map(|t| terms_expr(g, t)).collect::<Result<Vec<_>>>()?;
            return torus_connection(g, &coeffs).map(Some);
        }
        let pres = o
            .pairs
            .as_ref()
            .unwrap()
            .iter()
            .map(|pq| Ok((terms_expr(g, &pq.p)?, terms_expr(g, &pq.q)?)))
            .collect::<Result<Vec<_>>>()?;
        OneForm::from_presentation(g, pres).map(Some)
    }

    /// Torus base coefficients as given, for the closed-form twist oracle.
    fn base_coefficients(&self, g: &Geometry) -> Result<Option<Vec<Expr>>> {
        match self.omega.as_ref().and_then(|o| o.base.as_ref()) {
            Some(base) => Ok(Some(base.iter().map(|t| terms_expr(g, t)).collect::<Result<Vec<_>>>()?)),
            None => Ok(None),
        }
    }
}

fn terms_expr(g: &Geometry, terms: &TermList) -> Result<Expr> {
    let mut e = Expr(Vec::new());
    for (coef, word) in terms {
        e.0.push((parse_complex(coef)?, g.parse_word(word)?));
    }
    Ok(e)
}

/// First 16 hex digits of SHA-256 over the sorted parameter JSON.
pub fn geometry_hash(g: &Geometry) -> String {
    let text = to_sorted_json_string(&g.params.to_json());
    let digest = Sha256::digest(text.as_bytes());
    digest.iter().take(8).map(|b| format!("{b:02x}")).collect()
}

fn exit_code_for(e: &NcgError) -> i32 {
    match e {
        NcgError::InvalidParameter(_) | NcgError::EmptyInterior { .. } => EXIT_CONFIG,
        NcgError::MissingPrerequisite(_) => EXIT_PREREQUISITE,
        _ => EXIT_FAIL,
    }
}

fn failure(e: NcgError) -> Outcome {
    Outcome::error(exit_code_for(&e), format!("error: {e}\n"))
}

/// Rebases every check that used the default tolerance onto `tol`.
pub fn apply_tolerance(rep: &mut VerificationReport, tol: f64) {
    for c in rep.checks.iter_mut().chain(rep.informational.iter_mut()) {
        if c.tol == DEFAULT_TOL {
            c.tol = tol;
            c.pass = c.residual <= tol;
        }
    }
}

fn projection_data(g: &Geometry) -> Result<ProjectionData> {
    let (gamma, coef) = standard_gamma(g)?;
    decompose(g, &gamma, coef)
}

fn require_omega(cfg: &RunConfig, g: &Geometry, suite: &str) -> Result<OneForm> {
    cfg.omega(g)?.ok_or_else(|| NcgError::MissingPrerequisite(format!("suite `{suite}` needs an [omega] section")))
}

fn descent_report(g: &Geometry, pd: &ProjectionData) -> Result<VerificationReport> {
    let mut rep = VerificationReport::new(g.params.name(), g.params.to_json());
    match &g.params {
        GeometryParams::Torus { n, theta, cutoff, convention } => {
            if g.is_even() {
                let split = split_even(g, pd)?;
                rep.merge(split.report.clone());
                rep.merge(split.plus.report.clone());
                rep.merge(split.minus.report.clone());
                if *n == 2 {
                    rep.merge(check_t2_descent(g, &split)?);
                } else {
                    let block: Vec<Vec<f64>> = theta[..3].iter().map(|r| r[..3].to_vec()).collect();
                    let g3 = build_torus_with(3, &block, *cutoff, *convention)?;
                    rep.merge(check_t4_descent(g, &split, &g3)?);
                }
            } else {
                let t = split_odd(g, pd, 0)?;
                rep.merge(t.report.clone());
                let g2 = build_torus_with(2, &theta2(theta[0][1]), *cutoff, *convention)?;
                rep.merge(check_t3_descent(g, &t, &g2)?);
            }
        }
        GeometryParams::Sphere { .. } => {
            let t = split_odd(g, pd, 0)?;
            rep.merge(t.report.clone());
            rep.merge(check_sphere_descent(g, pd, &t)?);
        }
    }
    Ok(rep)
}

fn run_suite(cfg: &RunConfig, g: &Geometry, name: &str) -> Result<VerificationReport> {
    let sphere = matches!(g.params, GeometryParams::Sphere { .. });
    match name {
        "triple" => verify_all(g),
        "real" => check_real_triple(g),
        "order_zero" => check_order_zero(g, 2),
        "first_order" => check_first_order(g, 2),
        "sphere" => {
            if !sphere {
                return Err(NcgError::MissingPrerequisite("suite `sphere` needs a sphere geometry".into()));
            }
            let mut rep = check_sphere_structure(g)?;
            rep.merge(check_invariant_algebra(g)?);
            Ok(rep)
        }
        "gamma" => Ok(projection_data(g)?.report),
        "projection" => {
            let pd = projection_data(g)?;
            let mut rep = pd.report.clone();
            rep.merge(check_projected_calculus(g, &pd)?);
            Ok(rep)
        }
        "descent" => descent_report(g, &projection_data(g)?),
        "connection" => {
            let w = require_omega(cfg, g, name)?;
            let family = if g.generators.len() > 3 { StrongnessFamily { base_len: 1, total_len: 2 } } else { StrongnessFamily::default() };
            let mut rep = check_strong_connection(g, &w, family)?;
            rep.merge(check_leibniz(g, &w)?);
            if sphere && cfg.omega.as_ref().is_some_and(|o| o.standard) {
                rep.merge(check_sphere_connection(g, &w)?);
            }
            Ok(rep)
        }
        "twist" => {
            let w = require_omega(cfg, g, name)?;
            let pd = projection_data(g)?;
            let tw = twisted_dirac(g, &pd, &w)?;
            let mut rep = tw.report.clone();
            // compatibility is a property of ω, not a pass/fail of the twist
            for c in check_compatibility(g, &pd, &tw)?.checks {
                rep.informational.push(c);
            }
            if let Some(coeffs) = cfg.base_coefficients(g)? {
                let oracle = torus_twist_oracle(g, &pd, &tw.j0, &coeffs)?;
                let s = g.interior(w.margin() + 1)?;
                rep.check_result(
                    "D_omega = D_h - sum gamma^j j0 omega_j j0^-1 delta_n",
                    crate::operator::residual_on_interior(&tw.d_omega.sub(&oracle)?, &s),
                    DEFAULT_TOL,
                    w.margin() + 1,
                );
            }
            Ok(rep)
        }
        "family" => {
            let w = require_omega(cfg, g, name)?;
            let pd = projection_data(g)?;
            Ok(compatible_dirac_family(g, &pd, &w)?.1)
        }
        "symmetry" => {
            if sphere {
                return Err(NcgError::MissingPrerequisite("suite `symmetry` needs a torus".into()));
            }
            let w = require_omega(cfg, g, name)?;
            let pd = projection_data(g)?;
            check_spectral_symmetry(g, &twisted_dirac(g, &pd, &w)?)
        }
        other => Err(NcgError::InvalidParameter(format!("unknown suite `{other}`"))),
    }
}

fn load(text: &str, o: &Overrides) -> std::result::Result<(RunConfig, Geometry), Outcome> {
    let mut cfg = parse_config(text).map_err(failure)?;
    cfg.apply(o);
    let g = cfg.build().map_err(failure)?;
    Ok((cfg, g))
}

/// Runs the requested suites; exit 0 iff every gated check passes.
pub fn cmd_verify(text: &str, o: &Overrides) -> Outcome {
    let (cfg, g) = match load(text, o) {
        Ok(x) => x,
        Err(out) => return out,
    };
    let suites = match cfg.suites() {
        Ok(s) => s,
        Err(e) => return failure(e),
    };
    let mut sections = serde_json::Map::new();
    let mut pass = true;
    for name in &suites {
        let mut rep = match run_suite(&cfg, &g, name) {
            Ok(r) => r,
            Err(e) => return failure(e),
        };
        if let Some(t) = cfg.tolerances.identity {
            apply_tolerance(&mut rep, t);
        }
        pass &= rep.pass();
        sections.insert(name.clone(), rep.to_json());
    }
    let doc = json!({
        "geometry": g.params.name(),
        "params": g.params.to_json(),
        "geometry_hash": geometry_hash(&g),
        "seed": cfg.seed(),
        "suites": Value::Object(sections),
        "pass": pass,
    });
    Outcome { code: if pass { EXIT_PASS } else { EXIT_FAIL }, output: to_sorted_json_string(&doc), path: cfg.output.report.clone() }
}

/// Multi-start Γ search; exit 0 iff at least one solution and no ambiguity.
pub fn cmd_gamma_search(text: &str, o: &Overrides) -> Outcome {
    let (cfg, g) = match load(text, o) {
        Ok(x) => x,
        Err(out) => return out,
    };
    let mut opts = SearchOptions { seed: cfg.seed(), ..Default::default() };
    if let Some(n) = cfg.search.starts {
        opts.starts = n;
    }
    if let Some(t) = cfg.tolerances.identity {
        opts.accept_tol = t.max(opts.accept_tol);
    }
    let res = match search_gamma(&g, opts) {
        Ok(r) => r,
        Err(e) => return failure(e),
    };
    let sols: Vec<Value> = res
        .solutions
        .iter()
        .map(|s| {
            let mut m = BTreeMap::new();
            m.insert("coefficient", json!(s.coefficient));
            m.insert("fiber_length", json!(s.fiber_length));
            m.insert("residual", json!(s.residual));
            m.insert("hits", json!(s.hits));
            if let Some(sp) = &s.spinor {
                let rows: Vec<Vec<String>> =
                    (0..sp.nrows()).map(|i| (0..sp.ncols()).map(|j| format_complex(round_entry(sp[(i, j)]))).collect()).collect();
                m.insert("matrix", json!(rows));
            }
            if let Some((p, q)) = s.sign_coefficients {
                m.insert("sign_coefficients", json!([format_complex(round_entry(p)), format_complex(round_entry(q))]));
            }
            json!(m)
        })
        .collect();
    let ok = !res.solutions.is_empty() && !res.ambiguous;
    let doc = json!({
        "geometry": g.params.name(),
        "params": g.params.to_json(),
        "geometry_hash": geometry_hash(&g),
        "seed": opts.seed,
        "starts": res.starts,
        "converged": res.converged,
        "ambiguous": res.ambiguous,
        "solutions": sols,
        "pass": ok,
    });
    Outcome { code: if ok { EXIT_PASS } else { EXIT_FAIL }, output: to_sorted_json_string(&doc), path: cfg.output.report.clone() }
}

/// Rounds to 12 decimals so that solver noise does not leak into the printed matrix.
fn round_entry(z: crate::operator::C64) -> crate::operator::C64 {
    let r = |x: f64| {
        let y = (x * 1e12).round() / 1e12;
        if y == 0.0 {
            0.0
        } else {
            y
        }
    };
    crate::operator::c(r(z.re), r(z.im))
}

pub fn select_operator(cfg: &RunConfig, g: &Geometry, name: &str) -> Result<SparseOperator> {
    match name {
        "D" => Ok(g.dirac.clone()),
        "D_h" => Ok(projection_data(g)?.d_h),
        "D_v" => Ok(projection_data(g)?.d_v),
        "D_omega" | "script_D_omega" => {
            let w = cfg
                .omega(g)?
                .ok_or_else(|| NcgError::MissingPrerequisite(format!("operator `{name}` needs an [omega] section")))?;
            let tw = twisted_dirac(g, &projection_data(g)?, &w)?;
            Ok(if name == "D_omega" { tw.d_omega } else { tw.script_d_omega })
        }
        "D0_plus" | "D0_minus" => {
            let pd = projection_data(g)?;
            if g.is_even() {
                let split = split_even(g, &pd)?;
                Ok(if name == "D0_plus" { split.plus.dirac } else { split.minus.dirac })
            } else if name == "D0_plus" {
                Ok(split_odd(g, &pd, 0)?.dirac)
            } else {
                Err(NcgError::MissingPrerequisite("D0_minus exists only for even parents".into()))
            }
        }
        other => Err(NcgError::InvalidParameter(format!("unknown operator `{other}` (known: {})", OPERATORS.join(", ")))),
    }
}

/// Sorted eigenvalues of the selected operator, multiplicities merged at 1e-9.
pub fn cmd_spectrum(text: &str, o: &Overrides) -> Outcome {
    let (cfg, g) = match load(text, o) {
        Ok(x) => x,
        Err(out) => return out,
    };
    let Some(name) = cfg.spectrum.operator.clone() else {
        return Outcome::error(EXIT_CONFIG, "error: no operator selected ([spectrum] operator or --operator)\n");
    };
    let op = match select_operator(&cfg, &g, &name) {
        Ok(x) => x,
        Err(e) => return failure(e),
    };
    let sym = match op.add(&op.adjoint()) {
        Ok(x) => x.scale_re(0.5),
        Err(e) => return failure(e),
    };
    let ev = match hermitian_eigenvalues(&sym) {
        Ok(v) => v,
        Err(e) => return failure(e),
    };
    let hash = geometry_hash(&g);
    let mut w = csv::Writer::from_writer(Vec::new());
    w.write_record(["eigenvalue", "multiplicity", "operator", "geometry_hash"]).expect("in-memory csv");
    for (v, m) in merge_multiplicities(&ev, 1e-9) {
        let v = if v == 0.0 { 0.0 } else { v };
        w.write_record([format!("{v:.16e}"), m.to_string(), name.clone(), hash.clone()]).expect("in-memory csv");
    }
    let bytes = w.into_inner().expect("in-memory csv");
    Outcome { code: EXIT_PASS, output: String::from_utf8(bytes).expect("utf8 csv"), path: cfg.output.spectrum.clone() }
}

#[cfg(test)]
mod tests {
    use super::*;

    const T2: &str = r#"
suite = ["triple"]
[geometry]
type = "torus"
n = 2
theta = [[0.0, 0.4142], [-0.4142, 0.0]]
K = 6
"#;

    #[test]
    fn unknown_keys_are_rejected() {
        let bad = T2.replace("K = 6", "K = 6\nfoo = 1");
        assert!(parse_config(&bad).is_err());
        assert_eq!(cmd_verify(&bad, &Overrides::default()).code, EXIT_CONFIG);
    }

    #[test]
    fn small_cutoff_is_a_config_error() {
        let out = cmd_verify(&T2.replace("K = 6", "K = 1"), &Overrides::default());
        assert_eq!(out.code, EXIT_CONFIG);
        assert!(out.output.contains("cutoff below minimum"), "{}", out.output);
    }

    #[test]
    fn overrides_replace_config_values() {
        let mut cfg = parse_config(T2).unwrap();
        cfg.apply(&Overrides { cutoff: Some(4), seed: Some(3), suite: Some(vec!["real".into()]), ..Default::default() });
        assert!(matches!(cfg.geometry, GeometryConfig::Torus { k: 4, .. }));
        assert_eq!(cfg.seed(), 3);
        assert_eq!(cfg.suites().unwrap(), vec!["real".to_string()]);
    }

    #[test]
    fn verify_is_deterministic() {
        let a = cmd_verify(T2, &Overrides::default());
        let b = cmd_verify(T2, &Overrides::default());
        assert_eq!(a.code, EXIT_PASS, "{}", a.output);
        assert_eq!(a, b);
    }

    #[test]
    fn missing_omega_is_a_prerequisite_error() {
        let o = Overrides { operator: Some("D_omega".into()), ..Default::default() };
        assert_eq!(cmd_spectrum(T2, &o).code, EXIT_PREREQUISITE);
    }
}
