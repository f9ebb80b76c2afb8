//! Python module `ncg`: geometries, verification suites, Γ search and spectra.

use pyo3::exceptions::{PyRuntimeError, PyValueError};
use pyo3::prelude::*;

use ncg_core::cli::{self, Overrides};
use ncg_core::geometry::{format_complex, parse_complex};
use ncg_core::operator::{hermitian_eigenvalues, merge_multiplicities};
use ncg_core::projection::{search_gamma, SearchOptions};
use ncg_core::report::to_sorted_json_string;
use ncg_core::sphere::build_sphere;
use ncg_core::torus::build_torus;
use ncg_core::verify::{check_first_order, check_order_zero, check_real_triple, verify_all};
use ncg_core::NcgError;

fn to_py(e: NcgError) -> PyErr {
    match e {
        NcgError::InvalidParameter(m) => PyValueError::new_err(m),
        other => PyRuntimeError::new_err(other.to_string()),
    }
}

#[pyclass(name = "Geometry", module = "ncg")]
struct PyGeometry {
    inner: ncg_core::Geometry,
}

#[pymethods]
impl PyGeometry {
    /// Noncommutative n-torus with cutoff K and antisymmetric θ.
    #[staticmethod]
    fn torus(n: usize, theta: Vec<Vec<f64>>, k: i32) -> PyResult<Self> {
        Ok(Self { inner: build_torus(n, &theta, k).map_err(to_py)? })
    }

    /// θ-deformed 3-sphere with cutoff L (a positive half-odd integer); `s` is a complex string "re+imj".
    #[staticmethod]
    fn sphere(l: f64, theta: f64, r: f64, s: &str, alpha: f64) -> PyResult<Self> {
        let twice = (2.0 * l).round() as i32;
        if (2.0 * l - twice as f64).abs() > 1e-12 {
            return Err(PyValueError::new_err(format!("L must be a half-integer, got {l}")));
        }
        let s = parse_complex(s).map_err(to_py)?;
        Ok(Self { inner: build_sphere(twice, theta, r, s, alpha).map_err(to_py)? })
    }

    #[getter]
    fn name(&self) -> String {
        self.inner.params.name()
    }

    #[getter]
    fn dim(&self) -> usize {
        self.inner.dim()
    }

    #[getter]
    fn kr_dim(&self) -> u8 {
        self.inner.kr_dim
    }

    #[getter]
    fn generators(&self) -> Vec<String> {
        self.inner.generators.iter().map(|g| g.name.clone()).collect()
    }

    /// JSON report of the named suite: "triple", "real", "order_zero" or "first_order".
    #[pyo3(signature = (suite = "triple"))]
    fn verify(&self, suite: &str) -> PyResult<String> {
        let g = &self.inner;
        let rep = match suite {
            "triple" => verify_all(g),
            "real" => check_real_triple(g),
            "order_zero" => check_order_zero(g, 2),
            "first_order" => check_first_order(g, 2),
            other => return Err(PyValueError::new_err(format!("unknown suite `{other}`"))),
        }
        .map_err(to_py)?;
        Ok(to_sorted_json_string(&rep.to_json()))
    }

    /// Signed vertical coefficients and residuals of the Γ solutions found.
    #[pyo3(signature = (starts = 64, seed = 0x5eed))]
    fn gamma_search(&self, starts: usize, seed: u64) -> PyResult<Vec<(f64, f64)>> {
        let res = search_gamma(&self.inner, SearchOptions { starts, seed, ..Default::default() }).map_err(to_py)?;
        Ok(res.solutions.iter().map(|s| (s.coefficient, s.residual)).collect())
    }

    /// (eigenvalue, multiplicity) pairs of D, merged at 1e-9.
    fn dirac_spectrum(&self) -> PyResult<Vec<(f64, usize)>> {
        let ev = hermitian_eigenvalues(&self.inner.dirac).map_err(to_py)?;
        Ok(merge_multiplicities(&ev, 1e-9))
    }

    fn __repr__(&self) -> String {
        format!("Geometry({}, dim={}, params={})", self.inner.params.name(), self.inner.dim(), self.inner.params.to_json())
    }
}

/// Runs a CLI command ("verify", "gamma-search" or "spectrum") on a TOML config string.
/// Returns (exit code, output text).
#[pyfunction]
#[pyo3(signature = (command, config, suite = None, seed = None, tol = None, cutoff = None, operator = None))]
fn run(
    command: &str,
    config: &str,
    suite: Option<Vec<String>>,
    seed: Option<u64>,
    tol: Option<f64>,
    cutoff: Option<i32>,
    operator: Option<String>,
) -> PyResult<(i32, String)> {
    let o = Overrides { suite, seed, tol, cutoff, operator };
    let out = match command {
        "verify" => cli::cmd_verify(config, &o),
        "gamma-search" => cli::cmd_gamma_search(config, &o),
        "spectrum" => cli::cmd_spectrum(config, &o),
        other => return Err(PyValueError::new_err(format!("unknown command `{other}`"))),
    };
    Ok((out.code, out.output))
}

/// (ε, ε′, ε″ or None) for KR dimension j mod 8.
#[pyfunction]
fn kr_signs(j: u8) -> PyResult<(i8, i8, Option<i8>)> {
    let row = ncg_core::kr::lookup(j).map_err(to_py)?;
    Ok((row.eps, row.eps_prime, row.eps_double_prime))
}

/// Round trip of the "re+imj" notation used in configs.
#[pyfunction]
fn normalize_complex(s: &str) -> PyResult<String> {
    Ok(format_complex(parse_complex(s).map_err(to_py)?))
}

#[pymodule]
fn ncg(m: &Bound<'_, PyModule>) -> PyResult<()> {
    m.add_class::<PyGeometry>()?;
    m.add_function(wrap_pyfunction!(run, m)?)?;
    m.add_function(wrap_pyfunction!(kr_signs, m)?)?;
    m.add_function(wrap_pyfunction!(normalize_complex, m)?)?;
    Ok(())
}
