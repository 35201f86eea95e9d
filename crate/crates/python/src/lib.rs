//! Python bindings for `rotsurf`.
//!
//! Input errors raise `ValueError`; numerical degeneracies raise
//! `ArithmeticError`. Report functions return the same JSON text as the CLI.

use pyo3::exceptions::{PyArithmeticError, PyValueError};
use pyo3::prelude::*;

use rotsurf::commands::{
    build_surface, cmd_analyze, cmd_classify, cmd_group_check, cmd_laplacian, AnalysisConfig,
    GroupCheckConfig, SourceChoice,
};
use rotsurf::numeric::{gauss_map_at, LAPLACIAN_STEP};
use rotsurf::report::Envelope;
use rotsurf::{
    flat_family, laplacian_numeric, parse_bicomplex, parse_interval, Conjugation, Error,
    RotationSurface,
};

fn py_err(e: Error) -> PyErr {
    if e.is_input_error() {
        PyValueError::new_err(e.to_string())
    } else {
        PyArithmeticError::new_err(e.to_string())
    }
}

trait IntoPy<T> {
    fn py(self) -> PyResult<T>;
}

impl<T> IntoPy<T> for rotsurf::Result<T> {
    fn py(self) -> PyResult<T> {
        self.map_err(py_err)
    }
}

/// A bicomplex number `x1 + x2 i + x3 j + x4 ij`.
#[pyclass(frozen, from_py_object, name = "Bicomplex")]
#[derive(Clone, Copy)]
struct PyBicomplex(rotsurf::Bicomplex);

#[pymethods]
impl PyBicomplex {
    #[new]
    #[pyo3(signature = (x1=0.0, x2=0.0, x3=0.0, x4=0.0))]
    fn new(x1: f64, x2: f64, x3: f64, x4: f64) -> Self {
        Self(rotsurf::Bicomplex::new(x1, x2, x3, x4))
    }

    /// Parses a literal such as `"1+2i-3j+0.5ij"`.
    #[staticmethod]
    fn parse(text: &str) -> PyResult<Self> {
        parse_bicomplex(text).map(Self).map_err(|e| py_err(e.into()))
    }

    fn components(&self) -> [f64; 4] {
        self.0.to_array()
    }

    fn inverse(&self) -> PyResult<Self> {
        self.0.inverse().map(Self).py()
    }

    /// `which` is `"t1"`, `"t2"` or `"t3"`.
    fn conjugate(&self, which: &str) -> PyResult<Self> {
        let c: Conjugation = which.parse().py()?;
        Ok(Self(self.0.conjugate(c)))
    }

    /// The 4x4 real matrix image as a list of rows.
    fn matrix(&self) -> Vec<Vec<f64>> {
        let m = self.0.to_matrix();
        (0..4).map(|i| (0..4).map(|j| m[(i, j)]).collect()).collect()
    }

    fn hyperquadric_residual(&self) -> f64 {
        self.0.hyperquadric_residual()
    }

    fn __mul__(&self, other: &Self) -> Self {
        Self(self.0 * other.0)
    }

    fn __add__(&self, other: &Self) -> Self {
        Self(self.0 + other.0)
    }

    fn __sub__(&self, other: &Self) -> Self {
        Self(self.0 - other.0)
    }

    fn __neg__(&self) -> Self {
        Self(-self.0)
    }

    fn __eq__(&self, other: &Self) -> bool {
        self.0 == other.0
    }

    fn __str__(&self) -> String {
        self.0.to_string()
    }

    fn __repr__(&self) -> String {
        format!("Bicomplex('{}')", self.0)
    }
}

/// A rotation surface `(x cos t, x sin t, y cos t, y sin t)`.
#[pyclass(frozen, name = "Surface")]
struct PySurface(RotationSurface);

#[pymethods]
impl PySurface {
    /// Builds the surface from a profile spec; non-unit-speed meridians are
    /// reparametrized by arclength.
    #[new]
    #[pyo3(signature = (profile, s_range=None))]
    fn new(profile: &str, s_range: Option<&str>) -> PyResult<Self> {
        let mut cfg = AnalysisConfig::new(profile);
        cfg.s_range = s_range.map(parse_interval).transpose().py()?;
        build_surface(&cfg).map(|(s, _)| Self(s)).py()
    }

    #[staticmethod]
    #[pyo3(signature = (lam=1.0, b0=1.0, d=0.0))]
    fn flat(lam: f64, b0: f64, d: f64) -> PyResult<Self> {
        flat_family(lam, b0, d).map(Self).py()
    }

    #[staticmethod]
    fn clifford() -> Self {
        Self(rotsurf::clifford_torus())
    }

    fn label(&self) -> String {
        self.0.profile().label().to_string()
    }

    fn s_range(&self) -> (f64, f64) {
        let r = self.0.s_range();
        (r.lo, r.hi)
    }

    fn embed(&self, s: f64, t: f64) -> PyResult<[f64; 4]> {
        self.0.embed(s, t).map(|v| v.0).py()
    }

    /// `{"a", "b", "c", "da", "db", "dc"}` at `s`.
    fn invariants(&self, s: f64) -> PyResult<std::collections::BTreeMap<&'static str, f64>> {
        let i = self.0.invariants(s).py()?;
        Ok([("a", i.a), ("b", i.b), ("c", i.c), ("da", i.da), ("db", i.db), ("dc", i.dc)]
            .into_iter()
            .collect())
    }

    fn gaussian_curvature(&self, s: f64) -> PyResult<f64> {
        self.0.gaussian_curvature(s).py()
    }

    /// Orthonormal frame `(e1, e2, e3, e4)` as four 4-vectors.
    fn frame(&self, s: f64, t: f64) -> PyResult<Vec<[f64; 4]>> {
        let f = self.0.closed_frame(s, t).py()?;
        Ok((0..4).map(|k| f.e(k).0).collect())
    }

    /// Gauss map as Pluecker coordinates `(12, 13, 14, 23, 24, 34)`.
    #[pyo3(signature = (s, t, h=LAPLACIAN_STEP))]
    fn gauss_map(&self, s: f64, t: f64, h: f64) -> PyResult<[f64; 6]> {
        gauss_map_at(&self.0, s, t, h).map(|g| g.0).py()
    }

    /// Closed-form `ΔG` in the fixed basis.
    fn laplacian_closed(&self, s: f64, t: f64) -> PyResult<[f64; 6]> {
        self.0.laplacian_gauss_closed_fixed(s, t).map(|g| g.0).py()
    }

    /// Finite-difference Laplace-Beltrami of the Gauss map.
    #[pyo3(signature = (s, t, h=LAPLACIAN_STEP))]
    fn laplacian_numeric(&self, s: f64, t: f64, h: f64) -> PyResult<[f64; 6]> {
        laplacian_numeric(&self.0, s, t, h).map(|g| g.0).py()
    }

    fn __repr__(&self) -> String {
        format!("Surface('{}')", self.label())
    }
}

fn sweep_config(profile: &str, grid: (usize, usize), source: &str) -> PyResult<AnalysisConfig> {
    let mut cfg = AnalysisConfig::new(profile);
    cfg.grid = grid;
    cfg.source = match source {
        "numeric" => SourceChoice::Numeric,
        "closed" => SourceChoice::Closed,
        other => return Err(PyValueError::new_err(format!("unknown source `{other}`"))),
    };
    Ok(cfg)
}

/// The `analyze` report as JSON text.
#[pyfunction]
#[pyo3(signature = (profile, grid=(16, 16)))]
fn analyze(profile: &str, grid: (usize, usize)) -> PyResult<String> {
    let cfg = sweep_config(profile, grid, "numeric")?;
    Envelope::new("analyze", cmd_analyze(&cfg).py()?).to_json().py()
}

/// The `classify` report as JSON text.
#[pyfunction]
#[pyo3(signature = (profile, grid=(16, 16), source="numeric"))]
fn classify(profile: &str, grid: (usize, usize), source: &str) -> PyResult<String> {
    let cfg = sweep_config(profile, grid, source)?;
    Envelope::new("classify", cmd_classify(&cfg).py()?).to_json().py()
}

/// The `laplacian` report as JSON text.
#[pyfunction]
#[pyo3(signature = (profile, grid=(16, 16)))]
fn laplacian(profile: &str, grid: (usize, usize)) -> PyResult<String> {
    let cfg = sweep_config(profile, grid, "numeric")?;
    Envelope::new("laplacian", cmd_laplacian(&cfg).py()?).to_json().py()
}

/// The `group-check` report as JSON text.
#[pyfunction]
#[pyo3(signature = (surface, grid=(5, 5)))]
fn group_check(surface: &str, grid: (usize, usize)) -> PyResult<String> {
    let mut cfg = GroupCheckConfig::new(surface);
    cfg.grid = grid;
    Envelope::new("group-check", cmd_group_check(&cfg).py()?).to_json().py()
}

#[pymodule]
fn rotsurf_py(m: &Bound<'_, PyModule>) -> PyResult<()> {
    m.add_class::<PyBicomplex>()?;
    m.add_class::<PySurface>()?;
    m.add_function(wrap_pyfunction!(analyze, m)?)?;
    m.add_function(wrap_pyfunction!(classify, m)?)?;
    m.add_function(wrap_pyfunction!(laplacian, m)?)?;
    m.add_function(wrap_pyfunction!(group_check, m)?)?;
    m.add("SCHEMA_VERSION", rotsurf::report::SCHEMA_VERSION)?;
    Ok(())
}
