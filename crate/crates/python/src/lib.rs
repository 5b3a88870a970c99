//! Python bindings: surfaces, singular-point scans, classification,
//! meshes and the verification suites.

use pyo3::exceptions::PyValueError;
use pyo3::prelude::*;

use transurf::app::{self, CurveInput, OutputFormat, RunConfig, SurfaceInput};
use transurf::classify::{self, ClassificationReport};
use transurf::report::to_json;
use transurf::surface::{find_singular_points, ScanOptions, SelfSign, TranslationSurface};
use transurf::tolerances::Tolerances;
use transurf::verify;

fn err(e: transurf::Error) -> PyErr {
    PyValueError::new_err(e.to_string())
}

fn tolerances(overrides: Option<Vec<String>>) -> PyResult<Tolerances> {
    let mut t = Tolerances::default();
    for o in overrides.unwrap_or_default() {
        t.apply(&o).map_err(err)?;
    }
    Ok(t)
}

/// A translation surface with the run configuration that built it.
#[pyclass(name = "Surface", module = "transurf_py")]
struct PySurface {
    config: RunConfig,
    surface: TranslationSurface,
}

impl PySurface {
    fn build(surface: SurfaceInput, window: Option<[f64; 4]>, grid: usize, tol: Option<Vec<String>>) -> PyResult<Self> {
        let mut config = RunConfig::new(surface);
        config.window = window;
        config.grid = grid;
        config.tolerances = tolerances(tol)?;
        let surface = config.surface().map_err(err)?;
        Ok(PySurface { config, surface })
    }
}

#[pymethods]
impl PySurface {
    /// Catalog pair `s0`, `s1p` or `s1m`.
    #[staticmethod]
    #[pyo3(signature = (name, window=None, grid=48, tol=None))]
    fn pair(name: String, window: Option<[f64; 4]>, grid: usize, tol: Option<Vec<String>>) -> PyResult<Self> {
        Self::build(SurfaceInput::Named { name }, window, grid, tol)
    }

    /// `γ(u) + γ̃(v)`; curves are expressions or `@name`, frames `frenet` or `ν1; ν2`.
    #[staticmethod]
    #[pyo3(signature = (curve_a, curve_b, frame_a=None, frame_b=None, window=None, grid=48, tol=None))]
    #[allow(clippy::too_many_arguments)]
    fn from_curves(
        curve_a: String,
        curve_b: String,
        frame_a: Option<String>,
        frame_b: Option<String>,
        window: Option<[f64; 4]>,
        grid: usize,
        tol: Option<Vec<String>>,
    ) -> PyResult<Self> {
        let s = SurfaceInput::Pair { a: CurveInput::new(curve_a, frame_a), b: CurveInput::new(curve_b, frame_b) };
        Self::build(s, window, grid, tol)
    }

    /// `(γ(u) ± γ(v)) / 2` with `sign` `plus` or `minus`.
    #[staticmethod]
    #[pyo3(signature = (curve, sign, frame=None, window=None, grid=48, tol=None))]
    fn self_translation(
        curve: String,
        sign: String,
        frame: Option<String>,
        window: Option<[f64; 4]>,
        grid: usize,
        tol: Option<Vec<String>>,
    ) -> PyResult<Self> {
        let sign: SelfSign = sign.parse().map_err(err)?;
        Self::build(SurfaceInput::SelfTranslation { curve: CurveInput::new(curve, frame), sign }, window, grid, tol)
    }

    fn point(&self, u: f64, v: f64) -> PyResult<[f64; 3]> {
        self.surface.point(u, v).map_err(err)
    }

    /// Frame matrix `T(u, v)` as rows.
    fn frame_matrix(&self, u: f64, v: f64) -> PyResult<[[f64; 3]; 3]> {
        let l = self.surface.local(u, v).map_err(err)?;
        Ok(std::array::from_fn(|i| std::array::from_fn(|j| l.t(i + 1, j + 1))))
    }

    /// `(u, v, isolated)` for every singular point in the window.
    fn singular_points(&self) -> PyResult<Vec<(f64, f64, bool)>> {
        let mut opts = ScanOptions::new(self.config.window_for(&self.surface), self.config.grid);
        opts.sing_tol = self.config.tolerances.sing;
        opts.dep_tol = self.config.tolerances.dep;
        let pts = find_singular_points(&self.surface, &opts).map_err(err)?;
        Ok(pts.iter().map(|p| (p.u, p.v, p.isolated)).collect())
    }

    fn classify(&self, u: f64, v: f64) -> PyResult<PyClassification> {
        let r = classify::classify(&self.surface, u, v, &self.config.tolerances).map_err(err)?;
        Ok(PyClassification { report: r })
    }

    /// Full scan report as JSON text.
    fn scan_report(&self) -> PyResult<String> {
        let (doc, _) = app::scan(&self.config).map_err(err)?;
        to_json(&doc).map_err(err)
    }

    #[pyo3(signature = (format="obj"))]
    fn mesh(&self, format: &str) -> PyResult<String> {
        let mut cfg = self.config.clone();
        cfg.format = format.parse::<OutputFormat>().map_err(err)?;
        app::mesh(&cfg).map_err(err)
    }
}

/// Classification of one point.
#[pyclass(name = "Classification", module = "transurf_py")]
struct PyClassification {
    report: ClassificationReport,
}

#[pymethods]
impl PyClassification {
    #[getter]
    fn verdict(&self) -> String {
        format!("{:?}", self.report.verdict)
    }

    #[getter]
    fn rank(&self) -> usize {
        self.report.rank
    }

    #[getter]
    fn dependence(&self) -> f64 {
        self.report.dependence
    }

    #[getter]
    fn case(&self) -> Option<String> {
        self.report.case.map(|c| format!("{c:?}"))
    }

    #[getter]
    fn notes(&self) -> Vec<String> {
        self.report.notes.clone()
    }

    /// `(route, verdict)` for every route that ran.
    #[getter]
    fn routes(&self) -> Vec<(String, String)> {
        self.report.routes.iter().map(|r| (format!("{:?}", r.route), format!("{:?}", r.tag))).collect()
    }

    /// Value of a named check from any route.
    fn value(&self, name: &str) -> Option<f64> {
        self.report.routes.iter().find_map(|r| r.value(name))
    }

    fn to_json(&self) -> PyResult<String> {
        to_json(&self.report).map_err(err)
    }

    fn __repr__(&self) -> String {
        format!("Classification({:?} at ({}, {}))", self.report.verdict, self.report.u, self.report.v)
    }
}

/// Runs a verification suite; returns `(all_passed, summary_text)`.
#[pyfunction]
#[pyo3(signature = (suite="all", tol=None))]
fn run_verify(suite: &str, tol: Option<Vec<String>>) -> PyResult<(bool, String)> {
    let suites = verify::Suite::parse_list(suite).map_err(err)?;
    let checks = verify::run_suites(&suites, &tolerances(tol)?).map_err(err)?;
    Ok((checks.iter().all(|c| c.pass), verify::summary_text(&checks)))
}

#[pymodule]
fn transurf_py(m: &Bound<'_, PyModule>) -> PyResult<()> {
    m.add_class::<PySurface>()?;
    m.add_class::<PyClassification>()?;
    m.add_function(wrap_pyfunction!(run_verify, m)?)?;
    Ok(())
}
