//! Python bindings for the `gbell` toolkit.

use gbell::optimize::{self, Axis, ScanGrid};
use gbell::quantum::{self, SimConfig, SimPath};
use gbell::{ghz, lhv, Complex64, CorrelationTensor, CorrelationValues, MeasurementSettings};
use pyo3::exceptions::{PyRuntimeError, PyValueError};
use pyo3::prelude::*;
use pyo3::types::PyDict;

fn to_py(e: gbell::Error) -> PyErr {
    if e.is_validation() {
        PyValueError::new_err(e.to_string())
    } else {
        PyRuntimeError::new_err(e.to_string())
    }
}

fn settings(phases: Vec<[f64; 2]>) -> PyResult<MeasurementSettings> {
    MeasurementSettings::new(phases).map_err(to_py)
}

/// State `alpha|0...0> + beta|1...1>` on `n` qubits.
#[pyclass(name = "GhzParams", frozen)]
struct PyGhzParams {
    inner: gbell::GhzParams,
}

#[pymethods]
impl PyGhzParams {
    #[new]
    #[pyo3(signature = (n, alpha, beta, normalize = false))]
    fn new(n: usize, alpha: Complex64, beta: Complex64, normalize: bool) -> PyResult<Self> {
        let inner = if normalize {
            gbell::GhzParams::normalized(n, alpha, beta)
        } else {
            gbell::GhzParams::new(n, alpha, beta)
        };
        Ok(Self {
            inner: inner.map_err(to_py)?,
        })
    }

    /// `alpha = beta = 1/sqrt(2)`.
    #[staticmethod]
    fn balanced(n: usize) -> PyResult<Self> {
        Ok(Self {
            inner: gbell::GhzParams::balanced(n).map_err(to_py)?,
        })
    }

    /// `cos(xi)|0...0> + sin(xi)|1...1>`.
    #[staticmethod]
    fn from_angle(n: usize, xi: f64) -> PyResult<Self> {
        Ok(Self {
            inner: gbell::GhzParams::from_angle(n, xi).map_err(to_py)?,
        })
    }

    #[getter]
    fn n(&self) -> usize {
        self.inner.n()
    }

    #[getter]
    fn alpha(&self) -> Complex64 {
        self.inner.alpha()
    }

    #[getter]
    fn beta(&self) -> Complex64 {
        self.inner.beta()
    }

    #[getter]
    fn abs_overlap(&self) -> f64 {
        self.inner.abs_overlap()
    }

    /// `-arg(alpha * conj(beta))`.
    #[getter]
    fn phase(&self) -> f64 {
        self.inner.phase()
    }

    fn statevector(&self) -> PyResult<Vec<Complex64>> {
        Ok(self
            .inner
            .statevector()
            .map_err(to_py)?
            .amplitudes()
            .to_vec())
    }

    fn __repr__(&self) -> String {
        format!(
            "GhzParams(n={}, alpha={}, beta={})",
            self.inner.n(),
            self.inner.alpha(),
            self.inner.beta()
        )
    }
}

/// Closed-form quantum prediction for per-site phase pairs.
#[pyfunction]
fn prediction_closed_form(params: &PyGhzParams, phases: Vec<[f64; 2]>) -> PyResult<f64> {
    ghz::prediction_closed_form(&params.inner, &settings(phases)?).map_err(to_py)
}

/// Statevector correlations, sign transform, then the absolute sum.
#[pyfunction]
fn transform_path_prediction(params: &PyGhzParams, phases: Vec<[f64; 2]>) -> PyResult<f64> {
    let state = params.inner.statevector().map_err(to_py)?;
    let config = SimConfig {
        path: SimPath::General,
        ..Default::default()
    };
    gbell::transform_path_prediction(&state, &settings(phases)?, &config).map_err(to_py)
}

/// All `2^n` correlation values `E(k)` from the statevector.
#[pyfunction]
fn correlation_values(params: &PyGhzParams, phases: Vec<[f64; 2]>) -> PyResult<Vec<f64>> {
    let state = params.inner.statevector().map_err(to_py)?;
    Ok(quantum::correlation_values_all(&state, &settings(phases)?)
        .map_err(to_py)?
        .into_inner())
}

#[pyfunction]
fn max_prediction(params: &PyGhzParams) -> f64 {
    ghz::max_prediction(&params.inner)
}

#[pyfunction]
fn optimal_settings(params: &PyGhzParams) -> PyResult<Vec<[f64; 2]>> {
    Ok(ghz::optimal_settings(&params.inner)
        .map_err(to_py)?
        .phases()
        .to_vec())
}

/// Sites `1..l` use `(0, theta1)`, the others `(theta2, -theta2)`.
#[pyfunction]
fn two_angle_prediction(params: &PyGhzParams, l: usize, theta1: f64, theta2: f64) -> PyResult<f64> {
    let cfg = gbell::TwoAngleConfig::new(params.inner.n(), l, theta1, theta2).map_err(to_py)?;
    ghz::two_angle_prediction(&params.inner, &cfg).map_err(to_py)
}

#[pyfunction]
fn violates(params: &PyGhzParams) -> bool {
    ghz::violates(&params.inner)
}

#[pyfunction]
fn violates_angle(n: usize, xi: f64) -> bool {
    ghz::violates_angle(n, xi)
}

#[pyfunction]
fn violation_threshold(n: usize) -> f64 {
    ghz::violation_threshold(n)
}

#[pyfunction]
fn angle_threshold(n: usize) -> f64 {
    ghz::angle_threshold(n)
}

/// `c_j = 2^-n sum_k (-1)^(k.j) E(k)`.
#[pyfunction]
fn coefficients_from_values(values: Vec<f64>) -> PyResult<Vec<f64>> {
    let values = CorrelationValues::new(values).map_err(to_py)?;
    Ok(gbell::coefficients_from_values(&values).into_inner())
}

#[pyfunction]
fn sum_abs(coeffs: Vec<f64>) -> PyResult<f64> {
    Ok(CorrelationTensor::new(coeffs).map_err(to_py)?.sum_abs())
}

/// Exhaustive check of `sum |c| = 1` over all `4^n` deterministic strategies.
#[pyfunction]
fn certify_bound<'py>(py: Python<'py>, n: usize) -> PyResult<Bound<'py, PyDict>> {
    let report = lhv::certify_bound(n).map_err(to_py)?;
    let d = PyDict::new(py);
    d.set_item("n", report.n)?;
    d.set_item("vertices", report.num_strategies)?;
    d.set_item("max_sum_abs", report.max_sum_abs)?;
    d.set_item("min_sum_abs", report.min_sum_abs)?;
    d.set_item("saturated", report.saturated())?;
    Ok(d)
}

/// Two-angle grid scan. Axes are `(lo, hi, steps)`; returns the row-major
/// matrix as a list of rows and the argmax `(theta1, theta2, value)`.
type ScanOutput = (Vec<Vec<f64>>, (f64, f64, f64));

#[pyfunction]
#[pyo3(signature = (params, l, theta1 = None, theta2 = None))]
fn scan(
    params: &PyGhzParams,
    l: usize,
    theta1: Option<(f64, f64, usize)>,
    theta2: Option<(f64, f64, usize)>,
) -> PyResult<ScanOutput> {
    let default = ScanGrid::figure_default();
    let axis = |spec: Option<(f64, f64, usize)>, fallback: Axis| match spec {
        Some((lo, hi, steps)) => Axis::new(lo, hi, steps).map_err(to_py),
        None => Ok(fallback),
    };
    let grid = ScanGrid {
        theta1: axis(theta1, default.theta1)?,
        theta2: axis(theta2, default.theta2)?,
    };
    let r = optimize::scan_two_angle(&params.inner, l, &grid).map_err(to_py)?;
    let rows = (0..r.rows()).map(|i| r.row(i).to_vec()).collect();
    Ok((rows, (r.argmax.theta1, r.argmax.theta2, r.argmax.value)))
}

/// Seeded multi-start coordinate descent over all phases. Returns
/// `(phases, value)`.
#[pyfunction]
#[pyo3(signature = (params, starts = 32, seed = 0))]
fn refine_full(params: &PyGhzParams, starts: usize, seed: u64) -> PyResult<(Vec<[f64; 2]>, f64)> {
    let r = optimize::refine_full(&params.inner, starts, seed).map_err(to_py)?;
    Ok((r.best_settings.phases().to_vec(), r.best_value))
}

#[pymodule]
fn gbell_py(m: &Bound<'_, PyModule>) -> PyResult<()> {
    m.add_class::<PyGhzParams>()?;
    m.add_function(wrap_pyfunction!(prediction_closed_form, m)?)?;
    m.add_function(wrap_pyfunction!(transform_path_prediction, m)?)?;
    m.add_function(wrap_pyfunction!(correlation_values, m)?)?;
    m.add_function(wrap_pyfunction!(max_prediction, m)?)?;
    m.add_function(wrap_pyfunction!(optimal_settings, m)?)?;
    m.add_function(wrap_pyfunction!(two_angle_prediction, m)?)?;
    m.add_function(wrap_pyfunction!(violates, m)?)?;
    m.add_function(wrap_pyfunction!(violates_angle, m)?)?;
    m.add_function(wrap_pyfunction!(violation_threshold, m)?)?;
    m.add_function(wrap_pyfunction!(angle_threshold, m)?)?;
    m.add_function(wrap_pyfunction!(coefficients_from_values, m)?)?;
    m.add_function(wrap_pyfunction!(sum_abs, m)?)?;
    m.add_function(wrap_pyfunction!(certify_bound, m)?)?;
    m.add_function(wrap_pyfunction!(scan, m)?)?;
    m.add_function(wrap_pyfunction!(refine_full, m)?)?;
    Ok(())
}
