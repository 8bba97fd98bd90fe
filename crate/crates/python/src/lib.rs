//! Python bindings for `raman_cqed`.

use num_complex::Complex64 as C64;
use pyo3::exceptions::PyValueError;
use pyo3::prelude::*;
use pyo3::types::PyDict;

use raman_cqed::hilbert::{self, StateVector};
use raman_cqed::protocols::{self, MeasurementMode, StateDescriptor, WignerOptions};
use raman_cqed::{dynamics, postselect, raman, SelectionTarget, TruncatedFockSpace};

fn py_err(e: raman_cqed::Error) -> PyErr {
    PyValueError::new_err(e.to_string())
}

fn mode(seed: Option<u64>, atoms_per_setting: Option<u64>) -> PyResult<MeasurementMode> {
    match (seed, atoms_per_setting) {
        (None, None) => Ok(MeasurementMode::Deterministic),
        (Some(seed), Some(atoms_per_setting)) if atoms_per_setting > 0 => Ok(MeasurementMode::MonteCarlo {
            seed,
            atoms_per_setting,
        }),
        _ => Err(PyValueError::new_err(
            "Monte Carlo sampling needs both seed and a positive atoms_per_setting",
        )),
    }
}

/// Atom-field couplings in rad/s.
#[pyclass(name = "RamanParams", frozen, skip_from_py_object)]
#[derive(Clone)]
struct PyRamanParams {
    inner: raman::RamanParams,
}

#[pymethods]
impl PyRamanParams {
    #[new]
    fn new(g: f64, omega_l: f64, delta: f64) -> PyResult<Self> {
        raman::RamanParams::new(g, omega_l, delta)
            .map(|inner| Self { inner })
            .map_err(py_err)
    }

    /// Couplings given as ordinary frequencies in Hz.
    #[staticmethod]
    fn from_hz(g_hz: f64, omega_l_hz: f64, delta_hz: f64) -> PyResult<Self> {
        raman::RamanParams::from_hz(g_hz, omega_l_hz, delta_hz)
            .map(|inner| Self { inner })
            .map_err(py_err)
    }

    #[staticmethod]
    fn from_ratio(g: f64, r: f64, detuning_ratio: f64) -> PyResult<Self> {
        raman::RamanParams::from_ratio(g, r, detuning_ratio)
            .map(|inner| Self { inner })
            .map_err(py_err)
    }

    #[getter]
    fn g(&self) -> f64 {
        self.inner.g()
    }

    #[getter]
    fn omega_l(&self) -> f64 {
        self.inner.omega_l()
    }

    #[getter]
    fn delta(&self) -> f64 {
        self.inner.delta()
    }

    #[getter]
    fn r(&self) -> f64 {
        self.inner.r()
    }

    fn pi_time(&self, n0: usize) -> f64 {
        raman::pi_time(&self.inner, SelectionTarget(n0))
    }

    fn __repr__(&self) -> String {
        format!(
            "RamanParams(g={}, omega_l={}, delta={})",
            self.inner.g(),
            self.inner.omega_l(),
            self.inner.delta()
        )
    }
}

/// Normalized cavity field in a truncated Fock basis.
#[pyclass(name = "FieldState", frozen, skip_from_py_object)]
#[derive(Clone)]
struct PyFieldState {
    inner: hilbert::FieldState,
}

#[pymethods]
impl PyFieldState {
    #[staticmethod]
    fn fock(dim: usize, n: usize) -> PyResult<Self> {
        let space = TruncatedFockSpace::new(dim).map_err(py_err)?;
        hilbert::fock_state(space, n).map(|inner| Self { inner }).map_err(py_err)
    }

    #[staticmethod]
    fn coherent(dim: usize, alpha: C64) -> PyResult<Self> {
        let space = TruncatedFockSpace::new(dim).map_err(py_err)?;
        hilbert::coherent_state(space, alpha)
            .map(|inner| Self { inner })
            .map_err(py_err)
    }

    /// Normalizes the given amplitudes.
    #[staticmethod]
    fn from_amplitudes(amplitudes: Vec<C64>) -> PyResult<Self> {
        let space = TruncatedFockSpace::new(amplitudes.len()).map_err(py_err)?;
        hilbert::FieldState::new(space, amplitudes.into())
            .map(|inner| Self { inner })
            .map_err(py_err)
    }

    #[getter]
    fn dim(&self) -> usize {
        self.inner.space().dim()
    }

    #[getter]
    fn amplitudes(&self) -> Vec<C64> {
        self.inner.amplitudes().to_vec()
    }

    fn photon_distribution(&self) -> Vec<f64> {
        postselect::photon_distribution(&self.inner)
    }

    fn displaced(&self, alpha: C64) -> PyResult<Self> {
        self.inner.displaced(alpha).map(|inner| Self { inner }).map_err(py_err)
    }

    fn __repr__(&self) -> String {
        format!("FieldState(dim={})", self.inner.space().dim())
    }
}

/// Conditional Fock-state preparation; returns a dict with the prepared
/// field and figures of merit.
#[pyfunction]
#[pyo3(signature = (field, params, n0, atoms = 1))]
fn prepare_fock<'py>(
    py: Python<'py>,
    field: &PyFieldState,
    params: &PyRamanParams,
    n0: usize,
    atoms: usize,
) -> PyResult<Bound<'py, PyDict>> {
    let report = protocols::prepare_fock_sequential(&field.inner, &params.inner, n0, atoms).map_err(py_err)?;
    let out = PyDict::new(py);
    out.set_item("fidelity", report.fidelity)?;
    out.set_item("approximate_fidelity", report.approximate_fidelity)?;
    out.set_item("success_probability", report.success_probability)?;
    out.set_item("selectivity_margin", report.selectivity_margin)?;
    out.set_item("selectivity_ok", report.selectivity_ok)?;
    out.set_item("target_fock", report.target_fock)?;
    out.set_item("atoms_used", report.atoms_used)?;
    out.set_item("field", PyFieldState {
        inner: report.conditioned.state,
    })?;
    out.set_item(
        "b_coefficients",
        report.coefficients.entries.iter().map(|e| e.b).collect::<Vec<_>>(),
    )?;
    out.set_item("diagnostic_report", report.coefficients.diagnostic_report())?;
    Ok(out)
}

/// `P_e(N)` for `N = 0..=n_max`.
#[pyfunction]
#[pyo3(signature = (field, params, n_max, seed = None, atoms_per_setting = None))]
fn measure_photon_statistics(
    field: &PyFieldState,
    params: &PyRamanParams,
    n_max: usize,
    seed: Option<u64>,
    atoms_per_setting: Option<u64>,
) -> PyResult<Vec<f64>> {
    let mode = mode(seed, atoms_per_setting)?;
    protocols::measure_photon_statistics_with(&field.inner, &params.inner, n_max, &mode).map_err(py_err)
}

/// Returns `(alpha, w_reconstructed, w_exact)` for every grid point.
#[pyfunction]
#[pyo3(signature = (field, params, grid, seed = None, atoms_per_setting = None))]
fn reconstruct_wigner(
    field: &PyFieldState,
    params: &PyRamanParams,
    grid: Vec<C64>,
    seed: Option<u64>,
    atoms_per_setting: Option<u64>,
) -> PyResult<Vec<(C64, f64, f64)>> {
    let options = WignerOptions {
        mode: mode(seed, atoms_per_setting)?,
        ..WignerOptions::default()
    };
    let result = protocols::reconstruct_wigner_with(&field.inner, &params.inner, &grid, &options).map_err(py_err)?;
    Ok(result
        .points
        .iter()
        .map(|p| (p.alpha, p.w_reconstructed, p.w_exact.unwrap_or(f64::NAN)))
        .collect())
}

/// Exact Wigner function of a pure state given by its Fock amplitudes.
#[pyfunction]
fn exact_wigner(amplitudes: Vec<C64>, alpha: C64) -> f64 {
    protocols::exact_wigner(&StateDescriptor::Amplitudes(amplitudes), alpha)
}

#[pyfunction]
fn exact_wigner_fock(n: usize, alpha: C64) -> f64 {
    protocols::exact_wigner(&StateDescriptor::Fock(n), alpha)
}

#[pyfunction]
fn default_grid(extent: f64, step: f64) -> Vec<C64> {
    protocols::default_grid(extent, step)
}

#[pyfunction]
fn selectivity_margin(params: &PyRamanParams, n0: usize) -> f64 {
    protocols::selectivity_margin(&params.inner, n0)
}

/// Full three-level model against the effective model; `t` defaults to the pi time.
#[pyfunction]
#[pyo3(signature = (field, params, n0, t = None))]
fn compare_models<'py>(
    py: Python<'py>,
    field: &PyFieldState,
    params: &PyRamanParams,
    n0: usize,
    t: Option<f64>,
) -> PyResult<Bound<'py, PyDict>> {
    let target = SelectionTarget(n0);
    let t = t.unwrap_or_else(|| raman::pi_time(&params.inner, target));
    let cmp = dynamics::compare_models(&field.inner, &params.inner, target, t).map_err(py_err)?;
    let out = PyDict::new(py);
    out.set_item("time", cmp.time)?;
    out.set_item("excited_full", cmp.excited_full)?;
    out.set_item("excited_effective", cmp.excited_effective)?;
    out.set_item("difference", cmp.difference)?;
    out.set_item("upper_population", cmp.upper_population)?;
    out.set_item("steps", cmp.steps)?;
    Ok(out)
}

#[pymodule]
fn raman_cqed_py(m: &Bound<'_, PyModule>) -> PyResult<()> {
    m.add_class::<PyRamanParams>()?;
    m.add_class::<PyFieldState>()?;
    m.add_function(wrap_pyfunction!(prepare_fock, m)?)?;
    m.add_function(wrap_pyfunction!(measure_photon_statistics, m)?)?;
    m.add_function(wrap_pyfunction!(reconstruct_wigner, m)?)?;
    m.add_function(wrap_pyfunction!(exact_wigner, m)?)?;
    m.add_function(wrap_pyfunction!(exact_wigner_fock, m)?)?;
    m.add_function(wrap_pyfunction!(default_grid, m)?)?;
    m.add_function(wrap_pyfunction!(selectivity_margin, m)?)?;
    m.add_function(wrap_pyfunction!(compare_models, m)?)?;
    Ok(())
}
