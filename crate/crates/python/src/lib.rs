//! Python bindings: `import qratchet`.

use num_complex::Complex64;
use pyo3::exceptions::{PyRuntimeError, PyValueError};
use pyo3::prelude::*;
use qratchet_core::experiments::{self, SweepResult};
use qratchet_core::{floquet, observables, KickOrder, MomentumState, RatchetError, RatchetParams};
use std::f64::consts::PI;

fn to_py(e: RatchetError) -> PyErr {
    if e.is_numerical_guard() {
        PyRuntimeError::new_err(e.to_string())
    } else {
        PyValueError::new_err(e.to_string())
    }
}

/// Kicked-rotor ratchet parameters; `kappa_pi` is kappa in units of pi.
#[pyclass(name = "Params", module = "qratchet", skip_from_py_object)]
#[derive(Clone)]
struct PyParams {
    inner: RatchetParams,
}

#[pymethods]
impl PyParams {
    #[new]
    #[pyo3(signature = (kappa_pi = 1.0, strength_p = 0.5, eta = 0.5, alpha = 0.3, kick_order = "v1-first", tail_tol = 1e-14))]
    fn new(kappa_pi: f64, strength_p: f64, eta: f64, alpha: f64, kick_order: &str, tail_tol: f64) -> PyResult<Self> {
        let order: KickOrder = kick_order.parse().map_err(to_py)?;
        let inner = RatchetParams {
            tail_tol,
            ..RatchetParams::with_kappa_pi(kappa_pi, strength_p, eta).alpha(alpha).order(order)
        };
        inner.validate().map_err(to_py)?;
        Ok(PyParams { inner })
    }

    #[getter]
    fn kappa(&self) -> f64 {
        self.inner.kappa
    }

    #[getter]
    fn strength_p(&self) -> f64 {
        self.inner.strength_p
    }

    #[getter]
    fn eta(&self) -> f64 {
        self.inner.eta
    }

    #[getter]
    fn alpha(&self) -> f64 {
        self.inner.alpha
    }

    #[getter]
    fn kick_order(&self) -> &'static str {
        self.inner.kick_order.as_str()
    }

    fn __repr__(&self) -> String {
        let p = &self.inner;
        format!(
            "Params(kappa_pi={}, strength_p={}, eta={}, alpha={}, kick_order='{}')",
            p.kappa / PI,
            p.strength_p,
            p.eta,
            p.alpha,
            p.kick_order.as_str()
        )
    }
}

/// Amplitudes on the momentum lattice, starting at `k_min`.
#[pyclass(name = "State", module = "qratchet", skip_from_py_object)]
#[derive(Clone)]
struct PyState {
    inner: MomentumState,
}

#[pymethods]
impl PyState {
    #[staticmethod]
    fn uniform() -> Self {
        PyState {
            inner: MomentumState::uniform(),
        }
    }

    #[getter]
    fn k_min(&self) -> i64 {
        self.inner.k_min()
    }

    #[getter]
    fn amplitudes(&self) -> Vec<Complex64> {
        self.inner.amps().to_vec()
    }

    fn norm(&self) -> f64 {
        self.inner.norm_sqr()
    }

    fn mean_momentum(&self) -> f64 {
        observables::mean_momentum(&self.inner)
    }

    fn mean_kinetic(&self) -> f64 {
        observables::mean_kinetic(&self.inner)
    }

    /// One period of the flashing ratchet.
    fn step(&self, params: PyRef<'_, PyParams>) -> PyResult<Self> {
        let inner = qratchet_core::period_step(&self.inner, &params.inner).map_err(to_py)?;
        Ok(PyState { inner })
    }

    fn __len__(&self) -> usize {
        self.inner.len()
    }
}

/// Per-period records from the uniform state, as a dict of lists.
#[pyfunction]
#[pyo3(signature = (params, periods = 200))]
fn evolve(py: Python<'_>, params: PyRef<'_, PyParams>, periods: usize) -> PyResult<Py<PyAny>> {
    let p = params.inner;
    let traj = py
        .detach(|| qratchet_core::evolve(&MomentumState::uniform(), &p, periods, false))
        .map_err(to_py)?;
    let d = pyo3::types::PyDict::new(py);
    let r = &traj.records;
    d.set_item("period", r.iter().map(|x| x.t).collect::<Vec<_>>())?;
    d.set_item("mean_k", r.iter().map(|x| x.mean_k).collect::<Vec<_>>())?;
    d.set_item("mean_k2", r.iter().map(|x| x.mean_k2).collect::<Vec<_>>())?;
    d.set_item("norm_error", r.iter().map(|x| x.norm_error).collect::<Vec<_>>())?;
    d.set_item("period_force", r.iter().map(|x| x.period_force).collect::<Vec<_>>())?;
    d.set_item("final_state", PyState { inner: traj.final_state })?;
    Ok(d.into_any().unbind())
}

#[pyfunction]
#[pyo3(signature = (params, periods = 200))]
fn final_mean_k(py: Python<'_>, params: PyRef<'_, PyParams>, periods: usize) -> PyResult<f64> {
    let p = params.inner;
    py.detach(|| experiments::final_mean_k(&p, periods)).map_err(to_py)
}

fn finals(r: SweepResult) -> Vec<f64> {
    r.final_mean_k
}

/// Final `<k>` for each `eta`.
#[pyfunction]
#[pyo3(signature = (params, etas, periods = 200))]
fn eta_sweep(py: Python<'_>, params: PyRef<'_, PyParams>, etas: Vec<f64>, periods: usize) -> PyResult<Vec<f64>> {
    let p = params.inner;
    py.detach(|| experiments::eta_sweep(&p, &etas, periods)).map(finals).map_err(to_py)
}

/// Final `<k>` for each kick strength.
#[pyfunction]
#[pyo3(signature = (params, strengths, periods = 200))]
fn strength_sweep(py: Python<'_>, params: PyRef<'_, PyParams>, strengths: Vec<f64>, periods: usize) -> PyResult<Vec<f64>> {
    let p = params.inner;
    py.detach(|| experiments::strength_sweep(&p, &strengths, periods)).map(finals).map_err(to_py)
}

/// Final `<k>` for each `kappa / pi`.
#[pyfunction]
#[pyo3(signature = (params, kappa_pi, periods = 200))]
fn kappa_sweep(py: Python<'_>, params: PyRef<'_, PyParams>, kappa_pi: Vec<f64>, periods: usize) -> PyResult<Vec<f64>> {
    let p = params.inner;
    let kappas: Vec<f64> = kappa_pi.iter().map(|k| k * PI).collect();
    py.detach(|| experiments::kappa_sweep(&p, &kappas, periods)).map(finals).map_err(to_py)
}

#[pyfunction]
#[pyo3(signature = (params, periods = 200))]
fn order_reversal_difference(py: Python<'_>, params: PyRef<'_, PyParams>, periods: usize) -> PyResult<f64> {
    let p = params.inner;
    py.detach(|| experiments::order_reversal_difference(&p, periods)).map_err(to_py)
}

#[pyfunction]
#[pyo3(signature = (params, lo = 2.0, hi = 3.0, periods = 200))]
fn find_reversal_strength(py: Python<'_>, params: PyRef<'_, PyParams>, lo: f64, hi: f64, periods: usize) -> PyResult<f64> {
    let p = params.inner;
    py.detach(|| experiments::find_reversal_strength(&p, (lo, hi), periods)).map_err(to_py)
}

/// Closed-form quasienergies `[omega1, omega2, omega3, omega4]` at `x0`.
#[pyfunction]
#[pyo3(signature = (x0, strength_p, alpha = 0.3))]
fn quasienergies(x0: f64, strength_p: f64, alpha: f64) -> PyResult<Vec<f64>> {
    floquet::analytic_quasienergies(x0, strength_p, alpha)
        .map(|w| w.to_vec())
        .map_err(to_py)
}

/// Numeric eigenphases of the one-period fiber unitary at `x0`.
#[pyfunction]
fn fiber_eigenphases(x0: f64, params: PyRef<'_, PyParams>) -> PyResult<Vec<f64>> {
    floquet::fiber_unitary(x0, &params.inner)
        .map(|u| u.eigenphases())
        .map_err(to_py)
}

/// `(x0_grid, bands)` with one unwrapped curve per band.
#[pyfunction]
#[pyo3(signature = (params, x0_points = 256))]
fn band_scan(params: PyRef<'_, PyParams>, x0_points: usize) -> PyResult<(Vec<f64>, Vec<Vec<f64>>)> {
    let s = floquet::band_scan(&params.inner, x0_points).map_err(to_py)?;
    let bands = (1..=s.band_count()).map(|l| s.unwrapped(l)).collect();
    Ok((s.x0_grid, bands))
}

/// `(kappa, P)` from laboratory quantities.
#[pyfunction]
fn derive_params(omega_r: f64, period: f64, v0: f64, hbar: f64, k_l: f64, mass: f64, lambda: f64) -> PyResult<(f64, f64)> {
    let units = qratchet_core::PhysicalUnits {
        omega_r,
        period,
        v0,
        hbar,
        k_l,
        mass,
        lambda,
    };
    qratchet_core::derive_params(&units).map_err(to_py)
}

#[pymodule]
fn qratchet(m: &Bound<'_, PyModule>) -> PyResult<()> {
    m.add_class::<PyParams>()?;
    m.add_class::<PyState>()?;
    m.add_function(wrap_pyfunction!(evolve, m)?)?;
    m.add_function(wrap_pyfunction!(final_mean_k, m)?)?;
    m.add_function(wrap_pyfunction!(eta_sweep, m)?)?;
    m.add_function(wrap_pyfunction!(strength_sweep, m)?)?;
    m.add_function(wrap_pyfunction!(kappa_sweep, m)?)?;
    m.add_function(wrap_pyfunction!(order_reversal_difference, m)?)?;
    m.add_function(wrap_pyfunction!(find_reversal_strength, m)?)?;
    m.add_function(wrap_pyfunction!(quasienergies, m)?)?;
    m.add_function(wrap_pyfunction!(fiber_eigenphases, m)?)?;
    m.add_function(wrap_pyfunction!(band_scan, m)?)?;
    m.add_function(wrap_pyfunction!(derive_params, m)?)?;
    Ok(())
}
