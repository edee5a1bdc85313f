//! Python bindings for `entutil`.
//!
//! Matrices cross the boundary as nested lists of Python `complex`, kets as
//! flat lists, in the basis order |00⟩, |01⟩, |10⟩, |11⟩.

use num_complex::Complex64;
use pyo3::exceptions::{PyRuntimeError, PyValueError};
use pyo3::prelude::*;
use pyo3::types::PyDict;

use entutil::optimizer::{grid_oracle as grid_oracle_rs, optimize_unitary as optimize_rs};
use entutil::protocol::{FeedForward, MixWeighting, Mixture, Side, UnitaryParams};
use entutil::qmat::{CMat, CMat4, CVec, CVec4};
use entutil::strategy::{self, Workers};
use entutil::utility::{UtilityArgument, UtilityFamily};
use entutil::{Concurrence, Coupling, Error, OptimizerConfig};

fn to_py(e: Error) -> PyErr {
    match e {
        Error::NoConvergence { .. } => PyRuntimeError::new_err(e.to_string()),
        _ => PyValueError::new_err(e.to_string()),
    }
}

fn mat_to_rows<const N: usize>(m: &CMat<N>) -> Vec<Vec<Complex64>> {
    m.0.iter().map(|r| r.to_vec()).collect()
}

fn rows_to_mat4(rows: Vec<Vec<Complex64>>) -> PyResult<CMat4> {
    if rows.len() != 4 || rows.iter().any(|r| r.len() != 4) {
        return Err(PyValueError::new_err("expected a 4x4 matrix"));
    }
    let mut m = CMat4::zeros();
    for (i, r) in rows.into_iter().enumerate() {
        for (j, z) in r.into_iter().enumerate() {
            m[(i, j)] = z;
        }
    }
    Ok(m)
}

fn to_ket(v: Vec<Complex64>) -> PyResult<CVec4> {
    let arr: [Complex64; 4] = v
        .try_into()
        .map_err(|_| PyValueError::new_err("expected 4 amplitudes"))?;
    Ok(CVec(arr))
}

fn feed_forward(side: u8, weighting: &str) -> PyResult<FeedForward> {
    Ok(FeedForward {
        side: Side::from_index(side).map_err(to_py)?,
        weighting: weighting
            .parse::<MixWeighting>()
            .map_err(PyValueError::new_err)?,
    })
}

fn mixture(theta: f64, w: f64, side: u8, weighting: &str) -> PyResult<Mixture> {
    let theta = Coupling::new(theta).map_err(to_py)?;
    Mixture::new(theta, w, feed_forward(side, weighting)?).map_err(to_py)
}

/// Success and failure kets with their probabilities.
#[pyfunction]
fn conditional_states<'py>(py: Python<'py>, theta: f64) -> PyResult<Bound<'py, PyDict>> {
    let st = entutil::conditional_states(Coupling::new(theta).map_err(to_py)?);
    let d = PyDict::new(py);
    d.set_item("psi_succ", st.psi_succ.0.to_vec())?;
    d.set_item("psi_fail", st.psi_fail.0.to_vec())?;
    d.set_item("p_succ", st.p_succ)?;
    d.set_item("p_fail", st.p_fail)?;
    Ok(d)
}

#[pyfunction]
fn realize_unitary(alpha: f64, beta: f64, gamma: f64) -> Vec<Vec<Complex64>> {
    mat_to_rows(&entutil::realize_unitary(UnitaryParams::new(alpha, beta, gamma)))
}

/// The feed-forward mixture ρ_w as a 4×4 matrix.
#[pyfunction]
#[pyo3(signature = (theta, w, alpha, beta, gamma, side = 2, weighting = "equal"))]
fn mix_state(
    theta: f64,
    w: f64,
    alpha: f64,
    beta: f64,
    gamma: f64,
    side: u8,
    weighting: &str,
) -> PyResult<Vec<Vec<Complex64>>> {
    let rho = mixture(theta, w, side, weighting)?.density(UnitaryParams::new(alpha, beta, gamma));
    Ok(mat_to_rows(rho.matrix()))
}

#[pyfunction]
#[pyo3(signature = (rho, tol = 1e-8))]
fn concurrence(rho: Vec<Vec<Complex64>>, tol: f64) -> PyResult<f64> {
    let rho = entutil::validate_density(&rows_to_mat4(rho)?, tol).map_err(to_py)?;
    Ok(entutil::concurrence(&rho).map_err(to_py)?.value())
}

#[pyfunction]
fn concurrence_pure(psi: Vec<Complex64>) -> PyResult<f64> {
    Ok(entutil::concurrence_pure(&to_ket(psi)?).map_err(to_py)?.value())
}

#[pyfunction]
fn binary_entropy(x: f64) -> PyResult<f64> {
    entutil::binary_entropy(x).map_err(to_py)
}

#[pyfunction]
fn eof(c: f64) -> PyResult<f64> {
    Ok(entutil::eof(Concurrence::new(c).map_err(to_py)?).value())
}

#[pyclass(name = "OptResult", frozen, get_all, skip_from_py_object)]
#[derive(Clone)]
struct PyOptResult {
    alpha: f64,
    beta: f64,
    gamma: f64,
    c_star: f64,
    evaluations: usize,
    converged: bool,
}

#[pymethods]
impl PyOptResult {
    fn __repr__(&self) -> String {
        format!(
            "OptResult(alpha={}, beta={}, gamma={}, c_star={}, evaluations={}, converged={})",
            self.alpha,
            self.beta,
            self.gamma,
            self.c_star,
            self.evaluations,
            if self.converged { "True" } else { "False" }
        )
    }
}

impl From<entutil::OptResult> for PyOptResult {
    fn from(r: entutil::OptResult) -> Self {
        PyOptResult {
            alpha: r.params.alpha,
            beta: r.params.beta,
            gamma: r.params.gamma,
            c_star: r.c_star.value(),
            evaluations: r.evaluations,
            converged: r.converged,
        }
    }
}

#[pyfunction]
#[pyo3(signature = (theta, w, side = 2, weighting = "equal", grid = 8, starts = 10))]
fn optimize_unitary(
    theta: f64,
    w: f64,
    side: u8,
    weighting: &str,
    grid: usize,
    starts: usize,
) -> PyResult<PyOptResult> {
    let cfg = OptimizerConfig {
        grid,
        starts,
        ..Default::default()
    };
    cfg.validate().map_err(PyValueError::new_err)?;
    Ok(optimize_rs(&mixture(theta, w, side, weighting)?, &cfg).into())
}

#[pyfunction]
#[pyo3(signature = (theta, w, resolution, side = 2, weighting = "equal"))]
fn grid_oracle(
    theta: f64,
    w: f64,
    resolution: usize,
    side: u8,
    weighting: &str,
) -> PyResult<PyOptResult> {
    Ok(grid_oracle_rs(&mixture(theta, w, side, weighting)?, resolution).into())
}

/// A utility function such as `power:2` or `threshold:0.5,1` plus a cost.
#[pyclass(name = "UtilitySpec", frozen, skip_from_py_object)]
#[derive(Clone)]
struct PyUtilitySpec {
    inner: entutil::UtilitySpec,
}

#[pymethods]
impl PyUtilitySpec {
    #[new]
    #[pyo3(signature = (descriptor, cost = 0.0, of = "eof"))]
    fn new(descriptor: &str, cost: f64, of: &str) -> PyResult<Self> {
        let family: UtilityFamily = descriptor.parse().map_err(PyValueError::new_err)?;
        let argument: UtilityArgument = of.parse().map_err(PyValueError::new_err)?;
        let inner = entutil::UtilitySpec {
            family,
            cost,
            argument,
        };
        inner.validate().map_err(PyValueError::new_err)?;
        Ok(PyUtilitySpec { inner })
    }

    /// `u(e)` for `e` in [0, 1].
    fn u(&self, e: f64) -> PyResult<f64> {
        let e = entutil::Entanglement::new(e).map_err(to_py)?;
        Ok(entutil::evaluate_utility(&self.inner, e))
    }

    #[getter]
    fn cost(&self) -> f64 {
        self.inner.cost
    }

    #[getter]
    fn family(&self) -> String {
        self.inner.family.to_string()
    }

    fn __repr__(&self) -> String {
        format!("UtilitySpec('{}', cost={})", self.inner.family, self.inner.cost)
    }
}

/// `N(w) = P(w) u(E_w) + (1 − w) P_fail u(E_fail) − w P_fail C`.
#[pyfunction]
fn net_utility(
    p_succ: f64,
    p_fail: f64,
    e_w: f64,
    e_fail: f64,
    w: f64,
    spec: &PyUtilitySpec,
) -> f64 {
    entutil::net_utility(
        &entutil::NetUtilityInputs {
            p_succ,
            p_fail,
            e_w,
            e_fail,
            w,
        },
        &spec.inner,
    )
}

/// Run a sweep and return one dict per (theta, spec), ordered by theta
/// then spec.
#[pyfunction]
#[pyo3(signature = (specs, theta_points = 200, theta_min = strategy::DEFAULT_THETA_MIN, w_step = 0.001, side = 2, weighting = "equal"))]
fn sweep<'py>(
    py: Python<'py>,
    specs: Vec<PyRef<'py, PyUtilitySpec>>,
    theta_points: usize,
    theta_min: f64,
    w_step: f64,
    side: u8,
    weighting: &str,
) -> PyResult<Vec<Bound<'py, PyDict>>> {
    let thetas = strategy::theta_grid(theta_points, theta_min).map_err(to_py)?;
    let ws = strategy::w_grid(w_step).map_err(to_py)?;
    let specs: Vec<entutil::UtilitySpec> = specs.iter().map(|s| s.inner).collect();
    let ff = feed_forward(side, weighting)?;
    let result = py
        .detach(|| {
            strategy::sweep(
                &thetas,
                &ws,
                &specs,
                ff,
                &OptimizerConfig::default(),
                Workers::Auto,
            )
        })
        .map_err(to_py)?;
    result
        .records
        .iter()
        .map(|r| {
            let d = PyDict::new(py);
            d.set_item("theta", r.theta)?;
            d.set_item("utility", r.spec.family.to_string())?;
            d.set_item("cost", r.spec.cost)?;
            d.set_item("w_opt", r.w_opt)?;
            d.set_item("n_opt", r.n_opt)?;
            d.set_item("n_base", r.n_base)?;
            d.set_item("ratio", r.ratio)?;
            Ok(d)
        })
        .collect()
}

#[pymodule]
pub fn entutil_py(m: &Bound<'_, PyModule>) -> PyResult<()> {
    m.add_function(wrap_pyfunction!(conditional_states, m)?)?;
    m.add_function(wrap_pyfunction!(realize_unitary, m)?)?;
    m.add_function(wrap_pyfunction!(mix_state, m)?)?;
    m.add_function(wrap_pyfunction!(concurrence, m)?)?;
    m.add_function(wrap_pyfunction!(concurrence_pure, m)?)?;
    m.add_function(wrap_pyfunction!(binary_entropy, m)?)?;
    m.add_function(wrap_pyfunction!(eof, m)?)?;
    m.add_function(wrap_pyfunction!(optimize_unitary, m)?)?;
    m.add_function(wrap_pyfunction!(grid_oracle, m)?)?;
    m.add_function(wrap_pyfunction!(net_utility, m)?)?;
    m.add_function(wrap_pyfunction!(sweep, m)?)?;
    m.add_class::<PyOptResult>()?;
    m.add_class::<PyUtilitySpec>()?;
    Ok(())
}
