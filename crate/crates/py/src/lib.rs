use pyo3::exceptions::{PyArithmeticError, PyValueError};
use pyo3::prelude::*;

use qge_core::entanglement::{self, Gate, GateSpec};
use qge_core::graph::{self, EdgeId};
use qge_core::qubit::{self, ControlledPair};
use qge_core::scattering::{self, ChannelSMatrix as CoreChannel};
use qge_core::surface::{self, Axis, GridSpec, SurfaceMode};
use qge_core::{Complex64, Error};

fn to_py(err: Error) -> PyErr {
    match err {
        Error::Resonance { .. } | Error::NotUnitary(_) => PyArithmeticError::new_err(err.to_string()),
        _ => PyValueError::new_err(err.to_string()),
    }
}

fn rows(m: &qge_core::qubit::DensityMatrix) -> Vec<Vec<Complex64>> {
    (0..m.dim())
        .map(|i| (0..m.dim()).map(|j| m.get(i, j)).collect())
        .collect()
}

/// Reflection/transmission pair of a two-channel graph.
#[pyclass(frozen, from_py_object, name = "ChannelSMatrix")]
#[derive(Clone)]
struct PyChannel(CoreChannel);

#[pymethods]
impl PyChannel {
    #[new]
    #[pyo3(signature = (r, t, tol = scattering::DEFAULT_TOL))]
    fn new(r: Complex64, t: Complex64, tol: f64) -> PyResult<Self> {
        CoreChannel::with_tol(r, t, None, tol).map(PyChannel).map_err(to_py)
    }

    #[getter]
    fn r(&self) -> Complex64 {
        self.0.r
    }

    #[getter]
    fn t(&self) -> Complex64 {
        self.0.t
    }

    fn unitarity_residual(&self) -> f64 {
        self.0.unitarity_residual()
    }

    fn phase_lock_residual(&self) -> f64 {
        self.0.phase_lock_residual()
    }

    fn __repr__(&self) -> String {
        format!("ChannelSMatrix(r={}, t={})", self.0.r, self.0.t)
    }
}

#[pyclass(frozen, get_all)]
struct EntanglementReport {
    lambda_plus: f64,
    lambda_minus: f64,
    entropy: f64,
    max_ent_residual: f64,
    separability_residual: f64,
}

/// Alice's channel plus Bob's two configurations.
#[pyclass(frozen, name = "ControlledPair")]
struct PyPair(ControlledPair);

#[pymethods]
impl PyPair {
    #[new]
    fn new(a: PyChannel, b: PyChannel, b_prime: PyChannel) -> Self {
        PyPair(ControlledPair::new(a.0, b.0, b_prime.0))
    }

    /// Channel-phase variant: B' is B with `exp(i phi)` on its transmission.
    #[staticmethod]
    fn channel_phase(a: PyChannel, b: PyChannel, phi: f64) -> Self {
        PyPair(qubit::channel_phase_pair(a.0, b.0, phi))
    }

    /// Amplitudes on |00>, |01>, |10>, |11>.
    fn joint_state(&self) -> [Complex64; 4] {
        qubit::joint_state(&self.0).amplitudes()
    }

    fn density_matrix(&self) -> PyResult<Vec<Vec<Complex64>>> {
        let rho = qubit::density_matrix(&qubit::joint_state(&self.0)).map_err(to_py)?;
        Ok(rows(&rho))
    }

    fn reduce_a(&self) -> PyResult<Vec<Vec<Complex64>>> {
        let rho = qubit::density_matrix(&qubit::joint_state(&self.0)).map_err(to_py)?;
        Ok(rows(&qubit::reduce_a(&rho).map_err(to_py)?))
    }

    fn reduce_b(&self) -> PyResult<Vec<Vec<Complex64>>> {
        let rho = qubit::density_matrix(&qubit::joint_state(&self.0)).map_err(to_py)?;
        Ok(rows(&qubit::reduce_b(&rho).map_err(to_py)?))
    }

    fn lambda_pm(&self) -> PyResult<(f64, f64)> {
        entanglement::lambda_pm(&self.0).map_err(to_py)
    }

    fn analyze(&self) -> PyResult<EntanglementReport> {
        let r = entanglement::analyze(&self.0).map_err(to_py)?;
        Ok(EntanglementReport {
            lambda_plus: r.lambda_plus,
            lambda_minus: r.lambda_minus,
            entropy: r.entropy,
            max_ent_residual: r.max_ent_residual,
            separability_residual: r.separability_residual,
        })
    }
}

/// Open metric graph with leads.
#[pyclass(frozen, name = "MetricGraph")]
struct PyGraph(graph::MetricGraph);

#[pymethods]
impl PyGraph {
    #[staticmethod]
    fn from_json(text: &str) -> PyResult<Self> {
        graph::MetricGraph::from_json_str(text)
            .map(PyGraph)
            .map_err(to_py)
    }

    #[staticmethod]
    fn star4(l12: f64, l23: f64, l24: f64) -> PyResult<Self> {
        graph::make_star4(l12, l23, l24).map(PyGraph).map_err(to_py)
    }

    fn to_json(&self) -> String {
        self.0.to_json_string()
    }

    fn with_edge_phase(&self, edge: usize, phi: f64) -> PyResult<Self> {
        graph::with_edge_phase(&self.0, EdgeId(edge), phi)
            .map(PyGraph)
            .map_err(to_py)
    }

    /// Violations as strings; empty when the graph is well formed.
    fn validate(&self) -> Vec<String> {
        graph::validate(&self.0).iter().map(|v| v.to_string()).collect()
    }

    /// Full scattering matrix at wavenumber `k`, entry [out][in].
    fn smatrix(&self, k: f64) -> PyResult<Vec<Vec<Complex64>>> {
        let s = scattering::global_smatrix(&self.0, k).map_err(to_py)?;
        let n = s.channels();
        Ok((0..n)
            .map(|i| (0..n).map(|j| s.entries[(i, j)]).collect())
            .collect())
    }

    fn channel(&self, k: f64) -> PyResult<PyChannel> {
        let s = scattering::global_smatrix(&self.0, k).map_err(to_py)?;
        s.to_channel(scattering::DEFAULT_TOL)
            .map(PyChannel)
            .map_err(to_py)
    }
}

#[pyfunction]
fn rt_simplified(x: f64) -> (Complex64, Complex64) {
    scattering::rt_simplified(x)
}

#[pyfunction]
fn rt_channel(x: f64) -> PyChannel {
    PyChannel(scattering::rt_channel(x))
}

#[pyfunction]
#[pyo3(signature = (k, l12, l23, l24, phi = 0.0))]
fn star4_analytic(k: f64, l12: f64, l23: f64, l24: f64, phi: f64) -> PyResult<PyChannel> {
    scattering::star4_analytic(k, l12, l23, l24, phi)
        .map(PyChannel)
        .map_err(to_py)
}

#[pyfunction]
fn star4_phase_form(x: f64, alpha: f64, beta: f64) -> [[Complex64; 2]; 2] {
    let s = scattering::star4_phase_form(graph::StarPhaseParams { x, alpha, beta }).entries;
    [[s[(0, 0)], s[(0, 1)]], [s[(1, 0)], s[(1, 1)]]]
}

#[pyfunction]
fn entropy(lambda_plus: f64, lambda_minus: f64) -> f64 {
    entanglement::entropy((lambda_plus, lambda_minus))
}

#[pyfunction]
#[pyo3(signature = (kb_l, n = 0))]
fn solve_phi(kb_l: f64, n: i64) -> f64 {
    entanglement::solve_phi(kb_l, n)
}

#[pyfunction]
fn tan_product_residual(x: f64, phi: f64) -> f64 {
    entanglement::tan_product_residual(x, phi)
}

#[pyfunction]
fn expected_transmission_b(p: f64, t_b: Complex64, t_bp: Complex64) -> PyResult<f64> {
    qubit::expected_transmission_b(p, t_b, t_bp).map_err(to_py)
}

/// Returns `(x, alpha, beta, deviation, passed)`.
#[pyfunction]
#[pyo3(signature = (name, n_phi = 0, n_alpha = 0, n_beta = 0, delta = 0.0, alpha = 0.0, plus = true, tol = entanglement::GATE_TOL))]
#[allow(clippy::too_many_arguments)]
fn verify_gate(
    name: &str,
    n_phi: i64,
    n_alpha: i64,
    n_beta: i64,
    delta: f64,
    alpha: f64,
    plus: bool,
    tol: f64,
) -> PyResult<(f64, f64, f64, f64, bool)> {
    let gate = match name.parse::<Gate>().map_err(to_py)? {
        Gate::GlobalPhase { .. } => Gate::GlobalPhase { delta },
        Gate::PauliX { .. } => Gate::PauliX { alpha },
        Gate::Hadamard { .. } => Gate::Hadamard { plus },
        g => g,
    };
    let r = entanglement::verify_gate(&GateSpec::with_offsets(gate, n_phi, n_alpha, n_beta), tol);
    Ok((r.params.x, r.params.alpha, r.params.beta, r.deviation, r.passed))
}

/// Rows `(a, b, c, lambda_plus, entropy)` over a grid of three
/// `(min, max, steps)` axes.
#[pyfunction]
fn entropy_surface(
    py: Python<'_>,
    mode: &str,
    axes: [(f64, f64, usize); 3],
) -> PyResult<Vec<(f64, f64, f64, f64, f64)>> {
    let mode: SurfaceMode = mode.parse().map_err(to_py)?;
    let grid = GridSpec::new(mode, axes.map(|(lo, hi, n)| Axis::new(lo, hi, n)));
    let s = py
        .detach(|| surface::entropy_surface(&grid))
        .map_err(to_py)?;
    Ok(s.rows
        .iter()
        .map(|r| (r.params[0], r.params[1], r.params[2], r.lambda_plus, r.entropy))
        .collect())
}

#[pymodule]
fn qge(m: &Bound<'_, PyModule>) -> PyResult<()> {
    m.add_class::<PyChannel>()?;
    m.add_class::<PyPair>()?;
    m.add_class::<PyGraph>()?;
    m.add_class::<EntanglementReport>()?;
    m.add_function(wrap_pyfunction!(rt_simplified, m)?)?;
    m.add_function(wrap_pyfunction!(rt_channel, m)?)?;
    m.add_function(wrap_pyfunction!(star4_analytic, m)?)?;
    m.add_function(wrap_pyfunction!(star4_phase_form, m)?)?;
    m.add_function(wrap_pyfunction!(entropy, m)?)?;
    m.add_function(wrap_pyfunction!(solve_phi, m)?)?;
    m.add_function(wrap_pyfunction!(tan_product_residual, m)?)?;
    m.add_function(wrap_pyfunction!(expected_transmission_b, m)?)?;
    m.add_function(wrap_pyfunction!(verify_gate, m)?)?;
    m.add_function(wrap_pyfunction!(entropy_surface, m)?)?;
    Ok(())
}
