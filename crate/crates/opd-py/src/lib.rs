//! Python bindings exposing the decomposition, frame, dynamics and
//! positivity operations. Matrices cross the boundary as nested lists of
//! complex numbers (row-major).

use num_complex::Complex;
use pyo3::exceptions::PyValueError;
use pyo3::prelude::*;
use pyo3::types::PyDict;

use opd_core::hs::CMatrix;
use opd_core::{BipartiteOperator, Error, HsOperator, OperatorFrame, TwoMapRates};

type Matrix = Vec<Vec<Complex<f64>>>;

fn err(e: Error) -> PyErr {
    PyValueError::new_err(e.to_string())
}

fn to_operator(m: &Matrix) -> PyResult<HsOperator> {
    let rows = m.len();
    if rows == 0 || m.iter().any(|r| r.len() != rows) {
        return Err(PyValueError::new_err("matrix must be square and non-empty"));
    }
    HsOperator::new(CMatrix::from_fn(rows, rows, |r, c| m[r][c])).map_err(err)
}

fn to_bipartite(m: &Matrix, dim_s: usize, dim_e: usize) -> PyResult<BipartiteOperator> {
    let op = to_operator(m)?;
    BipartiteOperator::new(dim_s, dim_e, op.matrix().clone()).map_err(err)
}

fn from_operator(op: &HsOperator) -> Matrix {
    let d = op.dim();
    (0..d)
        .map(|r| (0..d).map(|c| op.matrix()[(r, c)]).collect())
        .collect()
}

fn build_frame(kind: &str, d: usize) -> PyResult<OperatorFrame> {
    match kind {
        "pauli" => opd_core::pauli_frame(d).map_err(err),
        "basis" => opd_core::basis_induced_family(d).map_err(err),
        other => Err(PyValueError::new_err(format!(
            "unknown frame kind {other:?}, expected \"pauli\" or \"basis\""
        ))),
    }
}

fn rates(gamma: [f64; 3], gamma_tilde: [f64; 3]) -> PyResult<TwoMapRates> {
    TwoMapRates::new(gamma, gamma_tilde).map_err(err)
}

/// Orthonormal Hermitian operator basis with projector diagonal.
#[pyfunction]
fn hermitian_basis(d: usize) -> PyResult<Vec<Matrix>> {
    if d == 0 {
        return Err(PyValueError::new_err("dimension must be >= 1"));
    }
    Ok(opd_core::hermitian_basis(d).iter().map(from_operator).collect())
}

/// Generalized Pauli (Gell-Mann) basis in canonical order.
#[pyfunction]
fn gellmann_basis(d: usize) -> PyResult<Vec<Matrix>> {
    Ok(opd_core::gellmann_basis(d)
        .map_err(err)?
        .iter()
        .map(from_operator)
        .collect())
}

/// A frame construction ("pauli" or "basis") with its dual, labels and
/// frame bounds.
#[pyfunction]
fn frame<'py>(py: Python<'py>, kind: &str, d: usize) -> PyResult<Bound<'py, PyDict>> {
    let f = build_frame(kind, d)?;
    let out = PyDict::new(py);
    out.set_item("dim", f.dim())?;
    out.set_item(
        "labels",
        f.labels().iter().map(|l| (l.k, l.j)).collect::<Vec<_>>(),
    )?;
    out.set_item(
        "elements",
        f.elements().iter().map(from_operator).collect::<Vec<_>>(),
    )?;
    out.set_item(
        "dual",
        f.dual().map(|d| d.iter().map(from_operator).collect::<Vec<_>>()),
    )?;
    out.set_item("bounds", f.bounds())?;
    Ok(out)
}

/// Worst reconstruction residual of a primal/dual pair over a full basis.
#[pyfunction]
fn duality_residual(elements: Vec<Matrix>, dual: Vec<Matrix>, tol: f64) -> PyResult<(bool, f64)> {
    let primal = elements.iter().map(to_operator).collect::<PyResult<Vec<_>>>()?;
    let dual = dual.iter().map(to_operator).collect::<PyResult<Vec<_>>>()?;
    let check = opd_core::verify_duality(&primal, &dual, tol).map_err(err)?;
    Ok((check.ok, check.max_residual))
}

/// Operator Schmidt rank of a bipartite matrix.
#[pyfunction]
#[pyo3(signature = (matrix, dim_s, dim_e, tol = 1e-10))]
fn schmidt_rank(matrix: Matrix, dim_s: usize, dim_e: usize, tol: f64) -> PyResult<usize> {
    let op = to_bipartite(&matrix, dim_s, dim_e)?;
    Ok(opd_core::schmidt_decompose(&op, tol).map_err(err)?.rank)
}

/// Descending operator Schmidt coefficients.
#[pyfunction]
#[pyo3(signature = (matrix, dim_s, dim_e, tol = 1e-10))]
fn schmidt_coefficients(matrix: Matrix, dim_s: usize, dim_e: usize, tol: f64) -> PyResult<Vec<f64>> {
    let op = to_bipartite(&matrix, dim_s, dim_e)?;
    Ok(opd_core::schmidt_decompose(&op, tol).map_err(err)?.coefficients)
}

/// One-sided positive decomposition of a bipartite density matrix; each term
/// is a dict with keys "omega", "label", "system_op", "env_state".
#[pyfunction]
#[pyo3(signature = (matrix, dim_s, dim_e, kind = "pauli", tol = 1e-10, reduce = false))]
fn decompose<'py>(
    py: Python<'py>,
    matrix: Matrix,
    dim_s: usize,
    dim_e: usize,
    kind: &str,
    tol: f64,
    reduce: bool,
) -> PyResult<Vec<Bound<'py, PyDict>>> {
    let rho = to_bipartite(&matrix, dim_s, dim_e)?;
    let frame = build_frame(kind, dim_s)?;
    let mut opd = opd_core::decompose(&rho, &frame, tol).map_err(err)?;
    if reduce {
        opd = opd_core::reduce(&opd, tol).map_err(err)?;
    }
    opd.terms
        .iter()
        .map(|t| {
            let d = PyDict::new(py);
            d.set_item("omega", t.weight)?;
            d.set_item("label", (t.label.k, t.label.j))?;
            d.set_item("system_op", from_operator(&t.system_op))?;
            d.set_item("env_state", from_operator(&t.env_state))?;
            Ok(d)
        })
        .collect()
}

/// Minimal number of decomposition terms, cross-checked against the
/// operator Schmidt rank.
#[pyfunction]
#[pyo3(signature = (matrix, dim_s, dim_e, tol = 1e-8))]
fn opd_cost(matrix: Matrix, dim_s: usize, dim_e: usize, tol: f64) -> PyResult<usize> {
    let rho = to_bipartite(&matrix, dim_s, dim_e)?;
    opd_core::cost(&rho, tol).map_err(err)
}

/// The qubit state encoded by the v-parametrization.
#[pyfunction]
fn state_from_v(v: [f64; 3]) -> Matrix {
    from_operator(&opd_core::state_from_v(v))
}

/// Membership in the initial positivity ball.
#[pyfunction]
fn in_initial_domain(v: [f64; 3]) -> bool {
    opd_core::in_initial_domain(v)
}

/// The violation g(t); the evolved matrix is positive iff g <= 1.
#[pyfunction]
fn evolved_violation(v: [f64; 3], gamma: [f64; 3], gamma_tilde: [f64; 3], t: f64) -> PyResult<f64> {
    opd_core::evolved_violation(v, &rates(gamma, gamma_tilde)?, t).map_err(err)
}

/// Long-run classification of an initial point; returns a dict with keys
/// "kind", "first_exit_time", "reentry_time", "asymptotic_g".
#[pyfunction]
#[pyo3(signature = (v, gamma, gamma_tilde, horizon = None, grid = 200))]
fn classify<'py>(
    py: Python<'py>,
    v: [f64; 3],
    gamma: [f64; 3],
    gamma_tilde: [f64; 3],
    horizon: Option<f64>,
    grid: usize,
) -> PyResult<Bound<'py, PyDict>> {
    let rates = rates(gamma, gamma_tilde)?;
    let horizon = horizon.unwrap_or_else(|| rates.default_horizon());
    let verdict = opd_core::classify(v, &rates, horizon, grid).map_err(err)?;
    let out = PyDict::new(py);
    out.set_item("kind", verdict.kind.to_string())?;
    out.set_item("first_exit_time", verdict.first_exit_time)?;
    out.set_item("reentry_time", verdict.reentry_time)?;
    out.set_item("asymptotic_g", verdict.asymptotic_g)?;
    Ok(out)
}

/// Whether the evolved-points ellipsoid fits inside the evolved positivity
/// ball at time t; returns a dict with "contained", "max_distance_sq",
/// "witness".
#[pyfunction]
fn ellipsoid_ball_containment<'py>(
    py: Python<'py>,
    gamma: [f64; 3],
    gamma_tilde: [f64; 3],
    t: f64,
) -> PyResult<Bound<'py, PyDict>> {
    let result = opd_core::ellipsoid_ball_containment(&rates(gamma, gamma_tilde)?, t).map_err(err)?;
    let out = PyDict::new(py);
    out.set_item("contained", result.contained)?;
    out.set_item("max_distance_sq", result.max_distance_sq)?;
    out.set_item("witness", result.witness)?;
    Ok(out)
}

/// Brute-force Fibonacci-sphere maximum of the containment objective.
#[pyfunction]
#[pyo3(signature = (gamma, gamma_tilde, t, points = 100_000))]
fn sphere_oracle_max(gamma: [f64; 3], gamma_tilde: [f64; 3], t: f64, points: usize) -> PyResult<f64> {
    opd_core::sphere_oracle_max(&rates(gamma, gamma_tilde)?, t, points).map_err(err)
}

/// Preset rate pairs: "I" (every eigenvalue decays) or "II" (constant
/// z-extent), scaled by gamma.
#[pyfunction]
#[pyo3(signature = (name, gamma = 1.0))]
fn example_rates(name: &str, gamma: f64) -> PyResult<([f64; 3], [f64; 3])> {
    let r = match name {
        "I" | "i" => TwoMapRates::example_i(gamma),
        "II" | "ii" => TwoMapRates::example_ii(gamma),
        other => {
            return Err(PyValueError::new_err(format!(
                "unknown example {other:?}, expected \"I\" or \"II\""
            )))
        }
    }
    .map_err(err)?;
    Ok((r.gamma, r.gamma_tilde))
}

/// Applies a single Pauli-channel semigroup to a qubit matrix.
#[pyfunction]
fn channel_apply(channel_rates: [f64; 3], t: f64, matrix: Matrix) -> PyResult<Matrix> {
    let ch = opd_core::PauliChannel::new(channel_rates).map_err(err)?;
    let a = to_operator(&matrix)?;
    Ok(from_operator(&ch.apply(t, &a).map_err(err)?))
}

/// Channel eigenvalues (lambda_0..lambda_3) at time t.
#[pyfunction]
fn channel_eigenvalues(channel_rates: [f64; 3], t: f64) -> PyResult<[f64; 4]> {
    Ok(opd_core::PauliChannel::new(channel_rates).map_err(err)?.eigenvalues(t))
}

/// Term-wise two-map propagation of the v-point; returns the evolved matrix
/// and its minimum eigenvalue.
#[pyfunction]
fn evolve_v(v: [f64; 3], gamma: [f64; 3], gamma_tilde: [f64; 3], t: f64) -> PyResult<(Matrix, f64)> {
    let family = rates(gamma, gamma_tilde)?.family();
    let opd = opd_core::opd_from_v(v).map_err(err)?;
    let evolved = opd_core::evolve_opd(&opd, &family, t).map_err(err)?;
    Ok((from_operator(&evolved.state), evolved.min_eigenvalue))
}

#[pymodule]
fn opd_py(m: &Bound<'_, PyModule>) -> PyResult<()> {
    m.add_function(wrap_pyfunction!(hermitian_basis, m)?)?;
    m.add_function(wrap_pyfunction!(gellmann_basis, m)?)?;
    m.add_function(wrap_pyfunction!(frame, m)?)?;
    m.add_function(wrap_pyfunction!(duality_residual, m)?)?;
    m.add_function(wrap_pyfunction!(schmidt_rank, m)?)?;
    m.add_function(wrap_pyfunction!(schmidt_coefficients, m)?)?;
    m.add_function(wrap_pyfunction!(decompose, m)?)?;
    m.add_function(wrap_pyfunction!(opd_cost, m)?)?;
    m.add_function(wrap_pyfunction!(state_from_v, m)?)?;
    m.add_function(wrap_pyfunction!(in_initial_domain, m)?)?;
    m.add_function(wrap_pyfunction!(evolved_violation, m)?)?;
    m.add_function(wrap_pyfunction!(classify, m)?)?;
    m.add_function(wrap_pyfunction!(ellipsoid_ball_containment, m)?)?;
    m.add_function(wrap_pyfunction!(sphere_oracle_max, m)?)?;
    m.add_function(wrap_pyfunction!(example_rates, m)?)?;
    m.add_function(wrap_pyfunction!(channel_apply, m)?)?;
    m.add_function(wrap_pyfunction!(channel_eigenvalues, m)?)?;
    m.add_function(wrap_pyfunction!(evolve_v, m)?)?;
    Ok(())
}
