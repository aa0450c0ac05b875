//! Python bindings for the `boostcav` core.
//!
//! Results come back as plain dicts and tuples; invalid input raises
//! `ValueError`, numerical failures raise `RuntimeError`.

use boostcav::modes::{mode_frequency, Cavity1D, Cavity2D, Scheme, SpacetimeMode};
use boostcav::observables::{self, mass_shell_residual, Route};
use boostcav::rect2d::{self, Route2D};
use boostcav::regsum::{FinitePart, RegConfig, RegMethod};
use boostcav::verify::{run_checks, VerifyOptions};
use boostcav::Error;
use num_complex::Complex64;
use pyo3::exceptions::{PyRuntimeError, PyValueError};
use pyo3::prelude::*;
use pyo3::types::PyDict;

fn to_py(err: Error) -> PyErr {
    match err {
        Error::InvalidLength(_)
        | Error::InvalidVelocity(_)
        | Error::InvalidModeIndex(_)
        | Error::InvalidArgument(_)
        | Error::InvalidConfig(_)
        | Error::Underdetermined { .. }
        | Error::UnsupportedMethod(_)
        | Error::OutsideCavity { .. } => PyValueError::new_err(err.to_string()),
        _ => PyRuntimeError::new_err(err.to_string()),
    }
}

fn parse<T: std::str::FromStr>(s: &str) -> PyResult<T>
where
    T::Err: std::fmt::Display,
{
    s.parse().map_err(|e: T::Err| PyValueError::new_err(e.to_string()))
}

fn part(fp: &FinitePart) -> (f64, f64) {
    (fp.value, fp.error_estimate)
}

/// Casimir energy m0 of a static 1D cavity as `(value, error)`.
#[pyfunction]
#[pyo3(signature = (length, method = "zeta"))]
fn static_m0(length: f64, method: &str) -> PyResult<(f64, f64)> {
    let cfg = RegConfig::for_method(parse::<RegMethod>(method)?);
    observables::static_m0(length, &cfg).map(|fp| part(&fp)).map_err(to_py)
}

/// Electromagnetic parallel-plate energy per area and its derivative in `a`.
#[pyfunction]
fn plate_energy(a: f64) -> PyResult<(f64, f64)> {
    observables::em_plate_energy_per_area(a).map_err(to_py)
}

/// Lab frequency of mode `n`.
#[pyfunction]
fn frequency(scheme: &str, length: f64, v: f64, n: u32) -> PyResult<f64> {
    let cavity = Cavity1D::new(length, v).map_err(to_py)?;
    mode_frequency(parse(scheme)?, &cavity, n).map_err(to_py)
}

/// Normalized mode value u_n(t, x); raises outside the moving walls.
#[pyfunction]
fn mode_value(scheme: &str, length: f64, v: f64, n: u32, t: f64, x: f64) -> PyResult<Complex64> {
    let cavity = Cavity1D::new(length, v).map_err(to_py)?;
    let mode = SpacetimeMode::new(parse(scheme)?, cavity, n).map_err(to_py)?;
    mode.value(t, x).map_err(to_py)
}

/// Boosted energy and momentum with the shell residual E² − P² − m0².
#[pyfunction]
#[pyo3(signature = (scheme, length, v, route = "closed-form"))]
fn boosted_em<'py>(py: Python<'py>, scheme: &str, length: f64, v: f64, route: &str) -> PyResult<Bound<'py, PyDict>> {
    let scheme: Scheme = parse(scheme)?;
    let cfg = RegConfig::zeta();
    let cavity = Cavity1D::new(length, v).map_err(to_py)?;
    let em = observables::boosted_em(scheme, &cavity, parse::<Route>(route)?, &cfg).map_err(to_py)?;
    let m0 = observables::static_m0(length, &cfg).map_err(to_py)?;
    let d = PyDict::new(py);
    d.set_item("energy", em.energy)?;
    d.set_item("momentum", em.momentum)?;
    d.set_item("error", em.error)?;
    d.set_item("shell_residual", mass_shell_residual(&em, m0.value))?;
    d.set_item("m0", m0.value)?;
    Ok(d)
}

/// Velocity sweep; one dict per grid point, sorted by v.
#[pyfunction]
#[pyo3(signature = (scheme, length, velocities, route = "closed-form"))]
fn sweep<'py>(
    py: Python<'py>,
    scheme: &str,
    length: f64,
    velocities: Vec<f64>,
    route: &str,
) -> PyResult<Vec<Bound<'py, PyDict>>> {
    let table =
        observables::sweep(parse(scheme)?, length, &velocities, parse(route)?, &RegConfig::zeta()).map_err(to_py)?;
    table
        .rows
        .iter()
        .map(|r| {
            let d = PyDict::new(py);
            d.set_item("v", r.velocity)?;
            d.set_item("E", r.energy)?;
            d.set_item("P", r.momentum)?;
            d.set_item("shell_residual", r.shell_residual)?;
            d.set_item("E_point_particle", r.point_energy)?;
            d.set_item("P_point_particle", r.point_momentum)?;
            Ok(d)
        })
        .collect()
}

/// Cutoff-regularized finite parts of the rectangle as `{name: (value, error)}`.
#[pyfunction]
fn finite_parts_2d<'py>(py: Python<'py>, a: f64, b: f64) -> PyResult<Bound<'py, PyDict>> {
    let cavity = Cavity2D::new(a, b, 0.0).map_err(to_py)?;
    let parts = rect2d::finite_parts_2d(&cavity, &RegConfig::cutoff_2d()).map_err(to_py)?;
    let d = PyDict::new(py);
    d.set_item("U", part(&parts.u))?;
    d.set_item("W", part(&parts.w))?;
    d.set_item("S_omega", part(&parts.s_omega))?;
    d.set_item("S_k", part(&parts.s_k))?;
    Ok(d)
}

/// Boosted rectangle: E_m, E_s, P_s and the shell residual with errors.
#[pyfunction]
#[pyo3(signature = (a, b, v, route = "quadrature"))]
fn rect2d_em<'py>(py: Python<'py>, a: f64, b: f64, v: f64, route: &str) -> PyResult<Bound<'py, PyDict>> {
    let cavity = Cavity2D::new(a, b, v).map_err(to_py)?;
    let r = rect2d::boosted_em_2d(&cavity, parse::<Route2D>(route)?, &RegConfig::cutoff_2d()).map_err(to_py)?;
    let d = PyDict::new(py);
    d.set_item("E_m", (r.e_m, r.e_m_error))?;
    d.set_item("E_s", (r.energy, r.energy_error))?;
    d.set_item("P_s", (r.momentum, r.momentum_error))?;
    d.set_item("shell_residual", (r.shell_residual, r.shell_residual_error))?;
    Ok(d)
}

/// Runs the invariant suite; returns `(name, passed, measured, tolerance)` tuples.
#[pyfunction]
#[pyo3(signature = (only = None))]
fn verify(only: Option<String>) -> Vec<(String, bool, f64, f64)> {
    run_checks(&VerifyOptions { only, ..Default::default() })
        .into_iter()
        .map(|c| (c.name.to_string(), c.passed, c.measured, c.tolerance))
        .collect()
}

#[pymodule]
pub fn pyboostcav(m: &Bound<'_, PyModule>) -> PyResult<()> {
    m.add_function(wrap_pyfunction!(static_m0, m)?)?;
    m.add_function(wrap_pyfunction!(plate_energy, m)?)?;
    m.add_function(wrap_pyfunction!(frequency, m)?)?;
    m.add_function(wrap_pyfunction!(mode_value, m)?)?;
    m.add_function(wrap_pyfunction!(boosted_em, m)?)?;
    m.add_function(wrap_pyfunction!(sweep, m)?)?;
    m.add_function(wrap_pyfunction!(finite_parts_2d, m)?)?;
    m.add_function(wrap_pyfunction!(rect2d_em, m)?)?;
    m.add_function(wrap_pyfunction!(verify, m)?)?;
    Ok(())
}
