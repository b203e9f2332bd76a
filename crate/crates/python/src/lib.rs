//! Python bindings. Points cross the boundary as `(x, y)` tuples.

use pyo3::create_exception;
use pyo3::exceptions::PyException;
use pyo3::prelude::*;

use boundary_recon::discretize::{discretize_region, FillConfig, NodeKind, SpacingProfile};
use boundary_recon::rbffd::{disk_harness, idw_transfer, laplacian_weights, DiskOracle, IdwConfig};
use boundary_recon::sim::{self, SimConfig};
use boundary_recon::{Error, Point2};

create_exception!(boundary_recon, BoundaryReconError, PyException);

fn err(e: Error) -> PyErr {
    BoundaryReconError::new_err(e.to_string())
}

fn points(xy: Vec<(f64, f64)>) -> Vec<Point2> {
    xy.into_iter().map(|(x, y)| Point2::new(x, y)).collect()
}

fn tuples(pts: &[Point2]) -> Vec<(f64, f64)> {
    pts.iter().map(|p| (p.x, p.y)).collect()
}

/// Node positions with their kinds.
type Nodes = (Vec<(f64, f64)>, Vec<&'static str>);

#[pyclass(name = "OrderedBoundary", frozen)]
struct PyOrderedBoundary {
    inner: boundary_recon::OrderedBoundary,
}

#[pymethods]
impl PyOrderedBoundary {
    /// Input index of the j-th point along the curve.
    #[getter]
    fn sigma(&self) -> Vec<usize> {
        self.inner.sigma().to_vec()
    }

    /// Curve position of each input point.
    #[getter]
    fn sigma_inv(&self) -> Vec<usize> {
        self.inner.sigma_inv().to_vec()
    }

    fn ordered_points(&self) -> Vec<(f64, f64)> {
        tuples(&self.inner.ordered_points())
    }

    /// Density diagnostics as a JSON string.
    fn density_report(&self) -> String {
        serde_json::to_string(&boundary_recon::validate_density(&self.inner)).expect("report serializes")
    }

    fn __len__(&self) -> usize {
        self.inner.len()
    }
}

#[pyfunction]
fn order_points(points_xy: Vec<(f64, f64)>) -> PyResult<PyOrderedBoundary> {
    let inner = boundary_recon::order_points(points(points_xy)).map_err(err)?;
    Ok(PyOrderedBoundary { inner })
}

#[pyclass(name = "PeriodicSpline", frozen)]
struct PyPeriodicSpline {
    inner: boundary_recon::PeriodicSpline,
}

#[pymethods]
impl PyPeriodicSpline {
    #[new]
    fn new(points_xy: Vec<(f64, f64)>) -> PyResult<Self> {
        let inner = boundary_recon::PeriodicSpline::through(&points(points_xy)).map_err(err)?;
        Ok(Self { inner })
    }

    #[getter]
    fn period(&self) -> f64 {
        self.inner.period()
    }

    #[getter]
    fn knots(&self) -> Vec<f64> {
        self.inner.knots().to_vec()
    }

    fn eval(&self, t: f64) -> (f64, f64) {
        let p = self.inner.eval(t);
        (p.x, p.y)
    }

    #[pyo3(signature = (t, order = 1))]
    fn derivative(&self, t: f64, order: u8) -> (f64, f64) {
        let p = self.inner.eval_derivative(t, order);
        (p.x, p.y)
    }

    fn total_length(&self) -> f64 {
        self.inner.total_length()
    }

    fn to_json(&self) -> String {
        serde_json::to_string(&self.inner).expect("spline serializes")
    }
}

#[pyclass(name = "ReconstructedDomain", frozen)]
struct PyDomain {
    inner: boundary_recon::ReconstructedDomain,
}

#[pymethods]
impl PyDomain {
    /// Orders, fits and orients an unordered boundary sample.
    #[new]
    fn new(points_xy: Vec<(f64, f64)>) -> PyResult<Self> {
        let inner = boundary_recon::ReconstructedDomain::from_unordered(points(points_xy)).map_err(err)?;
        Ok(Self { inner })
    }

    #[getter]
    fn orientation_c(&self) -> f64 {
        self.inner.orientation_c()
    }

    #[getter]
    fn spline(&self) -> PyPeriodicSpline {
        PyPeriodicSpline { inner: self.inner.spline().clone() }
    }

    fn contains(&self, x: f64, y: f64) -> bool {
        self.inner.contains(Point2::new(x, y))
    }

    fn contains_many(&self, points_xy: Vec<(f64, f64)>) -> Vec<bool> {
        points_xy.into_iter().map(|(x, y)| self.inner.contains(Point2::new(x, y))).collect()
    }

    fn nearest_parameter(&self, x: f64, y: f64) -> f64 {
        self.inner.nearest_parameter(Point2::new(x, y))
    }

    fn distance(&self, x: f64, y: f64) -> f64 {
        self.inner.distance(Point2::new(x, y))
    }

    fn outward_normal(&self, t: f64) -> (f64, f64) {
        let n = self.inner.outward_normal(t);
        (n.x, n.y)
    }
}

/// Nodes for the region inside `outer` (and outside `inner`, if given).
/// Returns `(points, kinds)` with kinds in {"outer", "dendrite", "interior"}.
#[pyfunction]
#[pyo3(signature = (outer, h_max, inner = None, h_min = None, transition_radius = 0.3, seed = 0))]
fn discretize(
    outer: &PyDomain,
    h_max: f64,
    inner: Option<PyRef<'_, PyDomain>>,
    h_min: Option<f64>,
    transition_radius: f64,
    seed: u64,
) -> PyResult<Nodes> {
    let inner_dom = inner.as_ref().map(|d| &d.inner);
    let profile = match inner_dom {
        Some(d) => SpacingProfile::new(h_min.unwrap_or(h_max), h_max, d.ordered().points().to_vec(), transition_radius),
        None => SpacingProfile::uniform(h_max),
    }
    .map_err(err)?;
    let config = FillConfig { seed, ..FillConfig::default() };
    let d = discretize_region(&outer.inner, inner_dom, &profile, &config).map_err(err)?;
    Ok((tuples(&d.positions()), d.kinds().into_iter().map(NodeKind::as_str).collect()))
}

/// Laplacian weights at the first of the given stencil points.
#[pyfunction]
fn laplacian_stencil(points_xy: Vec<(f64, f64)>) -> PyResult<Vec<f64>> {
    laplacian_weights(&points(points_xy)).map_err(err)
}

#[pyfunction]
#[pyo3(signature = (sources, values, targets, k_sources = 4, power = 2.0))]
fn idw(sources: Vec<(f64, f64)>, values: Vec<f64>, targets: Vec<(f64, f64)>, k_sources: usize, power: f64) -> PyResult<Vec<f64>> {
    idw_transfer(&points(sources), &values, &points(targets), &IdwConfig { k_sources, power }).map_err(err)
}

/// Unit-disk Poisson problem with exact solution 1 - x² - y². Returns a dict
/// with `nodes`, `max_error`, `relative_residual`, `iterations` and
/// `wall_time_seconds`.
#[pyfunction]
#[pyo3(signature = (spacing = 0.057, stencil_size = 12, seed = 0))]
fn poisson_disk(py: Python<'_>, spacing: f64, stencil_size: usize, seed: u64) -> PyResult<Py<PyAny>> {
    let r = disk_harness(spacing, DiskOracle::Paraboloid, stencil_size, seed).map_err(err)?;
    let json = serde_json::to_string(&r).expect("report serializes");
    Ok(py.import("json")?.call_method1("loads", (json,))?.unbind())
}

#[pyfunction]
fn boundary_velocity(x: f64, y: f64, nx: f64, ny: f64, v_d: f64) -> (f64, f64) {
    let v = sim::boundary_velocity(Point2::new(x, y), Point2::new(nx, ny), v_d);
    (v.x, v.y)
}

/// Step-by-step access to the dendrite simulation.
#[pyclass(name = "Simulation")]
struct PySimulation {
    inner: sim::Simulation,
}

#[pymethods]
impl PySimulation {
    /// `config_json` mirrors the `simulate` CLI config; `"{}"` gives defaults.
    #[new]
    #[pyo3(signature = (config_json = "{}"))]
    fn new(config_json: &str) -> PyResult<Self> {
        let config = SimConfig::from_json(config_json).map_err(err)?;
        Ok(Self { inner: sim::Simulation::new(config).map_err(err)? })
    }

    /// Advances one step and returns its record as a JSON string.
    fn step(&mut self) -> PyResult<String> {
        let record = self.inner.step().map_err(err)?;
        Ok(serde_json::to_string(&record).expect("record serializes"))
    }

    #[getter]
    fn step_index(&self) -> usize {
        self.inner.state().step
    }

    fn dendrite(&self) -> Vec<(f64, f64)> {
        tuples(&self.inner.state().dendrite_positions())
    }

    fn dendrite_area(&self) -> f64 {
        self.inner.state().dendrite_area()
    }

    /// `(points, temperatures, kinds)` of the current field.
    fn field(&self) -> (Vec<(f64, f64)>, Vec<f64>, Vec<&'static str>) {
        let f = &self.inner.state().field;
        (tuples(&f.nodes), f.values.clone(), f.kinds.iter().map(|k| k.as_str()).collect())
    }
}

#[pymodule]
#[pyo3(name = "boundary_recon")]
fn boundary_recon_py(m: &Bound<'_, PyModule>) -> PyResult<()> {
    m.add("BoundaryReconError", m.py().get_type::<BoundaryReconError>())?;
    m.add_class::<PyOrderedBoundary>()?;
    m.add_class::<PyPeriodicSpline>()?;
    m.add_class::<PyDomain>()?;
    m.add_class::<PySimulation>()?;
    m.add_function(wrap_pyfunction!(order_points, m)?)?;
    m.add_function(wrap_pyfunction!(discretize, m)?)?;
    m.add_function(wrap_pyfunction!(laplacian_stencil, m)?)?;
    m.add_function(wrap_pyfunction!(idw, m)?)?;
    m.add_function(wrap_pyfunction!(poisson_disk, m)?)?;
    m.add_function(wrap_pyfunction!(boundary_velocity, m)?)?;
    Ok(())
}
