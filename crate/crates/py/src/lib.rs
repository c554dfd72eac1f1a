//! Python bindings: grids and grid functions, envelopes, sup-means and
//! reductions, the dyadic measure construction, capped potentials, and the
//! three half-plane experiments.
//!
//! Option structs cross the boundary as plain dicts merged over the Rust
//! defaults; reports come back as dicts.

use majorant_core::averaging::{default_radii, hyperbolic_sup_mean};
use majorant_core::dyadic::{self, CircleMeasure, DyadicData};
use majorant_core::envelope::log_lipschitz_envelope;
use majorant_core::experiments::{self, default_cutoffs, CurveSpec, RateSpec};
use majorant_core::geometry::{self, mobius_involution};
use majorant_core::grid::{self, Interpolation};
use majorant_core::kernels::{CappedPotential, ZeroSet};
use majorant_core::reduction::{self, ReduceOptions};
use majorant_core::{Domain, MajorantError, Point};
use num_complex::Complex64;
use pyo3::exceptions::{PyKeyError, PyValueError};
use pyo3::prelude::*;
use pyo3::types::PyDict;
use serde::de::DeserializeOwned;
use serde::Serialize;
use serde_json::Value;

fn err(e: MajorantError) -> PyErr {
    PyValueError::new_err(e.to_string())
}

fn domain(name: &str) -> PyResult<Domain> {
    match name {
        "disk" => Ok(Domain::Disk),
        "half-plane" | "half_plane" => Ok(Domain::HalfPlane),
        other => Err(PyValueError::new_err(format!("unknown domain `{other}`"))),
    }
}

fn to_py(py: Python<'_>, value: &impl Serialize) -> PyResult<Py<PyAny>> {
    let text = serde_json::to_string(value).map_err(|e| PyValueError::new_err(e.to_string()))?;
    Ok(py.import("json")?.call_method1("loads", (text,))?.unbind())
}

fn merge(base: &mut Value, incoming: Value, path: &str) -> PyResult<()> {
    match (base, incoming) {
        (Value::Object(b), Value::Object(i)) => {
            for (key, value) in i {
                let child = if path.is_empty() { key.clone() } else { format!("{path}.{key}") };
                match b.get_mut(&key) {
                    Some(slot) if slot.is_object() => merge(slot, value, &child)?,
                    Some(slot) => *slot = value,
                    None => return Err(PyKeyError::new_err(format!("unknown option `{child}`"))),
                }
            }
            Ok(())
        }
        (slot, value) => {
            *slot = value;
            Ok(())
        }
    }
}

/// The report as a dict, with attachments under `attachments[name]`.
fn report_to_py(py: Python<'_>, report: &experiments::ExperimentReport) -> PyResult<Py<PyAny>> {
    let out = to_py(py, report)?;
    let attachments = PyDict::new(py);
    for a in &report.attachments {
        attachments.set_item(&a.name, to_py(py, a)?)?;
    }
    out.bind(py).set_item("attachments", attachments)?;
    Ok(out)
}

/// Defaults of `T` with the entries of `overrides` laid on top.
fn options<T: Default + Serialize + DeserializeOwned>(overrides: Option<&Bound<'_, PyDict>>) -> PyResult<T> {
    let Some(dict) = overrides else {
        return Ok(T::default());
    };
    let text: String = dict.py().import("json")?.call_method1("dumps", (dict,))?.extract()?;
    let incoming: Value = serde_json::from_str(&text).map_err(|e| PyValueError::new_err(e.to_string()))?;
    let mut tree = serde_json::to_value(T::default()).map_err(|e| PyValueError::new_err(e.to_string()))?;
    merge(&mut tree, incoming, "")?;
    serde_json::from_value(tree).map_err(|e| PyValueError::new_err(e.to_string()))
}

#[pyfunction]
#[pyo3(signature = (z, w, domain = "disk"))]
fn hyperbolic_distance(z: Complex64, w: Complex64, domain: &str) -> PyResult<f64> {
    let d = self::domain(domain)?;
    let (z, w) = (Point::new(z, d).map_err(err)?, Point::new(w, d).map_err(err)?);
    geometry::hyperbolic_distance(&z, &w).map_err(err)
}

#[pyfunction]
#[pyo3(signature = (z, w, domain = "disk"))]
fn pseudo_distance(z: Complex64, w: Complex64, domain: &str) -> PyResult<f64> {
    let d = self::domain(domain)?;
    let (z, w) = (Point::new(z, d).map_err(err)?, Point::new(w, d).map_err(err)?);
    geometry::pseudo_distance(&z, &w).map_err(err)
}

/// The involution of the domain exchanging `a` and the base point.
#[pyfunction]
#[pyo3(signature = (a, z, domain = "disk"))]
fn mobius(a: Complex64, z: Complex64, domain: &str) -> PyResult<Complex64> {
    let d = self::domain(domain)?;
    let (a, z) = (Point::new(a, d).map_err(err)?, Point::new(z, d).map_err(err)?);
    Ok(mobius_involution(&a, &z).map_err(err)?.z())
}

/// Polar grid `tanh(iΔρ)·e^{2πim/Nθ}` on the disk.
#[pyclass(frozen, module = "majorant")]
#[derive(Clone, Copy)]
struct DiskGrid(grid::DiskGrid);

#[pymethods]
impl DiskGrid {
    #[new]
    fn new(d_rho: f64, n_rho: usize, n_theta: usize) -> PyResult<Self> {
        Ok(Self(grid::DiskGrid::new(d_rho, n_rho, n_theta).map_err(err)?))
    }

    #[staticmethod]
    fn covering(r_max: f64, d_rho: f64, n_theta: usize) -> PyResult<Self> {
        Ok(Self(grid::DiskGrid::covering(r_max, d_rho, n_theta).map_err(err)?))
    }

    #[getter]
    fn d_rho(&self) -> f64 {
        self.0.d_rho()
    }

    #[getter]
    fn n_rho(&self) -> usize {
        self.0.n_rho()
    }

    #[getter]
    fn n_theta(&self) -> usize {
        self.0.n_theta()
    }

    #[getter]
    fn r_max(&self) -> f64 {
        self.0.r_max()
    }

    fn __len__(&self) -> usize {
        self.0.len()
    }

    fn points(&self) -> Vec<Complex64> {
        self.0.points()
    }

    fn __repr__(&self) -> String {
        format!(
            "DiskGrid(d_rho={}, n_rho={}, n_theta={})",
            self.0.d_rho(),
            self.0.n_rho(),
            self.0.n_theta()
        )
    }
}

#[pyclass(frozen, module = "majorant")]
#[derive(Clone)]
struct GridFunction(grid::GridFunction);

#[pymethods]
impl GridFunction {
    #[new]
    fn new(grid: &DiskGrid, values: Vec<f64>) -> PyResult<Self> {
        Ok(Self(grid::GridFunction::new(grid.0, values).map_err(err)?))
    }

    /// Samples a Python callable `complex -> float` at every grid point.
    #[staticmethod]
    fn from_callable(grid: &DiskGrid, f: &Bound<'_, PyAny>) -> PyResult<Self> {
        let values = grid
            .0
            .points()
            .into_iter()
            .map(|z| f.call1((z,))?.extract::<f64>())
            .collect::<PyResult<Vec<f64>>>()?;
        Self::new(grid, values)
    }

    #[staticmethod]
    fn from_csv(text: &str) -> PyResult<Self> {
        Ok(Self(grid::GridFunction::from_csv(text).map_err(err)?))
    }

    fn to_csv(&self) -> String {
        self.0.to_csv()
    }

    #[getter]
    fn grid(&self) -> DiskGrid {
        DiskGrid(*self.0.grid())
    }

    fn values(&self) -> Vec<f64> {
        self.0.values().to_vec()
    }

    fn at_origin(&self) -> f64 {
        self.0.at_origin()
    }

    fn max_finite(&self) -> f64 {
        self.0.max_finite()
    }

    /// `None` outside the grid.
    #[pyo3(signature = (z, mode = "cubic"))]
    fn interpolate(&self, z: Complex64, mode: &str) -> PyResult<Option<f64>> {
        let mode = match mode {
            "nearest" => Interpolation::Nearest,
            "bilinear" => Interpolation::Bilinear,
            "cubic" => Interpolation::Cubic,
            other => return Err(PyValueError::new_err(format!("unknown interpolation `{other}`"))),
        };
        Ok(self.0.interpolate(z, mode))
    }

    fn __len__(&self) -> usize {
        self.0.values().len()
    }
}

#[pyfunction]
fn envelope(phi: &GridFunction, c: f64) -> PyResult<GridFunction> {
    Ok(GridFunction(log_lipschitz_envelope(&phi.0, c).map_err(err)?))
}

/// `Mf = max(f, sup_r A_r f)` over `radii` (defaults to the standard set).
#[pyfunction]
#[pyo3(signature = (f, radii = None, options = None))]
fn sup_mean(f: &GridFunction, radii: Option<Vec<f64>>, options: Option<&Bound<'_, PyDict>>) -> PyResult<GridFunction> {
    let opts: ReduceOptions = self::options(options)?;
    let radii = radii.unwrap_or_else(default_radii);
    Ok(GridFunction(hyperbolic_sup_mean(&f.0, &radii, &opts.budget).map_err(err)?))
}

/// Iterates the sup-mean; returns the final grid function and the report.
#[pyfunction]
#[pyo3(signature = (f, options = None))]
fn reduce(py: Python<'_>, f: &GridFunction, options: Option<&Bound<'_, PyDict>>) -> PyResult<(GridFunction, Py<PyAny>)> {
    let opts: ReduceOptions = self::options(options)?;
    let report = py.detach(|| reduction::reduce(&f.0, &opts)).map_err(err)?;
    Ok((GridFunction(report.final_grid().clone()), to_py(py, &report)?))
}

/// Runs the harmonic majorant test; the dict carries `verdict`, the
/// reduction report, and `envelope` and `witness` grid functions.
#[pyfunction]
#[pyo3(signature = (phi, c = 2.0, options = None))]
fn test_majorant<'py>(
    py: Python<'py>,
    phi: &GridFunction,
    c: f64,
    options: Option<&Bound<'py, PyDict>>,
) -> PyResult<Bound<'py, PyDict>> {
    let opts: ReduceOptions = self::options(options)?;
    let test = py.detach(|| reduction::harmonic_majorant_test(&phi.0, c, &opts)).map_err(err)?;
    let out = PyDict::new(py);
    out.set_item("verdict", test.verdict.to_string())?;
    out.set_item("c", test.c)?;
    out.set_item("reduction", to_py(py, &test.reduction)?)?;
    out.set_item("envelope", test.envelope.clone().map(GridFunction))?;
    out.set_item("witness", test.witness().cloned().map(GridFunction))?;
    Ok(out)
}

/// Demands `p_{n,k}` on the dyadic tree.
#[pyclass(frozen, module = "majorant", name = "DyadicData")]
struct Dyadic(DyadicData<f64>);

#[pymethods]
impl Dyadic {
    #[new]
    fn new(depth: u32) -> PyResult<Self> {
        Ok(Self(DyadicData::new(depth).map_err(err)?))
    }

    #[staticmethod]
    fn from_text(text: &str) -> PyResult<Self> {
        Ok(Self(DyadicData::from_text(text).map_err(err)?))
    }

    /// Copy with `p_{n,k}` replaced.
    fn with_value(&self, level: u32, position: u64, value: f64) -> PyResult<Self> {
        let mut data = self.0.clone();
        data.set(level, position, value).map_err(err)?;
        Ok(Self(data))
    }

    #[getter]
    fn depth(&self) -> u32 {
        self.0.depth()
    }

    fn get(&self, level: u32, position: u64) -> PyResult<f64> {
        if level > self.0.depth() || position >= 1u64 << level {
            return Err(PyValueError::new_err(format!("no node ({level}, {position})")));
        }
        Ok(*self.0.get(level, position))
    }

    /// `S_{0,0}`.
    fn packing(&self) -> f64 {
        dyadic::packing_condition(&self.0)
    }

    fn to_text(&self) -> String {
        self.0.to_text()
    }
}

#[pyclass(frozen, module = "majorant", name = "CircleMeasure")]
struct Measure(CircleMeasure);

#[pymethods]
impl Measure {
    #[new]
    fn new(depth: u32, leaves: Vec<f64>) -> PyResult<Self> {
        Ok(Self(CircleMeasure::new(depth, leaves).map_err(err)?))
    }

    #[getter]
    fn depth(&self) -> u32 {
        self.0.depth()
    }

    fn leaves(&self) -> Vec<f64> {
        self.0.leaves().to_vec()
    }

    fn total_mass(&self) -> f64 {
        self.0.total_mass()
    }

    fn arc_mass(&self, level: u32, position: u64) -> f64 {
        self.0.arc_mass(level, position)
    }
}

#[pyfunction]
fn build_dominating_measure(data: &Dyadic) -> Measure {
    Measure(dyadic::build_dominating_measure(&data.0))
}

#[pyfunction]
fn audit_domination(py: Python<'_>, measure: &Measure, data: &Dyadic) -> PyResult<Py<PyAny>> {
    let audit = dyadic::audit_domination(&measure.0, &data.0).map_err(err)?;
    let out = to_py(py, &audit)?;
    out.bind(py).set_item("passed", audit.passed())?;
    Ok(out)
}

/// `log 1/|B|` of unit zeros, capped inside a hyperbolic disc of radius
/// `delta` around each zero.
#[pyclass(frozen, module = "majorant", name = "CappedPotential")]
struct Capped(CappedPotential);

#[pymethods]
impl Capped {
    #[new]
    #[pyo3(signature = (zeros, delta, nodes = 512, domain = "disk"))]
    fn new(zeros: Vec<Complex64>, delta: f64, nodes: usize, domain: &str) -> PyResult<Self> {
        let set = ZeroSet::unit(self::domain(domain)?, &zeros).map_err(err)?;
        Ok(Self(CappedPotential::new(set, delta, nodes).map_err(err)?))
    }

    fn value(&self, z: Complex64) -> f64 {
        self.0.value(z)
    }

    fn __call__(&self, z: Complex64) -> f64 {
        self.0.value(z)
    }

    fn caps(&self) -> Vec<f64> {
        self.0.caps().to_vec()
    }

    #[getter]
    fn delta(&self) -> f64 {
        self.0.delta()
    }
}

#[pyfunction]
#[pyo3(signature = (gamma = 1.0, delta = 0.1, eps = 0.01, options = None))]
fn run_rnotlip(
    py: Python<'_>,
    gamma: f64,
    delta: f64,
    eps: f64,
    options: Option<&Bound<'_, PyDict>>,
) -> PyResult<Py<PyAny>> {
    let opts: experiments::RnotlipOptions = self::options(options)?;
    let report = py.detach(|| experiments::run_rnotlip(gamma, delta, eps, &opts)).map_err(err)?;
    report_to_py(py, &report)
}

/// `s(t) = scale·t^exponent` against the curve `y = x^curve_exponent`.
#[pyfunction]
#[pyo3(signature = (scale = 1.0, exponent = -1.0, curve_exponent = 2.0, cutoffs = None, options = None))]
fn run_sharpmaxf(
    py: Python<'_>,
    scale: f64,
    exponent: f64,
    curve_exponent: f64,
    cutoffs: Option<Vec<f64>>,
    options: Option<&Bound<'_, PyDict>>,
) -> PyResult<Py<PyAny>> {
    let opts: experiments::SharpMaxfOptions = self::options(options)?;
    let s = RateSpec::power(scale, exponent).map_err(err)?;
    let curve = CurveSpec::power(curve_exponent).map_err(err)?;
    let cutoffs = cutoffs.unwrap_or_else(default_cutoffs);
    let report = py
        .detach(|| experiments::run_sharpmaxf(&s, &curve, &cutoffs, &opts))
        .map_err(err)?;
    report_to_py(py, &report)
}

#[pyfunction]
#[pyo3(signature = (scale = 1.0, exponent = -1.0, options = None))]
fn run_anyrate(py: Python<'_>, scale: f64, exponent: f64, options: Option<&Bound<'_, PyDict>>) -> PyResult<Py<PyAny>> {
    let opts: experiments::AnyRateOptions = self::options(options)?;
    let s = RateSpec::power(scale, exponent).map_err(err)?;
    let report = py.detach(|| experiments::run_anyrate(&s, &opts)).map_err(err)?;
    report_to_py(py, &report)
}

#[pymodule]
fn majorant(m: &Bound<'_, PyModule>) -> PyResult<()> {
    m.add_class::<DiskGrid>()?;
    m.add_class::<GridFunction>()?;
    m.add_class::<Dyadic>()?;
    m.add_class::<Measure>()?;
    m.add_class::<Capped>()?;
    m.add_function(wrap_pyfunction!(hyperbolic_distance, m)?)?;
    m.add_function(wrap_pyfunction!(pseudo_distance, m)?)?;
    m.add_function(wrap_pyfunction!(mobius, m)?)?;
    m.add_function(wrap_pyfunction!(envelope, m)?)?;
    m.add_function(wrap_pyfunction!(sup_mean, m)?)?;
    m.add_function(wrap_pyfunction!(reduce, m)?)?;
    m.add_function(wrap_pyfunction!(test_majorant, m)?)?;
    m.add_function(wrap_pyfunction!(build_dominating_measure, m)?)?;
    m.add_function(wrap_pyfunction!(audit_domination, m)?)?;
    m.add_function(wrap_pyfunction!(run_rnotlip, m)?)?;
    m.add_function(wrap_pyfunction!(run_sharpmaxf, m)?)?;
    m.add_function(wrap_pyfunction!(run_anyrate, m)?)?;
    Ok(())
}
