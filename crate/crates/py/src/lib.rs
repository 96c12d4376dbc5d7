//! Python bindings. Point sets are a native class; reports come back as plain dicts.

use std::path::PathBuf;

use pyo3::exceptions::{PyIndexError, PyValueError};
use pyo3::prelude::*;
use pyo3::types::PyDict;

use visblock::blocking::{self, BlockingInstance, BlockingReport};
use visblock::experiment::{self, ExperimentConfig, Task};
use visblock::generate::{self, Generated, GeneratorSpec};
use visblock::geom::{self, format_rational, parse_rational};
use visblock::graph::Budget;
use visblock::midpoints::{self, SearchConfig, SearchStrategy};
use visblock::{crossing, drawings, visibility, RationalPoint};

fn err(e: impl std::fmt::Display) -> PyErr {
    PyValueError::new_err(e.to_string())
}

fn to_py<'py>(py: Python<'py>, v: &impl serde::Serialize) -> PyResult<Bound<'py, PyAny>> {
    let text = serde_json::to_string(v).map_err(err)?;
    py.import("json")?.call_method1("loads", (text,))
}

fn budget(ms: Option<u64>) -> Budget {
    Budget::from_option(ms)
}

fn coordinate(v: &Bound<'_, PyAny>) -> PyResult<num_rational::BigRational> {
    if let Ok(i) = v.extract::<i64>() {
        return Ok(geom::int(i));
    }
    if let Ok(s) = v.extract::<String>() {
        return parse_rational(&s).map_err(err);
    }
    let (n, d): (i64, i64) = v.extract().map_err(|_| {
        PyValueError::new_err("coordinates are ints, \"p/q\" strings or (p, q) pairs")
    })?;
    if d == 0 {
        return Err(PyValueError::new_err("zero denominator"));
    }
    Ok(geom::rat(n, d))
}

/// Finite set of distinct points with exact rational coordinates.
#[pyclass(name = "PointSet", module = "visblock_py", frozen, skip_from_py_object)]
#[derive(Clone)]
struct PyPointSet {
    inner: visblock::PointSet,
}

#[pymethods]
impl PyPointSet {
    #[new]
    #[pyo3(signature = (points, name = "P"))]
    fn new(points: Vec<(Bound<'_, PyAny>, Bound<'_, PyAny>)>, name: &str) -> PyResult<Self> {
        let pts = points
            .iter()
            .map(|(x, y)| Ok(RationalPoint::new(coordinate(x)?, coordinate(y)?)))
            .collect::<PyResult<Vec<_>>>()?;
        Ok(PyPointSet {
            inner: visblock::PointSet::new(name, pts).map_err(err)?,
        })
    }

    #[staticmethod]
    fn from_json(text: &str) -> PyResult<Self> {
        Ok(PyPointSet {
            inner: visblock::PointSet::from_json(text).map_err(err)?,
        })
    }

    fn to_json(&self) -> String {
        self.inner.to_json()
    }

    #[getter]
    fn name(&self) -> &str {
        self.inner.name()
    }

    /// Coordinates as `"p/q"` strings.
    #[getter]
    fn points(&self) -> Vec<(String, String)> {
        self.inner
            .points()
            .iter()
            .map(|p| (format_rational(&p.x), format_rational(&p.y)))
            .collect()
    }

    fn to_floats(&self) -> Vec<(f64, f64)> {
        self.inner.points().iter().map(|p| p.to_f64()).collect()
    }

    fn __len__(&self) -> usize {
        self.inner.len()
    }

    fn __getitem__(&self, i: usize) -> PyResult<(String, String)> {
        let p = self.inner.points().get(i).ok_or_else(|| PyIndexError::new_err(i))?;
        Ok((format_rational(&p.x), format_rational(&p.y)))
    }

    fn __repr__(&self) -> String {
        format!("PointSet({:?}, n={})", self.inner.name(), self.inner.len())
    }

    fn is_general_position(&self) -> bool {
        self.inner.is_general_position()
    }

    fn is_convex_position(&self) -> bool {
        geom::is_convex_position(&self.inner)
    }

    fn max_collinear(&self) -> PyResult<usize> {
        geom::max_collinear(&self.inner).map_err(err)
    }

    fn convex_hull_size(&self) -> PyResult<usize> {
        geom::convex_hull_size(&self.inner).map_err(err)
    }

    /// Maximal lines as lists of point indices.
    fn lines(&self) -> Vec<Vec<usize>> {
        self.inner.lines().iter().map(|l| l.members.clone()).collect()
    }
}

#[pyfunction]
fn grid(w: i64, h: i64) -> PyResult<PyPointSet> {
    Ok(PyPointSet { inner: generate::grid(w, h).map_err(err)? })
}

#[pyfunction]
fn convex_parabola(n: usize) -> PyResult<PyPointSet> {
    Ok(PyPointSet { inner: generate::convex_parabola(n).map_err(err)? })
}

#[pyfunction]
#[pyo3(signature = (n, seed, l = 3, bound = 0))]
fn random_no_l_collinear(n: usize, seed: u64, l: usize, bound: i64) -> PyResult<PyPointSet> {
    Ok(PyPointSet {
        inner: generate::random_no_l_collinear(n, bound, seed, l).map_err(err)?,
    })
}

/// Runs a generator spec given as JSON, e.g. `{"kind": "knn_grid", "n": 4}`.
#[pyfunction]
fn generate_json<'py>(py: Python<'py>, spec: &str) -> PyResult<Bound<'py, PyAny>> {
    let spec: GeneratorSpec = serde_json::from_str(spec).map_err(err)?;
    to_py(py, &generate::generate(&spec).map_err(err)?)
}

#[pyfunction]
fn visibility_edges(p: &PyPointSet) -> PyResult<Vec<(usize, usize)>> {
    Ok(visibility::visibility_graph(&p.inner).map_err(err)?.edges())
}

/// Edge count, diameter, clique number and chromatic number with a colouring.
#[pyfunction]
#[pyo3(signature = (p, budget_ms = None))]
fn visibility_summary<'py>(py: Python<'py>, p: &PyPointSet, budget_ms: Option<u64>) -> PyResult<Bound<'py, PyAny>> {
    let g = visibility::visibility_graph(&p.inner).map_err(err)?;
    let d = py.detach(|| visibility::diameter(&g)).ok();
    let clique = py.detach(|| visibility::clique_number(&g, budget(budget_ms)));
    let chi = py.detach(|| visibility::chromatic_number(&g, budget(budget_ms)));
    let out = PyDict::new(py);
    out.set_item("n", g.n())?;
    out.set_item("edges", g.edge_count())?;
    out.set_item("diameter", d)?;
    out.set_item("clique", to_py(py, &clique)?)?;
    out.set_item("chromatic", to_py(py, &chi)?)?;
    Ok(out.into_any())
}

#[pyfunction]
fn monochromatic_line<'py>(py: Python<'py>, p: &PyPointSet, colours: Vec<usize>) -> PyResult<Option<Vec<usize>>> {
    let k = colours.iter().copied().max().unwrap_or(1);
    let c = visibility::Colouring::new(k, colours).map_err(err)?;
    let line = py.detach(|| visibility::monochromatic_line_check(&p.inner, &c)).map_err(err)?;
    Ok(line.map(|l| l.members))
}

/// Minimum blocking set of all pairs, or of `edges` over the points when given.
#[pyfunction]
#[pyo3(signature = (p, edges = None, budget_ms = None))]
fn min_blocking_set<'py>(
    py: Python<'py>,
    p: &PyPointSet,
    edges: Option<Vec<(usize, usize)>>,
    budget_ms: Option<u64>,
) -> PyResult<Bound<'py, PyAny>> {
    let inst = match edges {
        None => BlockingInstance::all_pairs(&p.inner),
        Some(e) => BlockingInstance::drawing(p.inner.points(), &e),
    }
    .map_err(err)?;
    let b = py.detach(|| blocking::solve(&inst, budget(budget_ms)));
    to_py(py, &BlockingReport::new(&inst, &b))
}

#[pyfunction]
fn triangulation_bound<'py>(py: Python<'py>, p: &PyPointSet) -> PyResult<Bound<'py, PyAny>> {
    to_py(py, &blocking::triangulation_lower_bound(&p.inner).map_err(err)?)
}

#[pyfunction]
fn knn_drawing<'py>(py: Python<'py>, n: usize, parabola: bool) -> PyResult<Bound<'py, PyAny>> {
    let d = if parabola {
        blocking::construct_knn_parabola(n)
    } else {
        blocking::construct_knn_grid(n)
    }
    .map_err(err)?;
    let out = PyDict::new(py);
    out.set_item("drawing", to_py(py, &d)?)?;
    out.set_item("check", to_py(py, &d.verify())?)?;
    Ok(out.into_any())
}

#[pyfunction]
fn sandwich<'py>(py: Python<'py>, p: &PyPointSet) -> PyResult<Bound<'py, PyAny>> {
    to_py(py, &midpoints::sandwich(&p.inner).map_err(err)?)
}

#[pyfunction]
#[pyo3(signature = (n, l = 3, strategy = "random-restart", seed = 0, restarts = None))]
fn low_midpoint_search<'py>(
    py: Python<'py>,
    n: usize,
    l: usize,
    strategy: &str,
    seed: u64,
    restarts: Option<usize>,
) -> PyResult<Bound<'py, PyAny>> {
    let strategy: SearchStrategy = strategy.parse().map_err(err)?;
    let mut cfg = SearchConfig::new(n, l, strategy, seed);
    if let Some(r) = restarts {
        cfg.restarts = r;
    }
    to_py(py, &py.detach(|| midpoints::low_midpoint_search(&cfg)).map_err(err)?)
}

#[pyfunction]
#[pyo3(signature = (p, budget_ms = None))]
fn crossing_partition<'py>(py: Python<'py>, p: &PyPointSet, budget_ms: Option<u64>) -> PyResult<Bound<'py, PyAny>> {
    let part = py
        .detach(|| crossing::crossing_family_partition(&p.inner, budget(budget_ms)))
        .map_err(err)?;
    let out = PyDict::new(py);
    out.set_item("size", part.size())?;
    out.set_item("exact", part.exact)?;
    out.set_item("lower_bound", crossing::partition_lower_bound(p.inner.len()))?;
    out.set_item("classes", part.classes)?;
    Ok(out.into_any())
}

#[pyfunction]
#[pyo3(signature = (n, budget_ms = None))]
fn ngon_census<'py>(py: Python<'py>, n: usize, budget_ms: Option<u64>) -> PyResult<Bound<'py, PyAny>> {
    let c = py
        .detach(|| crossing::regular_ngon_multiplicity(n, budget(budget_ms)))
        .map_err(err)?;
    to_py(py, &c)
}

/// Arc drawing of K_n with its blocking and simplicity checks.
#[pyfunction]
#[pyo3(signature = (n, samples = None))]
fn arc_drawing<'py>(py: Python<'py>, n: usize, samples: Option<usize>) -> PyResult<Bound<'py, PyAny>> {
    let d = drawings::construct_kn_arc_drawing(n).map_err(err)?;
    to_py(py, &py.detach(|| drawings::export(&d, samples)))
}

/// Runs one task on a generated bundle (as JSON) with default parameters.
#[pyfunction]
#[pyo3(signature = (task, generated, budget_ms = None))]
fn run_task<'py>(py: Python<'py>, task: &str, generated: &str, budget_ms: Option<u64>) -> PyResult<Bound<'py, PyAny>> {
    let task: Task = task.parse().map_err(err)?;
    let g: Generated = serde_json::from_str(generated).map_err(err)?;
    let mut cfg = ExperimentConfig::new(generate::GeneratorKind::Grid { w: 1, h: 1 }, &[task]);
    if let Some(ms) = budget_ms {
        cfg.budgets.insert(task, ms);
    }
    let outcome = py.detach(|| experiment::run_task(&cfg, &g, task));
    to_py(py, &outcome)
}

/// Full reproducible run from a config (or manifest) JSON; returns the manifest.
#[pyfunction]
fn run<'py>(py: Python<'py>, config: &str, output_dir: PathBuf) -> PyResult<Bound<'py, PyAny>> {
    let cfg = ExperimentConfig::from_json(config).map_err(err)?;
    let summary = py.detach(|| experiment::run(&cfg, &output_dir)).map_err(err)?;
    to_py(py, &summary.manifest)
}

#[pymodule]
fn visblock_py(m: &Bound<'_, PyModule>) -> PyResult<()> {
    m.add_class::<PyPointSet>()?;
    m.add_function(wrap_pyfunction!(grid, m)?)?;
    m.add_function(wrap_pyfunction!(convex_parabola, m)?)?;
    m.add_function(wrap_pyfunction!(random_no_l_collinear, m)?)?;
    m.add_function(wrap_pyfunction!(generate_json, m)?)?;
    m.add_function(wrap_pyfunction!(visibility_edges, m)?)?;
    m.add_function(wrap_pyfunction!(visibility_summary, m)?)?;
    m.add_function(wrap_pyfunction!(monochromatic_line, m)?)?;
    m.add_function(wrap_pyfunction!(min_blocking_set, m)?)?;
    m.add_function(wrap_pyfunction!(triangulation_bound, m)?)?;
    m.add_function(wrap_pyfunction!(knn_drawing, m)?)?;
    m.add_function(wrap_pyfunction!(sandwich, m)?)?;
    m.add_function(wrap_pyfunction!(low_midpoint_search, m)?)?;
    m.add_function(wrap_pyfunction!(crossing_partition, m)?)?;
    m.add_function(wrap_pyfunction!(ngon_census, m)?)?;
    m.add_function(wrap_pyfunction!(arc_drawing, m)?)?;
    m.add_function(wrap_pyfunction!(run_task, m)?)?;
    m.add_function(wrap_pyfunction!(run, m)?)?;
    m.add("SCHEMA", experiment::SCHEMA)?;
    Ok(())
}
