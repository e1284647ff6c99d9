//! Python bindings: thin wrappers around the graph, drawing, reduction,
//! oracle and decision APIs.

use std::sync::Arc;

use pyo3::exceptions::{PyRuntimeError, PyValueError};
use pyo3::prelude::*;
use pyo3::types::PyDict;

use fanplanar as fp;

fn err(e: fp::Error) -> PyErr {
    match e {
        fp::Error::BudgetExceeded(_) => PyRuntimeError::new_err(e.to_string()),
        _ => PyValueError::new_err(e.to_string()),
    }
}

/// Bipartite graph in the line-based edge-list format.
#[pyclass(frozen)]
struct Graph {
    inner: Arc<fp::BipartiteGraph>,
}

#[pymethods]
impl Graph {
    #[new]
    fn new(text: &str) -> PyResult<Self> {
        Ok(Graph { inner: Arc::new(fp::parse_graph(text).map_err(err)?) })
    }

    fn serialize(&self) -> String {
        self.inner.serialize()
    }

    #[getter]
    fn num_vertices(&self) -> usize {
        self.inner.num_vertices()
    }

    #[getter]
    fn num_edges(&self) -> usize {
        self.inner.num_edges()
    }

    #[getter]
    fn max_degree(&self) -> usize {
        self.inner.max_degree()
    }

    fn x_vertices(&self) -> Vec<String> {
        self.inner.x_vertices().map(str::to_string).collect()
    }

    fn y_vertices(&self) -> Vec<String> {
        self.inner.y_vertices().map(str::to_string).collect()
    }

    fn edges(&self) -> Vec<(String, String)> {
        self.inner.edges().map(|e| (e.x, e.y)).collect()
    }

    fn __repr__(&self) -> String {
        format!(
            "Graph(|X|={}, |Y|={}, m={})",
            self.inner.num_x(),
            self.inner.num_y(),
            self.inner.num_edges()
        )
    }
}

/// 2-layer drawing: one linear order per layer.
#[pyclass(frozen)]
struct Drawing {
    inner: fp::TwoLayerDrawing,
}

#[pymethods]
impl Drawing {
    #[staticmethod]
    fn from_json(graph: &Graph, json: &str) -> PyResult<Self> {
        Ok(Drawing {
            inner: fp::TwoLayerDrawing::from_json(Arc::clone(&graph.inner), json).map_err(err)?,
        })
    }

    #[getter]
    fn x_order(&self) -> Vec<String> {
        self.inner.x_order_ids()
    }

    #[getter]
    fn y_order(&self) -> Vec<String> {
        self.inner.y_order_ids()
    }

    fn to_json(&self) -> String {
        self.inner.to_json()
    }

    fn svg(&self) -> String {
        fp::render_svg(&self.inner, Some(&self.inner.verify(None)))
    }

    /// Crossing report as a dict; pass k to also check k-planarity.
    #[pyo3(signature = (k=None))]
    fn verify<'py>(&self, py: Python<'py>, k: Option<u32>) -> PyResult<Bound<'py, PyDict>> {
        let r = self.inner.verify(k);
        let d = PyDict::new(py);
        d.set_item("fan_planar", r.fan_planar)?;
        d.set_item("max_crossings_per_edge", r.max_crossings_per_edge)?;
        d.set_item("k_planar_for", r.k_planar_for)?;
        d.set_item("within_k", r.within_k)?;
        d.set_item(
            "violating_triple",
            r.violating_triple
                .as_ref()
                .map(|t| t.iter().map(|e| (e.x.clone(), e.y.clone())).collect::<Vec<_>>()),
        )?;
        d.set_item(
            "crossings",
            r.crossings_per_edge
                .iter()
                .map(|(e, &c)| ((e.x.clone(), e.y.clone()), c))
                .collect::<Vec<_>>(),
        )?;
        Ok(d)
    }

    fn __repr__(&self) -> String {
        format!("Drawing(x={:?}, y={:?})", self.inner.x_order_ids(), self.inner.y_order_ids())
    }
}

/// Full pipeline: reductions, rejection lemmas, DP or exhaustive search,
/// certificate lifting. Returns a dict with answer/method/reason/k_used
/// and the certificate Drawing on YES.
#[pyfunction]
#[pyo3(signature = (graph, k=None, force_dp=false))]
fn decide<'py>(
    py: Python<'py>,
    graph: &Graph,
    k: Option<u32>,
    force_dp: bool,
) -> PyResult<Bound<'py, PyDict>> {
    let opts = fp::DecideOptions { k_override: k, force_dp, ..fp::DecideOptions::default() };
    let decision = fp::decide(&graph.inner, &opts).map_err(err)?;
    let d = PyDict::new(py);
    d.set_item("answer", decision.answer.to_string())?;
    d.set_item("method", decision.method.to_string())?;
    d.set_item("reason", decision.reason)?;
    d.set_item("k_used", decision.k_used)?;
    d.set_item(
        "certificate",
        decision.certificate.map(|c| Drawing { inner: c }).map(|c| Py::new(py, c)).transpose()?,
    )?;
    Ok(d)
}

/// Exhaustive search; returns a witness Drawing or None.
#[pyfunction]
#[pyo3(signature = (graph, k=None, max_nodes=None, threads=1))]
fn oracle(
    graph: &Graph,
    k: Option<u32>,
    max_nodes: Option<u64>,
    threads: usize,
) -> PyResult<Option<Drawing>> {
    let budget = fp::SearchBudget {
        max_nodes: max_nodes.unwrap_or(fp::SearchBudget::default().max_nodes),
        max_elapsed: None,
    };
    match fp::oracle::decide_bruteforce_counted(&graph.inner, k, &budget, threads).0 {
        fp::OracleOutcome::Yes(d) => Ok(Some(Drawing { inner: d })),
        fp::OracleOutcome::No => Ok(None),
        fp::OracleOutcome::BudgetExceeded => Err(PyRuntimeError::new_err("oracle budget exceeded")),
    }
}

/// Apply the degree reductions; returns (reduced Graph, trace JSON).
#[pyfunction]
fn reduce_graph(graph: &Graph) -> PyResult<(Graph, String)> {
    let (red, trace) = fp::apply_reductions(&graph.inner);
    Ok((Graph { inner: Arc::new(red) }, trace.to_json()))
}

/// Reinsert reduced-away vertices into a drawing of the reduced graph.
#[pyfunction]
fn lift(graph: &Graph, trace_json: &str, drawing: &Drawing) -> PyResult<Drawing> {
    let trace = fp::ReductionTrace::from_json(trace_json).map_err(err)?;
    let lifted = fp::lift_drawing(&graph.inner, &trace, &drawing.inner).map_err(err)?;
    Ok(Drawing { inner: lifted })
}

/// Smallest k admitting a fan-planar k-planar drawing, or None.
#[pyfunction]
fn min_k(graph: &Graph) -> PyResult<Option<u32>> {
    match fp::min_k(&graph.inner, &fp::SearchBudget::default()) {
        fp::MinKOutcome::Value(k) => Ok(Some(k)),
        fp::MinKOutcome::NotFanPlanar => Ok(None),
        fp::MinKOutcome::BudgetExceeded => Err(PyRuntimeError::new_err("oracle budget exceeded")),
    }
}

/// Seeded random graph with nx+ny vertices and m distinct edges.
#[pyfunction]
fn gen_random(nx: usize, ny: usize, m: usize, seed: u64) -> PyResult<Graph> {
    Ok(Graph { inner: Arc::new(fp::random_graph(nx, ny, m, seed).map_err(err)?) })
}

/// Every labeled graph with the given shape, in mask order.
#[pyfunction]
fn gen_exhaustive(nx: usize, ny: usize) -> Vec<Graph> {
    fp::exhaustive_graphs(nx, ny).map(|g| Graph { inner: Arc::new(g) }).collect()
}

#[pymodule]
fn fanplanar_py(m: &Bound<'_, PyModule>) -> PyResult<()> {
    m.add_class::<Graph>()?;
    m.add_class::<Drawing>()?;
    m.add_function(wrap_pyfunction!(decide, m)?)?;
    m.add_function(wrap_pyfunction!(oracle, m)?)?;
    m.add_function(wrap_pyfunction!(reduce_graph, m)?)?;
    m.add_function(wrap_pyfunction!(lift, m)?)?;
    m.add_function(wrap_pyfunction!(min_k, m)?)?;
    m.add_function(wrap_pyfunction!(gen_random, m)?)?;
    m.add_function(wrap_pyfunction!(gen_exhaustive, m)?)?;
    Ok(())
}
