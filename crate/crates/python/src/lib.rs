//! Python bindings. Users are 1-based on this side, as in scenario files.

use std::collections::BTreeMap;

use ldic_core::counterexamples::{builtin_counterexamples, class_label, class_topology, replay};
use ldic_core::network::{components, enumerate_topology_classes, GainMatrix};
use ldic_core::oracle::brute_force_sum_capacity;
use ldic_core::reduction::genie_reduce as reduce;
use ldic_core::scenario::Scenario;
use ldic_core::strategy::simulate as run_strategy;
use ldic_core::universal::{no_universal_strategy_search, DEFAULT_NODE_BUDGET};
use ldic_core::views::{node_view, NodeId};
use ldic_core::Error;
use pyo3::exceptions::{PyRuntimeError, PyValueError};
use pyo3::prelude::*;
use pyo3::types::PyDict;

pyo3::create_exception!(ldic, GuardRefused, PyRuntimeError);

fn py_err(e: Error) -> PyErr {
    match e {
        Error::Parse { .. }
        | Error::Topology(_)
        | Error::InvalidGain { .. }
        | Error::Dimension { .. } => PyValueError::new_err(e.to_string()),
        Error::SizeGuard { .. } => GuardRefused::new_err(e.to_string()),
        other => PyRuntimeError::new_err(other.to_string()),
    }
}

fn one_based(users: &[usize]) -> Vec<usize> {
    users.iter().map(|u| u + 1).collect()
}

/// Gains of a channel, keyed by 1-based (transmitter, receiver).
#[pyclass(name = "GainMatrix", frozen)]
struct PyGainMatrix(GainMatrix);

#[pymethods]
impl PyGainMatrix {
    #[new]
    fn new(users: usize, links: Vec<(usize, usize, usize)>) -> PyResult<Self> {
        if links.iter().any(|&(t, r, _)| t == 0 || r == 0) {
            return Err(PyValueError::new_err("users are numbered from 1"));
        }
        let zero_based: Vec<_> = links.iter().map(|&(t, r, g)| (t - 1, r - 1, g)).collect();
        GainMatrix::from_links(users, &zero_based)
            .map(Self)
            .map_err(py_err)
    }

    /// Parses scenario text.
    #[staticmethod]
    fn parse(text: &str) -> PyResult<Self> {
        Scenario::parse(text).map(|s| Self(s.gains)).map_err(py_err)
    }

    #[getter]
    fn users(&self) -> usize {
        self.0.users()
    }

    #[getter]
    fn levels(&self) -> usize {
        self.0.levels()
    }

    fn links(&self) -> Vec<(usize, usize, usize)> {
        self.0.links().map(|(t, r, g)| (t + 1, r + 1, g)).collect()
    }

    fn __str__(&self) -> String {
        self.0.to_string()
    }

    fn __repr__(&self) -> String {
        format!("GainMatrix({})", self.0)
    }
}

/// Components as (members, shape) pairs.
#[pyfunction]
fn classify(gm: &PyGainMatrix) -> Vec<(Vec<usize>, String)> {
    components(gm.0.topology())
        .into_iter()
        .map(|c| (one_based(&c.members), c.configuration.to_string()))
        .collect()
}

#[pyfunction]
#[pyo3(signature = (gm, genie = false))]
fn simulate<'py>(py: Python<'py>, gm: &PyGainMatrix, genie: bool) -> PyResult<Bound<'py, PyDict>> {
    let sim = run_strategy(&gm.0, genie).map_err(py_err)?;
    let d = PyDict::new(py);
    d.set_item("rates", sim.rates().as_slice().to_vec())?;
    d.set_item("sum", sim.rates().sum())?;
    d.set_item(
        "cases",
        sim.cases.iter().map(|c| c.to_string()).collect::<Vec<_>>(),
    )?;
    d.set_item(
        "codebooks",
        sim.strategy
            .codebooks()
            .iter()
            .map(|c| c.to_string())
            .collect::<Vec<_>>(),
    )?;
    d.set_item("decodable", sim.decodability.all())?;
    Ok(d)
}

/// Linear single-shot sum capacity with a witness.
#[pyfunction]
fn oracle<'py>(py: Python<'py>, gm: &PyGainMatrix) -> PyResult<Bound<'py, PyDict>> {
    let r = brute_force_sum_capacity(&gm.0).map_err(py_err)?;
    let d = PyDict::new(py);
    d.set_item("sum", r.sum)?;
    d.set_item("rates", r.rates.as_slice().to_vec())?;
    d.set_item(
        "codebooks",
        r.encoders.iter().map(|c| c.to_string()).collect::<Vec<_>>(),
    )?;
    Ok(d)
}

/// Links a node such as "T1" or "R3" knows, with their gains.
#[pyfunction]
#[pyo3(signature = (gm, node, genie = false))]
fn view(gm: &PyGainMatrix, node: &str, genie: bool) -> PyResult<BTreeMap<(usize, usize), usize>> {
    let node: NodeId = node.parse().map_err(py_err)?;
    let v = node_view(&gm.0, node, genie).map_err(py_err)?;
    Ok(v.known
        .iter()
        .map(|(&(t, r), &g)| ((t + 1, r + 1), g))
        .collect())
}

/// Replays every built-in instance.
#[pyfunction]
fn counterexamples<'py>(py: Python<'py>) -> PyResult<Vec<Bound<'py, PyDict>>> {
    builtin_counterexamples()
        .iter()
        .map(|c| {
            let r = replay(c).map_err(py_err)?;
            let d = PyDict::new(py);
            d.set_item("label", r.label.to_string())?;
            d.set_item("forced_sum", r.forced_sum)?;
            d.set_item("centralized_sum", r.centralized_sum)?;
            d.set_item("oracle_sum", r.oracle_sum)?;
            d.set_item("passed", r.passed())?;
            d.set_item(
                "failed_steps",
                r.failed_steps()
                    .map(|s| s.step.to_string())
                    .collect::<Vec<_>>(),
            )?;
            Ok(d)
        })
        .collect()
}

/// Label, orbit size, cross links, qualifies.
type ClassRow = (Option<String>, usize, Vec<(usize, usize)>, bool);

/// Orbits of cross-link sets.
#[pyfunction]
#[pyo3(signature = (users = 3))]
fn enumerate_classes(users: usize) -> PyResult<Vec<ClassRow>> {
    let classes = enumerate_topology_classes(users).map_err(py_err)?;
    Ok(classes
        .into_iter()
        .map(|c| {
            let t = &c.representative;
            (
                class_label(t).map(String::from),
                c.orbit_size,
                t.cross_links().map(|(a, b)| (a + 1, b + 1)).collect(),
                t.qualifies(),
            )
        })
        .collect())
}

/// "feasible", "infeasible" or "undetermined" for a three-user class label.
#[pyfunction]
#[pyo3(signature = (label, gain_bound = 1, budget = DEFAULT_NODE_BUDGET))]
fn search_universal(label: char, gain_bound: usize, budget: u64) -> PyResult<&'static str> {
    let t = class_topology(label)
        .ok_or_else(|| PyValueError::new_err(format!("unknown class `{label}`")))?;
    let r = no_universal_strategy_search(&t, gain_bound, budget, false).map_err(py_err)?;
    Ok(r.verdict())
}

/// Three users of a non-qualifying component and the rule that picked them.
#[pyfunction]
fn genie_reduce(gm: &PyGainMatrix) -> PyResult<(Vec<usize>, String)> {
    let r = reduce(gm.0.topology()).map_err(py_err)?;
    Ok((one_based(&r.users), r.case.to_string()))
}

#[pymodule]
fn ldic(m: &Bound<'_, PyModule>) -> PyResult<()> {
    m.add_class::<PyGainMatrix>()?;
    m.add("GuardRefused", m.py().get_type::<GuardRefused>())?;
    m.add_function(wrap_pyfunction!(classify, m)?)?;
    m.add_function(wrap_pyfunction!(simulate, m)?)?;
    m.add_function(wrap_pyfunction!(oracle, m)?)?;
    m.add_function(wrap_pyfunction!(view, m)?)?;
    m.add_function(wrap_pyfunction!(counterexamples, m)?)?;
    m.add_function(wrap_pyfunction!(enumerate_classes, m)?)?;
    m.add_function(wrap_pyfunction!(search_universal, m)?)?;
    m.add_function(wrap_pyfunction!(genie_reduce, m)?)?;
    Ok(())
}
