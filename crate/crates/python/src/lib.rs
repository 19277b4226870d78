use std::collections::BTreeMap;

use cfgflow_core as core;
use cfgflow_core::{AgentDigraph, Coalition, Dag, Flow, Game, Q};
use pyo3::create_exception;
use pyo3::exceptions::PyValueError;
use pyo3::prelude::*;
use pyo3::types::PyDict;

create_exception!(cfgflow, CfgflowError, PyValueError);

fn err(e: core::Error) -> PyErr {
    CfgflowError::new_err(format!("{}: {}", e.kind(), e))
}

fn coalition(agents: Vec<u32>) -> PyResult<Coalition> {
    Coalition::from_agents(agents).map_err(err)
}

fn agents(c: Coalition) -> Vec<u32> {
    c.agents().collect()
}

fn payoffs<'py>(py: Python<'py>, p: &core::PayoffVector) -> PyResult<Bound<'py, PyDict>> {
    let d = PyDict::new(py);
    for (i, x) in &p.pay {
        d.set_item(i, x.clone())?;
    }
    Ok(d)
}

fn check_len(what: &str, got: usize, want: usize) -> PyResult<()> {
    if got != want {
        return Err(CfgflowError::new_err(format!(
            "DomainMismatch: {what} has {got} entries, expected {want}"
        )));
    }
    Ok(())
}

/// A normal set system.
#[pyclass(name = "SetSystem", module = "cfgflow", from_py_object)]
#[derive(Clone)]
struct PySetSystem {
    inner: core::SetSystem,
}

#[pymethods]
impl PySetSystem {
    #[new]
    fn new(ground: Vec<u32>, feasible: Vec<Vec<u32>>) -> PyResult<Self> {
        let family = feasible
            .into_iter()
            .map(coalition)
            .collect::<PyResult<Vec<_>>>()?;
        let inner = core::validate_set_system(coalition(ground)?, &family).map_err(err)?;
        Ok(PySetSystem { inner })
    }

    #[staticmethod]
    fn power_set(ground: Vec<u32>) -> PyResult<Self> {
        let inner = core::SetSystem::power_set(coalition(ground)?).map_err(err)?;
        Ok(PySetSystem { inner })
    }

    #[getter]
    fn ground(&self) -> Vec<u32> {
        agents(self.inner.ground())
    }

    #[getter]
    fn members(&self) -> Vec<Vec<u32>> {
        self.inner.members().iter().map(|&c| agents(c)).collect()
    }

    fn covering_edges(&self) -> Vec<(Vec<u32>, Vec<u32>)> {
        let d = core::covering_digraph(&self.inner);
        d.arcs()
            .iter()
            .map(|&(a, b)| (agents(d.vertex(a)), agents(d.vertex(b))))
            .collect()
    }

    /// Number of maximal paths of the covering digraph.
    fn maximal_paths(&self) -> u128 {
        core::count_paths(&core::covering_digraph(&self.inner)).total_maximal
    }

    fn classify<'py>(&self, py: Python<'py>) -> PyResult<Bound<'py, PyDict>> {
        let k = core::classify(&self.inner);
        let d = PyDict::new(py);
        d.set_item("regular", k.is_regular)?;
        d.set_item("convex_geometry", k.is_convex_geometry)?;
        d.set_item("augmenting", k.is_augmenting)?;
        Ok(d)
    }

    /// Weights of the uniform maximal-path flow, in covering-edge order.
    fn uniform_path_flow(&self) -> Vec<Q> {
        core::uniform_path_flow(&core::covering_digraph(&self.inner)).weights
    }

    /// Shapley-like value of a game given by one worth per member.
    fn shapley_like_value<'py>(
        &self,
        py: Python<'py>,
        worth: Vec<Q>,
    ) -> PyResult<Bound<'py, PyDict>> {
        let d = core::covering_digraph(&self.inner);
        let g = Game::new(&d, worth).map_err(err)?;
        payoffs(py, &core::shapley_like_value(&d, &g).map_err(err)?)
    }

    fn __len__(&self) -> usize {
        self.inner.len()
    }

    fn __repr__(&self) -> String {
        let ms: Vec<String> = self.inner.members().iter().map(|c| c.to_string()).collect();
        format!("SetSystem({}, [{}])", self.inner.ground(), ms.join(", "))
    }
}

/// The product digraph of a coalition configuration. Games and flows are lists
/// aligned with `profiles()` and `edges()`.
#[pyclass(name = "ProductDigraph", module = "cfgflow")]
struct PyProduct {
    pd: core::ProductDigraph,
    systems: Vec<core::SetSystem>,
}

impl PyProduct {
    fn game(&self, worth: Vec<Q>) -> PyResult<Game> {
        Game::new(&self.pd, worth).map_err(err)
    }

    fn flow(&self, weights: Vec<Q>) -> PyResult<Flow> {
        check_len("flow", weights.len(), self.pd.edge_count())?;
        Ok(Flow::new(weights))
    }
}

#[pymethods]
impl PyProduct {
    #[new]
    fn new(n: u32, systems: Vec<PySetSystem>) -> PyResult<Self> {
        let systems: Vec<core::SetSystem> = systems.into_iter().map(|s| s.inner).collect();
        let pd = core::build_product(&systems, n).map_err(err)?;
        Ok(PyProduct { pd, systems })
    }

    /// Build from an instance document (JSON text). Returns the digraph and the
    /// game worths (or None).
    #[staticmethod]
    fn from_json(text: &str) -> PyResult<(Self, Option<Vec<Q>>)> {
        let model = core::io::parse_model(text).map_err(err)?;
        let worth = model.game.map(|g| g.worth);
        Ok((
            PyProduct {
                pd: model.pd,
                systems: model.systems,
            },
            worth,
        ))
    }

    #[getter]
    fn n(&self) -> u32 {
        self.pd.n()
    }

    #[getter]
    fn m(&self) -> usize {
        self.pd.m()
    }

    #[getter]
    fn vertex_count(&self) -> usize {
        self.pd.vertex_count()
    }

    #[getter]
    fn edge_count(&self) -> usize {
        self.pd.edge_count()
    }

    fn systems(&self) -> Vec<PySetSystem> {
        self.systems
            .iter()
            .map(|s| PySetSystem { inner: s.clone() })
            .collect()
    }

    fn profiles(&self) -> Vec<Vec<Vec<u32>>> {
        (0..self.pd.vertex_count())
            .map(|v| self.pd.profile(v).0.iter().map(|&c| agents(c)).collect())
            .collect()
    }

    fn profile_index(&self, profile: Vec<Vec<u32>>) -> PyResult<usize> {
        let parts = profile
            .into_iter()
            .map(coalition)
            .collect::<PyResult<Vec<_>>>()?;
        self.pd.find_profile(&core::Profile(parts)).map_err(err)
    }

    /// `(tail, head, block, movers)` per edge; blocks are 1-based.
    fn edges(&self) -> Vec<(usize, usize, usize, Vec<u32>)> {
        self.pd
            .edges()
            .iter()
            .map(|e| (e.tail, e.head, e.q + 1, agents(e.movers)))
            .collect()
    }

    fn relevant_edges(&self) -> Vec<usize> {
        self.pd.relevant_edges()
    }

    /// Edge ids of agent `i`'s subdigraph and its number of components.
    fn agent_subdigraph(&self, i: u32) -> PyResult<(Vec<usize>, usize)> {
        let sub = self.pd.agent_subdigraph(i).map_err(err)?;
        let k = sub.components(&self.pd).len();
        Ok((sub.edges, k))
    }

    fn two_step_flow(&self) -> PyResult<Vec<Q>> {
        let h = core::Hypercube::new(self.pd.m()).map_err(err)?;
        let ff: Vec<Flow> = self
            .pd
            .factors()
            .iter()
            .map(core::uniform_path_flow)
            .collect();
        Ok(
            core::compose_two_step_flow(&self.pd, &core::shapley_hypercube_flow(&h), &ff)
                .map_err(err)?
                .weights,
        )
    }

    fn az_flow(&self) -> PyResult<Vec<Q>> {
        Ok(core::az_flow(&self.pd).map_err(err)?.weights)
    }

    /// `{"is_flow", "is_unitary", "value", "violations"}`
    fn check_flow<'py>(&self, py: Python<'py>, flow: Vec<Q>) -> PyResult<Bound<'py, PyDict>> {
        let r = core::check_flow(&self.pd, &self.flow(flow)?).map_err(err)?;
        let d = PyDict::new(py);
        d.set_item("is_flow", r.is_flow)?;
        d.set_item("is_unitary", r.is_unitary)?;
        d.set_item("value", r.value)?;
        d.set_item("violations", r.violations)?;
        Ok(d)
    }

    /// Flow-level axioms; anonymity entries are None unless every block is a power set.
    fn check_axioms<'py>(&self, py: Python<'py>, flow: Vec<Q>) -> PyResult<Bound<'py, PyDict>> {
        let f = self.flow(flow)?;
        let d = PyDict::new(py);
        d.set_item(
            "null_flow",
            core::check_null_flow_nonrelevant(&self.pd, &f)
                .map_err(err)?
                .holds,
        )?;
        d.set_item(
            "proportionality",
            core::check_flow_proportionality(&self.pd, &f)
                .map_err(err)?
                .holds,
        )?;
        let intra = core::check_intracoalitional_anonymity(&self.pd, &f)
            .ok()
            .map(|c| c.holds);
        let coal = core::check_coalitional_anonymity(&self.pd, &f)
            .ok()
            .map(|c| c.holds);
        d.set_item("intracoalitional_anonymity", intra)?;
        d.set_item("coalitional_anonymity", coal)?;
        Ok(d)
    }

    fn flow_method_value<'py>(
        &self,
        py: Python<'py>,
        worth: Vec<Q>,
        flow: Vec<Q>,
    ) -> PyResult<Bound<'py, PyDict>> {
        let g = self.game(worth)?;
        payoffs(
            py,
            &core::flow_method_value(&self.pd, &g, &self.flow(flow)?).map_err(err)?,
        )
    }

    /// Shapley hypercube flow with uniform path flows in every block.
    fn two_step_value<'py>(&self, py: Python<'py>, worth: Vec<Q>) -> PyResult<Bound<'py, PyDict>> {
        let g = self.game(worth)?;
        let h = core::Hypercube::new(self.pd.m()).map_err(err)?;
        let ff: Vec<Flow> = self
            .pd
            .factors()
            .iter()
            .map(core::uniform_path_flow)
            .collect();
        let pay = core::two_step_value(&self.pd, &g, &core::shapley_hypercube_flow(&h), &ff)
            .map_err(err)?;
        payoffs(py, &pay)
    }

    fn az_value<'py>(&self, py: Python<'py>, worth: Vec<Q>) -> PyResult<Bound<'py, PyDict>> {
        let g = self.game(worth)?;
        payoffs(py, &core::az_value(&self.pd, &g).map_err(err)?)
    }

    fn null_agents(&self, worth: Vec<Q>) -> PyResult<Vec<u32>> {
        Ok(core::null_agents(&self.pd, &self.game(worth)?))
    }

    /// `{"reachable", "star_edges", "condition_holds", "violations"}`
    fn reduction<'py>(&self, py: Python<'py>) -> PyResult<Bound<'py, PyDict>> {
        let rs = core::reachable_system(&self.pd);
        let cond = core::check_reduction_condition(&self.pd);
        let d = PyDict::new(py);
        d.set_item(
            "reachable",
            rs.coalitions.iter().map(|&c| agents(c)).collect::<Vec<_>>(),
        )?;
        d.set_item(
            "star_edges",
            rs.star_pairs()
                .iter()
                .map(|&(a, b)| (agents(a), agents(b)))
                .collect::<Vec<_>>(),
        )?;
        d.set_item("condition_holds", cond.holds)?;
        d.set_item("violations", cond.violations)?;
        Ok(d)
    }

    /// Induced payoffs of a coalition game given as `{tuple(agents): worth}`.
    fn induced_value<'py>(
        &self,
        py: Python<'py>,
        flow: Vec<Q>,
        coalition_worth: BTreeMap<Vec<u32>, Q>,
    ) -> PyResult<Bound<'py, PyDict>> {
        let mut v0 = BTreeMap::new();
        for (k, x) in coalition_worth {
            v0.insert(coalition(k)?, x);
        }
        let iv = core::induced_value(&self.pd, &self.flow(flow)?, &v0).map_err(err)?;
        payoffs(py, &iv.pay)
    }

    #[pyo3(signature = (flow=None))]
    fn to_dot(&self, flow: Option<Vec<Q>>) -> PyResult<String> {
        let f = flow.map(|w| self.flow(w)).transpose()?;
        Ok(core::dot::product_dot(&self.pd, f.as_ref()))
    }

    fn agents(&self) -> Vec<u32> {
        agents(self.pd.agents())
    }

    fn __repr__(&self) -> String {
        format!(
            "ProductDigraph(n={}, m={}, vertices={}, edges={})",
            self.pd.n(),
            self.pd.m(),
            self.pd.vertex_count(),
            self.pd.edge_count()
        )
    }
}

/// `(m−s)!(s−1)!/m!` per hypercube edge, with `(S, q)` labels (1-based blocks).
#[pyfunction]
fn shapley_hypercube_flow(m: usize) -> PyResult<Vec<(Vec<u32>, usize, Q)>> {
    let h = core::Hypercube::new(m).map_err(err)?;
    let f = core::shapley_hypercube_flow(&h);
    Ok((0..h.digraph().edge_count())
        .map(|e| {
            let (s, q) = h.edge_label(e);
            (agents(Coalition(s)), q + 1, f.weights[e].clone())
        })
        .collect())
}

/// Configuration value; `worth[mask]` is the worth of the coalition with that bit mask.
#[pyfunction]
fn configuration_value<'py>(
    py: Python<'py>,
    n: u32,
    worth: Vec<Q>,
    blocks: Vec<Vec<u32>>,
) -> PyResult<Bound<'py, PyDict>> {
    let v = core::TuGame::new(n, worth).map_err(err)?;
    let blocks = blocks
        .into_iter()
        .map(coalition)
        .collect::<PyResult<Vec<_>>>()?;
    payoffs(py, &core::configuration_value(&v, &blocks).map_err(err)?)
}

/// Run the command line with `args` (without the program name).
#[pyfunction]
fn run_cli(args: Vec<String>) -> (i32, String, String) {
    let argv = std::iter::once("cfgflow".to_string()).chain(args);
    let out = core::cli::run_from(argv);
    (out.code, out.stdout, out.stderr)
}

#[pymodule]
fn cfgflow(m: &Bound<'_, PyModule>) -> PyResult<()> {
    m.add("CfgflowError", m.py().get_type::<CfgflowError>())?;
    m.add_class::<PySetSystem>()?;
    m.add_class::<PyProduct>()?;
    m.add_function(wrap_pyfunction!(shapley_hypercube_flow, m)?)?;
    m.add_function(wrap_pyfunction!(configuration_value, m)?)?;
    m.add_function(wrap_pyfunction!(run_cli, m)?)?;
    Ok(())
}
