//! Python bindings for the continuum-sim crate.
//!
//! The module exposes the main types and operations: scenario loading
//! and validation, the bundled topologies, the placement strategies,
//! the simulator, the factorial experiment harness, and the scalar
//! cost-model formulas. Build the cdylib and rename/copy it to
//! `continuum_sim.so` (see `python/smoke_test.py`).

use pyo3::exceptions::{PyIOError, PyRuntimeError, PyValueError};
use pyo3::prelude::*;
use pyo3::types::{PyDict, PyModule};

use continuum_sim::experiment::{
    generate_workload, run_factorial, ExperimentConfig, ExperimentError, ExperimentReport,
    Response, WorkloadSpec,
};
use continuum_sim::metrics::NodeState;
use continuum_sim::scenario::{
    self, builtin_paper_topology, builtin_toy, ModelWeights, ResourceVector, Scenario,
    ScenarioError, Task,
};
use continuum_sim::sim::{self, simulate_named, RunReport};
use continuum_sim::strategy::{PlacementRequest, Strategy};
use continuum_sim::{build_routes, metrics};

/// (task id, node id) pairs plus the ids nothing could host.
type PlanTuple = (Vec<(String, String)>, Vec<String>);

fn scenario_err(e: ScenarioError) -> PyErr {
    match e {
        ScenarioError::Io { .. } => PyIOError::new_err(e.to_string()),
        _ => PyValueError::new_err(e.to_string()),
    }
}

/// A validated (or at least parsed) simulation scenario.
#[pyclass(name = "Scenario", skip_from_py_object)]
#[derive(Clone)]
struct PyScenario {
    inner: Scenario,
}

#[pymethods]
impl PyScenario {
    /// All violated structural rules, as strings; empty means valid.
    fn validate(&self) -> Vec<String> {
        scenario::validate(&self.inner)
            .iter()
            .map(|v| v.to_string())
            .collect()
    }

    fn to_json(&self) -> String {
        self.inner.to_json()
    }

    #[getter]
    fn horizon_ms(&self) -> u64 {
        self.inner.horizon_ms
    }

    #[getter]
    fn cloud_enabled(&self) -> bool {
        self.inner.cloud_enabled
    }

    fn node_ids(&self) -> Vec<String> {
        self.inner.nodes.iter().map(|n| n.id.to_string()).collect()
    }

    fn task_ids(&self) -> Vec<String> {
        self.inner.tasks.iter().map(|t| t.id.to_string()).collect()
    }

    fn user_ids(&self) -> Vec<String> {
        self.inner.users.iter().map(|u| u.id.to_string()).collect()
    }

    /// Apply a dotted-path override, e.g. `weights.rho = "50"` or
    /// `horizon_ms = "2000"`. Values are parsed from strings.
    fn set(&mut self, key: &str, value: &str) -> PyResult<()> {
        continuum_sim::cli::apply_scenario_override(&mut self.inner, key, value)
            .map_err(PyValueError::new_err)
    }

    /// Copy of this scenario with synthesized tasks for a workload level
    /// ("low" or "high") and seed replacing the current task list.
    fn with_workload(&self, level: &str, seed: u64) -> PyResult<PyScenario> {
        let spec = match level {
            "low" => WorkloadSpec::low(),
            "high" => WorkloadSpec::high(),
            other => {
                return Err(PyValueError::new_err(format!(
                    "unknown workload level: {other} (expected low or high)"
                )))
            }
        };
        let mut scenario = self.inner.clone();
        scenario.tasks = generate_workload(&spec, &scenario.users, seed);
        Ok(PyScenario { inner: scenario })
    }

    fn __repr__(&self) -> String {
        format!(
            "Scenario(nodes={}, elements={}, links={}, users={}, tasks={}, horizon_ms={})",
            self.inner.nodes.len(),
            self.inner.elements.len(),
            self.inner.links.len(),
            self.inner.users.len(),
            self.inner.tasks.len(),
            self.inner.horizon_ms
        )
    }
}

/// The response variables and per-task ledger of one simulation run.
#[pyclass(name = "RunReport", skip_from_py_object)]
#[derive(Clone)]
struct PyRunReport {
    inner: RunReport,
}

#[pymethods]
impl PyRunReport {
    #[getter]
    fn latency_sla_violations(&self) -> u64 {
        self.inner.latency_sla_violations
    }

    #[getter]
    fn drop_sla_violations(&self) -> u64 {
        self.inner.drop_sla_violations
    }

    #[getter]
    fn average_latency_ms(&self) -> f64 {
        self.inner.average_latency_ms
    }

    #[getter]
    fn power_consumption_w(&self) -> f64 {
        self.inner.power_consumption_w
    }

    #[getter]
    fn energy_joules(&self) -> f64 {
        self.inner.energy_joules
    }

    #[getter]
    fn objective(&self) -> f64 {
        self.inner.objective
    }

    /// Per-task outcomes as dicts.
    fn ledger<'py>(&self, py: Python<'py>) -> PyResult<Vec<Bound<'py, PyDict>>> {
        self.inner
            .ledger
            .iter()
            .map(|entry| {
                let d = PyDict::new(py);
                d.set_item("task", entry.task.to_string())?;
                d.set_item("user", entry.user.to_string())?;
                d.set_item("node", entry.node.as_ref().map(|n| n.to_string()))?;
                d.set_item("start_ms", entry.timing.start)?;
                d.set_item("finish_ms", entry.timing.finish)?;
                d.set_item("comm_delay_ms", entry.timing.comm_delay)?;
                d.set_item("violation_ms", entry.timing.violation)?;
                d.set_item("dropped", entry.timing.dropped)?;
                d.set_item("energy_j", entry.timing.energy)?;
                Ok(d)
            })
            .collect()
    }

    fn to_json(&self) -> String {
        self.inner.to_json()
    }

    fn __repr__(&self) -> String {
        format!(
            "RunReport(latency_violations={}, drops={}, avg_latency_ms={:.3}, power_w={:.3})",
            self.inner.latency_sla_violations,
            self.inner.drop_sla_violations,
            self.inner.average_latency_ms,
            self.inner.power_consumption_w
        )
    }
}

/// Aggregated results of the full 2x2x2 factorial suite.
#[pyclass(name = "ExperimentReport")]
struct PyExperimentReport {
    inner: ExperimentReport,
}

#[pymethods]
impl PyExperimentReport {
    fn raw_csv(&self) -> String {
        self.inner.raw_csv()
    }

    fn summary_csv(&self) -> String {
        self.inner.summary_csv()
    }

    fn influence_csv(&self) -> String {
        self.inner.influence_csv()
    }

    fn text_report(&self) -> String {
        self.inner.text_report()
    }

    /// One dict per run with the factor levels and response variables.
    fn rows<'py>(&self, py: Python<'py>) -> PyResult<Vec<Bound<'py, PyDict>>> {
        self.inner
            .rows
            .iter()
            .map(|row| {
                let d = PyDict::new(py);
                d.set_item("scenario", &row.scenario)?;
                d.set_item("algorithm", row.combo.algorithm.label())?;
                d.set_item("workload", row.combo.workload.label())?;
                d.set_item("cloud", row.combo.cloud.label())?;
                d.set_item("seed", row.seed)?;
                d.set_item("latency_violations", row.latency_violations)?;
                d.set_item("drop_violations", row.drop_violations)?;
                d.set_item("avg_latency_ms", row.avg_latency_ms)?;
                d.set_item("power_w", row.power_w)?;
                d.set_item("energy_j", row.energy_j)?;
                d.set_item("objective", row.objective)?;
                Ok(d)
            })
            .collect()
    }

    /// Influence percentages for one response variable
    /// (latency_violations, drop_violations, avg_latency_ms, power_w),
    /// keyed by effect name; empty when the response showed no variation.
    fn influence(&self, response: &str) -> PyResult<std::collections::BTreeMap<String, f64>> {
        let which = Response::ALL
            .into_iter()
            .find(|r| r.label() == response)
            .ok_or_else(|| PyValueError::new_err(format!("unknown response: {response}")))?;
        let breakdown = &self.inner.influence[which.pos()];
        if breakdown.no_variation {
            return Ok(Default::default());
        }
        Ok(continuum_sim::experiment::EFFECT_LABELS
            .iter()
            .zip(breakdown.shares)
            .map(|(label, share)| (label.to_string(), share))
            .collect())
    }

    fn __repr__(&self) -> String {
        format!("ExperimentReport(rows={})", self.inner.rows.len())
    }
}

#[pyfunction]
fn load_scenario(path: &str) -> PyResult<PyScenario> {
    scenario::load_scenario(path)
        .map(|inner| PyScenario { inner })
        .map_err(scenario_err)
}

#[pyfunction]
fn scenario_from_json(text: &str) -> PyResult<PyScenario> {
    scenario::scenario_from_json(text)
        .map(|inner| PyScenario { inner })
        .map_err(scenario_err)
}

#[pyfunction]
#[pyo3(signature = (cloud_enabled = true))]
fn paper_topology(cloud_enabled: bool) -> PyScenario {
    PyScenario {
        inner: builtin_paper_topology(cloud_enabled),
    }
}

#[pyfunction]
fn toy_scenario() -> PyScenario {
    PyScenario {
        inner: builtin_toy(),
    }
}

#[pyfunction]
#[pyo3(signature = (scenario, strategy = "tetris", seed = 0))]
fn simulate(scenario: &PyScenario, strategy: &str, seed: u64) -> PyResult<PyRunReport> {
    simulate_named(&scenario.inner, strategy, seed)
        .map(|inner| PyRunReport { inner })
        .map_err(|e| match e {
            sim::SimError::UnknownStrategy(_) => PyValueError::new_err(e.to_string()),
            other => PyRuntimeError::new_err(other.to_string()),
        })
}

/// One placement wave over the scenario's full task list at time zero:
/// returns (assignments, unplaced) without running the clock.
#[pyfunction]
#[pyo3(signature = (scenario, strategy = "tetris"))]
fn place_once(scenario: &PyScenario, strategy: &str) -> PyResult<PlanTuple> {
    let strategy: Strategy = strategy.parse().map_err(PyValueError::new_err)?;
    let routes = build_routes(&scenario.inner);
    let request = PlacementRequest {
        pending: scenario.inner.tasks.iter().collect(),
        node_states: scenario
            .inner
            .active_nodes()
            .map(|n| NodeState::new(n.clone()))
            .collect(),
        network: &routes,
        weights: &scenario.inner.weights,
        now: 0,
    };
    let plan = strategy
        .place(&request)
        .map_err(|e| PyValueError::new_err(e.to_string()))?;
    Ok((
        plan.assignments
            .iter()
            .map(|(t, n)| (t.to_string(), n.to_string()))
            .collect(),
        plan.unplaced.iter().map(|t| t.to_string()).collect(),
    ))
}

#[pyfunction]
#[pyo3(signature = (deadline_ms, processing_ms, data_megabits, bandwidth_mbit_per_ms, alpha = 1.0, beta = 1.0, gamma_w = 1.0))]
#[allow(clippy::too_many_arguments)]
fn urgency_score(
    deadline_ms: u64,
    processing_ms: u64,
    data_megabits: u64,
    bandwidth_mbit_per_ms: f64,
    alpha: f64,
    beta: f64,
    gamma_w: f64,
) -> PyResult<f64> {
    let task = Task {
        id: "t".into(),
        user: "u".into(),
        demand: ResourceVector::new(1, 1, 0),
        processing_time: processing_ms,
        data_size: data_megabits,
        arrival: 0,
        deadline: deadline_ms,
        penalty: 1.0,
    };
    let weights = ModelWeights {
        alpha,
        beta,
        gamma_w,
        ..ModelWeights::default()
    };
    metrics::urgency_score(&task, bandwidth_mbit_per_ms, &weights)
        .map_err(|e| PyValueError::new_err(e.to_string()))
}

#[pyfunction]
fn capacity_score(cpu: u64, ram: u64, storage: u64) -> f64 {
    metrics::capacity_score(&ResourceVector::new(cpu, ram, storage))
}

#[pyfunction]
fn finish_time(
    start_ms: u64,
    processing_ms: u64,
    data_megabits: u64,
    bandwidth_mbit_per_ms: f64,
) -> PyResult<u64> {
    let task = Task {
        id: "t".into(),
        user: "u".into(),
        demand: ResourceVector::new(1, 1, 0),
        processing_time: processing_ms,
        data_size: data_megabits,
        arrival: 0,
        deadline: 1,
        penalty: 1.0,
    };
    metrics::finish_time(start_ms, &task, bandwidth_mbit_per_ms)
        .map_err(|e| PyValueError::new_err(e.to_string()))
}

#[pyfunction]
fn deadline_violation(finish_ms: u64, arrival_ms: u64, deadline_ms: u64) -> u64 {
    finish_ms.saturating_sub(arrival_ms + deadline_ms)
}

#[pyfunction]
fn power_draw(
    power_idle: f64,
    power_max: f64,
    cpu_in_use: u64,
    cpu_capacity: u64,
) -> PyResult<f64> {
    let node = continuum_sim::scenario::ComputeNode {
        id: "n".into(),
        tier: continuum_sim::scenario::NodeTier::Edge,
        capacity: ResourceVector::new(cpu_capacity, 1, 1),
        power_idle,
        power_max,
    };
    sim::power_draw(&node, cpu_in_use).map_err(|e| PyValueError::new_err(e.to_string()))
}

#[pyfunction]
#[pyo3(signature = (replications = 10, seed_base = 42, jobs = 0))]
fn run_experiment(
    replications: usize,
    seed_base: u64,
    jobs: usize,
) -> PyResult<PyExperimentReport> {
    let cfg = ExperimentConfig {
        replications,
        seed_base,
        jobs,
        ..Default::default()
    };
    run_factorial(&cfg)
        .map(|inner| PyExperimentReport { inner })
        .map_err(|e| match e {
            ExperimentError::Config(_) => PyValueError::new_err(e.to_string()),
            other => PyRuntimeError::new_err(other.to_string()),
        })
}

#[pymodule]
#[pyo3(name = "continuum_sim")]
fn continuum_sim_py(m: &Bound<'_, PyModule>) -> PyResult<()> {
    m.add_class::<PyScenario>()?;
    m.add_class::<PyRunReport>()?;
    m.add_class::<PyExperimentReport>()?;
    m.add_function(wrap_pyfunction!(load_scenario, m)?)?;
    m.add_function(wrap_pyfunction!(scenario_from_json, m)?)?;
    m.add_function(wrap_pyfunction!(paper_topology, m)?)?;
    m.add_function(wrap_pyfunction!(toy_scenario, m)?)?;
    m.add_function(wrap_pyfunction!(simulate, m)?)?;
    m.add_function(wrap_pyfunction!(place_once, m)?)?;
    m.add_function(wrap_pyfunction!(urgency_score, m)?)?;
    m.add_function(wrap_pyfunction!(capacity_score, m)?)?;
    m.add_function(wrap_pyfunction!(finish_time, m)?)?;
    m.add_function(wrap_pyfunction!(deadline_violation, m)?)?;
    m.add_function(wrap_pyfunction!(power_draw, m)?)?;
    m.add_function(wrap_pyfunction!(run_experiment, m)?)?;
    m.add("__version__", env!("CARGO_PKG_VERSION"))?;
    Ok(())
}
