//! Python bindings: build scenarios, run and judge them, sweep families,
//! search for counterexamples and print the automata.
//!
//! Structured results (verdicts, reports, traces) cross the boundary as the
//! same JSON the command-line tool writes, decoded into Python objects.

use bhs_core::harness::{adversary_search, enumerate, sweep as run_sweep, theorem_scenario, Construction, Family, LabelingMode};
use bhs_core::scenario::default_round_bound;
use bhs_core::{check_properties, judge, simulate, Labeling, ProtocolId, ScenarioSpec, Trace};
use pyo3::exceptions::PyValueError;
use pyo3::prelude::*;

fn value_error(e: impl std::fmt::Display) -> PyErr {
    PyValueError::new_err(e.to_string())
}

fn protocol(name: &str) -> PyResult<ProtocolId> {
    name.parse().map_err(value_error)
}

/// Decode a JSON string with Python's own `json` module.
fn loads<'py>(py: Python<'py>, text: &str) -> PyResult<Bound<'py, PyAny>> {
    py.import("json")?.call_method1("loads", (text,))
}

fn json<'py, T: serde::Serialize>(py: Python<'py>, value: &T) -> PyResult<Bound<'py, PyAny>> {
    loads(py, &serde_json::to_string(value).map_err(value_error)?)
}

/// One instance: ring size, black hole, homebases, labeling, protocol and token budget.
#[pyclass(name = "Scenario", module = "bhs", frozen, eq, skip_from_py_object)]
#[derive(Clone, PartialEq)]
struct PyScenario {
    spec: ScenarioSpec,
}

#[pymethods]
impl PyScenario {
    /// `labeling` makes the ring unoriented: one character per node, `c` when
    /// port 1 leads clockwise and `a` otherwise.
    #[new]
    #[pyo3(signature = (protocol, n, homebases, black_hole = 0, labeling = None, tokens = None, movable = None, round_bound = None))]
    #[allow(clippy::too_many_arguments)]
    fn new(
        protocol: &str,
        n: usize,
        homebases: Vec<usize>,
        black_hole: usize,
        labeling: Option<&str>,
        tokens: Option<u8>,
        movable: Option<bool>,
        round_bound: Option<u64>,
    ) -> PyResult<PyScenario> {
        let id = self::protocol(protocol)?;
        let meta = id.meta();
        let mut spec = ScenarioSpec::new(id, n, black_hole, homebases);
        if let Some(l) = labeling {
            spec = spec.unoriented(l.parse::<Labeling>().map_err(value_error)?);
        }
        spec = spec
            .with_tokens(tokens.unwrap_or(meta.tokens_per_agent), movable.unwrap_or(meta.movable))
            .with_bound(round_bound.unwrap_or_else(|| default_round_bound(n)));
        spec.validate().map_err(value_error)?;
        Ok(PyScenario { spec })
    }

    #[staticmethod]
    fn from_json(text: &str) -> PyResult<PyScenario> {
        let spec: ScenarioSpec = serde_json::from_str(text).map_err(value_error)?;
        spec.validate().map_err(value_error)?;
        Ok(PyScenario { spec })
    }

    fn to_json(&self) -> String {
        serde_json::to_string(&self.spec).expect("spec serializes")
    }

    #[getter]
    fn protocol(&self) -> &'static str {
        self.spec.protocol.as_str()
    }

    #[getter]
    fn n(&self) -> usize {
        self.spec.n
    }

    #[getter]
    fn black_hole(&self) -> usize {
        self.spec.black_hole
    }

    #[getter]
    fn homebases(&self) -> Vec<usize> {
        self.spec.homebases.clone()
    }

    #[getter]
    fn oriented(&self) -> bool {
        self.spec.oriented
    }

    #[getter]
    fn labeling(&self) -> Option<String> {
        self.spec.port_labeling.as_ref().map(|l| l.to_string())
    }

    #[getter]
    fn round_bound(&self) -> u64 {
        self.spec.round_bound
    }

    /// Same instance with the black hole at node 0 (and mirrored when that is smaller).
    fn canonical(&self) -> PyScenario {
        PyScenario { spec: self.spec.canonical() }
    }

    fn run(&self) -> PyResult<PyTrace> {
        run(self)
    }

    fn __repr__(&self) -> String {
        format!("Scenario({})", self.to_json())
    }
}

/// The round-by-round record of one run.
#[pyclass(name = "Trace", module = "bhs", frozen)]
struct PyTrace {
    trace: Trace,
}

#[pymethods]
impl PyTrace {
    #[staticmethod]
    fn from_jsonl(text: &str) -> PyResult<PyTrace> {
        Trace::read_jsonl(text.as_bytes()).map(|trace| PyTrace { trace }).map_err(value_error)
    }

    fn to_jsonl(&self) -> String {
        self.trace.to_jsonl()
    }

    #[getter]
    fn scenario(&self) -> PyScenario {
        PyScenario { spec: self.trace.spec.clone() }
    }

    #[getter]
    fn rounds(&self) -> u64 {
        self.trace.rounds_used()
    }

    #[getter]
    fn dead(&self) -> usize {
        self.trace.dead_count()
    }

    /// Success flag, failure reason, deaths, rounds and marked links.
    fn verdict<'py>(&self, py: Python<'py>) -> PyResult<Bound<'py, PyAny>> {
        json(py, &judge(&self.trace))
    }

    /// The protocol's property pack; an empty list when everything holds.
    fn violations(&self) -> Vec<String> {
        check_properties(&self.trace, self.trace.spec.protocol).iter().map(|v| v.to_string()).collect()
    }

    /// Re-run the stored scenario and compare.
    fn reproduces(&self) -> PyResult<bool> {
        let fresh = simulate(&self.trace.spec, self.trace.spec.protocol.automaton()).map_err(value_error)?;
        Ok(fresh == self.trace)
    }

    /// Human-readable table, one line per round.
    fn render(&self) -> String {
        self.trace.render_human(self.trace.spec.protocol.automaton())
    }
}

#[pyfunction]
fn run(scenario: &PyScenario) -> PyResult<PyTrace> {
    let spec = &scenario.spec;
    simulate(spec, spec.protocol.automaton()).map(|trace| PyTrace { trace }).map_err(value_error)
}

/// Run and judge a family of scenarios; returns the report as a dict.
///
/// `mode` is `oriented`, `exhaustive` (every labeling, up to reflection) or
/// `sampled` (random placements crossed with random labelings).
#[pyfunction]
#[pyo3(signature = (protocol, n_min, n_max, k_min = None, k_max = None, mode = "oriented", seed = 7, placements = 256, labelings = 256, jobs = 1))]
#[allow(clippy::too_many_arguments)]
fn sweep<'py>(
    py: Python<'py>,
    protocol: &str,
    n_min: usize,
    n_max: usize,
    k_min: Option<usize>,
    k_max: Option<usize>,
    mode: &str,
    seed: u64,
    placements: usize,
    labelings: usize,
    jobs: usize,
) -> PyResult<Bound<'py, PyAny>> {
    let id = self::protocol(protocol)?;
    if n_min > n_max {
        return Err(value_error("n_min exceeds n_max"));
    }
    let mode = match mode {
        "oriented" => LabelingMode::Oriented,
        "exhaustive" => LabelingMode::Exhaustive,
        "sampled" => LabelingMode::Sampled { seed, placements, labelings },
        other => return Err(value_error(format!("unknown mode {other:?}"))),
    };
    let k = k_min.unwrap_or(id.meta().min_agents)..=k_max.unwrap_or(n_max);
    let family = Family { protocol: id, n: n_min..=n_max, k, mode };
    let report = py.detach(|| run_sweep(enumerate(&family), jobs));
    loads(py, &report.to_json())
}

/// First failing scenario for `agents` agents on rings up to `nmax`, or None.
#[pyfunction]
#[pyo3(signature = (protocol, agents, tokens = None, movable = None, nmax = 20))]
fn adversary(
    py: Python<'_>,
    protocol: &str,
    agents: usize,
    tokens: Option<u8>,
    movable: Option<bool>,
    nmax: usize,
) -> PyResult<Option<PyScenario>> {
    let id = self::protocol(protocol)?;
    let meta = id.meta();
    let (tokens, movable) = (tokens.unwrap_or(meta.tokens_per_agent), movable.unwrap_or(meta.movable));
    let hit = py.detach(|| adversary_search(id.automaton(), agents, tokens, movable, nmax));
    Ok(hit.map(|h| PyScenario { spec: h.spec }))
}

/// Scenarios of a lower-bound construction: `periodic` (k, p),
/// `three-agents` (t, x, y) or `mirror-four` (t, x).
#[pyfunction]
#[pyo3(signature = (name, k = 0, p = 0, t = 0, x = 0, y = 0))]
fn construction(name: &str, k: usize, p: usize, t: usize, x: usize, y: usize) -> PyResult<Vec<PyScenario>> {
    let c = match name {
        "periodic" => Construction::Periodic { k, p },
        "three-agents" => Construction::ThreeAgents { t, x, y },
        "mirror-four" => Construction::MirrorFour { t, x },
        other => return Err(value_error(format!("unknown construction {other:?}"))),
    };
    let specs = theorem_scenario(c).map_err(value_error)?;
    Ok(specs.into_iter().map(|spec| PyScenario { spec }).collect())
}

/// The protocol's state machine as text.
#[pyfunction]
fn dump(protocol: &str) -> PyResult<String> {
    Ok(self::protocol(protocol)?.automaton().dump())
}

#[pymodule]
fn bhs(m: &Bound<'_, PyModule>) -> PyResult<()> {
    m.add_class::<PyScenario>()?;
    m.add_class::<PyTrace>()?;
    m.add_function(wrap_pyfunction!(run, m)?)?;
    m.add_function(wrap_pyfunction!(sweep, m)?)?;
    m.add_function(wrap_pyfunction!(adversary, m)?)?;
    m.add_function(wrap_pyfunction!(construction, m)?)?;
    m.add_function(wrap_pyfunction!(dump, m)?)?;
    Ok(())
}
