use std::path::PathBuf;

use pyo3::exceptions::{PyIOError, PyRuntimeError, PyValueError};
use pyo3::prelude::*;
use rand::SeedableRng;

use tenbar_core::campaign::{self, Algorithm, CampaignConfig};
use tenbar_core::search::{RunSummary, TrussObjective};
use tenbar_core::svg::{render_svg, Annotations};
use tenbar_core::truss::{self, DesignVector, TrussProblem};

fn value_err(e: impl std::fmt::Display) -> PyErr {
    PyValueError::new_err(e.to_string())
}

/// A truss problem definition.
#[pyclass(name = "Problem", skip_from_py_object)]
#[derive(Clone)]
struct PyProblem {
    inner: TrussProblem,
}

#[pymethods]
impl PyProblem {
    /// The bundled ten-bar problem.
    #[staticmethod]
    fn canonical() -> Self {
        Self {
            inner: TrussProblem::canonical(),
        }
    }

    #[staticmethod]
    fn load(path: PathBuf) -> PyResult<Self> {
        TrussProblem::load(&path)
            .map(|inner| Self { inner })
            .map_err(|e| PyIOError::new_err(e.to_string()))
    }

    #[staticmethod]
    fn from_toml(text: &str) -> PyResult<Self> {
        TrussProblem::from_toml_str(text)
            .map(|inner| Self { inner })
            .map_err(value_err)
    }

    fn to_toml(&self) -> String {
        self.inner.to_toml_string()
    }

    #[getter]
    fn name(&self) -> String {
        self.inner.name.clone()
    }

    #[getter]
    fn variable_names(&self) -> Vec<String> {
        self.inner.variables().into_iter().map(|v| v.name).collect()
    }

    #[getter]
    fn member_ids(&self) -> Vec<u32> {
        self.inner.members.iter().map(|m| m.id).collect()
    }

    /// Copy of the problem without the given members.
    fn without_members(&self, ids: Vec<u32>) -> Self {
        Self {
            inner: self.inner.without_members(&ids),
        }
    }

    /// Design at the base node positions with one area on every member.
    fn base_design(&self, area: f64) -> PyDesign {
        PyDesign {
            inner: DesignVector::base(&self.inner, area),
        }
    }

    fn __repr__(&self) -> String {
        format!(
            "Problem(name={:?}, nodes={}, members={})",
            self.inner.name,
            self.inner.nodes.len(),
            self.inner.members.len()
        )
    }
}

/// Movable-node coordinates and member areas.
#[pyclass(name = "Design", skip_from_py_object)]
#[derive(Clone)]
struct PyDesign {
    inner: DesignVector,
}

#[pymethods]
impl PyDesign {
    #[new]
    fn new(coords: Vec<f64>, areas: Vec<f64>) -> Self {
        Self {
            inner: DesignVector::new(coords, areas),
        }
    }

    #[getter]
    fn coords(&self) -> Vec<f64> {
        self.inner.coords.clone()
    }

    #[getter]
    fn areas(&self) -> Vec<f64> {
        self.inner.areas.clone()
    }

    fn values(&self) -> Vec<f64> {
        self.inner.values()
    }

    fn quantized(&self, problem: &PyProblem) -> Self {
        Self {
            inner: self.inner.quantized(&problem.inner),
        }
    }

    fn __repr__(&self) -> String {
        format!(
            "Design(coords={:?}, areas={:?})",
            self.inner.coords, self.inner.areas
        )
    }
}

/// Result of analysing one design.
#[pyclass(name = "Evaluation", get_all)]
struct PyEvaluation {
    member_ids: Vec<u32>,
    mass: f64,
    lengths: Vec<f64>,
    axial_forces: Vec<f64>,
    stresses: Vec<f64>,
    buckling_margins: Vec<f64>,
    displacements: Vec<(f64, f64)>,
    stress_excess: Vec<f64>,
    buckling_excess: Vec<f64>,
    length_deficit: Vec<f64>,
    feasible: bool,
    singular: bool,
}

#[pymethods]
impl PyEvaluation {
    fn __repr__(&self) -> String {
        format!(
            "Evaluation(mass={:.3}, feasible={}, singular={})",
            self.mass, self.feasible, self.singular
        )
    }
}

impl From<truss::Evaluation> for PyEvaluation {
    fn from(e: truss::Evaluation) -> Self {
        Self {
            member_ids: e.member_ids,
            mass: e.mass,
            lengths: e.lengths,
            axial_forces: e.axial_forces,
            stresses: e.stresses,
            buckling_margins: e.buckling_margins,
            displacements: e.displacements.iter().map(|d| (d[0], d[1])).collect(),
            stress_excess: e.violations.stress_excess,
            buckling_excess: e.violations.buckling_excess,
            length_deficit: e.violations.length_deficit,
            feasible: e.feasible,
            singular: e.singular,
        }
    }
}

/// Solve the stiffness system and check every constraint.
#[pyfunction]
fn solve(problem: &PyProblem, design: &PyDesign) -> PyResult<PyEvaluation> {
    truss::solve(&problem.inner, &design.inner)
        .map(Into::into)
        .map_err(value_err)
}

#[pyfunction]
fn mass(problem: &PyProblem, design: &PyDesign) -> PyResult<f64> {
    truss::mass(&problem.inner, &design.inner).map_err(value_err)
}

/// One seeded run's result.
#[pyclass(name = "RunRecord", get_all)]
struct PyRunRecord {
    algorithm: String,
    seed: u64,
    best_mass: f64,
    evaluations_used: u64,
    evaluations_to_best: u64,
    feasible: bool,
    repaired: bool,
    design: PyDesign,
}

#[pymethods]
impl PyRunRecord {
    fn __repr__(&self) -> String {
        format!(
            "RunRecord(algorithm={:?}, seed={}, best_mass={:.1}, evaluations_used={}, feasible={})",
            self.algorithm, self.seed, self.best_mass, self.evaluations_used, self.feasible
        )
    }
}

impl From<tenbar_core::search::RunRecord> for PyRunRecord {
    fn from(r: tenbar_core::search::RunRecord) -> Self {
        Self {
            algorithm: r.algorithm,
            seed: r.seed,
            best_mass: r.best_mass,
            evaluations_used: r.evaluations_used,
            evaluations_to_best: r.evaluations_to_best,
            feasible: r.feasible,
            repaired: r.unrepaired.is_some(),
            design: PyDesign {
                inner: r.best_design,
            },
        }
    }
}

fn parse_algorithm(algo: &str) -> PyResult<Algorithm> {
    algo.parse().map_err(value_err)
}

/// Run one seeded search. `budget` overrides the algorithm's default.
#[pyfunction]
#[pyo3(signature = (problem, algo, seed=0, budget=None))]
fn run(
    py: Python<'_>,
    problem: &PyProblem,
    algo: &str,
    seed: u64,
    budget: Option<u64>,
) -> PyResult<PyRunRecord> {
    let algorithm = parse_algorithm(algo)?;
    let config = config_for(algorithm, budget);
    let p = problem.inner.clone();
    py.detach(move || campaign::run_one(&p, &config, seed))
        .map(Into::into)
        .map_err(|e| PyRuntimeError::new_err(e.to_string()))
}

fn config_for(algorithm: Algorithm, budget: Option<u64>) -> CampaignConfig {
    let mut config = CampaignConfig::new(algorithm);
    if let Some(b) = budget {
        match algorithm {
            Algorithm::Sd => config.sd_budget = b,
            Algorithm::Ts => config.ts_budget = b,
            Algorithm::Sa => config.anneal.evaluations_total = b,
        }
    }
    config
}

/// Run a multi-seed campaign. Returns `(records, summary)` where the summary
/// is a dict keyed by the statistics' field names.
#[pyfunction]
#[pyo3(signature = (problem, algo, runs=10, seed=0, budget=None, threshold=2900.0, out_dir=None))]
#[allow(clippy::too_many_arguments)]
fn run_campaign<'py>(
    py: Python<'py>,
    problem: &PyProblem,
    algo: &str,
    runs: usize,
    seed: u64,
    budget: Option<u64>,
    threshold: f64,
    out_dir: Option<PathBuf>,
) -> PyResult<(Vec<PyRunRecord>, Bound<'py, PyAny>)> {
    let mut config = config_for(parse_algorithm(algo)?, budget);
    config.runs = runs;
    config.base_seed = seed;
    config.threshold = threshold;
    config.out_dir = out_dir;
    let p = problem.inner.clone();
    let result = py
        .detach(move || campaign::run_campaign(&p, &config))
        .map_err(|e| PyRuntimeError::new_err(e.to_string()))?;
    let summary = summary_dict(py, &result.summary)?;
    Ok((
        result.records.into_iter().map(Into::into).collect(),
        summary,
    ))
}

fn summary_dict<'py>(py: Python<'py>, s: &RunSummary) -> PyResult<Bound<'py, PyAny>> {
    let text = serde_json::to_string(s).map_err(value_err)?;
    py.import("json")?.call_method1("loads", (text,))
}

/// SVG drawing of a design.
#[pyfunction]
#[pyo3(signature = (problem, design, title=None))]
fn render(problem: &PyProblem, design: &PyDesign, title: Option<String>) -> PyResult<String> {
    let ann = Annotations {
        title,
        mass_label: None,
    };
    render_svg(&problem.inner, &design.inner, &ann).map_err(value_err)
}

/// Remove minimum-area members (and any below `small_area`), re-solve, and
/// repair if needed. Returns `(removed, status, reduced_design, repaired_design)`.
#[pyfunction]
#[pyo3(signature = (problem, design, small_area=None))]
fn reduce_and_repair(
    problem: &PyProblem,
    design: &PyDesign,
    small_area: Option<f64>,
) -> PyResult<(Vec<u32>, String, PyDesign, Option<PyDesign>)> {
    let p = &problem.inner;
    let ev = truss::solve(p, &design.inner).map_err(value_err)?;
    let red = truss::reduce_topology(p, &design.inner, &ev, small_area).map_err(value_err)?;
    let status = match &red.status {
        truss::ReductionStatus::Unchanged => "unchanged",
        truss::ReductionStatus::Feasible => "feasible",
        truss::ReductionStatus::Singular => "singular",
        truss::ReductionStatus::Violations(_) => "violations",
    };
    let repaired = match red.status {
        truss::ReductionStatus::Violations(_) => truss::repair_minimal(
            &red.problem,
            &red.design,
            &red.evaluation,
            truss::REPAIR_MAX_ITERATIONS,
        )
        .ok()
        .map(|r| PyDesign { inner: r.design }),
        _ => None,
    };
    Ok((
        red.removed,
        status.to_string(),
        PyDesign { inner: red.design },
        repaired,
    ))
}

/// Mass of the best feasible point of a seeded uniform scatter.
#[pyfunction]
#[pyo3(signature = (problem, count=50, seed=0))]
fn scatter(problem: &PyProblem, count: usize, seed: u64) -> PyResult<(PyDesign, f64)> {
    let obj = TrussObjective::new(problem.inner.clone());
    let mut ev = tenbar_core::search::Evaluator::new(&obj, count as u64);
    let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(seed);
    let (p, a) = tenbar_core::search::scatter_init(&mut ev, count, &mut rng, seed)
        .map_err(|e| PyRuntimeError::new_err(e.to_string()))?;
    Ok((
        PyDesign {
            inner: obj.design(&p),
        },
        a.objective,
    ))
}

#[pymodule]
fn tenbar(m: &Bound<'_, PyModule>) -> PyResult<()> {
    m.add_class::<PyProblem>()?;
    m.add_class::<PyDesign>()?;
    m.add_class::<PyEvaluation>()?;
    m.add_class::<PyRunRecord>()?;
    m.add_function(wrap_pyfunction!(solve, m)?)?;
    m.add_function(wrap_pyfunction!(mass, m)?)?;
    m.add_function(wrap_pyfunction!(run, m)?)?;
    m.add_function(wrap_pyfunction!(run_campaign, m)?)?;
    m.add_function(wrap_pyfunction!(render, m)?)?;
    m.add_function(wrap_pyfunction!(reduce_and_repair, m)?)?;
    m.add_function(wrap_pyfunction!(scatter, m)?)?;
    Ok(())
}
