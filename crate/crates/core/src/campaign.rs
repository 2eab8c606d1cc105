//! Multi-seed benchmark campaigns and their on-disk artifacts.
//!
//! Layout of an output directory:
//!
//! ```text
//! runs/run_<seed>.json     one RunRecord per run
//! summary.json             RunSummary
//! summary.txt              the same, as a labelled table
//! best_solution.{txt,json} best run's design
//! reduced_solution.*       best design with minimum-area members removed
//! repaired_solution.*      reduced design after minimal repair, if needed
//! post_process.json        what post-processing found
//! *.svg                    drawings, when requested
//! ```

use std::fmt::Write as _;
use std::fs;
use std::path::{Path, PathBuf};
use std::str::FromStr;

use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::annealing::{simulated_annealing, AnnealConfig};
use crate::descent::{steepest_descent, DescentConfig, RunSettings};
use crate::error::{IoError, SearchError, TrussError};
use crate::search::{summarize, RunRecord, RunSummary, SearchOutcome, TrussObjective, Unrepaired};
use crate::svg::{render_svg, Annotations};
use crate::tabu::{tabu_search, TabuConfig};
use crate::truss::{
    reduce_topology, repair_minimal, solve, DesignVector, Reduction, ReductionStatus, TrussProblem,
    VariableKind, REPAIR_MAX_ITERATIONS,
};

pub const DEFAULT_THRESHOLD: f64 = 2900.0;
pub const DEFAULT_RUNS: usize = 10;
pub const DEFAULT_SD_BUDGET: u64 = 100_000;
pub const DEFAULT_TS_BUDGET: u64 = 15_000;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Algorithm {
    Sd,
    Ts,
    Sa,
}

impl Algorithm {
    pub fn name(&self) -> &'static str {
        match self {
            Algorithm::Sd => "sd",
            Algorithm::Ts => "ts",
            Algorithm::Sa => "sa",
        }
    }
}

impl FromStr for Algorithm {
    type Err = CampaignError;
    fn from_str(s: &str) -> Result<Self, Self::Err> {
        match s.to_ascii_lowercase().as_str() {
            "sd" => Ok(Algorithm::Sd),
            "ts" => Ok(Algorithm::Ts),
            "sa" => Ok(Algorithm::Sa),
            other => Err(CampaignError::InvalidAlgorithm(other.to_string())),
        }
    }
}

#[derive(Debug, Error)]
pub enum CampaignError {
    #[error(transparent)]
    Problem(#[from] IoError),
    #[error("unknown algorithm '{0}' (expected sd, ts or sa)")]
    InvalidAlgorithm(String),
    #[error("cannot write to {path}: {source}")]
    Output {
        path: String,
        #[source]
        source: std::io::Error,
    },
    #[error("run with seed {seed} failed: {source}")]
    Search {
        seed: u64,
        #[source]
        source: SearchError,
    },
    #[error("invalid campaign: {0}")]
    Invalid(String),
    #[error(transparent)]
    Truss(#[from] TrussError),
}

impl CampaignError {
    /// Process exit code for the CLI.
    pub fn exit_code(&self) -> i32 {
        match self {
            CampaignError::Problem(_) => 2,
            CampaignError::InvalidAlgorithm(_) => 3,
            CampaignError::Output { .. } => 4,
            CampaignError::Search { .. } => 5,
            CampaignError::Invalid(_) => 6,
            CampaignError::Truss(_) => 7,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct CampaignConfig {
    pub algorithm: Algorithm,
    pub runs: usize,
    pub base_seed: u64,
    pub threshold: f64,
    pub scatter_count: usize,
    pub sd_budget: u64,
    pub ts_budget: u64,
    pub descent: DescentConfig,
    pub tabu: TabuConfig,
    pub anneal: AnnealConfig,
    pub out_dir: Option<PathBuf>,
    pub emit_svg: bool,
    pub emit_trace: bool,
    pub post_process: bool,
    /// Members below this area are also removed in post-processing.
    pub small_area: Option<f64>,
    /// Parallel run slots; 0 uses every core.
    pub workers: usize,
}

impl CampaignConfig {
    pub fn new(algorithm: Algorithm) -> Self {
        Self {
            algorithm,
            runs: DEFAULT_RUNS,
            base_seed: 0,
            threshold: DEFAULT_THRESHOLD,
            scatter_count: crate::search::DEFAULT_SCATTER_COUNT,
            sd_budget: DEFAULT_SD_BUDGET,
            ts_budget: DEFAULT_TS_BUDGET,
            descent: DescentConfig::default(),
            tabu: TabuConfig::default(),
            anneal: AnnealConfig::default(),
            out_dir: None,
            emit_svg: false,
            emit_trace: false,
            post_process: false,
            small_area: None,
            workers: 0,
        }
    }

    pub fn validate(&self) -> Result<(), CampaignError> {
        if self.runs == 0 {
            return Err(CampaignError::Invalid("runs must be at least 1".into()));
        }
        if self.threshold.is_nan() || self.threshold <= 0.0 {
            return Err(CampaignError::Invalid("threshold must be positive".into()));
        }
        if self.scatter_count == 0 {
            return Err(CampaignError::Invalid(
                "scatter count must be at least 1".into(),
            ));
        }
        Ok(())
    }

    pub fn seeds(&self) -> impl Iterator<Item = u64> + '_ {
        (0..self.runs as u64).map(move |i| self.base_seed + i)
    }
}

/// A design written to disk together with the members it no longer has.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SolutionFile {
    pub label: String,
    pub algorithm: String,
    pub seed: u64,
    /// Members absent from `design` (and from the problem it is solved on).
    #[serde(default)]
    pub removed_members: Vec<u32>,
    pub design: DesignVector,
    pub mass: f64,
    pub feasible: bool,
}

impl SolutionFile {
    /// The problem this solution is defined on.
    pub fn problem_for(&self, base: &TrussProblem) -> TrussProblem {
        if self.removed_members.is_empty() {
            base.clone()
        } else {
            base.without_members(&self.removed_members)
        }
    }

    pub fn load(path: impl AsRef<Path>) -> Result<Self, IoError> {
        let path = path.as_ref();
        let text = fs::read_to_string(path).map_err(|source| IoError::Read {
            path: path.display().to_string(),
            source,
        })?;
        serde_json::from_str(&text).map_err(|e| IoError::Parse {
            path: path.display().to_string(),
            message: e.to_string(),
        })
    }
}

/// Post-processing of a campaign's best design.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct PostProcessReport {
    pub seed: u64,
    pub removed_members: Vec<u32>,
    pub reduced_mass: f64,
    /// `unchanged`, `feasible`, `singular` or `violations`.
    pub status: String,
    pub violating_members: Vec<u32>,
    pub repaired: Option<RepairReport>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RepairReport {
    pub succeeded: bool,
    pub mass: Option<f64>,
    /// `(member, from, to)` area changes in cm².
    pub changes: Vec<(u32, f64, f64)>,
    pub error: Option<String>,
}

#[derive(Debug, Clone, PartialEq)]
pub struct CampaignResult {
    pub records: Vec<RunRecord>,
    pub summary: RunSummary,
    pub post_process: Option<PostProcessReport>,
}

fn record_from_outcome(
    objective: &TrussObjective,
    algorithm: Algorithm,
    seed: u64,
    outcome: SearchOutcome,
) -> RunRecord {
    RunRecord {
        algorithm: algorithm.name().into(),
        seed,
        best_design: objective.design(&outcome.best),
        best_mass: outcome.best_assessment.objective,
        evaluations_used: outcome.evaluations_used,
        evaluations_to_best: outcome.evaluations_to_best,
        feasible: outcome.best_assessment.feasible(),
        violation: outcome.best_assessment.violation,
        unrepaired: None,
        trace: outcome.trace,
    }
}

/// One seeded run of the configured algorithm. Annealing results are
/// repaired: the lowest-penalty design is passed through minimal repair and
/// the lighter of that and the best feasible design is reported.
pub fn run_one(
    problem: &TrussProblem,
    config: &CampaignConfig,
    seed: u64,
) -> Result<RunRecord, SearchError> {
    let objective = TrussObjective::new(problem.clone());
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut settings = RunSettings::new(0, seed);
    settings.scatter_count = config.scatter_count;
    settings.trace = config.emit_trace;
    match config.algorithm {
        Algorithm::Sd => {
            settings.max_evaluations = config.sd_budget;
            let out = steepest_descent(&objective, &settings, &config.descent, &mut rng)?;
            Ok(record_from_outcome(&objective, Algorithm::Sd, seed, out))
        }
        Algorithm::Ts => {
            settings.max_evaluations = config.ts_budget;
            let out = tabu_search(
                &objective,
                &settings,
                &config.tabu,
                &config.descent,
                &mut rng,
            )?;
            Ok(record_from_outcome(&objective, Algorithm::Ts, seed, out))
        }
        Algorithm::Sa => {
            settings.max_evaluations = config.anneal.evaluations_total;
            let run = simulated_annealing(&objective, &settings, &config.anneal, &mut rng)?;
            let mut rec = record_from_outcome(&objective, Algorithm::Sa, seed, run.outcome.clone());
            let (pp, pa) = &run.best_penalized;
            if !pa.feasible() && !pa.singular {
                let design = objective.design(pp);
                if let Ok(ev) = solve(problem, &design) {
                    if let Ok(rep) = repair_minimal(problem, &design, &ev, REPAIR_MAX_ITERATIONS) {
                        if !rec.feasible || rep.evaluation.mass < rec.best_mass {
                            rec.unrepaired = Some(Unrepaired {
                                design,
                                mass: pa.objective,
                                violation: pa.violation,
                            });
                            rec.best_design = rep.design;
                            rec.best_mass = rep.evaluation.mass;
                            rec.feasible = true;
                            rec.violation = rep.evaluation.violations.totals();
                        }
                    }
                }
            }
            Ok(rec)
        }
    }
}

/// Runs every seed (in parallel slots), then writes artifacts from a single
/// collector. Records come back in seed order.
pub fn run_campaign(
    problem: &TrussProblem,
    config: &CampaignConfig,
) -> Result<CampaignResult, CampaignError> {
    config.validate()?;
    problem.validate()?;
    if let Some(dir) = &config.out_dir {
        create_dir(dir)?;
        create_dir(&dir.join("runs"))?;
    }
    let seeds: Vec<u64> = config.seeds().collect();
    let pool = rayon::ThreadPoolBuilder::new()
        .num_threads(config.workers)
        .build()
        .map_err(|e| CampaignError::Invalid(e.to_string()))?;
    let results: Vec<Result<RunRecord, CampaignError>> = pool.install(|| {
        seeds
            .par_iter()
            .map(|&seed| {
                run_one(problem, config, seed)
                    .map_err(|source| CampaignError::Search { seed, source })
            })
            .collect()
    });
    let records = results.into_iter().collect::<Result<Vec<_>, _>>()?;
    let summary = summarize(&records, config.threshold).expect("runs >= 1");

    let best = records
        .iter()
        .filter(|r| r.feasible)
        .min_by(|a, b| a.best_mass.total_cmp(&b.best_mass))
        .or_else(|| {
            records
                .iter()
                .min_by(|a, b| a.best_mass.total_cmp(&b.best_mass))
        })
        .expect("non-empty");

    let post = if config.post_process && best.feasible {
        Some(post_process_full(problem, best, config.small_area)?)
    } else {
        None
    };

    if let Some(dir) = &config.out_dir {
        for r in &records {
            write_json(&dir.join("runs").join(format!("run_{}.json", r.seed)), r)?;
        }
        write_json(&dir.join("summary.json"), &summary)?;
        write_text(
            &dir.join("summary.txt"),
            &summary_table(config.algorithm, &summary),
        )?;
        let sol = SolutionFile {
            label: "best".into(),
            algorithm: best.algorithm.clone(),
            seed: best.seed,
            removed_members: vec![],
            design: best.best_design.clone(),
            mass: best.best_mass,
            feasible: best.feasible,
        };
        write_solution(dir, "best_solution", problem, &sol, config.emit_svg)?;
        if let Some(raw) = &best.unrepaired {
            let sol = SolutionFile {
                label: "unrepaired".into(),
                design: raw.design.clone(),
                mass: raw.mass,
                feasible: false,
                ..sol.clone()
            };
            write_solution(dir, "unrepaired_solution", problem, &sol, config.emit_svg)?;
        }
        if let Some(pp) = &post {
            write_json(&dir.join("post_process.json"), &pp.report)?;
            let reduced = &pp.reduction;
            let reduced_sol = SolutionFile {
                label: "reduced".into(),
                removed_members: reduced.removed.clone(),
                design: reduced.design.clone(),
                mass: reduced.evaluation.mass,
                feasible: reduced.evaluation.feasible,
                ..sol.clone()
            };
            write_solution(
                dir,
                "reduced_solution",
                problem,
                &reduced_sol,
                config.emit_svg,
            )?;
            if let Some((d, m)) = pp.repaired.clone() {
                let repaired_sol = SolutionFile {
                    label: "repaired".into(),
                    design: d,
                    mass: m,
                    feasible: true,
                    ..reduced_sol
                };
                write_solution(
                    dir,
                    "repaired_solution",
                    problem,
                    &repaired_sol,
                    config.emit_svg,
                )?;
            }
        }
    }
    Ok(CampaignResult {
        records,
        summary,
        post_process: post.map(|p| p.report),
    })
}

/// Removes minimum-area members from a feasible record's design and repairs
/// the result if it picked up violations.
pub fn post_process(
    problem: &TrussProblem,
    best: &RunRecord,
    small_area: Option<f64>,
) -> Result<PostProcessReport, TrussError> {
    post_process_full(problem, best, small_area).map(|p| p.report)
}

struct PostProcessed {
    report: PostProcessReport,
    reduction: Reduction,
    repaired: Option<(DesignVector, f64)>,
}

fn post_process_full(
    problem: &TrussProblem,
    best: &RunRecord,
    small_area: Option<f64>,
) -> Result<PostProcessed, TrussError> {
    let ev = solve(problem, &best.best_design)?;
    let red = reduce_topology(problem, &best.best_design, &ev, small_area)?;
    let (status, violating) = match &red.status {
        ReductionStatus::Unchanged => ("unchanged", vec![]),
        ReductionStatus::Feasible => ("feasible", vec![]),
        ReductionStatus::Singular => ("singular", vec![]),
        ReductionStatus::Violations(v) => ("violations", v.clone()),
    };
    let mut repaired = None;
    let repair_report = match &red.status {
        ReductionStatus::Violations(_) => Some(
            match repair_minimal(
                &red.problem,
                &red.design,
                &red.evaluation,
                REPAIR_MAX_ITERATIONS,
            ) {
                Ok(r) => {
                    repaired = Some((r.design.clone(), r.evaluation.mass));
                    RepairReport {
                        succeeded: true,
                        mass: Some(r.evaluation.mass),
                        changes: r.changes.iter().map(|c| (c.member, c.from, c.to)).collect(),
                        error: None,
                    }
                }
                Err(e) => RepairReport {
                    succeeded: false,
                    mass: None,
                    changes: vec![],
                    error: Some(e.to_string()),
                },
            },
        ),
        _ => None,
    };
    Ok(PostProcessed {
        report: PostProcessReport {
            seed: best.seed,
            removed_members: red.removed.clone(),
            reduced_mass: red.evaluation.mass,
            status: status.into(),
            violating_members: violating,
            repaired: repair_report,
        },
        reduction: red,
        repaired,
    })
}

/// Statistics block as a two-column table.
pub fn summary_table(algorithm: Algorithm, summary: &RunSummary) -> String {
    let rows = summary.rows();
    let w = rows
        .iter()
        .map(|(k, _)| k.chars().count())
        .max()
        .unwrap_or(0);
    let mut s = format!("{:w$}  {}\n", "", algorithm.name().to_uppercase());
    for (k, v) in rows {
        let _ = writeln!(s, "{k:w$}  {v}");
    }
    s
}

fn area_label(id: u32) -> String {
    if id < 10 {
        format!("A_{id} (cm ²)")
    } else {
        format!("A_{{{id}}} (cm ²)")
    }
}

/// Parameter dump with one row per design parameter, labelled as in the
/// comparison of best solutions. Removed members are listed as `removed`.
pub fn solution_table(base: &TrussProblem, sol: &SolutionFile) -> String {
    let problem = sol.problem_for(base);
    let mut s = String::new();
    let _ = writeln!(s, "# {} ({} seed {})", sol.label, sol.algorithm, sol.seed);
    let mut k = 0;
    for v in problem.variables() {
        if let VariableKind::X(id) = v.kind {
            let _ = writeln!(
                s,
                "x_{id}, y_{id} (cm)\t{:.0},{:.0}",
                sol.design.coords[k],
                sol.design.coords[k + 1]
            );
            k += 2;
        }
    }
    for m in &base.members {
        match problem.member_index(m.id) {
            Some(i) => {
                let _ = writeln!(s, "{}\t{:.2}", area_label(m.id), sol.design.areas[i]);
            }
            None => {
                let _ = writeln!(s, "{}\tremoved", area_label(m.id));
            }
        }
    }
    let _ = writeln!(s, "Mass (kg)\t{:.1}", sol.mass);
    s
}

fn write_solution(
    dir: &Path,
    stem: &str,
    base: &TrussProblem,
    sol: &SolutionFile,
    svg: bool,
) -> Result<(), CampaignError> {
    write_json(&dir.join(format!("{stem}.json")), sol)?;
    write_text(&dir.join(format!("{stem}.txt")), &solution_table(base, sol))?;
    if svg {
        let problem = sol.problem_for(base);
        let ann = Annotations {
            title: Some(format!(
                "{} {} (seed {})",
                sol.algorithm.to_uppercase(),
                sol.label,
                sol.seed
            )),
            mass_label: None,
        };
        let text = render_svg(&problem, &sol.design, &ann)?;
        write_text(&dir.join(format!("{stem}.svg")), &text)?;
    }
    Ok(())
}

fn create_dir(dir: &Path) -> Result<(), CampaignError> {
    fs::create_dir_all(dir).map_err(|source| CampaignError::Output {
        path: dir.display().to_string(),
        source,
    })
}

fn write_text(path: &Path, text: &str) -> Result<(), CampaignError> {
    fs::write(path, text).map_err(|source| CampaignError::Output {
        path: path.display().to_string(),
        source,
    })
}

fn write_json<T: Serialize>(path: &Path, value: &T) -> Result<(), CampaignError> {
    let text = serde_json::to_string_pretty(value).expect("serializable");
    write_text(path, &text)
}

/// Reads every `runs/run_*.json` under `dir`, in seed order.
pub fn load_records(dir: &Path) -> Result<Vec<RunRecord>, IoError> {
    let runs = dir.join("runs");
    let entries = fs::read_dir(&runs).map_err(|source| IoError::Read {
        path: runs.display().to_string(),
        source,
    })?;
    let mut records = Vec::new();
    for e in entries {
        let path = e
            .map_err(|source| IoError::Read {
                path: runs.display().to_string(),
                source,
            })?
            .path();
        if path.extension().is_some_and(|x| x == "json") {
            let text = fs::read_to_string(&path).map_err(|source| IoError::Read {
                path: path.display().to_string(),
                source,
            })?;
            let r: RunRecord = serde_json::from_str(&text).map_err(|e| IoError::Parse {
                path: path.display().to_string(),
                message: e.to_string(),
            })?;
            records.push(r);
        }
    }
    records.sort_by_key(|r| r.seed);
    Ok(records)
}

/// Recomputes the summary of a campaign directory. The threshold comes from
/// `summary.json` when present, else `threshold`.
pub fn resummarize(dir: &Path, threshold: Option<f64>) -> Result<RunSummary, CampaignError> {
    let records = load_records(dir)?;
    let stored: Option<RunSummary> = fs::read_to_string(dir.join("summary.json"))
        .ok()
        .and_then(|t| serde_json::from_str(&t).ok());
    let t = threshold
        .or(stored.map(|s| s.threshold))
        .unwrap_or(DEFAULT_THRESHOLD);
    summarize(&records, t).ok_or_else(|| CampaignError::Invalid("no run records found".into()))
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn algorithm_names() {
        assert_eq!("SD".parse::<Algorithm>().unwrap(), Algorithm::Sd);
        assert!(matches!(
            "ga".parse::<Algorithm>(),
            Err(CampaignError::InvalidAlgorithm(_))
        ));
    }

    #[test]
    fn table_labels() {
        let p = TrussProblem::canonical();
        let sol = SolutionFile {
            label: "best".into(),
            algorithm: "ts".into(),
            seed: 0,
            removed_members: vec![4, 7],
            design: DesignVector::base(&p.without_members(&[4, 7]), 1.0),
            mass: 1.0,
            feasible: true,
        };
        let t = solution_table(&p, &sol);
        let labels: Vec<&str> = t
            .lines()
            .skip(1)
            .map(|l| l.split('\t').next().unwrap())
            .collect();
        assert_eq!(labels[0], "x_2, y_2 (cm)");
        assert_eq!(labels[2], "x_6, y_6 (cm)");
        assert_eq!(labels[3], "A_1 (cm ²)");
        assert_eq!(labels[12], "A_{10} (cm ²)");
        assert_eq!(labels[13], "Mass (kg)");
        assert!(t.contains("A_4 (cm ²)\tremoved"));
    }
}
