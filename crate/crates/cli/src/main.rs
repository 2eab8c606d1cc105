use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Parser, Subcommand};
use tenbar_core::campaign::{
    resummarize, run_campaign, solution_table, summary_table, Algorithm, CampaignConfig,
    CampaignError, SolutionFile, DEFAULT_THRESHOLD,
};
use tenbar_core::svg::{render_svg, Annotations};
use tenbar_core::truss::TrussProblem;

#[derive(Parser)]
#[command(
    name = "tenbar",
    version,
    about = "Ten-bar truss optimization benchmarks"
)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Run a seeded campaign of one algorithm.
    Run {
        /// Problem definition (TOML). Defaults to the bundled ten-bar problem.
        #[arg(long)]
        problem: Option<PathBuf>,
        /// sd, ts or sa.
        #[arg(long)]
        algo: String,
        #[arg(long, default_value_t = 10)]
        runs: usize,
        #[arg(long, default_value_t = 0)]
        seed: u64,
        #[arg(long)]
        out: PathBuf,
        #[arg(long, default_value_t = DEFAULT_THRESHOLD)]
        threshold: f64,
        /// Evaluation budget per run (defaults: sd 100000, ts 15000, sa 34000).
        #[arg(long)]
        budget: Option<u64>,
        #[arg(long)]
        scatter: Option<usize>,
        /// Also remove members below this area when post-processing.
        #[arg(long)]
        small_area: Option<f64>,
        /// Parallel run slots (0 = all cores).
        #[arg(long, default_value_t = 0)]
        workers: usize,
        #[arg(long)]
        svg: bool,
        #[arg(long)]
        trace: bool,
        #[arg(long)]
        post_process: bool,
    },
    /// Draw a saved solution as SVG.
    Render {
        #[arg(long)]
        problem: Option<PathBuf>,
        #[arg(long)]
        solution: PathBuf,
        #[arg(long)]
        out: PathBuf,
    },
    /// Recompute the statistics of a campaign directory.
    Summarize {
        #[arg(long)]
        dir: PathBuf,
        #[arg(long)]
        threshold: Option<f64>,
    },
}

fn load_problem(path: &Option<PathBuf>) -> Result<TrussProblem, CampaignError> {
    match path {
        Some(p) => Ok(TrussProblem::load(p)?),
        None => Ok(TrussProblem::canonical()),
    }
}

fn run(cli: Cli) -> Result<(), CampaignError> {
    match cli.command {
        Command::Run {
            problem,
            algo,
            runs,
            seed,
            out,
            threshold,
            budget,
            scatter,
            small_area,
            workers,
            svg,
            trace,
            post_process,
        } => {
            let algorithm: Algorithm = algo.parse()?;
            let problem = load_problem(&problem)?;
            let mut config = CampaignConfig::new(algorithm);
            config.runs = runs;
            config.base_seed = seed;
            config.threshold = threshold;
            config.out_dir = Some(out.clone());
            config.emit_svg = svg;
            config.emit_trace = trace;
            config.post_process = post_process;
            config.small_area = small_area;
            config.workers = workers;
            if let Some(s) = scatter {
                config.scatter_count = s;
            }
            if let Some(b) = budget {
                match algorithm {
                    Algorithm::Sd => config.sd_budget = b,
                    Algorithm::Ts => config.ts_budget = b,
                    Algorithm::Sa => config.anneal.evaluations_total = b,
                }
            }
            let result = run_campaign(&problem, &config)?;
            for r in &result.records {
                println!(
                    "seed {:>4}  mass {:>9.1} kg  evals {:>6}  {}",
                    r.seed,
                    r.best_mass,
                    r.evaluations_used,
                    if r.feasible { "feasible" } else { "infeasible" }
                );
            }
            println!();
            print!("{}", summary_table(algorithm, &result.summary));
            let best = SolutionFile::load(out.join("best_solution.json"))?;
            println!();
            print!("{}", solution_table(&problem, &best));
            if let Some(pp) = &result.post_process {
                println!();
                println!(
                    "reduced topology (removed {:?}): {} {:?}, mass {:.1} kg",
                    pp.removed_members, pp.status, pp.violating_members, pp.reduced_mass
                );
                if let Some(rep) = &pp.repaired {
                    for (m, from, to) in &rep.changes {
                        println!("  repair: member {m} area {from:.2} -> {to:.2} cm²");
                    }
                    if let Some(e) = &rep.error {
                        println!("  repair failed: {e}");
                    }
                }
            }
            Ok(())
        }
        Command::Render {
            problem,
            solution,
            out,
        } => {
            let base = load_problem(&problem)?;
            let sol = SolutionFile::load(&solution)?;
            let p = sol.problem_for(&base);
            let ann = Annotations {
                title: Some(format!(
                    "{} {} (seed {})",
                    sol.algorithm.to_uppercase(),
                    sol.label,
                    sol.seed
                )),
                mass_label: None,
            };
            let text = render_svg(&p, &sol.design, &ann)?;
            std::fs::write(&out, text).map_err(|source| CampaignError::Output {
                path: out.display().to_string(),
                source,
            })
        }
        Command::Summarize { dir, threshold } => {
            let s = resummarize(&dir, threshold)?;
            let algo = tenbar_core::campaign::load_records(&dir)?
                .first()
                .and_then(|r| r.algorithm.parse().ok())
                .unwrap_or(Algorithm::Sd);
            print!("{}", summary_table(algo, &s));
            Ok(())
        }
    }
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match run(cli) {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(e.exit_code() as u8)
        }
    }
}
