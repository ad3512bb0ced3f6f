use std::path::{Path, PathBuf};
use std::process::ExitCode;

use anyhow::{bail, Context};
use clap::{Parser, Subcommand, ValueEnum};

use reserve_core::dynamics::{round_counts, simulate_real, LVParams};
use reserve_core::experiment::{self, budget_sweep, build_species_suite, default_scenarios, stats_of, Scenario};
use reserve_core::io::{self, read_json, read_sweep_csv, write_atomic, write_json};
use reserve_core::render::{render_grid, AnnotationLayout, RenderSpec};
use reserve_core::{solver, CountsGrid, Error, Rational, RealGrid, ReserveProblem, ReserveSolution};

#[derive(Parser)]
#[command(name = "reserve", version, about = "Multi-species reserve selection under a budget")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Generate a landscape pool, the eight-species suite and the six case scenarios.
    Generate {
        #[arg(long)]
        seed: u64,
        #[arg(long, default_value_t = experiment::DEFAULT_POOL_SIZE)]
        pool_size: usize,
        #[arg(long, default_value_t = experiment::DEFAULT_GRID)]
        grid: usize,
        /// Output directory.
        #[arg(long)]
        out: PathBuf,
    },
    /// Project a counts file forward with the competition-crowding model.
    Simulate {
        #[arg(long)]
        counts: PathBuf,
        /// Dynamics parameters; defaults to the experiment defaults.
        #[arg(long)]
        params: Option<PathBuf>,
        /// Round the output to integer counts.
        #[arg(long)]
        round: bool,
        #[arg(long)]
        out: PathBuf,
    },
    /// Solve one reserve problem.
    Solve {
        /// Problem file; alternatively build one from --counts and --budget.
        #[arg(long, conflicts_with = "counts")]
        problem: Option<PathBuf>,
        /// Counts file; real-valued counts are rounded half up.
        #[arg(long, requires = "budget")]
        counts: Option<PathBuf>,
        #[arg(long)]
        budget: Option<u64>,
        /// Comma-separated species weights (e.g. `9/10,1/10`); default all 1.
        #[arg(long)]
        weights: Option<String>,
        /// Comma-separated species indices to keep from the counts file.
        #[arg(long)]
        species: Option<String>,
        #[arg(long, value_enum, default_value_t = SolverKind::Auto)]
        solver: SolverKind,
        #[arg(long)]
        out: PathBuf,
    },
    /// Run a budget sweep for a scenario and write the per-budget CSV.
    Sweep {
        #[arg(long)]
        scenario: PathBuf,
        /// Override the scenario's species weights.
        #[arg(long)]
        weights: Option<String>,
        /// Override the scenario's dynamics parameters.
        #[arg(long)]
        params: Option<PathBuf>,
        #[arg(long)]
        out: PathBuf,
    },
    /// Draw one solution, or two side by side, as SVG.
    Render {
        #[arg(long)]
        model1: PathBuf,
        #[arg(long)]
        counts1: PathBuf,
        #[arg(long, requires = "counts2")]
        model2: Option<PathBuf>,
        #[arg(long)]
        counts2: Option<PathBuf>,
        /// Comma-separated species indices to annotate.
        #[arg(long)]
        species: Option<String>,
        #[arg(long)]
        out: PathBuf,
    },
    /// Summarise sweep CSVs into a case table and a similarity-vs-budget series.
    Report {
        #[arg(long, num_args = 1.., required = true)]
        sweeps: Vec<PathBuf>,
        /// Case labels, one per sweep file; defaults to the file stems.
        #[arg(long, num_args = 1..)]
        labels: Vec<String>,
        #[arg(long)]
        out: PathBuf,
        /// Also write similarity per budget for every sweep.
        #[arg(long)]
        series_out: Option<PathBuf>,
    },
}

#[derive(Clone, Copy, ValueEnum)]
enum SolverKind {
    Auto,
    Dp,
    Topk,
    Bruteforce,
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match run(cli.command) {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("error: {e:#}");
            ExitCode::from(1)
        }
    }
}

fn run(command: Command) -> anyhow::Result<()> {
    match command {
        Command::Generate {
            seed,
            pool_size,
            grid,
            out,
        } => {
            std::fs::create_dir_all(&out).with_context(|| format!("creating {}", out.display()))?;
            let suite = build_species_suite(seed, pool_size, grid)?;
            write_json(&out.join("suite.json"), &suite)?;
            let all: Vec<usize> = (0..suite.species.len()).collect();
            write_json(&out.join("observed.json"), &suite.observed(&all)?)?;
            for scenario in default_scenarios(&suite)? {
                write_json(&out.join(format!("{}.json", scenario.name)), &scenario)?;
            }
            println!("wrote suite, observed counts and 6 scenarios to {}", out.display());
        }
        Command::Simulate {
            counts,
            params,
            round,
            out,
        } => {
            let grid: RealGrid = read_json(&counts)?;
            let params = match params {
                Some(p) => read_json(&p)?,
                None => LVParams::default_for(grid.species()),
            };
            let sim = simulate_real(&grid, &params).with_context(|| counts.display().to_string())?;
            if round {
                write_json(&out, &round_counts(&sim.grid))?;
            } else {
                write_json(&out, &sim.grid)?;
            }
        }
        Command::Solve {
            problem,
            counts,
            budget,
            weights,
            species,
            solver: kind,
            out,
        } => {
            let problem = match (problem, counts) {
                (Some(path), _) => read_json::<ReserveProblem>(&path)?,
                (None, Some(path)) => {
                    let grid = select_species(load_counts(&path)?, species.as_deref())?;
                    let weights = match weights {
                        Some(w) => parse_weights(&w, grid.species())?,
                        None => vec![Rational::ONE; grid.species()],
                    };
                    let costs = vec![1; grid.parcels()];
                    ReserveProblem::from_counts(&grid, weights, costs, budget.unwrap_or(0))?
                }
                (None, None) => bail!("either --problem or --counts is required"),
            };
            let solution = match kind {
                SolverKind::Auto => solver::solve(&problem)?,
                SolverKind::Dp => solver::solve_dp(&problem)?,
                SolverKind::Topk => solver::solve_topk(&problem)?,
                SolverKind::Bruteforce => solver::solve_bruteforce(&problem)?,
            };
            write_json(&out, &solution)?;
            println!(
                "protected {} of {} parcels, objective {}, spent {}",
                solution.protected().len(),
                solution.parcels(),
                solution.objective,
                solution.spent
            );
        }
        Command::Sweep {
            scenario,
            weights,
            params,
            out,
        } => {
            let mut sc: Scenario = read_json(&scenario)?;
            if let Some(w) = weights {
                sc.weights = parse_weights(&w, sc.species.len())?;
            }
            if let Some(p) = params {
                sc.lv_params = read_json(&p)?;
            }
            let rows = budget_sweep(&sc).with_context(|| scenario.display().to_string())?;
            write_atomic(&out, io::sweep_csv(&rows).as_bytes())?;
            if rows.len() >= 3 {
                let s = experiment::summarize(&rows)?;
                println!("{}: min {} average {:.2} median {}", sc.name, s.min, s.mean, s.median);
            }
        }
        Command::Render {
            model1,
            counts1,
            model2,
            counts2,
            species,
            out,
        } => {
            let sol1: ReserveSolution = read_json(&model1)?;
            let grid1 = select_species(load_counts(&counts1)?, species.as_deref())?;
            let spec = match (model2, counts2) {
                (Some(m2), Some(c2)) => {
                    let sol2: ReserveSolution = read_json(&m2)?;
                    let grid2 = select_species(load_counts(&c2)?, species.as_deref())?;
                    let layout = layout_for(grid1.species().max(grid2.species()));
                    RenderSpec::pair_with_layout(
                        ("observed counts", &sol1, &grid1),
                        ("simulated counts", &sol2, &grid2),
                        layout,
                    )?
                }
                _ => RenderSpec::single_with_layout("solution", &sol1, &grid1, layout_for(grid1.species()))?,
            };
            write_atomic(&out, render_grid(&spec)?.as_bytes())?;
            if let Some(caption) = &spec.caption {
                println!("{caption}");
            }
        }
        Command::Report {
            sweeps,
            labels,
            out,
            series_out,
        } => {
            if !labels.is_empty() && labels.len() != sweeps.len() {
                bail!("{} labels for {} sweep files", labels.len(), sweeps.len());
            }
            let mut table = Vec::new();
            let mut series = Vec::new();
            let mut budgets: Option<Vec<u64>> = None;
            for (k, path) in sweeps.iter().enumerate() {
                let label = labels.get(k).cloned().unwrap_or_else(|| stem(path));
                let mut records = read_sweep_csv(path)?;
                records.sort_by_key(|r| r.budget);
                if records.len() < 3 {
                    return Err(Error::NoInteriorBudgets { rows: records.len() })
                        .with_context(|| path.display().to_string());
                }
                let interior: Vec<usize> = records[1..records.len() - 1].iter().map(|r| r.similarity).collect();
                table.push((label.clone(), stats_of(&interior)));
                let these: Vec<u64> = records.iter().map(|r| r.budget).collect();
                match &budgets {
                    None => budgets = Some(these),
                    Some(b) if *b != these => {
                        bail!("{} uses different budgets from {}", path.display(), sweeps[0].display())
                    }
                    _ => {}
                }
                series.push((label, records.iter().map(|r| r.similarity).collect()));
            }
            write_atomic(&out, io::stats_csv(&table).as_bytes())?;
            if let Some(path) = series_out {
                let csv = io::series_csv(budgets.as_deref().unwrap_or(&[]), &series)?;
                write_atomic(&path, csv.as_bytes())?;
            }
        }
    }
    Ok(())
}

/// Reads a counts file, rounding real-valued entries half up.
fn load_counts(path: &Path) -> anyhow::Result<CountsGrid> {
    let grid: RealGrid = read_json(path)?;
    Ok(grid.to_integer().unwrap_or_else(|| round_counts(&grid)))
}

fn select_species(grid: CountsGrid, species: Option<&str>) -> anyhow::Result<CountsGrid> {
    let Some(list) = species else {
        return Ok(grid);
    };
    let idx = list
        .split(',')
        .map(|s| s.trim().parse::<usize>().with_context(|| format!("bad species index `{s}`")))
        .collect::<anyhow::Result<Vec<_>>>()?;
    Ok(grid.select(&idx)?)
}

fn parse_weights(list: &str, species: usize) -> anyhow::Result<Vec<Rational>> {
    let weights = list
        .split(',')
        .map(str::parse::<Rational>)
        .collect::<Result<Vec<_>, _>>()?;
    if weights.len() != species {
        bail!("{} weights given for {species} species", weights.len());
    }
    Ok(weights)
}

/// Falls back to comma-separated labels when there are too many species.
fn layout_for(species: usize) -> AnnotationLayout {
    AnnotationLayout::for_species(species).unwrap_or_else(|e| {
        eprintln!("warning: {e}; using comma-separated labels");
        AnnotationLayout::Inline
    })
}

fn stem(path: &Path) -> String {
    path.file_stem()
        .map(|s| s.to_string_lossy().into_owned())
        .unwrap_or_else(|| path.display().to_string())
}
