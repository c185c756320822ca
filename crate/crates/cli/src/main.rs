mod commands;
mod output;

use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Parser, Subcommand, ValueEnum};
use edutrap::grid::GridSpec;
use edutrap::oracle::Proposition;
use edutrap::planner::PlannerKind;
use edutrap::skillindex::BootstrapMethod;

use commands::{CheckArgs, Refusal, TauArgs};
use output::Run;

fn grid(s: &str) -> Result<GridSpec, String> {
    s.parse().map_err(|e: edutrap::Error| e.to_string())
}

fn prop(s: &str) -> Result<Proposition, String> {
    s.parse().map_err(|e: edutrap::Error| e.to_string())
}

fn method(s: &str) -> Result<BootstrapMethod, String> {
    s.parse().map_err(|e: edutrap::Error| e.to_string())
}

#[derive(Clone, Copy, ValueEnum)]
enum Planner {
    Naive,
    Informed,
    Noncog,
}

#[derive(Parser)]
#[command(
    name = "edutrap",
    version,
    about = "Naive vs informed educational planners under AI capital"
)]
struct Cli {
    /// Directory for CSV/JSON artifacts and the run manifest.
    #[arg(long, global = true, default_value = "out")]
    out: PathBuf,
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Check the scenario's assumptions on a (t, K) grid.
    Audit {
        #[arg(long)]
        scenario: PathBuf,
        #[arg(long, value_parser = grid)]
        t_grid: GridSpec,
        #[arg(long, value_parser = grid)]
        k_grid: GridSpec,
    },
    /// Solve the planner problems at one capital level.
    Solve {
        #[arg(long)]
        scenario: PathBuf,
        #[arg(long, allow_negative_numbers = true)]
        k: f64,
        #[arg(long, value_enum)]
        planner: Option<Planner>,
    },
    /// Mismatch curve (and the non-cognitive gap with --noncog) over a K grid.
    Sweep {
        #[arg(long)]
        scenario: PathBuf,
        #[arg(long, value_parser = grid)]
        k_grid: GridSpec,
        #[arg(long)]
        noncog: bool,
    },
    /// AI-intensity choices of school and planner over a falling cost grid.
    Adoption {
        #[arg(long)]
        scenario: PathBuf,
        #[arg(long)]
        ta: f64,
        /// Capital level; defaults to K0 + 0.05.
        #[arg(long)]
        k: Option<f64>,
        #[arg(long, value_parser = grid, allow_hyphen_values = true)]
        c_grid: GridSpec,
    },
    /// Barbell choices under the tiered wage schedule.
    Tiers {
        #[arg(long)]
        scenario: PathBuf,
        #[arg(long, value_parser = grid)]
        k_grid: GridSpec,
    },
    /// Replay a proposition with grid-search and finite-difference oracles.
    Check {
        #[arg(long)]
        scenario: PathBuf,
        #[arg(long, value_parser = prop)]
        prop: Proposition,
        #[arg(long, value_parser = grid)]
        k_grid: Option<GridSpec>,
        #[arg(long)]
        oracle_points: Option<usize>,
        #[arg(long)]
        ta: Option<f64>,
        #[arg(long)]
        k_adoption: Option<f64>,
        #[arg(long, value_parser = grid, allow_hyphen_values = true)]
        c_grid: Option<GridSpec>,
    },
    /// Skill-index pipeline.
    Index {
        #[command(subcommand)]
        step: IndexStep,
    },
}

#[derive(Subcommand)]
enum IndexStep {
    /// Symmetrize judgments and replay Elo (pooled and per model).
    Elo {
        #[arg(long = "in")]
        input: PathBuf,
    },
    /// First principal component of a skills x models score table.
    Pca {
        #[arg(long = "in")]
        input: PathBuf,
    },
    /// Kendall tau-b between the last two columns, optionally with a bootstrap CI.
    Tau {
        #[arg(long = "in")]
        input: PathBuf,
        #[arg(long)]
        bootstrap: Option<usize>,
        #[arg(long, value_parser = method, default_value = "bca")]
        method: BootstrapMethod,
        #[arg(long, default_value_t = 0)]
        seed: u64,
    },
}

fn run(cli: Cli) -> anyhow::Result<u8> {
    let argv: Vec<String> = std::env::args().skip(1).collect();
    let mut run = Run::new(&cli.out, argv)?;
    let code = match cli.command {
        Command::Audit {
            scenario,
            t_grid,
            k_grid,
        } => commands::audit(&mut run, &scenario, &t_grid, &k_grid)?,
        Command::Solve { scenario, k, planner } => {
            let kind = planner.map(|p| match p {
                Planner::Naive => PlannerKind::Naive,
                Planner::Informed => PlannerKind::Informed,
                Planner::Noncog => PlannerKind::InformedNoncog,
            });
            commands::solve_cmd(&mut run, &scenario, k, kind)?
        }
        Command::Sweep {
            scenario,
            k_grid,
            noncog,
        } => commands::sweep(&mut run, &scenario, &k_grid, noncog)?,
        Command::Adoption {
            scenario,
            ta,
            k,
            c_grid,
        } => commands::adoption(&mut run, &scenario, ta, k, &c_grid)?,
        Command::Tiers { scenario, k_grid } => commands::tiers(&mut run, &scenario, &k_grid)?,
        Command::Check {
            scenario,
            prop,
            k_grid,
            oracle_points,
            ta,
            k_adoption,
            c_grid,
        } => commands::check(
            &mut run,
            &scenario,
            CheckArgs {
                prop,
                k_grid,
                oracle_points,
                t_a: ta,
                k_adoption,
                c_grid,
            },
        )?,
        Command::Index { step } => match step {
            IndexStep::Elo { input } => commands::index_elo(&mut run, &input)?,
            IndexStep::Pca { input } => commands::index_pca(&mut run, &input)?,
            IndexStep::Tau {
                input,
                bootstrap,
                method,
                seed,
            } => commands::index_tau(
                &mut run,
                &input,
                TauArgs {
                    bootstrap,
                    method,
                    seed,
                },
            )?,
        },
    };
    run.finish(code)?;
    Ok(code)
}

/// 2 for validation and audit refusals, 1 for everything else.
fn exit_status(e: &anyhow::Error) -> u8 {
    for cause in e.chain() {
        if let Some(err) = cause.downcast_ref::<edutrap::Error>() {
            return if err.is_refusal() { 2 } else { 1 };
        }
        if cause.is::<Refusal>() {
            return 2;
        }
    }
    1
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match run(cli) {
        Ok(code) => ExitCode::from(code),
        Err(e) => {
            let code = exit_status(&e);
            eprintln!("{}: {e:#}", if code == 2 { "refused" } else { "error" });
            ExitCode::from(code)
        }
    }
}
