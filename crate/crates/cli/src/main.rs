//! `yamabe-lab`: batch front-end for verifying, constructing and probing
//! gradient k-Yamabe solitons conformal to pseudo-Euclidean space.

mod commands;
mod error;
mod json;
mod problem;

use std::fs;
use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand};

use commands::{Options, Outcome};
use error::CliError;
use problem::ProblemSpec;

#[derive(Parser, Debug)]
#[command(name = "yamabe-lab", version, about)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Args, Debug)]
struct Common {
    /// Problem specification (JSON).
    #[arg(long)]
    spec: PathBuf,
    /// Report file, or output directory for commands that also write CSV.
    #[arg(long)]
    out: Option<PathBuf>,
    /// Residual or integration tolerance.
    #[arg(long)]
    tol: Option<f64>,
    /// Seed for point sampling and random initial conditions.
    #[arg(long)]
    seed: Option<u64>,
    /// Number of sample points, grid nodes or initial conditions.
    #[arg(long)]
    points: Option<usize>,
}

#[derive(Subcommand, Debug)]
enum Command {
    /// Check the soliton equation at sample points.
    Verify(Common),
    /// Curvature data at sample points.
    Curvature(Common),
    /// Reduced ODE residuals and agreement of reduced σ_k with the tensor pipeline.
    Reduce(Common),
    /// Tabulate and certify a family member.
    Family(Common),
    /// Invert and certify an implicit relation.
    SolveImplicit(Common),
    /// Integrate one geodesic.
    Geodesic(Common),
    /// Completeness probe over many geodesics.
    Probe(Common),
    /// List catalog examples.
    CatalogList {
        #[arg(long)]
        out: Option<PathBuf>,
    },
}

type Handler = fn(&ProblemSpec, &Options) -> Result<Outcome, CliError>;

fn configure_threads() -> Result<(), CliError> {
    let Ok(v) = std::env::var("YAMABE_LAB_THREADS") else {
        return Ok(());
    };
    let n: usize = v
        .trim()
        .parse()
        .ok()
        .filter(|n| *n > 0)
        .ok_or_else(|| CliError::input(format!("YAMABE_LAB_THREADS = {v:?} must be a positive integer")))?;
    rayon::ThreadPoolBuilder::new()
        .num_threads(n)
        .build_global()
        .map_err(|e| CliError::input(format!("thread pool: {e}")))
}

fn emit(outcome: &Outcome, out: Option<&PathBuf>) -> Result<(), CliError> {
    let text = outcome.report.render();
    match out {
        Some(dir) if !outcome.files.is_empty() => {
            fs::create_dir_all(dir)?;
            for (name, bytes) in &outcome.files {
                fs::write(dir.join(name), bytes)?;
            }
            fs::write(dir.join("report.json"), &text)?;
        }
        Some(file) => fs::write(file, &text)?,
        None => {}
    }
    print!("{text}");
    Ok(())
}

fn run(cli: Cli) -> Result<bool, CliError> {
    configure_threads()?;
    let (outcome, out) = match cli.command {
        Command::CatalogList { out } => (commands::catalog_list()?, out),
        cmd => {
            let (f, c): (Handler, Common) = match cmd {
                Command::Verify(c) => (commands::verify, c),
                Command::Curvature(c) => (commands::curvature, c),
                Command::Reduce(c) => (commands::reduce, c),
                Command::Family(c) => (commands::family, c),
                Command::SolveImplicit(c) => (commands::solve_implicit, c),
                Command::Geodesic(c) => (commands::geodesic, c),
                Command::Probe(c) => (commands::probe, c),
                Command::CatalogList { .. } => unreachable!("handled above"),
            };
            let spec = ProblemSpec::load(&c.spec)?;
            let opts = Options {
                tol: c.tol,
                seed: c.seed,
                points: c.points,
            };
            (f(&spec, &opts)?, c.out)
        }
    };
    emit(&outcome, out.as_ref())?;
    Ok(outcome.pass)
}

fn main() -> ExitCode {
    match run(Cli::parse()) {
        Ok(true) => ExitCode::SUCCESS,
        Ok(false) => ExitCode::from(1),
        Err(e) => {
            eprintln!("yamabe-lab: {e}");
            ExitCode::from(e.exit_code() as u8)
        }
    }
}
