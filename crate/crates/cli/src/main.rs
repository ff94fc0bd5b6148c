//! `pathgen`: command line driver for the basis-path test data pipeline.
//!
//! Verbs: `cfg` (graph + complexity), `paths` (basis path enumeration),
//! `generate` (search for covering inputs), `report` (fitness-class
//! histogram of a run artifact), `compare` (genetic vs. random search).
//!
//! Exit codes: 0 on success, 1 when at least one search target stayed
//! uncovered, 2 on usage, parse or I/O errors.

mod commands;

use std::process::ExitCode;

use clap::{Args, Parser, Subcommand, ValueEnum};

#[derive(Parser)]
#[command(name = "pathgen", version, about = "Basis-path test data generation")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Clone, Copy, PartialEq, Eq, ValueEnum)]
enum Mode {
    /// Drive executions down a whole basis path.
    Path,
    /// Drive the two operands of one predicate to equality.
    Paper,
}

#[derive(Clone, Copy, PartialEq, Eq, ValueEnum)]
enum Source {
    /// Classify the final population only.
    Final,
    /// Aggregate the per-generation histograms of the whole run.
    All,
}

/// Search options shared by `generate` and `compare`.
#[derive(Args)]
struct SearchOpts {
    /// Fitness mode
    #[arg(long, value_enum, default_value = "path")]
    mode: Mode,
    /// Predicate node id for paper mode (defaults to the last predicate)
    #[arg(long)]
    predicate: Option<usize>,
    /// TOML run configuration
    #[arg(long)]
    config: Option<std::path::PathBuf>,
    /// Override the fitness delta
    #[arg(long)]
    delta: Option<f64>,
    /// Stop a run as soon as its target is covered
    #[arg(long)]
    early_stop: bool,
}

#[derive(Subcommand)]
enum Command {
    /// Build the control flow graph and report its cyclomatic complexity
    Cfg {
        file: std::path::PathBuf,
        /// Write a DOT rendering to this path ("-" for stdout)
        #[arg(long)]
        dot: Option<std::path::PathBuf>,
        #[arg(long)]
        json: bool,
    },
    /// Enumerate the basis paths and check their linear independence
    Paths {
        file: std::path::PathBuf,
        #[arg(long)]
        json: bool,
    },
    /// Search for inputs that cover the selected targets
    Generate {
        file: std::path::PathBuf,
        /// Basis path index, or "all" (path mode only)
        #[arg(long, default_value = "all", conflicts_with = "predicate")]
        target: String,
        #[command(flatten)]
        search: SearchOpts,
        /// Override the RNG seed
        #[arg(long)]
        seed: Option<u64>,
        /// Directory for run artifacts (JSON result + per-generation CSV)
        #[arg(long)]
        out: Option<std::path::PathBuf>,
        #[arg(long)]
        json: bool,
        /// Dump the execution trace of each best input
        #[arg(long)]
        trace: bool,
    },
    /// Classify the population of a saved run artifact into fitness ranges
    Report {
        artifact: std::path::PathBuf,
        #[arg(long, value_enum, default_value = "final")]
        source: Source,
        /// Comma-separated class bounds
        #[arg(long, default_value = "0.3,0.7,1.0")]
        thresholds: String,
        #[arg(long)]
        json: bool,
    },
    /// Run the genetic search and a random baseline over several seeds
    Compare {
        file: std::path::PathBuf,
        /// Comma-separated list of at least two seeds
        #[arg(long)]
        seeds: String,
        /// Basis path index (path mode only)
        #[arg(long, conflicts_with = "predicate")]
        target: Option<usize>,
        #[command(flatten)]
        search: SearchOpts,
        /// Evaluation budget for the random baseline (default: the genetic
        /// run's own evaluation count, giving equal budgets)
        #[arg(long)]
        budget: Option<u64>,
        /// Write the comparison as JSON to this file
        #[arg(long)]
        out: Option<std::path::PathBuf>,
        #[arg(long)]
        json: bool,
    },
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    let outcome = match cli.command {
        Command::Cfg { file, dot, json } => commands::cfg(&file, dot.as_deref(), json),
        Command::Paths { file, json } => commands::paths(&file, json),
        Command::Generate {
            file,
            target,
            search,
            seed,
            out,
            json,
            trace,
        } => commands::generate(&file, &target, &search, seed, out.as_deref(), json, trace),
        Command::Report {
            artifact,
            source,
            thresholds,
            json,
        } => commands::report(&artifact, source, &thresholds, json),
        Command::Compare {
            file,
            seeds,
            target,
            search,
            budget,
            out,
            json,
        } => commands::compare(&file, &seeds, target, &search, budget, out.as_deref(), json),
    };
    match outcome {
        Ok(code) => code,
        Err(err) => {
            eprintln!("pathgen: error: {err:#}");
            ExitCode::from(2)
        }
    }
}
