//! `hyperlab`: batch experiment runner.
//!
//! `hyperlab run <config.json> [--threads N] [--out DIR]` executes one
//! experiment described by a JSON config and writes its artifacts;
//! `hyperlab list` prints the catalog of experiment kinds with their
//! parameter schemas. Exit codes: 0 success, 2 validation error,
//! 3 numerical verdict inconclusive, 4 numerical failure.

use std::io::Write;
use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Parser, Subcommand};
use hyperlab_core::experiments::{self, ExperimentConfig};
use hyperlab_core::Error;

#[derive(Parser)]
#[command(
    name = "hyperlab",
    about = "Numerical laboratory for singular-coefficient wave equations",
    version
)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Run the experiment described by a JSON config file.
    Run {
        /// Path to the experiment config.
        config: PathBuf,
        /// Cap on worker threads (default: all cores).
        #[arg(long)]
        threads: Option<usize>,
        /// Output directory (overrides config and HYPERLAB_OUT).
        #[arg(long)]
        out: Option<PathBuf>,
        /// Override the CFL number of a solve/cone run.
        #[arg(long)]
        cfl: Option<f64>,
        /// Override the time-mesh grading exponent of a solve/cone run.
        #[arg(long)]
        grading: Option<f64>,
        /// Override the snapshot times of a solve/cone run (comma separated).
        #[arg(long, value_delimiter = ',')]
        snapshots: Option<Vec<f64>>,
    },
    /// Print the catalog of experiment kinds and parameter schemas as JSON.
    List,
}

fn exit_code_for(err: &Error) -> u8 {
    match err {
        Error::Validation(_) | Error::Io(_) => 2,
        Error::Inconclusive(_) => 3,
        Error::Numerical(_) => 4,
    }
}

fn patch_solver_overrides(
    config: &mut ExperimentConfig,
    cfl: Option<f64>,
    grading: Option<f64>,
    snapshots: Option<Vec<f64>>,
) {
    let Some(obj) = config.params.as_object_mut() else {
        return;
    };
    if let Some(c) = cfl {
        obj.insert("cfl".into(), serde_json::json!(c));
    }
    if let Some(g) = grading {
        obj.insert("grading".into(), serde_json::json!(g));
    }
    if let Some(s) = snapshots {
        obj.insert("snapshots".into(), serde_json::json!(s));
    }
}

/// Print to stdout, exiting quietly if the consumer closed the pipe.
fn emit(text: std::fmt::Arguments<'_>) {
    if writeln!(std::io::stdout(), "{text}").is_err() {
        std::process::exit(0);
    }
}

fn run_command(cmd: Command) -> Result<(), Error> {
    match cmd {
        Command::List => {
            let catalog = experiments::catalog();
            emit(format_args!(
                "{:#}",
                serde_json::to_value(&catalog).expect("catalog serializes")
            ));
            Ok(())
        }
        Command::Run {
            config,
            threads,
            out,
            cfl,
            grading,
            snapshots,
        } => {
            if let Some(n) = threads {
                experiments::set_thread_cap(n);
            }
            let text = std::fs::read_to_string(&config)
                .map_err(|e| Error::Io(format!("cannot read {}: {e}", config.display())))?;
            let mut parsed = ExperimentConfig::from_json(&text)?;
            patch_solver_overrides(&mut parsed, cfl, grading, snapshots);
            parsed.validated_params()?;
            let out_dir = out
                .or_else(|| std::env::var_os("HYPERLAB_OUT").map(PathBuf::from))
                .or_else(|| parsed.out.as_ref().map(PathBuf::from))
                .unwrap_or_else(|| PathBuf::from("hyperlab-out"));
            let outcome = experiments::run(&parsed, &out_dir)?;
            eprintln!(
                "{}: wrote {} files to {}",
                parsed.experiment.name(),
                outcome.files.len(),
                outcome.out_dir.display()
            );
            emit(format_args!("{:#}", outcome.summary));
            Ok(())
        }
    }
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match run_command(cli.command) {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            let record = serde_json::json!({
                "error": format!("{e}"),
                "kind": match &e {
                    Error::Validation(_) => "validation",
                    Error::Inconclusive(_) => "inconclusive",
                    Error::Numerical(_) => "numerical",
                    Error::Io(_) => "io",
                },
            });
            eprintln!("{record}");
            ExitCode::from(exit_code_for(&e))
        }
    }
}
