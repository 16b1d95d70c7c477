#![forbid(unsafe_code)]

use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Parser, Subcommand};
use gta::cli::{self, CliError, ExportKind, Format, RunConfig};

#[derive(Parser)]
#[command(name = "gta", version, about = "Run graph transformation programs and inspect their histories")]
struct Cli {
    /// Store snapshot file.
    #[arg(long, global = true, env = "GTA_STORE")]
    store: Option<PathBuf>,
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Evaluate a program and print the ids of its last element.
    Run {
        gts: PathBuf,
        #[arg(long)]
        program: String,
        #[arg(long, default_value_t = 10_000)]
        max_iterations: usize,
        #[arg(long, default_value = "nodes-asc")]
        order: String,
        #[arg(long, default_value = "ids")]
        format: Format,
        #[arg(long)]
        seed_grape: Option<String>,
    },
    /// Print the history (or traces) of a stored grape.
    Export {
        grape: String,
        #[arg(long, default_value = "dot")]
        format: Format,
        #[arg(long)]
        traces: bool,
    },
    /// Check store invariants; with a .gts file, replay every logged step.
    Audit { gts: Option<PathBuf> },
    /// Remove graphs not reachable from the given grapes.
    Gc { roots: Vec<String> },
}

fn main() -> ExitCode {
    let args = Cli::parse();
    let store = args.store.as_deref();
    let result = match args.command {
        Command::Run { gts, program, max_iterations, order, format, seed_grape } => {
            let config = RunConfig {
                gts_path: gts,
                program,
                max_iterations,
                order,
                store_path: args.store.clone(),
                export: format,
                seed_grape,
            };
            cli::run(&config).map(|out| {
                print!("{}", out.report);
                if out.failed_search() {
                    eprintln!("gta: {}", CliError::FailedSearch);
                }
                out.exit_code()
            })
        }
        Command::Export { grape, format, traces } => {
            let kind = if traces { ExportKind::Traces } else { ExportKind::History };
            cli::export(store, &grape, kind, format).map(|s| {
                print!("{s}");
                0
            })
        }
        Command::Audit { gts } => cli::audit(store, gts.as_deref()).map(|s| {
            print!("{s}");
            0
        }),
        Command::Gc { roots } => cli::gc(store, &roots).map(|s| {
            print!("{s}");
            0
        }),
    };
    match result {
        Ok(code) => ExitCode::from(code),
        Err(e) => {
            eprintln!("gta: {e}");
            if let CliError::Audit(report) = &e {
                for v in &report.violations {
                    eprintln!("  {v}");
                }
            }
            ExitCode::from(e.exit_code())
        }
    }
}
