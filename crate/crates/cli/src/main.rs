//! `resnet`: resilience monitoring of social organizations from interaction logs.

mod commands;
mod config;
mod error;

use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Parser, Subcommand};

use commands::{GraphFormat, InputFormat};
use config::{Overrides, RunConfig};
use error::{CliError, CliResult};

#[derive(Parser, Debug)]
#[command(name = "resnet", version, about = "Resilience of social organizations from interaction logs")]
struct Cli {
    #[command(flatten)]
    overrides: Overrides,

    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand, Debug)]
enum Command {
    /// Cut an event log into time windows and write one network file per window plus a manifest.
    Ingest {
        /// Event CSV or `git log --numstat --date=unix` output.
        input: PathBuf,
        /// Input format (guessed from the extension when omitted).
        #[arg(long, value_enum)]
        format: Option<InputFormat>,
        /// Output directory.
        #[arg(long)]
        out: PathBuf,
    },
    /// Signed relations, agent profiles, balance, potentiality and resilience of one network.
    Analyze {
        /// Network JSON file.
        network: PathBuf,
        #[arg(long)]
        out: PathBuf,
    },
    /// Resilience time series over the windows of a manifest.
    Monitor {
        /// Manifest file or the directory that contains it.
        manifest: PathBuf,
        #[arg(long)]
        out: PathBuf,
    },
    /// Run intervention plans and leave cascades on one network.
    Intervene {
        /// Network JSON file.
        network: PathBuf,
        /// JSON array of intervention plans.
        #[arg(long)]
        plans: PathBuf,
        #[arg(long)]
        out: PathBuf,
    },
    /// Plot-ready columns or graph formats for external tools.
    Export {
        #[command(subcommand)]
        what: Export,
    },
}

#[derive(Subcommand, Debug)]
enum Export {
    /// Two-column `x,y` CSV of one series from a snapshots file.
    Plot {
        snapshots: PathBuf,
        /// mean_T, R_hat, P, P_hat, resilience, coreness_aggregate,
        /// one_minus_centralization or scaled_eigengap.
        #[arg(long, default_value = "resilience")]
        column: String,
        #[arg(long)]
        out: PathBuf,
    },
    /// A network as GraphML (with coreness) or an adjacency CSV.
    Graph {
        network: PathBuf,
        #[arg(long, value_enum, default_value = "graphml")]
        format: GraphFormat,
        #[arg(long)]
        out: PathBuf,
    },
}

fn run(cli: Cli) -> CliResult<()> {
    let cfg = RunConfig::resolve(&cli.overrides)?;
    if let Some(n) = cfg.jobs {
        rayon::ThreadPoolBuilder::new()
            .num_threads(n)
            .build_global()
            .map_err(|e| CliError::internal(format!("cannot start {n} worker threads: {e}")))?;
    }
    match cli.command {
        Command::Ingest { input, format, out } => {
            let m = commands::ingest(&input, format, &out, &cfg)?;
            log::info!("wrote {} window file(s) to {}", m.windows.len(), out.display());
        }
        Command::Analyze { network, out } => commands::analyze_cmd(&network, &out, &cfg)?,
        Command::Monitor { manifest, out } => {
            commands::monitor_cmd(&manifest, &out, &cfg)?;
        }
        Command::Intervene { network, plans, out } => commands::intervene_cmd(&network, &plans, &out, &cfg)?,
        Command::Export { what } => match what {
            Export::Plot { snapshots, column, out } => commands::export_plot(&snapshots, &column, &out)?,
            Export::Graph { network, format, out } => commands::export_graph(&network, format, &out)?,
        },
    }
    Ok(())
}

fn main() -> ExitCode {
    env_logger::Builder::from_env(env_logger::Env::new().filter_or("RESNET_LOG", "warn")).init();
    let cli = Cli::parse();
    match run(cli) {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(e.code)
        }
    }
}
