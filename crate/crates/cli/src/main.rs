use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Parser, Subcommand};
use ecprep_cli::{catalog, RunError};

/// Eigenvector continuation experiments with truncated state preparation.
#[derive(Parser)]
#[command(name = "ecprep", version)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Run an experiment from a config file or a bundled config name.
    Run {
        config: String,
        /// Worker threads (default: all cores). Results do not depend on it.
        #[arg(long)]
        workers: Option<usize>,
        /// Output directory; results go to <OUT>/<experiment>/.
        #[arg(long, env = "ECPREP_OUT", default_value = "results")]
        out: PathBuf,
        /// Override the config's master seed.
        #[arg(long)]
        seed: Option<u64>,
    },
    /// List bundled configs and the figures they reproduce.
    List,
    /// Check a config without computing.
    Validate {
        config: String,
        #[arg(long)]
        seed: Option<u64>,
    },
}

fn load(spec: &str, seed: Option<u64>) -> Result<ecprep_cli::ExperimentConfig, RunError> {
    let mut cfg = ecprep_cli::load(spec)?;
    if let Some(s) = seed {
        cfg.seed = s;
    }
    Ok(cfg)
}

fn execute(cmd: Command) -> Result<(), RunError> {
    match cmd {
        Command::List => {
            for e in catalog::entries() {
                println!("{:<22} fig {:<10} {}", e.name, e.figure, e.description);
            }
        }
        Command::Validate { config, seed } => {
            let cfg = load(&config, seed)?;
            ecprep_cli::validate(&cfg)?;
            println!("{}: ok ({} tasks)", cfg.name, cfg.tasks.len());
        }
        Command::Run {
            config,
            workers,
            out,
            seed,
        } => {
            let cfg = load(&config, seed)?;
            let outputs = ecprep_cli::run(&cfg, workers)?;
            let dest = ecprep_cli::write_outputs(&outputs, &out)?;
            println!(
                "{}: {} tables written to {} in {:.1} s",
                cfg.name,
                outputs.tables.len(),
                dest.display(),
                outputs.wall_time_s
            );
        }
    }
    Ok(())
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match execute(cli.command) {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("ecprep: {e}");
            ExitCode::from(e.exit_code() as u8)
        }
    }
}
