use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Parser, Subcommand};
use greenbound::cli::{format_theorems, list_theorems, run, RunConfig, RunOptions, Stage};
use greenbound::Error;

#[derive(Parser)]
#[command(name = "greenbound", version, about = "Green's function kernel bounds and the inequalities they imply")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Run the pipeline described by a TOML config.
    Run {
        #[arg(long)]
        config: PathBuf,
        /// build, green, kernel, representations or inequalities
        #[arg(long)]
        stage: Option<String>,
        #[arg(long)]
        threads: Option<usize>,
        #[arg(long)]
        seed: Option<u64>,
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// List theorem ids with their hypotheses and the command that checks each.
    Theorems { id: Option<String> },
}

fn exit_for(e: &Error) -> ExitCode {
    eprintln!("error: {e}");
    match e {
        Error::Config { .. } | Error::UnknownTheorem { .. } => ExitCode::from(3),
        _ => ExitCode::from(1),
    }
}

fn main() -> ExitCode {
    match Cli::parse().command {
        Command::Theorems { id } => match list_theorems(id.as_deref()) {
            Ok(rows) => {
                print!("{}", format_theorems(&rows));
                ExitCode::SUCCESS
            }
            Err(e) => exit_for(&e),
        },
        Command::Run { config, stage, threads, seed, out } => {
            if let Some(n) = threads {
                if let Err(e) = rayon::ThreadPoolBuilder::new().num_threads(n).build_global() {
                    eprintln!("warning: {e}");
                }
            }
            let result = (|| {
                let stage = stage.as_deref().map(Stage::parse).transpose()?;
                let cfg = RunConfig::load(&config)?;
                run(cfg, &RunOptions { stage, seed, out })
            })();
            match result {
                Ok(outcome) => {
                    for f in &outcome.failures {
                        eprintln!("invariant failed: {f}");
                    }
                    println!("artifacts in {}", outcome.out.display());
                    ExitCode::from(outcome.exit_code() as u8)
                }
                Err(e) => exit_for(&e),
            }
        }
    }
}
