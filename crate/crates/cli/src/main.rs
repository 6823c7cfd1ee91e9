use std::fs::File;
use std::path::PathBuf;
use std::process::ExitCode;

use anyhow::{Context, Result};
use clap::{Parser, Subcommand};

use mpcgs::data_io::{read_trace, TraceFormat};
use mpcgs_cli::{bound_table, run, ConfigError, RunConfig, Verdict};

#[derive(Parser)]
#[command(name = "mpcgs-cli", version, about = "Run projection-free saddle-point solvers and check their traces")]
struct Cli {
    /// Log progress to stderr.
    #[arg(short, long, global = true)]
    verbose: bool,

    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Solve the problem described by a key=value config file.
    Run { config: PathBuf },
    /// Compare a trace's FW-gap column against its theory bound.
    BoundTable { trace: PathBuf },
}

fn exit_code(err: &anyhow::Error) -> u8 {
    if let Some(c) = err.downcast_ref::<ConfigError>() {
        return match c {
            ConfigError::MissingDataPath | ConfigError::MissingDataset(_) => 3,
            _ => 2,
        };
    }
    match err.downcast_ref::<mpcgs::Error>() {
        Some(mpcgs::Error::Numeric { .. }) => 4,
        Some(mpcgs::Error::Parse { .. }) => 5,
        _ => 1,
    }
}

fn run_command(cli: Cli) -> Result<ExitCode> {
    match cli.command {
        Command::Run { config } => {
            let text = std::fs::read_to_string(&config).with_context(|| format!("reading {}", config.display()))?;
            let cfg = RunConfig::parse(&text)?;
            let outcome = run(&cfg)?;
            println!(
                "{} iterations, trace {}, manifest {}",
                outcome.solution.iterations,
                cfg.out.display(),
                outcome.manifest_path.display()
            );
            Ok(ExitCode::SUCCESS)
        }
        Command::BoundTable { trace } => {
            let f = File::open(&trace).with_context(|| format!("opening {}", trace.display()))?;
            let records = read_trace(f, TraceFormat::from_path(&trace))?;
            let table = bound_table(&records);
            print!("{}", table.report);
            Ok(match table.verdict {
                Verdict::Fail { .. } => ExitCode::from(6),
                _ => ExitCode::SUCCESS,
            })
        }
    }
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    let level = if cli.verbose { "info" } else { "warn" };
    env_logger::Builder::from_env(env_logger::Env::default().default_filter_or(level)).init();
    match run_command(cli) {
        Ok(code) => code,
        Err(e) => {
            eprintln!("error: {e:#}");
            ExitCode::from(exit_code(&e))
        }
    }
}
