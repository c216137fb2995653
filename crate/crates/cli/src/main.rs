use anyhow::{Context, Result};
use clap::{Parser, Subcommand};
use lpq_cli::config::{JobConfig, Task};
use lpq_cli::run::run_config;
use lpq_cli::selftest;
use std::path::PathBuf;
use std::process::ExitCode;

#[derive(Parser)]
#[command(
    name = "lpq",
    version,
    about = "Criteria and norm estimates for weighted Laplace, Stieltjes and Hardy operators"
)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Run a job config and write its JSON report.
    Run {
        config: PathBuf,
        /// Report path; stdout when absent.
        #[arg(long)]
        out: Option<PathBuf>,
        /// Directory for one CSV per criterion curve.
        #[arg(long)]
        csv: Option<PathBuf>,
        /// Comma-separated task list overriding the config.
        #[arg(long, value_delimiter = ',')]
        task: Option<Vec<Task>>,
        /// Suppress the summary on stderr.
        #[arg(long)]
        quiet: bool,
    },
    /// Run the built-in closed-form corpus and oracle agreement suite.
    Selftest,
}

fn init_threads() -> Result<()> {
    let Ok(s) = std::env::var("LPQ_THREADS") else {
        return Ok(());
    };
    let n: usize = s.trim().parse().with_context(|| format!("LPQ_THREADS must be a positive integer, got '{s}'"))?;
    anyhow::ensure!(n > 0, "LPQ_THREADS must be a positive integer, got '{s}'");
    #[cfg(feature = "parallel")]
    rayon::ThreadPoolBuilder::new().num_threads(n).build_global()?;
    Ok(())
}

fn run(
    config: PathBuf,
    out: Option<PathBuf>,
    csv: Option<PathBuf>,
    task: Option<Vec<Task>>,
    quiet: bool,
) -> Result<i32> {
    let mut cfg = JobConfig::load(&config)?;
    if let Some(mut t) = task {
        t.sort();
        t.dedup();
        cfg.tasks = t;
    }
    let report = run_config(cfg)?;
    match &out {
        Some(p) => report.write_json(p)?,
        None => println!("{}", report.to_json()?),
    }
    if let Some(dir) = &csv {
        report.write_csv(dir)?;
    }
    if !quiet {
        eprint!("{}", report.summary());
    }
    Ok(report.outcome.exit_code())
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    let result = init_threads().and_then(|()| match cli.command {
        Command::Run { config, out, csv, task, quiet } => run(config, out, csv, task, quiet),
        Command::Selftest => Ok(selftest::run_all()),
    });
    match result {
        Ok(code) => ExitCode::from(code as u8),
        Err(e) => {
            eprintln!("error: {e:#}");
            ExitCode::from(1)
        }
    }
}
