use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand};
use silsamp_cli::{cmd_all, cmd_eval, cmd_ingest, cmd_report, cmd_run, cmd_sample, CliError, Overrides, RunConfig};
use silsamp_core::{BackendKind, ConditionId};

#[derive(Parser)]
#[command(name = "silsamp", version, about = "Silicon survey sampling experiments")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Extract marginals and human answer distributions
    Ingest(Common),
    /// Draw the silicon population
    Sample(Common),
    /// Query the backend for every question and condition
    Run(Common),
    /// Estimate divergences, deltas and strata
    Eval(Common),
    /// Render charts and delta tables
    Report(Common),
    /// All stages in order
    All(Common),
}

#[derive(Args)]
struct Common {
    #[arg(long)]
    config: PathBuf,
    #[arg(long)]
    seed: Option<u64>,
    /// Condition number or name; repeat or comma-separate
    #[arg(long, value_delimiter = ',')]
    condition: Vec<ConditionId>,
    #[arg(long)]
    temperature: Option<f64>,
    #[arg(long)]
    backend: Option<BackendKind>,
    #[arg(long)]
    max_in_flight: Option<usize>,
    #[arg(long)]
    out: Option<PathBuf>,
}

impl Common {
    fn load(&self) -> Result<RunConfig, CliError> {
        let mut config = RunConfig::load(&self.config)?;
        config.apply(&Overrides {
            seed: self.seed,
            conditions: (!self.condition.is_empty()).then(|| self.condition.clone()),
            temperature: self.temperature,
            backend: self.backend,
            max_in_flight: self.max_in_flight,
            output_dir: self.out.clone(),
        });
        Ok(config)
    }
}

fn main() -> ExitCode {
    env_logger::Builder::from_env(env_logger::Env::default().default_filter_or("info")).init();
    let cli = Cli::parse();
    let result = match &cli.command {
        Command::Ingest(c) => c.load().and_then(|cfg| cmd_ingest(&cfg)),
        Command::Sample(c) => c.load().and_then(|cfg| cmd_sample(&cfg)),
        Command::Run(c) => c.load().and_then(|cfg| cmd_run(&cfg, None)),
        Command::Eval(c) => c.load().and_then(|cfg| cmd_eval(&cfg)),
        Command::Report(c) => c.load().and_then(|cfg| cmd_report(&cfg)),
        Command::All(c) => c.load().and_then(|cfg| cmd_all(&cfg, None)),
    };
    match result {
        Ok(counts) => {
            for (k, v) in counts {
                println!("{k}: {v}");
            }
            ExitCode::SUCCESS
        }
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(e.exit_code() as u8)
        }
    }
}
