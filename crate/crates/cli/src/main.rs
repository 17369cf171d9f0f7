//! `smoothpath` command-line runner.

use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand};
use smoothpath::runner::config::{ConfigError, RunConfig};
use smoothpath::runner::presets::{preset, PRESET_NAMES};
use smoothpath::runner::report::report;
use smoothpath::runner::{resume, run, RunOptions, RunnerError};

#[derive(Parser)]
#[command(name = "smoothpath", version, about = "Gaussian-basis path-integral Monte Carlo")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Start a run from a preset or a config file.
    Run {
        #[command(flatten)]
        source: Source,
        #[command(flatten)]
        exec: Exec,
        /// Output directory (default: runs/<name>).
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Continue a checkpointed run. With --preset/--config the configuration
    /// must match the checkpoint.
    Resume {
        #[command(flatten)]
        source: OptionalSource,
        #[command(flatten)]
        exec: Exec,
        #[arg(long)]
        out: PathBuf,
    },
    /// Print the results of a finished run next to reference values.
    Report {
        #[arg(long)]
        out: PathBuf,
    },
    /// Check a config file (or preset) and print it in canonical form.
    ValidateConfig {
        #[command(flatten)]
        source: Source,
    },
}

#[derive(Args)]
struct Source {
    /// One of: ho-A, ho-B, ho-C, u1-paper, su2-paper, u1-desk, su2-desk, u1-desk-cutoff.
    #[arg(long, conflicts_with = "config", required_unless_present = "config")]
    preset: Option<String>,
    #[arg(long)]
    config: Option<PathBuf>,
    /// Override the master seed.
    #[arg(long)]
    seed: Option<u64>,
}

#[derive(Args)]
struct OptionalSource {
    #[arg(long, conflicts_with = "config")]
    preset: Option<String>,
    #[arg(long)]
    config: Option<PathBuf>,
    #[arg(long)]
    seed: Option<u64>,
}

#[derive(Args)]
struct Exec {
    /// Worker threads; results do not depend on this.
    #[arg(long, default_value_t = 1)]
    workers: usize,
    /// Checkpoint and stop at this iteration (a multiple of resync_interval).
    #[arg(long)]
    stop_after: Option<u64>,
}

impl Exec {
    fn options(&self) -> RunOptions {
        RunOptions { workers: self.workers, stop_after: self.stop_after }
    }
}

fn load(preset_name: Option<&str>, config: Option<&PathBuf>, seed: Option<u64>) -> Result<RunConfig, ConfigError> {
    let mut c = match (preset_name, config) {
        (Some(p), _) => preset(p)?,
        (None, Some(path)) => RunConfig::load(path)?,
        (None, None) => return Err(ConfigError::UnknownPreset(format!("none given; choose from {}", PRESET_NAMES.join(", ")))),
    };
    if let Some(s) = seed {
        c.simulation.seed = s;
        c.validate()?;
    }
    Ok(c)
}

fn summarize(outcome: &smoothpath::runner::RunOutcome, out: &std::path::Path) {
    match &outcome.results {
        Some(_) => println!("run complete: {}", out.display()),
        None => println!("checkpoint at iteration {}: {}", outcome.checkpoint.iteration, out.display()),
    }
}

fn dispatch(cli: Cli) -> Result<(), RunnerError> {
    match cli.command {
        Command::Run { source, exec, out } => {
            let config = load(source.preset.as_deref(), source.config.as_ref(), source.seed)?;
            let out = out.unwrap_or_else(|| PathBuf::from("runs").join(&config.name));
            let outcome = run(&config, &out, &exec.options())?;
            summarize(&outcome, &out);
        }
        Command::Resume { source, exec, out } => {
            let expected = match (&source.preset, &source.config) {
                (None, None) => None,
                (p, c) => Some(load(p.as_deref(), c.as_ref(), source.seed)?),
            };
            let outcome = resume(&out, expected.as_ref(), &exec.options())?;
            summarize(&outcome, &out);
        }
        Command::Report { out } => print!("{}", report(&out)?),
        Command::ValidateConfig { source } => {
            let config = load(source.preset.as_deref(), source.config.as_ref(), source.seed)?;
            print!("{}", config.to_toml()?);
        }
    }
    Ok(())
}

fn main() -> ExitCode {
    env_logger::Builder::from_env(env_logger::Env::default().default_filter_or("info")).init();
    match dispatch(Cli::parse()) {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(e.exit_code() as u8)
        }
    }
}
