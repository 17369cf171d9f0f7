//! Experiment execution: configs and presets, ensemble runs with
//! checkpoints, CSV export and reports.

pub mod checkpoint;
pub mod config;
pub mod measure;
pub mod output;
pub mod presets;
pub mod report;

use std::path::{Path, PathBuf};
use std::time::Instant;

use log::info;
use rayon::prelude::*;
use thiserror::Error;

use crate::geometry::{Configuration, GeometryError};
use crate::sampler::{initialize_chain, Chain, SamplerError};
use checkpoint::{ChainCheckpoint, Checkpoint, CheckpointError, CHECKPOINT_FILE};
use config::{ConfigError, RunConfig};
use measure::Measurer;
pub use output::{RunMetadata, RunResults};

#[derive(Debug, Error)]
pub enum RunnerError {
    #[error(transparent)]
    Config(#[from] ConfigError),
    #[error(transparent)]
    Checkpoint(#[from] CheckpointError),
    #[error(transparent)]
    Sampler(#[from] SamplerError),
    #[error(transparent)]
    Geometry(#[from] GeometryError),
    #[error("i/o error on {path}: {source}")]
    Io { path: PathBuf, source: std::io::Error },
    #[error("csv error: {0}")]
    Csv(#[from] csv::Error),
    #[error("json error: {0}")]
    Json(#[from] serde_json::Error),
    #[error("{0} already holds a run; choose another --out or use resume")]
    OutputExists(PathBuf),
    #[error("missing run artifact {0}")]
    MissingArtifact(PathBuf),
    #[error("cannot build worker pool: {0}")]
    Pool(#[from] rayon::ThreadPoolBuildError),
}

impl RunnerError {
    /// CLI exit status: 2 for configuration problems, 3 for refused resumes.
    pub fn exit_code(&self) -> i32 {
        match self {
            RunnerError::Config(_) => 2,
            RunnerError::Checkpoint(_) => 3,
            _ => 1,
        }
    }
}

pub(crate) fn io_err(path: &Path) -> impl FnOnce(std::io::Error) -> RunnerError + '_ {
    move |source| RunnerError::Io { path: path.to_path_buf(), source }
}

#[derive(Debug, Clone)]
pub struct RunOptions {
    /// Worker threads; chains are distributed over them.
    pub workers: usize,
    /// Stop (and checkpoint) after this many iterations instead of finishing.
    pub stop_after: Option<u64>,
}

impl Default for RunOptions {
    fn default() -> Self {
        Self { workers: 1, stop_after: None }
    }
}

/// Outcome of `run`/`resume`.
#[derive(Debug)]
pub struct RunOutcome {
    pub checkpoint: Checkpoint,
    /// Present once the run reached `n_iteration`.
    pub results: Option<RunResults>,
}

/// Starts a fresh run in `out`.
pub fn run(config: &RunConfig, out: &Path, options: &RunOptions) -> Result<RunOutcome, RunnerError> {
    config.validate()?;
    if out.join(CHECKPOINT_FILE).exists() || out.join(output::METADATA_FILE).exists() {
        return Err(RunnerError::OutputExists(out.to_path_buf()));
    }
    std::fs::create_dir_all(out).map_err(io_err(out))?;
    execute(config, None, out, options)
}

/// Continues the run checkpointed in `out`. If `expected` is given it must
/// match the checkpointed configuration exactly.
pub fn resume(out: &Path, expected: Option<&RunConfig>, options: &RunOptions) -> Result<RunOutcome, RunnerError> {
    let path = out.join(CHECKPOINT_FILE);
    if !path.exists() {
        return Err(CheckpointError::Mismatch(format!("no checkpoint at {}", path.display())).into());
    }
    let cp = Checkpoint::load(&path)?;
    if let Some(e) = expected {
        if *e != cp.config {
            return Err(CheckpointError::Mismatch("configuration differs from the checkpointed run".into()).into());
        }
    }
    if cp.iteration >= cp.config.simulation.n_iteration {
        return Err(CheckpointError::Mismatch("run is already complete".into()).into());
    }
    let config = cp.config.clone();
    config.validate()?;
    execute(&config, Some(cp), out, options)
}

fn execute(config: &RunConfig, from: Option<Checkpoint>, out: &Path, options: &RunOptions) -> Result<RunOutcome, RunnerError> {
    let sim = &config.simulation;
    let start = from.as_ref().map_or(0, |c| c.iteration);
    let target = options.stop_after.unwrap_or(sim.n_iteration).min(sim.n_iteration);
    if target <= start {
        return Err(ConfigError::Plan(format!("stop iteration {target} is not after the current iteration {start}")).into());
    }
    if target < sim.n_iteration && !target.is_multiple_of(sim.resync_interval) {
        return Err(ConfigError::Plan(format!("stop iteration {target} must be a multiple of resync_interval {}", sim.resync_interval)).into());
    }
    let pool = rayon::ThreadPoolBuilder::new().num_threads(options.workers.max(1)).build()?;
    let clock = Instant::now();
    info!("{}: iterations {start}..{target}, {} chains, {} workers", config.name, sim.ensemble_size, options.workers.max(1));

    let previous = from.map(|c| c.chains);
    let chains: Vec<ChainCheckpoint> = pool.install(|| {
        (0..sim.ensemble_size)
            .into_par_iter()
            .map(|index| advance_chain(config, index, previous.as_ref().map(|p| &p[index]), target))
            .collect::<Result<_, RunnerError>>()
    })?;
    let checkpoint = Checkpoint::new(config.clone(), target, chains);
    let cp_path = out.join(CHECKPOINT_FILE);
    std::fs::write(&cp_path, checkpoint.to_json()?).map_err(io_err(&cp_path))?;

    let results = if target == sim.n_iteration { Some(RunResults::compute(&checkpoint)?) } else { None };
    let metadata = RunMetadata::new(config, &checkpoint, results.as_ref(), options.workers.max(1), clock.elapsed().as_secs_f64());
    output::write_run(out, &checkpoint, &metadata, results.as_ref())?;
    info!("{}: reached iteration {target} in {:.1}s", config.name, clock.elapsed().as_secs_f64());
    Ok(RunOutcome { checkpoint, results })
}

fn advance_chain(config: &RunConfig, index: usize, from: Option<&ChainCheckpoint>, target: u64) -> Result<ChainCheckpoint, RunnerError> {
    let sim = &config.simulation;
    let (mut chain, mut measurer, mut series, mut drift) = match from {
        None => {
            let chain = initialize_chain::<f64>(sim, index)?;
            let series = crate::observables::series::ObservableSeries::new(chain.series_columns());
            (chain, Measurer::fresh(config, index), series, Vec::new())
        }
        Some(cp) => {
            let domain = sim.domain::<f64>()?;
            let terms = Configuration::new(domain, sim.layout(), cp.terms.clone())?;
            let chain = Chain::restore(sim, terms, cp.iteration, cp.accepted, &cp.proposals)?;
            let rng = cp.measurements.restore().map_err(SamplerError::from)?;
            (chain, Measurer::resume(config, cp.measured.clone(), rng), cp.series.clone(), cp.drift.clone())
        }
    };
    let new = chain.run_until(target, &mut measurer);
    series.extend(new).expect("continuation of the same chain");
    drift.extend_from_slice(chain.drift_log());
    Ok(ChainCheckpoint {
        index,
        iteration: chain.iteration(),
        accepted: chain.state.accepted,
        proposals: chain.rng_state(),
        measurements: measurer.rng_state(),
        terms: chain.config().components().to_vec(),
        series,
        drift,
        measured: measurer.acc,
    })
}
