//! Versioned, bit-exact JSON checkpoints.

use serde::{Deserialize, Serialize};
use thiserror::Error;

use super::config::RunConfig;
use super::measure::ChainMeasurements;
use crate::geometry::GaussianTerm;
use crate::observables::series::ObservableSeries;
use crate::sampler::rng::RngState;
use crate::sampler::DriftRecord;

pub const CHECKPOINT_FORMAT: &str = "smoothpath-checkpoint";
pub const CHECKPOINT_VERSION: u32 = 1;
pub const CHECKPOINT_FILE: &str = "checkpoint.json";

#[derive(Debug, Error)]
pub enum CheckpointError {
    #[error("cannot read checkpoint: {0}")]
    Io(#[from] std::io::Error),
    #[error("malformed checkpoint: {0}")]
    Json(#[from] serde_json::Error),
    #[error("checkpoint mismatch: {0}")]
    Mismatch(String),
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ChainCheckpoint {
    pub index: usize,
    pub iteration: u64,
    pub accepted: u64,
    pub proposals: RngState,
    pub measurements: RngState,
    pub terms: Vec<Vec<GaussianTerm<f64>>>,
    pub series: ObservableSeries,
    pub drift: Vec<DriftRecord>,
    pub measured: ChainMeasurements,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Checkpoint {
    pub format: String,
    pub version: u32,
    pub crate_version: String,
    pub config: RunConfig,
    pub iteration: u64,
    pub chains: Vec<ChainCheckpoint>,
}

impl Checkpoint {
    pub fn new(config: RunConfig, iteration: u64, chains: Vec<ChainCheckpoint>) -> Self {
        Self {
            format: CHECKPOINT_FORMAT.into(),
            version: CHECKPOINT_VERSION,
            crate_version: env!("CARGO_PKG_VERSION").into(),
            config,
            iteration,
            chains,
        }
    }

    pub fn to_json(&self) -> Result<String, CheckpointError> {
        Ok(serde_json::to_string(self)?)
    }

    /// Parses and checks format, version and internal consistency.
    pub fn from_json(text: &str) -> Result<Self, CheckpointError> {
        let raw: serde_json::Value = serde_json::from_str(text)?;
        let format = raw.get("format").and_then(|v| v.as_str());
        let version = raw.get("version").and_then(|v| v.as_u64());
        if format != Some(CHECKPOINT_FORMAT) {
            return Err(CheckpointError::Mismatch(format!("not a checkpoint (format {format:?})")));
        }
        if version != Some(CHECKPOINT_VERSION as u64) {
            return Err(CheckpointError::Mismatch(format!("checkpoint version {version:?}, expected {CHECKPOINT_VERSION}")));
        }
        let cp: Self = serde_json::from_value(raw)?;
        if cp.crate_version != env!("CARGO_PKG_VERSION") {
            return Err(CheckpointError::Mismatch(format!("written by version {}, this is {}", cp.crate_version, env!("CARGO_PKG_VERSION"))));
        }
        if cp.chains.len() != cp.config.simulation.ensemble_size
            || cp.chains.iter().enumerate().any(|(i, c)| c.index != i || c.iteration != cp.iteration)
        {
            return Err(CheckpointError::Mismatch("chain list is inconsistent".into()));
        }
        Ok(cp)
    }

    pub fn load(path: &std::path::Path) -> Result<Self, CheckpointError> {
        Self::from_json(&std::fs::read_to_string(path)?)
    }
}
