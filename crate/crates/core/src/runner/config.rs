//! Run configuration files (TOML, versioned schema).
//!
//! Every physical length carries a `_len` suffix (coordinate units for the
//! oscillator, `ξ` for gauge fields) and amplitudes an `_amp` suffix
//! (coordinate units, or `ξ⁻¹` for gauge coefficients).

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::observables::fit::FitKind;
use crate::sampler::{SamplerError, SimulationConfig};

pub const SCHEMA_VERSION: u32 = 1;

#[derive(Debug, Error)]
pub enum ConfigError {
    #[error("cannot parse config: {0}")]
    Parse(#[from] toml::de::Error),
    #[error("cannot write config: {0}")]
    Write(#[from] toml::ser::Error),
    #[error("config schema version {found} is not supported (expected {SCHEMA_VERSION})")]
    Schema { found: u32 },
    #[error(transparent)]
    Simulation(#[from] SamplerError),
    #[error("invalid measurement plan: {0}")]
    Plan(String),
    #[error("unknown preset {0:?}")]
    UnknownPreset(String),
    #[error("cannot read {path}: {source}")]
    Io { path: String, source: std::io::Error },
}

/// Uniform histogram over `[−half_range, half_range)`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct HistogramSpec {
    pub half_range_amp: f64,
    pub bins: usize,
}

/// Wilson loops measured on each snapshot and how `V(R)` is extracted.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct LoopSpec {
    /// Smaller of the two time extents `T` (the other is `T + t`).
    pub time_extent_len: f64,
    /// The step `t` in `V(R) = (1/t) ln(⟨W(T,R)⟩/⟨W(T+t,R)⟩)`.
    pub time_step_len: f64,
    pub space_extents_len: Vec<f64>,
    pub loops_per_set: usize,
    pub segment_len: f64,
    pub fit: FitKind,
}

/// What is measured besides the per-iteration series.
///
/// Snapshots are taken every `snapshot_interval` iterations from
/// `measure_from` on (inclusive); histograms and loop averages pool all
/// snapshots of a path.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct MeasurementPlan {
    pub measure_from: u64,
    pub snapshot_interval: u64,
    /// Particle: `q(τ)`; gauge: `A_μ(x)`.
    pub value_histogram: HistogramSpec,
    /// Samples per path (particle) or grid points per axis (gauge).
    pub value_samples: usize,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub coefficient_histogram: Option<HistogramSpec>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub loops: Option<LoopSpec>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RunConfig {
    pub schema_version: u32,
    pub name: String,
    pub simulation: SimulationConfig,
    pub measurement: MeasurementPlan,
}

impl RunConfig {
    pub fn from_toml(text: &str) -> Result<Self, ConfigError> {
        #[derive(Deserialize)]
        struct Version {
            schema_version: u32,
        }
        let v: Version = toml::from_str(text)?;
        if v.schema_version != SCHEMA_VERSION {
            return Err(ConfigError::Schema { found: v.schema_version });
        }
        let config: Self = toml::from_str(text)?;
        config.validate()?;
        Ok(config)
    }

    pub fn to_toml(&self) -> Result<String, ConfigError> {
        Ok(toml::to_string(self)?)
    }

    pub fn load(path: &std::path::Path) -> Result<Self, ConfigError> {
        let text = std::fs::read_to_string(path).map_err(|source| ConfigError::Io { path: path.display().to_string(), source })?;
        Self::from_toml(&text)
    }

    pub fn validate(&self) -> Result<(), ConfigError> {
        if self.schema_version != SCHEMA_VERSION {
            return Err(ConfigError::Schema { found: self.schema_version });
        }
        let sim = &self.simulation;
        sim.validate()?;
        let bad = |m: String| Err(ConfigError::Plan(m));
        if sim.seed > i64::MAX as u64 {
            return bad(format!("seed {} does not fit in 63 bits", sim.seed));
        }
        let m = &self.measurement;
        if m.snapshot_interval == 0 || !m.snapshot_interval.is_multiple_of(sim.measurement_interval) {
            return bad("snapshot_interval must be a positive multiple of measurement_interval".into());
        }
        if m.measure_from > sim.n_iteration {
            return bad("measure_from is past the end of the run".into());
        }
        for h in std::iter::once(&m.value_histogram).chain(&m.coefficient_histogram) {
            if !(h.half_range_amp > 0.0) || h.bins == 0 {
                return bad(format!("bad histogram {h:?}"));
            }
        }
        if m.value_samples == 0 {
            return bad("value_samples must be positive".into());
        }
        let gauge = sim.model.is_gauge();
        if m.loops.is_some() && !gauge {
            return bad("Wilson loops need a gauge model".into());
        }
        if let Some(l) = &m.loops {
            let space = sim.space_period_len.unwrap_or(0.0);
            if !(l.time_step_len > 0.0 && l.time_extent_len > 0.0 && l.segment_len > 0.0) || l.loops_per_set == 0 {
                return bad("loop extents, step, segment length and count must be positive".into());
            }
            if l.time_extent_len + l.time_step_len >= sim.time_period_len {
                return bad("T + t must be smaller than the time period".into());
            }
            if l.space_extents_len.is_empty() || l.space_extents_len.iter().any(|&r| !(r > 0.0 && r < space)) {
                return bad("every R must lie in (0, space period)".into());
            }
        }
        Ok(())
    }

    /// `(T, T + t)` when loops are measured.
    pub fn loop_times(&self) -> Option<[f64; 2]> {
        self.measurement.loops.as_ref().map(|l| [l.time_extent_len, l.time_extent_len + l.time_step_len])
    }
}
