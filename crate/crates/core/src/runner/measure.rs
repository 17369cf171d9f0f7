//! Per-chain snapshot measurements (histograms and Wilson loops).

use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use super::config::{HistogramSpec, RunConfig};
use crate::binning::TermIndex;
use crate::geometry::FieldLayout;
use crate::observables::fields::{fill_coefficients, fill_field_values};
use crate::observables::histogram::Histogram;
use crate::observables::ho::fill_coordinate_histogram;
use crate::observables::wilson::{measure_loops, LoopPlan};
use crate::sampler::rng::{chain_rng, RngState, StreamPurpose};
use crate::sampler::{Chain, ChainObserver};

/// Snapshot sums accumulated along one chain.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ChainMeasurements {
    pub snapshots: u64,
    pub values: Histogram,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub coefficients: Option<Histogram>,
    /// Sum over snapshots of the per-snapshot loop averages, per `(T, R)` set.
    #[serde(default, skip_serializing_if = "Vec::is_empty")]
    pub loop_sums: Vec<f64>,
}

impl ChainMeasurements {
    pub fn new(config: &RunConfig) -> Self {
        let hist = |h: &HistogramSpec| Histogram::symmetric(h.half_range_amp, h.bins).expect("validated histogram");
        let m = &config.measurement;
        Self {
            snapshots: 0,
            values: hist(&m.value_histogram),
            coefficients: m.coefficient_histogram.as_ref().map(hist),
            loop_sums: vec![0.0; loop_plan(config).map_or(0, |p| p.sets().len())],
        }
    }

    /// Loop averages of this path over its snapshots.
    pub fn loop_means(&self) -> Vec<f64> {
        let n = self.snapshots.max(1) as f64;
        self.loop_sums.iter().map(|s| s / n).collect()
    }
}

/// The `(T, T + t) × R` loop grid of a run.
pub fn loop_plan(config: &RunConfig) -> Option<LoopPlan> {
    let l = config.measurement.loops.as_ref()?;
    Some(LoopPlan {
        time_extents: config.loop_times()?.to_vec(),
        space_extents: l.space_extents_len.clone(),
        loops_per_set: l.loops_per_set,
        segment_len: l.segment_len,
    })
}

/// Chain observer that takes the planned snapshots.
pub struct Measurer<'a> {
    config: &'a RunConfig,
    plan: Option<LoopPlan>,
    pub acc: ChainMeasurements,
    pub rng: ChaCha8Rng,
}

impl<'a> Measurer<'a> {
    pub fn fresh(config: &'a RunConfig, chain: usize) -> Self {
        let rng = chain_rng(config.simulation.seed, chain, StreamPurpose::Measurements);
        Self::resume(config, ChainMeasurements::new(config), rng)
    }

    pub fn resume(config: &'a RunConfig, acc: ChainMeasurements, rng: ChaCha8Rng) -> Self {
        Self { config, plan: loop_plan(config), acc, rng }
    }

    pub fn rng_state(&self) -> RngState {
        RngState::capture(&self.rng)
    }

    fn snapshot(&mut self, chain: &Chain<f64>) {
        let config = chain.config();
        let m = &self.config.measurement;
        let index = TermIndex::build(config, self.config.simulation.quadrature.truncation_epsilon).expect("valid configuration");
        match config.layout() {
            FieldLayout::Particle => fill_coordinate_histogram(&mut self.acc.values, config, &index, m.value_samples),
            _ => fill_field_values(&mut self.acc.values, config, &index, m.value_samples),
        }
        if let Some(h) = &mut self.acc.coefficients {
            fill_coefficients(h, config);
        }
        if let Some(plan) = &self.plan {
            let values = measure_loops(config, chain.model(), &index, plan, &mut self.rng).expect("validated loop plan");
            for (s, v) in self.acc.loop_sums.iter_mut().zip(values) {
                *s += v;
            }
        }
        self.acc.snapshots += 1;
    }
}

impl ChainObserver<f64> for Measurer<'_> {
    fn observe(&mut self, chain: &Chain<f64>) {
        let it = chain.iteration();
        let m = &self.config.measurement;
        if it >= m.measure_from && it.is_multiple_of(m.snapshot_interval) {
            self.snapshot(chain);
        }
    }
}
