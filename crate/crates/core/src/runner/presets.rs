//! Named experiments: the three oscillator conditions and the gauge runs.

use super::config::{ConfigError, HistogramSpec, LoopSpec, MeasurementPlan, RunConfig, SCHEMA_VERSION};
use crate::action::PhysicsModel;
use crate::observables::fit::FitKind;
use crate::sampler::{CenterPlacement, QuadratureProfile, ScaleStrategy, SimulationConfig, StartMode, UpdateOrder};

pub const PRESET_NAMES: [&str; 8] = ["ho-A", "ho-B", "ho-C", "u1-paper", "su2-paper", "u1-desk", "su2-desk", "u1-desk-cutoff"];

/// U(1) coupling chosen so that `g²/4π ≈ 1/137`.
pub const U1_COUPLING: f64 = 0.303;
pub const SU2_COUPLING: f64 = 3.5;
/// Gauge amplitude cutoff, in units of `ξ⁻¹`.
pub const GAUGE_CUTOFF: f64 = 1.3;

/// Gauge desk runs use a larger truncation threshold than the default `1e−8`
/// to shrink every term's support (radius `3.03ξ` instead of `4.29ξ`).
pub const DESK_TRUNCATION_EPSILON: f64 = 1e-4;

pub fn preset(name: &str) -> Result<RunConfig, ConfigError> {
    let config = match name {
        "ho-A" => oscillator(name, 50, ScaleStrategy::Fixed { width_len: 1.0 }),
        "ho-B" => oscillator(name, 100, ScaleStrategy::RandomUniform { min_width_len: 0.2, max_width_len: 1.0 }),
        "ho-C" => oscillator(name, 200, ScaleStrategy::Fixed { width_len: 0.2 }),
        "u1-paper" => gauge(name, false, 7, 50, 400_000, QuadratureProfile::STANDARD),
        "su2-paper" => gauge(name, true, 7, 50, 1_200_000, QuadratureProfile::STANDARD),
        "u1-desk" => desk(name, false),
        "su2-desk" => desk(name, true),
        "u1-desk-cutoff" => {
            let mut c = desk(name, false);
            c.simulation.amplitude_cutoff_amp = 2.0 * GAUGE_CUTOFF;
            c
        }
        _ => return Err(ConfigError::UnknownPreset(name.to_string())),
    };
    config.validate()?;
    Ok(config)
}

/// `𝒯 = 20`, `m = ω = 1`, `Λ_q = 3`, hot start, 400 paths of 10⁴ iterations.
fn oscillator(name: &str, n_sum: usize, scale: ScaleStrategy) -> RunConfig {
    RunConfig {
        schema_version: SCHEMA_VERSION,
        name: name.into(),
        simulation: SimulationConfig {
            model: PhysicsModel::HarmonicOscillator { mass: 1.0, omega: 1.0 },
            time_period_len: 20.0,
            space_period_len: None,
            centers_per_axis: vec![n_sum],
            amplitude_cutoff_amp: 3.0,
            scale,
            center_placement: CenterPlacement::UniformGrid,
            start: StartMode::Hot,
            update_order: UpdateOrder::Random,
            n_iteration: 10_000,
            ensemble_size: 400,
            seed: 20_200_101,
            quadrature: QuadratureProfile::STANDARD,
            measurement_interval: 10,
            resync_interval: 1000,
        },
        measurement: MeasurementPlan {
            measure_from: 9000,
            snapshot_interval: 100,
            value_histogram: HistogramSpec { half_range_amp: 4.0, bins: 80 },
            value_samples: 200,
            coefficient_histogram: None,
            loops: None,
        },
    }
}

/// Centers on an `n³×2n` lattice with `𝒯 = 2𝒳` and `ξ = 𝒳/(n√π) = 1`.
fn gauge(name: &str, su2: bool, n: usize, paths: usize, iterations: u64, quadrature: QuadratureProfile) -> RunConfig {
    let space = n as f64 * std::f64::consts::PI.sqrt();
    // h = ξ/4, t = h, and the larger loop spans half the time period
    let segment = 0.25;
    let time = 2.0 * space;
    RunConfig {
        schema_version: SCHEMA_VERSION,
        name: name.into(),
        simulation: SimulationConfig {
            model: if su2 { PhysicsModel::GaugeSu2 { coupling: SU2_COUPLING } } else { PhysicsModel::GaugeU1 { coupling: U1_COUPLING } },
            time_period_len: time,
            space_period_len: Some(space),
            centers_per_axis: vec![n, n, n, 2 * n],
            amplitude_cutoff_amp: GAUGE_CUTOFF,
            scale: ScaleStrategy::Fixed { width_len: 1.0 },
            center_placement: CenterPlacement::UniformGrid,
            start: StartMode::Hot,
            update_order: UpdateOrder::Random,
            n_iteration: iterations,
            ensemble_size: paths,
            seed: 20_200_202,
            quadrature,
            measurement_interval: 1000,
            resync_interval: 20_000,
        },
        measurement: MeasurementPlan {
            measure_from: iterations / 2,
            snapshot_interval: iterations / 20,
            value_histogram: HistogramSpec { half_range_amp: 3.0, bins: 30 },
            value_samples: 2 * n,
            coefficient_histogram: Some(HistogramSpec { half_range_amp: 3.0, bins: 30 }),
            loops: Some(LoopSpec {
                time_extent_len: time / 2.0 - segment,
                time_step_len: segment,
                space_extents_len: (1..=(2 * n)).map(|k| 0.5 * k as f64).filter(|&r| r <= space / 2.0).collect(),
                loops_per_set: 10,
                segment_len: segment,
                fit: if su2 { FitKind::Linear } else { FitKind::Coulomb },
            }),
        },
    }
}

/// 5³×10 centers, 10 paths, coarse quadrature: qualitative results only.
fn desk(name: &str, su2: bool) -> RunConfig {
    let profile = QuadratureProfile { spacing_fraction: QuadratureProfile::COARSE.spacing_fraction, truncation_epsilon: DESK_TRUNCATION_EPSILON };
    let iterations = 200_000;
    gauge(name, su2, 5, 10, iterations, profile)
}
