//! Metropolis sampling of Gaussian-sum configurations.
//!
//! One step picks a term uniformly, proposes `c_i → c_i + δ` with
//! `δ ~ U[−Λ, Λ]`, and accepts with probability `min(1, e^{−ΔS})`.
//! Coefficients themselves are never clamped.

pub mod convergence;
pub mod rng;

use rand::Rng;
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::action::{ActionError, ActionState, PhysicsModel, QuadratureSpec};
use crate::geometry::{Configuration, FieldLayout, GaussianTerm, GeometryError, PeriodicDomain};
use crate::observables::series::{ObservableSeries, SeriesEntry};
use crate::scalar::Real;
use rng::{chain_rng, RngState, StreamPurpose};

#[derive(Debug, Error)]
pub enum SamplerError {
    #[error("invalid simulation config: {0}")]
    Config(String),
    #[error(transparent)]
    Action(#[from] ActionError),
    #[error(transparent)]
    Geometry(#[from] GeometryError),
    #[error("corrupt generator state: {0}")]
    Rng(#[from] std::num::ParseIntError),
}

/// How term widths are chosen at initialization.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(tag = "mode", rename_all = "kebab-case")]
pub enum ScaleStrategy {
    Fixed { width_len: f64 },
    RandomUniform { min_width_len: f64, max_width_len: f64 },
}

impl ScaleStrategy {
    pub fn min_width(&self) -> f64 {
        match *self {
            ScaleStrategy::Fixed { width_len } => width_len,
            ScaleStrategy::RandomUniform { min_width_len, .. } => min_width_len,
        }
    }

    fn validate(&self) -> Result<(), SamplerError> {
        match *self {
            ScaleStrategy::Fixed { width_len } if width_len > 0.0 && width_len.is_finite() => Ok(()),
            ScaleStrategy::RandomUniform { min_width_len, max_width_len }
                if min_width_len > 0.0 && min_width_len <= max_width_len && max_width_len.is_finite() =>
            {
                Ok(())
            }
            _ => Err(SamplerError::Config(format!("bad scale strategy {self:?}"))),
        }
    }

    fn draw(&self, rng: &mut ChaCha8Rng) -> f64 {
        match *self {
            ScaleStrategy::Fixed { width_len } => width_len,
            ScaleStrategy::RandomUniform { min_width_len, max_width_len } => min_width_len + (max_width_len - min_width_len) * rng.random::<f64>(),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum CenterPlacement {
    /// Evenly spaced: `τ_i = i𝒯/N_sum`, or the sites of a regular 4D lattice.
    UniformGrid,
    Random,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum StartMode {
    Hot,
    Cold,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum UpdateOrder {
    /// One uniformly chosen term per step.
    Random,
    /// Terms in storage order, cycling.
    Sweep,
}

/// Quadrature resolution and Gaussian truncation for a run.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct QuadratureProfile {
    /// Node spacing limit as a fraction of the smallest width.
    pub spacing_fraction: f64,
    pub truncation_epsilon: f64,
}

impl QuadratureProfile {
    pub const STANDARD: Self = Self { spacing_fraction: QuadratureSpec::STANDARD_FRACTION, truncation_epsilon: 1e-8 };
    pub const COARSE: Self = Self { spacing_fraction: QuadratureSpec::COARSE_FRACTION, truncation_epsilon: 1e-8 };
}

impl Default for QuadratureProfile {
    fn default() -> Self {
        Self::STANDARD
    }
}

/// Every parameter of a sampling run.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SimulationConfig {
    pub model: PhysicsModel<f64>,
    pub time_period_len: f64,
    /// Spatial box size; gauge runs only.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub space_period_len: Option<f64>,
    /// Terms per axis (`[N_sum]` for a particle, `[nx, ny, nz, nt]` for fields).
    pub centers_per_axis: Vec<usize>,
    /// Bound on hot-start coefficients and on proposal increments.
    pub amplitude_cutoff_amp: f64,
    pub scale: ScaleStrategy,
    pub center_placement: CenterPlacement,
    pub start: StartMode,
    #[serde(default = "default_order")]
    pub update_order: UpdateOrder,
    pub n_iteration: u64,
    pub ensemble_size: usize,
    pub seed: u64,
    #[serde(default)]
    pub quadrature: QuadratureProfile,
    pub measurement_interval: u64,
    pub resync_interval: u64,
}

fn default_order() -> UpdateOrder {
    UpdateOrder::Random
}

impl SimulationConfig {
    pub fn layout(&self) -> FieldLayout {
        self.model.layout()
    }

    /// Terms per component.
    pub fn n_sum(&self) -> usize {
        self.centers_per_axis.iter().product()
    }

    pub fn domain<T: Real>(&self) -> Result<PeriodicDomain<T>, SamplerError> {
        let t = T::lit(self.time_period_len);
        let domain = match self.layout() {
            FieldLayout::Particle => PeriodicDomain::line(t)?,
            _ => {
                let x = self.space_period_len.ok_or_else(|| SamplerError::Config("gauge runs need space_period_len".into()))?;
                PeriodicDomain::spacetime(T::lit(x), t)?
            }
        };
        Ok(domain)
    }

    pub fn quadrature<T: Real>(&self) -> Result<QuadratureSpec, SamplerError> {
        let domain = self.domain::<T>()?;
        Ok(QuadratureSpec::for_width(&domain, T::lit(self.scale.min_width()), self.quadrature.spacing_fraction)?)
    }

    pub fn validate(&self) -> Result<(), SamplerError> {
        let bad = |m: &str| Err(SamplerError::Config(m.to_string()));
        self.model.validate()?;
        self.scale.validate()?;
        if self.centers_per_axis.len() != self.layout().dims() || self.centers_per_axis.contains(&0) {
            return bad("centers_per_axis must give a positive count for every axis");
        }
        if !(self.amplitude_cutoff_amp > 0.0) || !self.amplitude_cutoff_amp.is_finite() {
            return bad("amplitude cutoff must be positive");
        }
        if self.n_iteration == 0 || self.ensemble_size == 0 {
            return bad("iteration count and ensemble size must be positive");
        }
        if self.measurement_interval == 0 || self.resync_interval == 0 {
            return bad("measurement and resync intervals must be positive");
        }
        let q = self.quadrature;
        if !(q.spacing_fraction > 0.0) || !(q.truncation_epsilon > 0.0 && q.truncation_epsilon < 1.0) {
            return bad("quadrature profile out of range");
        }
        self.domain::<f64>()?;
        self.quadrature::<f64>()?;
        Ok(())
    }
}

/// Everything that evolves along one Markov chain.
#[derive(Debug, Clone)]
pub struct ChainState<T> {
    pub config: Configuration<T>,
    pub current_action: T,
    pub iteration: u64,
    pub accepted: u64,
    pub rng: ChaCha8Rng,
}

/// Full-recomputation checkpoint of the running action.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct DriftRecord {
    pub iteration: u64,
    pub running: f64,
    pub recomputed: f64,
}

impl DriftRecord {
    pub fn relative(&self) -> f64 {
        (self.running - self.recomputed).abs() / (1.0 + self.recomputed.abs())
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct StepOutcome<T> {
    pub component: usize,
    pub index: usize,
    pub delta: T,
    pub delta_action: T,
    pub accepted: bool,
}

/// Metropolis test: accept with probability `min(1, e^{−ΔS})`.
/// Draws a uniform only when `ΔS > 0`.
#[inline]
pub fn metropolis_accept<R: Rng + ?Sized>(delta_action: f64, rng: &mut R) -> bool {
    delta_action <= 0.0 || rng.random::<f64>() < (-delta_action).exp()
}

/// A chain together with its node cache.
#[derive(Debug, Clone)]
pub struct Chain<T> {
    pub state: ChainState<T>,
    action: ActionState<T>,
    model: PhysicsModel<T>,
    cutoff: T,
    order: UpdateOrder,
    measurement_interval: u64,
    resync_interval: u64,
    drift: Vec<DriftRecord>,
}

/// Initializes chain `index` of an ensemble.
pub fn initialize_chain<T: Real>(sim: &SimulationConfig, index: usize) -> Result<Chain<T>, SamplerError> {
    sim.validate()?;
    let mut rng = chain_rng(sim.seed, index, StreamPurpose::Proposals);
    let config = initial_configuration::<T>(sim, &mut rng)?;
    Chain::from_parts(sim, config, 0, 0, rng)
}

/// Chain 0 of the ensemble.
pub fn initialize<T: Real>(sim: &SimulationConfig) -> Result<Chain<T>, SamplerError> {
    initialize_chain(sim, 0)
}

fn initial_configuration<T: Real>(sim: &SimulationConfig, rng: &mut ChaCha8Rng) -> Result<Configuration<T>, SamplerError> {
    let domain = sim.domain::<T>()?;
    let layout = sim.layout();
    let dims = domain.dims();
    let counts = &sim.centers_per_axis;
    let n_sum = sim.n_sum();
    let cutoff = sim.amplitude_cutoff_amp;

    let grid_center = |flat: usize| -> Vec<T> {
        match layout {
            // τ_i = i𝒯/N_sum for i = 1..N_sum; the last one wraps to 0
            FieldLayout::Particle => vec![domain.wrap_axis(0, T::lit((flat + 1) as f64 * sim.time_period_len / n_sum as f64))],
            _ => {
                let mut rest = flat;
                let mut site = vec![0usize; dims];
                for k in (0..dims).rev() {
                    site[k] = rest % counts[k];
                    rest /= counts[k];
                }
                (0..dims).map(|k| T::lit(site[k] as f64) * domain.extent(k) / T::lit(counts[k] as f64)).collect()
            }
        }
    };

    let mut components = Vec::with_capacity(layout.components());
    for _ in 0..layout.components() {
        let mut terms = Vec::with_capacity(n_sum);
        for i in 0..n_sum {
            let center = match sim.center_placement {
                CenterPlacement::UniformGrid => grid_center(i),
                CenterPlacement::Random => (0..dims).map(|k| domain.wrap_axis(k, T::lit(rng.random::<f64>()) * domain.extent(k))).collect(),
            };
            let width = T::lit(sim.scale.draw(rng));
            let coefficient = match sim.start {
                StartMode::Hot => T::lit(cutoff * (2.0 * rng.random::<f64>() - 1.0)),
                StartMode::Cold => T::zero(),
            };
            terms.push(GaussianTerm::new(coefficient, center, width)?);
        }
        components.push(terms);
    }
    Ok(Configuration::new(domain, layout, components)?)
}

impl<T: Real> Chain<T> {
    /// Rebuilds a chain from a stored configuration and counters.
    pub fn from_parts(
        sim: &SimulationConfig,
        config: Configuration<T>,
        iteration: u64,
        accepted: u64,
        rng: ChaCha8Rng,
    ) -> Result<Self, SamplerError> {
        let model = sim.model.cast::<T>();
        let quad = sim.quadrature::<T>()?;
        let action = ActionState::build(&config, &model, &quad, T::lit(sim.quadrature.truncation_epsilon))?;
        let current_action = action.total();
        Ok(Self {
            state: ChainState { config, current_action, iteration, accepted, rng },
            action,
            model,
            cutoff: T::lit(sim.amplitude_cutoff_amp),
            order: sim.update_order,
            measurement_interval: sim.measurement_interval,
            resync_interval: sim.resync_interval,
            drift: Vec::new(),
        })
    }

    pub fn restore(sim: &SimulationConfig, config: Configuration<T>, iteration: u64, accepted: u64, rng: &RngState) -> Result<Self, SamplerError> {
        Self::from_parts(sim, config, iteration, accepted, rng.restore()?)
    }

    pub fn config(&self) -> &Configuration<T> {
        &self.state.config
    }

    pub fn model(&self) -> &PhysicsModel<T> {
        &self.model
    }

    pub fn action_state(&self) -> &ActionState<T> {
        &self.action
    }

    pub fn current_action(&self) -> T {
        self.state.current_action
    }

    pub fn iteration(&self) -> u64 {
        self.state.iteration
    }

    pub fn acceptance_rate(&self) -> f64 {
        if self.state.iteration == 0 {
            return 0.0;
        }
        self.state.accepted as f64 / self.state.iteration as f64
    }

    pub fn drift_log(&self) -> &[DriftRecord] {
        &self.drift
    }

    pub fn rng_state(&self) -> RngState {
        RngState::capture(&self.state.rng)
    }

    /// One proposal and Metropolis decision.
    pub fn metropolis_step(&mut self) -> StepOutcome<T> {
        let n_sum = self.state.config.n_sum();
        let n_terms = self.state.config.n_terms();
        let flat = match self.order {
            UpdateOrder::Random => self.state.rng.random_range(0..n_terms),
            UpdateOrder::Sweep => (self.state.iteration % n_terms as u64) as usize,
        };
        let (component, index) = (flat / n_sum, flat % n_sum);
        let delta = self.cutoff * T::lit(2.0 * self.state.rng.random::<f64>() - 1.0);
        let delta_action = self.action.delta(&self.state.config, component, index, delta).expect("term index drawn in range");
        let accepted = metropolis_accept(delta_action.to_f64_lossy(), &mut self.state.rng);
        if accepted {
            self.action.apply(&self.state.config, component, index, delta).expect("term index drawn in range");
            let c = self.state.config.terms(component)[index].coefficient;
            self.state.config.set_coefficient(component, index, c + delta).expect("term index drawn in range");
            self.state.current_action = self.state.current_action + delta_action;
            self.state.accepted += 1;
        }
        self.state.iteration += 1;
        StepOutcome { component, index, delta, delta_action, accepted }
    }

    /// Recomputes the node cache and action from the coefficients.
    pub fn resync(&mut self) -> DriftRecord {
        self.action.rebuild(&self.state.config);
        let recomputed = self.action.total();
        let record =
            DriftRecord { iteration: self.state.iteration, running: self.state.current_action.to_f64_lossy(), recomputed: recomputed.to_f64_lossy() };
        self.state.current_action = recomputed;
        self.drift.push(record);
        record
    }

    pub fn series_columns(&self) -> Vec<String> {
        match self.model {
            PhysicsModel::HarmonicOscillator { .. } => vec!["potential_mean".into(), "q2_mean".into()],
            _ => vec!["lagrangian_mean".into()],
        }
    }

    /// Current `(iteration, S, derived)` record.
    pub fn series_entry(&self) -> SeriesEntry {
        let action = self.state.current_action.to_f64_lossy();
        let values = match self.model {
            PhysicsModel::HarmonicOscillator { mass, omega } => {
                let q2 = self.action.mean_square(0).to_f64_lossy();
                let v = 0.5 * (mass * omega * omega).to_f64_lossy() * q2;
                vec![v, q2]
            }
            _ => vec![action / self.state.config.domain().volume().to_f64_lossy()],
        };
        SeriesEntry { iteration: self.state.iteration, action, values }
    }

    /// Runs until the chain has done `until` iterations in total.
    ///
    /// Records the series every measurement interval (and at iteration 0 when
    /// starting fresh), resynchronizes the action every resync interval, and
    /// hands the chain to `observer` at every measurement point.
    pub fn run_until(&mut self, until: u64, observer: &mut impl ChainObserver<T>) -> ObservableSeries {
        let mut series = ObservableSeries::new(self.series_columns());
        if self.state.iteration == 0 {
            series.push(self.series_entry()).expect("first entry");
            observer.observe(self);
        }
        while self.state.iteration < until {
            self.metropolis_step();
            let it = self.state.iteration;
            if it.is_multiple_of(self.resync_interval) {
                self.resync();
            }
            if it.is_multiple_of(self.measurement_interval) {
                series.push(self.series_entry()).expect("iterations increase");
                observer.observe(self);
            }
        }
        series
    }
}

/// Measurement callback invoked at every measurement point of a chain.
pub trait ChainObserver<T> {
    fn observe(&mut self, chain: &Chain<T>);
}

impl<T, F: FnMut(&Chain<T>)> ChainObserver<T> for F {
    fn observe(&mut self, chain: &Chain<T>) {
        self(chain)
    }
}

/// Observer that records nothing.
#[derive(Debug, Default, Clone, Copy)]
pub struct NoObserver;

impl<T> ChainObserver<T> for NoObserver {
    fn observe(&mut self, _chain: &Chain<T>) {}
}

/// Runs `sim.n_iteration` steps from the chain's current iteration count.
pub fn run_chain<T: Real>(chain: &mut Chain<T>, sim: &SimulationConfig, observer: &mut impl ChainObserver<T>) -> ObservableSeries {
    chain.run_until(sim.n_iteration, observer)
}

/// Output of one chain of an ensemble.
#[derive(Debug)]
pub struct ChainResult<T, O> {
    pub index: usize,
    pub chain: Chain<T>,
    pub series: ObservableSeries,
    pub observer: O,
}

/// Runs `sim.ensemble_size` independent chains in parallel (on the current
/// rayon pool). Output order is chain order, independent of scheduling.
pub fn run_ensemble<T, O, F>(sim: &SimulationConfig, make_observer: F) -> Result<Vec<ChainResult<T, O>>, SamplerError>
where
    T: Real,
    O: ChainObserver<T> + Send,
    F: Fn(usize) -> O + Sync,
{
    sim.validate()?;
    (0..sim.ensemble_size)
        .into_par_iter()
        .map(|index| {
            let mut chain = initialize_chain::<T>(sim, index)?;
            let mut observer = make_observer(index);
            let series = chain.run_until(sim.n_iteration, &mut observer);
            Ok(ChainResult { index, chain, series, observer })
        })
        .collect()
}
