//! Euclidean actions by midpoint quadrature with analytic integrands.
//!
//! Field values and derivatives at the quadrature nodes are cached per
//! configuration ([`ActionState`]); a single-coefficient change touches only
//! the nodes inside that term's truncated support, so the Metropolis
//! inner loop costs a local sum instead of a full integral.

mod density;
pub mod grid;

use rayon::prelude::*;
use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::geometry::{Configuration, FieldLayout, GeometryError, PeriodicDomain, DEFAULT_TRUNCATION_EPSILON};
use crate::scalar::Real;
use density::{density, density_change, record_len};
use grid::{for_each_footprint_node, FootprintScratch, NodeGrid};

#[derive(Debug, Error, Clone, PartialEq)]
pub enum ActionError {
    #[error("model {model} cannot act on a {layout:?} configuration")]
    KindMismatch { model: &'static str, layout: FieldLayout },
    #[error("invalid physics model: {0}")]
    InvalidModel(String),
    #[error("quadrature spacing {spacing} on axis {axis} exceeds {limit} (= {fraction} × minimum width)")]
    SpacingTooCoarse { axis: usize, spacing: f64, limit: f64, fraction: f64 },
    #[error("quadrature needs {expected} axes, got {got}")]
    QuadratureDims { expected: usize, got: usize },
    #[error(transparent)]
    Geometry(#[from] GeometryError),
}

/// Physical system and its constants.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "kebab-case")]
pub enum PhysicsModel<T> {
    /// `L = (m/2) q̇² + (m ω²/2) q²`.
    HarmonicOscillator { mass: T, omega: T },
    /// Free Maxwell field; the coupling only enters Wilson loops.
    GaugeU1 { coupling: T },
    /// Yang–Mills with structure constants `ε_abc` in the field strength.
    GaugeSu2 { coupling: T },
}

impl<T: Real> PhysicsModel<T> {
    pub fn validate(&self) -> Result<(), ActionError> {
        let bad = |msg: &str| Err(ActionError::InvalidModel(msg.to_string()));
        match *self {
            PhysicsModel::HarmonicOscillator { mass, omega } => {
                if !(mass > T::zero()) || !(omega > T::zero()) {
                    return bad("mass and angular frequency must be positive");
                }
            }
            PhysicsModel::GaugeU1 { coupling } | PhysicsModel::GaugeSu2 { coupling } => {
                // g = 0 is allowed for SU(2): it decouples into three U(1) copies
                if !(coupling >= T::zero()) || !coupling.is_finite() {
                    return bad("gauge coupling must be non-negative");
                }
            }
        }
        Ok(())
    }

    pub fn name(&self) -> &'static str {
        match self {
            PhysicsModel::HarmonicOscillator { .. } => "harmonic-oscillator",
            PhysicsModel::GaugeU1 { .. } => "gauge-u1",
            PhysicsModel::GaugeSu2 { .. } => "gauge-su2",
        }
    }

    pub fn layout(&self) -> FieldLayout {
        match self {
            PhysicsModel::HarmonicOscillator { .. } => FieldLayout::Particle,
            PhysicsModel::GaugeU1 { .. } => FieldLayout::U1,
            PhysicsModel::GaugeSu2 { .. } => FieldLayout::Su2,
        }
    }

    pub fn is_gauge(&self) -> bool {
        !matches!(self, PhysicsModel::HarmonicOscillator { .. })
    }

    /// Coupling used in Wilson loops (`g`); 1 for the oscillator.
    pub fn coupling(&self) -> T {
        match *self {
            PhysicsModel::GaugeU1 { coupling } | PhysicsModel::GaugeSu2 { coupling } => coupling,
            PhysicsModel::HarmonicOscillator { .. } => T::one(),
        }
    }

    /// Coupling entering the action: zero for U(1), whose action is free.
    pub(crate) fn action_coupling(&self) -> T {
        match *self {
            PhysicsModel::GaugeSu2 { coupling } => coupling,
            _ => T::zero(),
        }
    }

    pub fn cast<U: Real>(&self) -> PhysicsModel<U> {
        let c = |v: T| U::lit(v.to_f64_lossy());
        match *self {
            PhysicsModel::HarmonicOscillator { mass, omega } => PhysicsModel::HarmonicOscillator { mass: c(mass), omega: c(omega) },
            PhysicsModel::GaugeU1 { coupling } => PhysicsModel::GaugeU1 { coupling: c(coupling) },
            PhysicsModel::GaugeSu2 { coupling } => PhysicsModel::GaugeSu2 { coupling: c(coupling) },
        }
    }

    fn check_layout(&self, layout: FieldLayout) -> Result<(), ActionError> {
        if self.layout() != layout {
            return Err(ActionError::KindMismatch { model: self.name(), layout });
        }
        Ok(())
    }
}

/// Uniform midpoint rule on the torus.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct QuadratureSpec {
    nodes_per_axis: Vec<usize>,
    /// Node spacing must not exceed this fraction of the smallest width.
    spacing_fraction: f64,
}

impl QuadratureSpec {
    /// Standard resolution limit: spacing ≤ ξ_min/4.
    pub const STANDARD_FRACTION: f64 = 0.25;
    /// Coarse desk-scale limit: spacing ≤ ξ_min/2; a known systematic.
    pub const COARSE_FRACTION: f64 = 0.5;

    /// Explicit node counts, checked against `spacing ≤ ξ_min/4`.
    pub fn new<T: Real>(domain: &PeriodicDomain<T>, nodes_per_axis: Vec<usize>, min_width: T) -> Result<Self, ActionError> {
        Self::with_limit(domain, nodes_per_axis, min_width, Self::STANDARD_FRACTION)
    }

    pub fn with_limit<T: Real>(
        domain: &PeriodicDomain<T>,
        nodes_per_axis: Vec<usize>,
        min_width: T,
        spacing_fraction: f64,
    ) -> Result<Self, ActionError> {
        let spec = Self { nodes_per_axis, spacing_fraction };
        spec.check(domain, min_width)?;
        Ok(spec)
    }

    /// Fewest nodes per axis with spacing ≤ `fraction · min_width`.
    pub fn for_width<T: Real>(domain: &PeriodicDomain<T>, min_width: T, fraction: f64) -> Result<Self, ActionError> {
        if !(min_width > T::zero()) {
            return Err(GeometryError::BadWidth(min_width.to_f64_lossy()).into());
        }
        let limit = min_width.to_f64_lossy() * fraction;
        let nodes = domain
            .extents()
            .iter()
            .map(|&l| {
                let ratio = l.to_f64_lossy() / limit;
                // guard against ratio landing a hair above an integer
                let n = (ratio - 1e-9).ceil().max(1.0);
                n as usize
            })
            .collect();
        Self::with_limit(domain, nodes, min_width, fraction)
    }

    pub fn standard<T: Real>(domain: &PeriodicDomain<T>, min_width: T) -> Result<Self, ActionError> {
        Self::for_width(domain, min_width, Self::STANDARD_FRACTION)
    }

    pub fn coarse<T: Real>(domain: &PeriodicDomain<T>, min_width: T) -> Result<Self, ActionError> {
        Self::for_width(domain, min_width, Self::COARSE_FRACTION)
    }

    pub fn nodes_per_axis(&self) -> &[usize] {
        &self.nodes_per_axis
    }

    pub fn spacing_fraction(&self) -> f64 {
        self.spacing_fraction
    }

    /// Same spacing limit, node count per axis doubled.
    pub fn refined(&self) -> Self {
        Self { nodes_per_axis: self.nodes_per_axis.iter().map(|n| 2 * n).collect(), spacing_fraction: self.spacing_fraction }
    }

    pub fn check<T: Real>(&self, domain: &PeriodicDomain<T>, min_width: T) -> Result<(), ActionError> {
        if self.nodes_per_axis.len() != domain.dims() {
            return Err(ActionError::QuadratureDims { expected: domain.dims(), got: self.nodes_per_axis.len() });
        }
        let limit = min_width.to_f64_lossy() * self.spacing_fraction;
        for (axis, &n) in self.nodes_per_axis.iter().enumerate() {
            let spacing = domain.extent(axis).to_f64_lossy() / n.max(1) as f64;
            if n == 0 || spacing > limit * (1.0 + 1e-12) {
                return Err(ActionError::SpacingTooCoarse { axis, spacing, limit, fraction: self.spacing_fraction });
            }
        }
        Ok(())
    }
}

/// Per-configuration quadrature cache: field values and gradients at every node.
#[derive(Debug, Clone)]
pub struct ActionState<T> {
    model: PhysicsModel<T>,
    grid: NodeGrid<T>,
    log_inv_epsilon: T,
    record: usize,
    data: Vec<T>,
    scratch: FootprintScratch<T>,
}

const CHUNK: usize = 4096;

impl<T: Real> ActionState<T> {
    pub fn build(config: &Configuration<T>, model: &PhysicsModel<T>, quad: &QuadratureSpec, epsilon: T) -> Result<Self, ActionError> {
        model.validate()?;
        model.check_layout(config.layout())?;
        quad.check(config.domain(), config.min_width())?;
        if !(epsilon > T::zero() && epsilon < T::one()) {
            return Err(GeometryError::BadEpsilon(epsilon.to_f64_lossy()).into());
        }
        let grid = NodeGrid::new(config.domain(), quad.nodes_per_axis());
        let record = record_len(config.layout());
        let mut state = Self {
            model: *model,
            data: vec![T::zero(); grid.len() * record],
            grid,
            log_inv_epsilon: -epsilon.ln(),
            record,
            scratch: FootprintScratch::default(),
        };
        state.rebuild(config);
        Ok(state)
    }

    pub fn model(&self) -> &PhysicsModel<T> {
        &self.model
    }

    pub fn grid(&self) -> &NodeGrid<T> {
        &self.grid
    }

    /// Recomputes every node record from scratch.
    pub fn rebuild(&mut self, config: &Configuration<T>) {
        self.data.iter_mut().for_each(|v| *v = T::zero());
        let w = 1 + config.domain().dims();
        let two = T::lit(2.0);
        for comp in 0..config.n_components() {
            for term in config.terms(comp) {
                let c = term.coefficient;
                if c == T::zero() {
                    continue;
                }
                let inv_w2 = T::one() / (term.width * term.width);
                let data = &mut self.data;
                let record = self.record;
                for_each_footprint_node(&self.grid, term, self.log_inv_epsilon, &mut self.scratch, |node, p, delta| {
                    let base = node * record + comp * w;
                    let g = c * p;
                    data[base] = data[base] + g;
                    for axis in 0..w - 1 {
                        data[base + 1 + axis] = data[base + 1 + axis] - two * delta[axis] * inv_w2 * g;
                    }
                });
            }
        }
    }

    /// Quadrature value of the action for the cached configuration.
    pub fn total(&self) -> T {
        let model = self.model;
        let record = self.record;
        let partials: Vec<T> = self
            .data
            .par_chunks(CHUNK * record)
            .map(|chunk| chunk.chunks_exact(record).map(|rec| density(&model, rec)).fold(T::zero(), |a, b| a + b))
            .collect();
        partials.into_iter().fold(T::zero(), |a, b| a + b) * self.grid.weight()
    }

    /// `(1/V) ∫ q²` for the oscillator, read off the node cache.
    pub fn mean_square(&self, component: usize) -> T {
        let w = 1 + self.grid.dims();
        let sum = self.data.chunks_exact(self.record).map(|rec| rec[component * w] * rec[component * w]).fold(T::zero(), |a, b| a + b);
        sum / T::lit(self.grid.len() as f64)
    }

    /// Cached value of one component at every node.
    pub fn node_values(&self, component: usize) -> impl Iterator<Item = T> + '_ {
        let w = 1 + self.grid.dims();
        self.data.chunks_exact(self.record).map(move |rec| rec[component * w])
    }

    /// `S[c_i + δ] − S[c_i]`, integrating only over the term's support.
    pub fn delta(&mut self, config: &Configuration<T>, component: usize, index: usize, delta: T) -> Result<T, ActionError> {
        let term = config.term(component, index)?;
        if delta == T::zero() {
            return Ok(T::zero());
        }
        let w = 1 + config.domain().dims();
        let two = T::lit(2.0);
        let inv_w2 = T::one() / (term.width * term.width);
        let model = self.model;
        let record = self.record;
        let data = &self.data;
        let mut sum = T::zero();
        for_each_footprint_node(&self.grid, term, self.log_inv_epsilon, &mut self.scratch, |node, p, disp| {
            let g = delta * p;
            let mut dgrad = [T::zero(); 4];
            for axis in 0..w - 1 {
                dgrad[axis] = -two * disp[axis] * inv_w2 * g;
            }
            let rec = &data[node * record..(node + 1) * record];
            sum = sum + density_change(&model, rec, component, g, &dgrad);
        });
        Ok(sum * self.grid.weight())
    }

    /// Adds `delta · φ_i` to the cached node records.
    pub fn apply(&mut self, config: &Configuration<T>, component: usize, index: usize, delta: T) -> Result<(), ActionError> {
        let term = config.term(component, index)?;
        let w = 1 + config.domain().dims();
        let two = T::lit(2.0);
        let inv_w2 = T::one() / (term.width * term.width);
        let record = self.record;
        let data = &mut self.data;
        for_each_footprint_node(&self.grid, term, self.log_inv_epsilon, &mut self.scratch, |node, p, disp| {
            let base = node * record + component * w;
            let g = delta * p;
            data[base] = data[base] + g;
            for axis in 0..w - 1 {
                data[base + 1 + axis] = data[base + 1 + axis] - two * disp[axis] * inv_w2 * g;
            }
        });
        Ok(())
    }
}

/// Full quadrature action with the default truncation.
pub fn action_total<T: Real>(config: &Configuration<T>, model: &PhysicsModel<T>, quad: &QuadratureSpec) -> Result<T, ActionError> {
    Ok(ActionState::build(config, model, quad, T::lit(DEFAULT_TRUNCATION_EPSILON))?.total())
}

/// `S[c + δ·e_i] − S[c]` for a single coefficient change, via local integration.
pub fn action_delta<T: Real>(
    config: &Configuration<T>,
    model: &PhysicsModel<T>,
    quad: &QuadratureSpec,
    component: usize,
    index: usize,
    delta_coefficient: T,
) -> Result<T, ActionError> {
    config.term(component, index)?;
    let mut state = ActionState::build(config, model, quad, T::lit(DEFAULT_TRUNCATION_EPSILON))?;
    state.delta(config, component, index, delta_coefficient)
}

/// `S / volume`: the averaged Lagrangian (density) over the whole torus.
pub fn lagrangian_density_average<T: Real>(config: &Configuration<T>, model: &PhysicsModel<T>, quad: &QuadratureSpec) -> Result<T, ActionError> {
    Ok(action_total(config, model, quad)? / config.domain().volume())
}
