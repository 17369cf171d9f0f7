//! Harmonic-oscillator path observables.

use serde::{Deserialize, Serialize};

use super::histogram::Histogram;
use crate::action::{ActionError, ActionState, PhysicsModel, QuadratureSpec};
use crate::binning::TermIndex;
use crate::geometry::{Configuration, GeometryError};
use crate::scalar::Real;

/// Time averages of one path: `V̄ = (mω²/2)·(1/𝒯)∫q²dτ` and `q̄² = (1/𝒯)∫q²dτ`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct HoObservables {
    pub potential_mean: f64,
    pub q2_mean: f64,
}

impl HoObservables {
    /// From an action cache that is in sync with its configuration.
    pub fn from_state<T: Real>(state: &ActionState<T>) -> Result<Self, ActionError> {
        let PhysicsModel::HarmonicOscillator { mass, omega } = *state.model() else {
            return Err(ActionError::KindMismatch { model: state.model().name(), layout: crate::geometry::FieldLayout::Particle });
        };
        let q2 = state.mean_square(0).to_f64_lossy();
        let k = (mass * omega * omega).to_f64_lossy();
        Ok(Self { potential_mean: 0.5 * k * q2, q2_mean: q2 })
    }
}

/// Path averages of `config` on the given quadrature.
pub fn ho_observables<T: Real>(
    config: &Configuration<T>,
    model: &PhysicsModel<T>,
    quad: &QuadratureSpec,
    epsilon: T,
) -> Result<HoObservables, ActionError> {
    HoObservables::from_state(&ActionState::build(config, model, quad, epsilon)?)
}

/// Adds `q(τ)` at `samples` uniformly spaced times `τ_k = k𝒯/samples` to `hist`.
pub fn fill_coordinate_histogram<T: Real>(hist: &mut Histogram, config: &Configuration<T>, index: &TermIndex<T>, samples: usize) {
    let period = config.domain().extent(0);
    for k in 0..samples {
        let tau = T::lit(k as f64 / samples as f64) * period;
        hist.fill(index.evaluate(config, 0, &[tau]).to_f64_lossy());
    }
}

/// Pooled position histogram over an ensemble of paths.
pub fn coordinate_histogram<T: Real>(
    ensemble: &[Configuration<T>],
    template: &Histogram,
    samples_per_path: usize,
    epsilon: T,
) -> Result<Histogram, GeometryError> {
    let mut hist = Histogram { counts: vec![0; template.bins()], underflow: 0, overflow: 0, ..template.clone() };
    for config in ensemble {
        let index = TermIndex::build(config, epsilon)?;
        fill_coordinate_histogram(&mut hist, config, &index, samples_per_path);
    }
    Ok(hist)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::geometry::{FieldLayout, GaussianTerm, PeriodicDomain};

    fn path(coefficients: &[f64]) -> Configuration<f64> {
        let n = coefficients.len();
        let terms = coefficients.iter().enumerate().map(|(i, &c)| GaussianTerm::new(c, vec![20.0 * i as f64 / n as f64], 1.0).unwrap()).collect();
        Configuration::new(PeriodicDomain::line(20.0).unwrap(), FieldLayout::Particle, vec![terms]).unwrap()
    }

    fn ho() -> PhysicsModel<f64> {
        PhysicsModel::HarmonicOscillator { mass: 1.0, omega: 2.0 }
    }

    #[test]
    fn zero_path() {
        let config = path(&[0.0; 10]);
        let quad = QuadratureSpec::standard(config.domain(), 1.0).unwrap();
        let obs = ho_observables(&config, &ho(), &quad, 1e-8).unwrap();
        assert_eq!(obs, HoObservables { potential_mean: 0.0, q2_mean: 0.0 });
    }

    #[test]
    fn single_gaussian_mean_square() {
        // ∫ e^{−2τ²} dτ = √(π/2)
        let config = path(&[1.5]);
        let quad = QuadratureSpec::standard(config.domain(), 1.0).unwrap();
        let obs = ho_observables(&config, &ho(), &quad, 1e-8).unwrap();
        let expected = 2.25 * (std::f64::consts::PI / 2.0).sqrt() / 20.0;
        assert!((obs.q2_mean - expected).abs() < 1e-8 * expected);
        assert!((obs.potential_mean - 2.0 * obs.q2_mean).abs() < 1e-15);
    }

    #[test]
    fn gauge_model_is_rejected() {
        let config = path(&[1.0]);
        let quad = QuadratureSpec::standard(config.domain(), 1.0).unwrap();
        assert!(ho_observables(&config, &PhysicsModel::GaugeU1 { coupling: 1.0 }, &quad, 1e-8).is_err());
    }

    #[test]
    fn cold_paths_fill_the_central_bin() {
        let template = Histogram::symmetric(3.0, 31).unwrap();
        let h = coordinate_histogram(&[path(&[0.0; 20]), path(&[0.0; 20])], &template, 100, 1e-8).unwrap();
        assert_eq!(h.counts[15], 200);
        assert_eq!(h.in_range(), 200);
    }
}
