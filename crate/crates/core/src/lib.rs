//! Continuum path integrals sampled with Gaussian basis functions.
//!
//! Paths and gauge fields are finite sums of periodic Gaussians; the Metropolis
//! sampler updates one coefficient at a time using an incremental action.
//! Numerical code is generic over [`scalar::Real`] (`f32`/`f64`); the runner
//! and CLI work in `f64`.

// `!(x > 0)` is used on purpose: it also rejects NaN.
#![allow(clippy::neg_cmp_op_on_partial_ord)]

pub mod action;
pub mod binning;
pub mod geometry;
pub mod observables;
pub mod oracle;
pub mod runner;
pub mod sampler;
pub mod scalar;

pub use scalar::Real;

pub type Domain = geometry::PeriodicDomain<f64>;
pub type Term = geometry::GaussianTerm<f64>;
pub type Config = geometry::Configuration<f64>;
pub type Model = action::PhysicsModel<f64>;
pub type Action = action::ActionState<f64>;
pub type Chain = sampler::Chain<f64>;

pub type Domain32 = geometry::PeriodicDomain<f32>;
pub type Config32 = geometry::Configuration<f32>;
pub type Model32 = action::PhysicsModel<f32>;
pub type Chain32 = sampler::Chain<f32>;
