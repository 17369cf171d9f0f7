//! Measurements on configurations and ensembles.

pub mod fields;
pub mod fit;
pub mod histogram;
pub mod ho;
pub mod potential;
pub mod series;
pub mod stats;
pub mod su2;
pub mod wilson;

pub use fit::{fit_potential, FitKind, PotentialFit};
pub use histogram::{Histogram, Normalization, PooledHistogram};
pub use ho::{coordinate_histogram, ho_observables, HoObservables};
pub use potential::{static_potential, LoopTable, PotentialPoint, StaticPotential};
pub use series::{EnsembleSeries, ObservableSeries, SeriesEntry};
pub use wilson::{measure_loops, wilson_loop, LoopPlan, WilsonLoopSample};
