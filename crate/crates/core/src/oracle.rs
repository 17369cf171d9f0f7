//! Independent reference results: closed forms, the exact discretized
//! oscillator, and a conventional lattice path-integral sampler.

use nalgebra::DMatrix;
use rand::Rng;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::action::grid::NodeGrid;
use crate::action::QuadratureSpec;
use crate::geometry::Configuration;
use crate::observables::histogram::{Histogram, PooledHistogram};
use crate::observables::stats::mean_and_error;
use crate::sampler::metropolis_accept;
use crate::sampler::rng::{chain_rng, StreamPurpose};

/// Ground state of `H = p²/2m + mω²q²/2`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct GroundState {
    pub mass: f64,
    pub omega: f64,
    /// `⟨V⟩ = ω/4`.
    pub potential: f64,
    /// `⟨q²⟩ = 1/(2mω)`.
    pub q2: f64,
}

impl GroundState {
    /// `|ψ₀(q)|² = √(mω/π) e^{−mωq²}`.
    pub fn density(&self, q: f64) -> f64 {
        let k = self.mass * self.omega;
        (k / std::f64::consts::PI).sqrt() * (-k * q * q).exp()
    }
}

pub fn analytic_ground_state(mass: f64, omega: f64) -> GroundState {
    GroundState { mass, omega, potential: omega / 4.0, q2: 1.0 / (2.0 * mass * omega) }
}

/// Oscillator action of one isolated Gaussian `c·e^{−τ²/ξ²}` on the infinite line.
pub fn analytic_single_gaussian_action(c: f64, width: f64, mass: f64, omega: f64) -> f64 {
    c * c * std::f64::consts::PI.sqrt() / (2.0 * std::f64::consts::SQRT_2) * mass * (1.0 / width + omega * omega * width)
}

/// Exact `⟨q_i²⟩` of the periodic lattice oscillator with `n_lat` sites of
/// spacing `a`: the mean inverse eigenvalue of its quadratic form,
/// `(1/N) Σ_k 1/(m a (ω² + (4/a²) sin²(πk/N)))`.
pub fn lattice_ho_exact_q2(n_lat: usize, spacing: f64, mass: f64, omega: f64) -> f64 {
    let n = n_lat as f64;
    (0..n_lat)
        .map(|k| {
            let s = (std::f64::consts::PI * k as f64 / n).sin();
            1.0 / (mass * spacing * (omega * omega + 4.0 / (spacing * spacing) * s * s))
        })
        .sum::<f64>()
        / n
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct LatticeHoParams {
    pub n_lat: usize,
    pub spacing: f64,
    pub mass: f64,
    pub omega: f64,
    /// Bound on per-site proposals `δ ~ U[−Λ, Λ]`.
    pub cutoff: f64,
    /// Sweeps per path; the second half is measured every sweep.
    pub n_sweeps: usize,
    pub ensemble_size: usize,
    pub seed: u64,
    pub hist_half_range: f64,
    pub hist_bins: usize,
}

#[derive(Debug, Clone, PartialEq)]
pub struct LatticeHoResult {
    /// `(mean, standard error)` over paths of the path-averaged `V̄`.
    pub potential: (f64, f64),
    pub q2: (f64, f64),
    pub histogram: PooledHistogram,
    pub acceptance: f64,
}

/// Action of the periodic lattice oscillator,
/// `Σ_i a[(m/2)((q_{i+1} − q_i)/a)² + (mω²/2)q_i²]`.
pub fn lattice_ho_action(q: &[f64], spacing: f64, mass: f64, omega: f64) -> f64 {
    let n = q.len();
    (0..n)
        .map(|i| {
            let d = q[(i + 1) % n] - q[i];
            spacing * (0.5 * mass * d * d / (spacing * spacing) + 0.5 * mass * omega * omega * q[i] * q[i])
        })
        .sum()
}

/// Site-by-site Metropolis sweeps over a cold-started lattice path, one
/// independent chain per ensemble member.
pub fn lattice_ho_simulate(p: &LatticeHoParams) -> LatticeHoResult {
    let template = Histogram::symmetric(p.hist_half_range, p.hist_bins).expect("histogram range");
    let paths: Vec<(f64, f64, Histogram, f64)> = (0..p.ensemble_size)
        .into_par_iter()
        .map(|path| {
            let mut rng = chain_rng(p.seed, path, StreamPurpose::Proposals);
            let n = p.n_lat;
            let mut q = vec![0.0; n];
            let kinetic = p.mass / p.spacing;
            let potential = p.spacing * p.mass * p.omega * p.omega;
            let mut hist = template.clone();
            let (mut q2_sum, mut measured, mut accepted) = (0.0, 0usize, 0usize);
            for sweep in 0..p.n_sweeps {
                for i in 0..n {
                    let delta = p.cutoff * (2.0 * rng.random::<f64>() - 1.0);
                    let (prev, next) = (q[(i + n - 1) % n], q[(i + 1) % n]);
                    let new = q[i] + delta;
                    let local = |x: f64| 0.5 * kinetic * ((x - prev).powi(2) + (next - x).powi(2)) + 0.5 * potential * x * x;
                    if metropolis_accept(local(new) - local(q[i]), &mut rng) {
                        q[i] = new;
                        accepted += 1;
                    }
                }
                if sweep >= p.n_sweeps / 2 {
                    q2_sum += q.iter().map(|x| x * x).sum::<f64>() / n as f64;
                    measured += 1;
                    hist.fill_all(q.iter().copied());
                }
            }
            let q2 = q2_sum / measured.max(1) as f64;
            let rate = accepted as f64 / (p.n_sweeps * n) as f64;
            (0.5 * p.mass * p.omega * p.omega * q2, q2, hist, rate)
        })
        .collect();
    let v: Vec<f64> = paths.iter().map(|x| x.0).collect();
    let q2: Vec<f64> = paths.iter().map(|x| x.1).collect();
    let hists: Vec<Histogram> = paths.iter().map(|x| x.2.clone()).collect();
    LatticeHoResult {
        potential: mean_and_error(&v),
        q2: mean_and_error(&q2),
        histogram: PooledHistogram::from_paths(&hists).expect("uniform binning"),
        acceptance: paths.iter().map(|x| x.3).sum::<f64>() / paths.len() as f64,
    }
}

/// Exact equilibrium of an oscillator path with frozen centers and widths.
///
/// The quadrature action is a quadratic form `S = ½ cᵀKc` in the
/// coefficients, so `exp(−S)` is Gaussian with covariance `K⁻¹` and
/// `⟨q̄²⟩ = tr(Q K⁻¹)` with `Q_ij = (1/𝒯)∫φ_iφ_j`. This is what an infinitely
/// long chain on this basis converges to.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct BasisEquilibrium {
    pub potential: f64,
    pub q2: f64,
}

/// `(K, Q)` with `S = ½ cᵀKc` and `q̄² = cᵀQc` on the given quadrature.
pub fn basis_quadratic_forms(config: &Configuration<f64>, mass: f64, omega: f64, quad: &QuadratureSpec) -> (DMatrix<f64>, DMatrix<f64>) {
    let domain = config.domain();
    let grid = NodeGrid::new(domain, quad.nodes_per_axis());
    let terms = config.terms(0);
    let (nodes, n) = (grid.len(), terms.len());
    let mut phi = DMatrix::zeros(nodes, n);
    let mut dphi = DMatrix::zeros(nodes, n);
    for node in 0..nodes {
        let x = grid.point(node);
        for (i, t) in terms.iter().enumerate() {
            let d = domain.displacement_axis(0, x[0], t.center[0]);
            let g = (-(d * d) / (t.width * t.width)).exp();
            phi[(node, i)] = g;
            dphi[(node, i)] = -2.0 * d / (t.width * t.width) * g;
        }
    }
    let w = grid.weight();
    let overlap = phi.transpose() * &phi * w;
    let k = (dphi.transpose() * &dphi * w + &overlap * (omega * omega)) * mass;
    (k, overlap / domain.extent(0))
}

pub fn continuum_basis_equilibrium(config: &Configuration<f64>, mass: f64, omega: f64, quad: &QuadratureSpec) -> Option<BasisEquilibrium> {
    let (k, q) = basis_quadratic_forms(config, mass, omega, quad);
    let cov = k.cholesky()?.inverse();
    let q2 = q.component_mul(&cov).sum();
    Some(BasisEquilibrium { potential: 0.5 * mass * omega * omega * q2, q2 })
}
