//! Two-parameter weighted least-squares fits of `V(R)`.

use nalgebra::{DMatrix, DVector, Matrix2};
use serde::{Deserialize, Serialize};
use thiserror::Error;

use super::potential::PotentialPoint;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum FitError {
    #[error("need at least 3 points, got {0}")]
    TooFewPoints(usize),
    #[error("normal equations are singular")]
    Singular,
    #[error("non-finite input point {0:?}")]
    NonFinite(PotentialPoint),
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum FitKind {
    /// `V = −α/R + c`, parameters `(α, c)`.
    Coulomb,
    /// `V = σR + b`, parameters `(σ, b)`.
    Linear,
}

impl FitKind {
    pub fn parameter_names(self) -> [&'static str; 2] {
        match self {
            FitKind::Coulomb => ["alpha", "c"],
            FitKind::Linear => ["sigma", "b"],
        }
    }

    fn basis(self, r: f64) -> [f64; 2] {
        match self {
            FitKind::Coulomb => [-1.0 / r, 1.0],
            FitKind::Linear => [r, 1.0],
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct PotentialFit {
    pub kind: FitKind,
    pub points: Vec<PotentialPoint>,
    pub params: [f64; 2],
    pub errors: [f64; 2],
    pub chi2: f64,
    pub dof: usize,
    /// Whether the inputs carried errors; otherwise unit weights were used and
    /// the covariance was scaled by the residual variance.
    pub weighted: bool,
}

impl PotentialFit {
    pub fn predict(&self, r: f64) -> f64 {
        let [a, b] = self.kind.basis(r);
        a * self.params[0] + b * self.params[1]
    }
}

/// Weighted least squares with weights `1/error²`. If any point has a zero
/// error, all points get unit weight.
pub fn fit_potential(points: &[PotentialPoint], kind: FitKind) -> Result<PotentialFit, FitError> {
    let n = points.len();
    if n < 3 {
        return Err(FitError::TooFewPoints(n));
    }
    if let Some(p) = points.iter().find(|p| !(p.r.is_finite() && p.v.is_finite() && p.error.is_finite())) {
        return Err(FitError::NonFinite(*p));
    }
    let weighted = points.iter().all(|p| p.error > 0.0);
    let sqrt_w: Vec<f64> = points.iter().map(|p| if weighted { 1.0 / p.error } else { 1.0 }).collect();

    // Solve the whitened system by SVD for accuracy; covariance from the
    // normal matrix.
    let x = DMatrix::from_fn(n, 2, |i, j| kind.basis(points[i].r)[j] * sqrt_w[i]);
    let y = DVector::from_fn(n, |i, _| points[i].v * sqrt_w[i]);
    let normal: Matrix2<f64> = {
        let m = x.transpose() * &x;
        Matrix2::new(m[(0, 0)], m[(0, 1)], m[(1, 0)], m[(1, 1)])
    };
    let svd = x.clone().svd(true, true);
    let smax = svd.singular_values.max();
    if svd.singular_values.min() <= smax * 1e-12 {
        return Err(FitError::Singular);
    }
    let beta = svd.solve(&y, 0.0).map_err(|_| FitError::Singular)?;
    let cov = normal.try_inverse().ok_or(FitError::Singular)?;
    let residual = &y - &x * &beta;
    let chi2 = residual.norm_squared();
    let dof = n - 2;
    let scale = if weighted { 1.0 } else { chi2 / dof as f64 };
    Ok(PotentialFit {
        kind,
        points: points.to_vec(),
        params: [beta[0], beta[1]],
        errors: [(cov[(0, 0)] * scale).sqrt(), (cov[(1, 1)] * scale).sqrt()],
        chi2,
        dof,
        weighted,
    })
}
