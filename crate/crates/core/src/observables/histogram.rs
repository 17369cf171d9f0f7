//! Uniform-bin histograms with per-path error estimates.

use serde::{Deserialize, Serialize};
use thiserror::Error;

use super::stats::mean_and_error;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum HistogramError {
    #[error("histogram range [{lo}, {hi}) with {bins} bins is empty")]
    BadRange { lo: f64, hi: f64, bins: usize },
    #[error("histograms have different binning")]
    Binning,
    #[error("no histograms to pool")]
    Empty,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum Normalization {
    Density,
    Counts,
}

/// Counts over `bins` equal bins spanning `[lo, hi)`, plus out-of-range tallies.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Histogram {
    pub lo: f64,
    pub hi: f64,
    pub counts: Vec<u64>,
    pub underflow: u64,
    pub overflow: u64,
}

impl Histogram {
    pub fn new(lo: f64, hi: f64, bins: usize) -> Result<Self, HistogramError> {
        if bins == 0 || !(hi > lo) || !lo.is_finite() || !hi.is_finite() {
            return Err(HistogramError::BadRange { lo, hi, bins });
        }
        Ok(Self { lo, hi, counts: vec![0; bins], underflow: 0, overflow: 0 })
    }

    /// Bins centered symmetrically around zero: `[−half, half)`.
    pub fn symmetric(half: f64, bins: usize) -> Result<Self, HistogramError> {
        Self::new(-half, half, bins)
    }

    pub fn bins(&self) -> usize {
        self.counts.len()
    }

    pub fn bin_width(&self) -> f64 {
        (self.hi - self.lo) / self.bins() as f64
    }

    pub fn bin_center(&self, k: usize) -> f64 {
        self.lo + (k as f64 + 0.5) * self.bin_width()
    }

    pub fn bin_centers(&self) -> Vec<f64> {
        (0..self.bins()).map(|k| self.bin_center(k)).collect()
    }

    pub fn bin_of(&self, x: f64) -> Option<usize> {
        if !(x >= self.lo && x < self.hi) {
            return None;
        }
        let k = ((x - self.lo) / self.bin_width()) as usize;
        Some(k.min(self.bins() - 1))
    }

    pub fn fill(&mut self, x: f64) {
        match self.bin_of(x) {
            Some(k) => self.counts[k] += 1,
            None if x < self.lo => self.underflow += 1,
            None => self.overflow += 1,
        }
    }

    pub fn fill_all(&mut self, xs: impl IntoIterator<Item = f64>) {
        for x in xs {
            self.fill(x);
        }
    }

    pub fn in_range(&self) -> u64 {
        self.counts.iter().sum()
    }

    pub fn total(&self) -> u64 {
        self.in_range() + self.underflow + self.overflow
    }

    pub fn same_binning(&self, other: &Self) -> bool {
        self.lo == other.lo && self.hi == other.hi && self.bins() == other.bins()
    }

    pub fn merge(&mut self, other: &Self) -> Result<(), HistogramError> {
        if !self.same_binning(other) {
            return Err(HistogramError::Binning);
        }
        for (a, b) in self.counts.iter_mut().zip(&other.counts) {
            *a += b;
        }
        self.underflow += other.underflow;
        self.overflow += other.overflow;
        Ok(())
    }

    /// Density over in-range samples (integrates to one), or raw counts.
    pub fn normalized(&self, mode: Normalization) -> Vec<f64> {
        match mode {
            Normalization::Counts => self.counts.iter().map(|&c| c as f64).collect(),
            Normalization::Density => {
                let n = self.in_range();
                if n == 0 {
                    return vec![0.0; self.bins()];
                }
                let scale = 1.0 / (n as f64 * self.bin_width());
                self.counts.iter().map(|&c| c as f64 * scale).collect()
            }
        }
    }

    pub fn density(&self) -> Vec<f64> {
        self.normalized(Normalization::Density)
    }
}

/// Pooled density of several per-path histograms, with the standard error of
/// each bin estimated from the spread between paths.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct PooledHistogram {
    pub pooled: Histogram,
    pub density: Vec<f64>,
    pub error: Vec<f64>,
    pub paths: usize,
}

impl PooledHistogram {
    pub fn from_paths(per_path: &[Histogram]) -> Result<Self, HistogramError> {
        let first = per_path.first().ok_or(HistogramError::Empty)?;
        let mut pooled = Histogram { counts: vec![0; first.bins()], underflow: 0, overflow: 0, ..first.clone() };
        for h in per_path {
            pooled.merge(h)?;
        }
        let densities: Vec<Vec<f64>> = per_path.iter().map(Histogram::density).collect();
        let error = (0..first.bins())
            .map(|k| {
                let col: Vec<f64> = densities.iter().map(|d| d[k]).collect();
                mean_and_error(&col).1
            })
            .collect();
        Ok(Self { density: pooled.density(), pooled, error, paths: per_path.len() })
    }

    pub fn bin_centers(&self) -> Vec<f64> {
        self.pooled.bin_centers()
    }
}

/// Whether every bin of `a` and `b` agrees within `sigmas` combined errors.
/// Returns the indices of disagreeing bins.
pub fn incompatible_bins(a: &PooledHistogram, b: &PooledHistogram, sigmas: f64) -> Result<Vec<usize>, HistogramError> {
    if !a.pooled.same_binning(&b.pooled) {
        return Err(HistogramError::Binning);
    }
    Ok((0..a.density.len())
        .filter(|&k| {
            let diff = (a.density[k] - b.density[k]).abs();
            let err = (a.error[k].powi(2) + b.error[k].powi(2)).sqrt();
            diff > sigmas * err
        })
        .collect())
}

/// Bins past the peak (on both sides) where the density rises again, within
/// the region where the density is at least `floor`.
pub fn non_monotone_tail_bins(density: &[f64], floor: f64) -> Vec<usize> {
    let Some(peak) = density.iter().enumerate().max_by(|a, b| a.1.total_cmp(b.1)).map(|(k, _)| k) else {
        return Vec::new();
    };
    let mut bad = Vec::new();
    for k in peak + 1..density.len() {
        if density[k] >= floor && density[k] > density[k - 1] {
            bad.push(k);
        }
    }
    for k in (0..peak).rev() {
        if density[k] >= floor && density[k] > density[k + 1] {
            bad.push(k);
        }
    }
    bad.sort_unstable();
    bad
}
