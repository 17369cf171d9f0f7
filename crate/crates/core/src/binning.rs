//! Uniform cell grid over term centers for truncated point evaluation.

use crate::geometry::{truncation_radius, Configuration, GeometryError};
use crate::scalar::Real;

/// Spatial index of the terms of every component of a configuration.
///
/// Cells are at least as wide as the largest truncation radius, so the terms
/// that can reach a point live in the 3^d block of cells around it. Axes with
/// fewer than three cells are scanned completely.
#[derive(Debug, Clone)]
pub struct TermIndex<T> {
    cells_per_axis: Vec<usize>,
    cell_size: Vec<T>,
    /// `cells[component][cell]` lists term indices.
    cells: Vec<Vec<Vec<u32>>>,
    /// Per term `ln(1/ε)·ξ²` cut on the squared distance.
    cutoff_d2: Vec<Vec<T>>,
    epsilon: T,
}

impl<T: Real> TermIndex<T> {
    pub fn build(config: &Configuration<T>, epsilon: T) -> Result<Self, GeometryError> {
        let domain = config.domain();
        let dims = domain.dims();
        let r_max = truncation_radius(config.max_width(), epsilon)?;
        let cells_per_axis: Vec<usize> = (0..dims)
            .map(|k| {
                let n = (domain.extent(k) / r_max).floor().to_usize().unwrap_or(1);
                n.max(1)
            })
            .collect();
        let cell_size: Vec<T> = (0..dims).map(|k| domain.extent(k) / T::lit(cells_per_axis[k] as f64)).collect();
        let n_cells: usize = cells_per_axis.iter().product();
        let log_inv = -epsilon.ln();

        let mut cells = Vec::with_capacity(config.n_components());
        let mut cutoff_d2 = Vec::with_capacity(config.n_components());
        for comp in 0..config.n_components() {
            let mut bins = vec![Vec::new(); n_cells];
            let mut cuts = Vec::with_capacity(config.n_sum());
            for (i, term) in config.terms(comp).iter().enumerate() {
                let cell = Self::cell_of(&cells_per_axis, &cell_size, &term.center);
                bins[cell].push(i as u32);
                cuts.push(log_inv * term.width * term.width);
            }
            cells.push(bins);
            cutoff_d2.push(cuts);
        }
        Ok(Self { cells_per_axis, cell_size, cells, cutoff_d2, epsilon })
    }

    pub fn epsilon(&self) -> T {
        self.epsilon
    }

    fn cell_of(cells_per_axis: &[usize], cell_size: &[T], x: &[T]) -> usize {
        let mut idx = 0;
        for k in 0..cells_per_axis.len() {
            let c = (x[k] / cell_size[k]).floor().to_usize().unwrap_or(0).min(cells_per_axis[k] - 1);
            idx = idx * cells_per_axis[k] + c;
        }
        idx
    }

    /// Per-axis candidate cell coordinates around `x`.
    fn axis_candidates(&self, axis: usize, x: T) -> Vec<usize> {
        let n = self.cells_per_axis[axis];
        if n < 3 {
            return (0..n).collect();
        }
        let c = (x / self.cell_size[axis]).floor().to_usize().unwrap_or(0).min(n - 1);
        vec![(c + n - 1) % n, c, (c + 1) % n]
    }

    /// Calls `f(term_index)` for every term of `component` whose truncated support contains `x`.
    /// `x` must already lie in the fundamental domain.
    pub fn for_each_neighbor(&self, config: &Configuration<T>, component: usize, x: &[T], mut f: impl FnMut(usize, &[T], T)) {
        let dims = self.cells_per_axis.len();
        let candidates: Vec<Vec<usize>> = (0..dims).map(|k| self.axis_candidates(k, x[k])).collect();
        let domain = config.domain();
        let terms = config.terms(component);
        let mut counter = vec![0usize; dims];
        let mut delta = vec![T::zero(); dims];
        loop {
            let mut cell = 0;
            for k in 0..dims {
                cell = cell * self.cells_per_axis[k] + candidates[k][counter[k]];
            }
            for &i in &self.cells[component][cell] {
                let i = i as usize;
                let term = &terms[i];
                let mut d2 = T::zero();
                for k in 0..dims {
                    delta[k] = domain.displacement_axis(k, x[k], term.center[k]);
                    d2 = d2 + delta[k] * delta[k];
                }
                if d2 <= self.cutoff_d2[component][i] {
                    f(i, &delta, d2);
                }
            }
            // odometer increment
            let mut k = dims;
            loop {
                if k == 0 {
                    return;
                }
                k -= 1;
                counter[k] += 1;
                if counter[k] < candidates[k].len() {
                    break;
                }
                counter[k] = 0;
            }
        }
    }

    /// Truncated value of one component at `x`.
    pub fn evaluate(&self, config: &Configuration<T>, component: usize, x: &[T]) -> T {
        let x = config.domain().wrap(x);
        let terms = config.terms(component);
        let mut sum = T::zero();
        self.for_each_neighbor(config, component, &x, |i, _, d2| {
            let t = &terms[i];
            sum = sum + t.coefficient * (-d2 / (t.width * t.width)).exp();
        });
        sum
    }

    /// Truncated value and gradient of one component at `x`.
    pub fn evaluate_with_gradient(&self, config: &Configuration<T>, component: usize, x: &[T]) -> (T, Vec<T>) {
        let x = config.domain().wrap(x);
        let terms = config.terms(component);
        let mut sum = T::zero();
        let mut grad = vec![T::zero(); x.len()];
        let two = T::lit(2.0);
        self.for_each_neighbor(config, component, &x, |i, delta, d2| {
            let t = &terms[i];
            let w2 = t.width * t.width;
            let g = t.coefficient * (-d2 / w2).exp();
            sum = sum + g;
            for (out, &d) in grad.iter_mut().zip(delta) {
                *out = *out - two * d / w2 * g;
            }
        });
        (sum, grad)
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::geometry::{FieldLayout, GaussianTerm, PeriodicDomain};
    use rand::{Rng, SeedableRng};
    use rand_chacha::ChaCha8Rng;

    fn random_u1(rng: &mut ChaCha8Rng, n: usize, ext: [f64; 4]) -> Configuration<f64> {
        let domain = PeriodicDomain::new(ext.to_vec()).unwrap();
        let comps = (0..4)
            .map(|_| {
                (0..n)
                    .map(|_| {
                        let center = (0..4).map(|k| rng.random::<f64>() * ext[k]).collect();
                        GaussianTerm::new(rng.random_range(-2.0..2.0), center, rng.random_range(0.3..1.0)).unwrap()
                    })
                    .collect()
            })
            .collect();
        Configuration::new(domain, FieldLayout::U1, comps).unwrap()
    }

    #[test]
    fn truncated_evaluation_is_within_bound() {
        let mut rng = ChaCha8Rng::seed_from_u64(7);
        let ext = [9.0, 9.0, 9.0, 18.0];
        let cfg = random_u1(&mut rng, 60, ext);
        let eps = 1e-8;
        let idx = TermIndex::build(&cfg, eps).unwrap();
        let cmax = cfg.coefficients().fold(0.0f64, |m, c| m.max(c.abs()));
        for _ in 0..200 {
            let x: Vec<f64> = (0..4).map(|k| rng.random::<f64>() * ext[k]).collect();
            let comp = rng.random_range(0..4);
            let full = cfg.evaluate(comp, &x);
            let trunc = idx.evaluate(&cfg, comp, &x);
            assert!((full - trunc).abs() <= 60.0 * eps * cmax, "{full} vs {trunc}");
            let (v, g) = idx.evaluate_with_gradient(&cfg, comp, &x);
            assert_eq!(v, trunc);
            let gf = cfg.evaluate_gradient(comp, &x);
            for k in 0..4 {
                assert!((g[k] - gf[k]).abs() < 1e-6);
            }
        }
    }

    #[test]
    fn small_boxes_scan_every_cell_once() {
        let mut rng = ChaCha8Rng::seed_from_u64(3);
        // box smaller than the truncation radius: one cell per axis
        let ext = [2.0, 2.0, 2.0, 3.0];
        let cfg = random_u1(&mut rng, 10, ext);
        let idx = TermIndex::build(&cfg, 1e-8).unwrap();
        for _ in 0..50 {
            let x: Vec<f64> = (0..4).map(|k| rng.random::<f64>() * ext[k]).collect();
            let mut seen = Vec::new();
            idx.for_each_neighbor(&cfg, 2, &x, |i, _, _| seen.push(i));
            let calls = seen.len();
            seen.sort();
            seen.dedup();
            assert_eq!(seen.len(), calls);
            assert!((idx.evaluate(&cfg, 2, &x) - cfg.evaluate(2, &x)).abs() < 10.0 * 1e-8 * 2.0);
        }
    }
}
