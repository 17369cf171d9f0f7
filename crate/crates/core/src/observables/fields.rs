//! Distributions of gauge-field values and basis coefficients.

use serde::{Deserialize, Serialize};

use super::histogram::Histogram;
use crate::binning::TermIndex;
use crate::geometry::Configuration;
use crate::scalar::Real;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum FieldQuantity {
    /// `A_μ(x)` on a uniform grid, all components pooled.
    FieldValue,
    /// The coefficients `A_{i_μ}` themselves.
    Coefficient,
}

/// Adds every component's field value at the midpoints of a uniform grid with
/// `points_per_axis` points per axis.
pub fn fill_field_values<T: Real>(hist: &mut Histogram, config: &Configuration<T>, index: &TermIndex<T>, points_per_axis: usize) {
    let domain = config.domain();
    let dims = domain.dims();
    let total = points_per_axis.pow(dims as u32);
    let mut x = vec![T::zero(); dims];
    for node in 0..total {
        let mut rest = node;
        for k in (0..dims).rev() {
            let i = rest % points_per_axis;
            rest /= points_per_axis;
            x[k] = (T::lit(i as f64) + T::lit(0.5)) * domain.extent(k) / T::lit(points_per_axis as f64);
        }
        for comp in 0..config.n_components() {
            hist.fill(index.evaluate(config, comp, &x).to_f64_lossy());
        }
    }
}

pub fn fill_coefficients<T: Real>(hist: &mut Histogram, config: &Configuration<T>) {
    hist.fill_all(config.coefficients().map(|c| c.to_f64_lossy()));
}

/// Histogram of `which` for one configuration, binned like `template`.
pub fn field_value_histogram<T: Real>(
    config: &Configuration<T>,
    index: &TermIndex<T>,
    which: FieldQuantity,
    template: &Histogram,
    points_per_axis: usize,
) -> Histogram {
    let mut hist = Histogram { counts: vec![0; template.bins()], underflow: 0, overflow: 0, ..template.clone() };
    match which {
        FieldQuantity::FieldValue => fill_field_values(&mut hist, config, index, points_per_axis),
        FieldQuantity::Coefficient => fill_coefficients(&mut hist, config),
    }
    hist
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::geometry::{FieldLayout, GaussianTerm, PeriodicDomain};

    fn config(amp: f64) -> Configuration<f64> {
        let domain = PeriodicDomain::spacetime(4.0, 8.0).unwrap();
        let comps = (0..4)
            .map(|mu| {
                (0..8).map(|i| GaussianTerm::new(amp * ((i + mu) % 3) as f64, vec![(i % 2) as f64 * 2.0, 0.0, 1.0, i as f64], 1.0).unwrap()).collect()
            })
            .collect();
        Configuration::new(domain, FieldLayout::U1, comps).unwrap()
    }

    #[test]
    fn zero_field_single_central_bin() {
        let c = config(0.0);
        let index = TermIndex::build(&c, 1e-8).unwrap();
        let template = Histogram::symmetric(2.0, 41).unwrap();
        for which in [FieldQuantity::FieldValue, FieldQuantity::Coefficient] {
            let h = field_value_histogram(&c, &index, which, &template, 4);
            assert_eq!(h.counts.iter().filter(|&&n| n > 0).count(), 1);
            assert!(h.counts[20] > 0);
        }
    }

    #[test]
    fn counts_match_grid_and_terms() {
        let c = config(0.5);
        let index = TermIndex::build(&c, 1e-8).unwrap();
        let template = Histogram::symmetric(10.0, 10).unwrap();
        assert_eq!(field_value_histogram(&c, &index, FieldQuantity::FieldValue, &template, 3).total(), 4 * 81);
        let h = field_value_histogram(&c, &index, FieldQuantity::Coefficient, &template, 3);
        assert_eq!(h.total(), 32);
    }
}
