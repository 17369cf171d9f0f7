//! Rectangular Wilson loops in a (space, time) plane.

use rand::Rng;
use serde::{Deserialize, Serialize};
use thiserror::Error;

use super::su2::Su2;
use crate::action::PhysicsModel;
use crate::binning::TermIndex;
use crate::geometry::{Configuration, FieldLayout};
use crate::scalar::Real;

/// Euclidean time is the last axis of a 4D domain.
pub const TIME_AXIS: usize = 3;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum LoopError {
    #[error("Wilson loops need a gauge configuration, got {0:?}")]
    NotGauge(FieldLayout),
    #[error("model {model} does not match layout {layout:?}")]
    ModelMismatch { model: &'static str, layout: FieldLayout },
    #[error("space axis {0} is not one of 0, 1, 2")]
    SpaceAxis(usize),
    #[error("rectangle {time_extent} x {space_extent} does not fit the box")]
    TooLarge { time_extent: f64, space_extent: f64 },
    #[error("segment length must be positive, got {0}")]
    Segment(f64),
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct WilsonLoopSample {
    pub time_extent: f64,
    pub space_extent: f64,
    /// `cos φ` for U(1), `½ Re tr` for SU(2).
    pub value: f64,
    /// `sin φ` for U(1) (averages to zero); zero for SU(2).
    pub imaginary: f64,
    pub corner: Vec<f64>,
    pub space_axis: usize,
}

/// Loop around the rectangle starting at `corner`: `+R` along `space_axis`,
/// `+T` along time, then back. Each side is cut into segments no longer than
/// `segment_len`, with the field evaluated at segment midpoints.
#[allow(clippy::too_many_arguments)]
pub fn wilson_loop<T: Real>(
    config: &Configuration<T>,
    model: &PhysicsModel<T>,
    index: &TermIndex<T>,
    corner: &[T],
    space_axis: usize,
    time_extent: T,
    space_extent: T,
    segment_len: T,
) -> Result<WilsonLoopSample, LoopError> {
    let layout = config.layout();
    if layout == FieldLayout::Particle {
        return Err(LoopError::NotGauge(layout));
    }
    if model.layout() != layout {
        return Err(LoopError::ModelMismatch { model: model.name(), layout });
    }
    if space_axis >= TIME_AXIS {
        return Err(LoopError::SpaceAxis(space_axis));
    }
    let domain = config.domain();
    let fits = |len: T, axis: usize| len > T::zero() && len < domain.extent(axis);
    if !fits(time_extent, TIME_AXIS) || !fits(space_extent, space_axis) {
        return Err(LoopError::TooLarge { time_extent: time_extent.to_f64_lossy(), space_extent: space_extent.to_f64_lossy() });
    }
    if !(segment_len > T::zero()) {
        return Err(LoopError::Segment(segment_len.to_f64_lossy()));
    }

    let g = model.coupling();
    let sides = [(space_axis, space_extent), (TIME_AXIS, time_extent), (space_axis, -space_extent), (TIME_AXIS, -time_extent)];
    let mut position: Vec<T> = corner.to_vec();
    let mut phase = T::zero();
    let mut product = Su2::IDENTITY;
    let mut mid = vec![T::zero(); 4];
    for (axis, len) in sides {
        let n = (len.abs() / segment_len).ceil().to_usize().unwrap_or(1).max(1);
        let step = len / T::lit(n as f64);
        for j in 0..n {
            mid.copy_from_slice(&position);
            mid[axis] = mid[axis] + (T::lit(j as f64) + T::lit(0.5)) * step;
            let x = domain.wrap(&mid);
            match layout {
                FieldLayout::U1 => phase = phase + g * index.evaluate(config, axis, &x) * step,
                _ => {
                    let theta = [0, 1, 2].map(|a| (g * index.evaluate(config, layout.component(a, axis), &x) * step).to_f64_lossy());
                    // later segments act from the left
                    product = Su2::exp_half(theta) * product;
                }
            }
        }
        position[axis] = position[axis] + len;
    }
    let (value, imaginary) = match layout {
        FieldLayout::U1 => {
            let p = phase.to_f64_lossy();
            (p.cos(), p.sin())
        }
        _ => (product.half_trace(), 0.0),
    };
    Ok(WilsonLoopSample {
        time_extent: time_extent.to_f64_lossy(),
        space_extent: space_extent.to_f64_lossy(),
        value,
        imaginary,
        corner: corner.iter().map(|c| c.to_f64_lossy()).collect(),
        space_axis,
    })
}

/// Which rectangles to measure and how many random placements each.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct LoopPlan {
    pub time_extents: Vec<f64>,
    pub space_extents: Vec<f64>,
    pub loops_per_set: usize,
    pub segment_len: f64,
}

impl LoopPlan {
    /// `(T, R)` pairs in measurement order (time-major).
    pub fn sets(&self) -> Vec<(f64, f64)> {
        self.time_extents.iter().flat_map(|&t| self.space_extents.iter().map(move |&r| (t, r))).collect()
    }
}

/// Mean loop value for every `(T, R)` set of `plan` over `loops_per_set`
/// placements with uniformly random corner and spatial direction.
///
/// All sets share the same placements, so the `T` and `T + t` loops entering
/// one potential ratio are strongly correlated and their noise largely cancels.
pub fn measure_loops<T: Real, R: Rng + ?Sized>(
    config: &Configuration<T>,
    model: &PhysicsModel<T>,
    index: &TermIndex<T>,
    plan: &LoopPlan,
    rng: &mut R,
) -> Result<Vec<f64>, LoopError> {
    let domain = config.domain();
    let sets = plan.sets();
    let mut sums = vec![0.0; sets.len()];
    for _ in 0..plan.loops_per_set {
        let corner: Vec<T> = (0..4).map(|k| domain.wrap_axis(k, T::lit(rng.random::<f64>()) * domain.extent(k))).collect();
        let axis = rng.random_range(0..3);
        for (sum, &(t, r)) in sums.iter_mut().zip(&sets) {
            *sum += wilson_loop(config, model, index, &corner, axis, T::lit(t), T::lit(r), T::lit(plan.segment_len))?.value;
        }
    }
    Ok(sums.into_iter().map(|s| s / plan.loops_per_set as f64).collect())
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::geometry::{GaussianTerm, PeriodicDomain};
    use rand::SeedableRng;
    use rand_chacha::ChaCha8Rng;

    fn config(layout: FieldLayout, amp: f64, seed: u64) -> Configuration<f64> {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let domain = PeriodicDomain::spacetime(6.0, 12.0).unwrap();
        let comps = (0..layout.components())
            .map(|_| {
                (0..3 * 3 * 3 * 6)
                    .map(|i| {
                        let site = [i / 54, (i / 18) % 3, (i / 6) % 3, i % 6];
                        let center = site.iter().map(|&s| s as f64 * 2.0).collect();
                        GaussianTerm::new(amp * rng.random_range(-1.0..1.0), center, 1.0).unwrap()
                    })
                    .collect()
            })
            .collect();
        Configuration::new(domain, layout, comps).unwrap()
    }

    fn measure(c: &Configuration<f64>, model: &PhysicsModel<f64>, corner: &[f64], axis: usize, t: f64, r: f64, h: f64) -> WilsonLoopSample {
        let index = TermIndex::build(c, 1e-8).unwrap();
        wilson_loop(c, model, &index, corner, axis, t, r, h).unwrap()
    }

    #[test]
    fn zero_field_loops_are_one() {
        for (layout, model) in
            [(FieldLayout::U1, PhysicsModel::GaugeU1 { coupling: 0.303 }), (FieldLayout::Su2, PhysicsModel::GaugeSu2 { coupling: 3.5 })]
        {
            let c = config(layout, 0.0, 1);
            let w = measure(&c, &model, &[1.0, 2.0, 3.0, 4.0], 1, 3.0, 2.0, 0.25);
            assert_eq!(w.value, 1.0);
            assert_eq!(w.imaginary, 0.0);
        }
    }

    #[test]
    fn constant_abelian_field_closes_to_one() {
        let domain = PeriodicDomain::spacetime(6.0, 12.0).unwrap();
        // One very wide term per component: A is constant to ~1e−7 over the box.
        let comps = (0..4).map(|mu| vec![GaussianTerm::new(0.7 + mu as f64 * 0.1, vec![0.0; 4], 1e4).unwrap()]).collect();
        let c = Configuration::new(domain, FieldLayout::U1, comps).unwrap();
        let w = measure(&c, &PhysicsModel::GaugeU1 { coupling: 1.0 }, &[0.5, 0.5, 0.5, 0.5], 2, 5.0, 2.5, 0.1);
        assert!((w.value - 1.0).abs() < 1e-9);
    }

    #[test]
    fn values_bounded_and_reversal_invariant() {
        let model = PhysicsModel::GaugeSu2 { coupling: 3.5 };
        let c = config(FieldLayout::Su2, 1.3, 2);
        let index = TermIndex::build(&c, 1e-8).unwrap();
        let w = wilson_loop(&c, &model, &index, &[0.3, 1.1, 5.2, 7.0], 0, 4.0, 2.0, 0.25).unwrap();
        assert!(w.value.abs() <= 1.0);
        // Traverse the same rectangle the other way: start at the far corner
        // with negative extents.
        let rev = wilson_loop_reversed(&c, &model, &index, &[0.3, 1.1, 5.2, 7.0], 0, 4.0, 2.0, 0.25);
        assert!((w.value - rev).abs() < 1e-10, "{} {}", w.value, rev);
    }

    /// Same rectangle, opposite orientation, built from conjugated segments.
    #[allow(clippy::too_many_arguments)]
    fn wilson_loop_reversed(
        c: &Configuration<f64>,
        model: &PhysicsModel<f64>,
        index: &TermIndex<f64>,
        corner: &[f64],
        axis: usize,
        t: f64,
        r: f64,
        h: f64,
    ) -> f64 {
        let g = model.coupling();
        let sides = [(TIME_AXIS, t), (axis, r), (TIME_AXIS, -t), (axis, -r)];
        let mut pos = corner.to_vec();
        let mut product = Su2::IDENTITY;
        for (ax, len) in sides {
            let n = (len.abs() / h).ceil() as usize;
            let step = len / n as f64;
            for j in 0..n {
                let mut mid = pos.clone();
                mid[ax] += (j as f64 + 0.5) * step;
                let x = c.domain().wrap(&mid);
                let theta = [0, 1, 2].map(|a| g * index.evaluate(c, FieldLayout::Su2.component(a, ax), &x) * step);
                product = Su2::exp_half(theta) * product;
            }
            pos[ax] += len;
        }
        product.half_trace()
    }

    #[test]
    fn segment_refinement_converges() {
        let model = PhysicsModel::GaugeU1 { coupling: 0.303 };
        let c = config(FieldLayout::U1, 1.3, 3);
        let a = measure(&c, &model, &[0.0, 0.0, 0.0, 0.0], 1, 3.0, 2.0, 0.25).value;
        let b = measure(&c, &model, &[0.0, 0.0, 0.0, 0.0], 1, 3.0, 2.0, 0.125).value;
        assert!((a - b).abs() < 1e-3);
    }

    #[test]
    fn errors() {
        let model = PhysicsModel::GaugeU1 { coupling: 1.0 };
        let c = config(FieldLayout::U1, 0.0, 4);
        let index = TermIndex::build(&c, 1e-8).unwrap();
        let at = [0.0; 4];
        assert!(matches!(wilson_loop(&c, &model, &index, &at, 0, 12.0, 1.0, 0.1), Err(LoopError::TooLarge { .. })));
        assert!(matches!(wilson_loop(&c, &model, &index, &at, 3, 1.0, 1.0, 0.1), Err(LoopError::SpaceAxis(3))));
        assert!(matches!(wilson_loop(&c, &model, &index, &at, 0, 1.0, 1.0, 0.0), Err(LoopError::Segment(_))));
        let su2 = PhysicsModel::GaugeSu2 { coupling: 1.0 };
        assert!(wilson_loop(&c, &su2, &index, &at, 0, 1.0, 1.0, 0.1).is_err());
    }

    #[test]
    fn measurement_plan_shapes() {
        let plan = LoopPlan { time_extents: vec![2.0, 2.5], space_extents: vec![0.5, 1.0, 1.5], loops_per_set: 3, segment_len: 0.25 };
        let c = config(FieldLayout::U1, 0.5, 5);
        let index = TermIndex::build(&c, 1e-8).unwrap();
        let mut rng = ChaCha8Rng::seed_from_u64(9);
        let v = measure_loops(&c, &PhysicsModel::GaugeU1 { coupling: 0.303 }, &index, &plan, &mut rng).unwrap();
        assert_eq!(v.len(), 6);
        assert_eq!(plan.sets()[4], (2.5, 1.0));
        assert!(v.iter().all(|x| x.abs() <= 1.0));
    }
}
