//! Lagrangian densities evaluated from per-node field values and gradients.
//!
//! A node record is `ncomp · (1 + dims)` scalars: for every component its
//! value followed by its gradient.

use super::PhysicsModel;
use crate::geometry::FieldLayout;
use crate::scalar::Real;

#[inline]
pub(crate) fn record_len(layout: FieldLayout) -> usize {
    layout.components() * (1 + layout.dims())
}

#[inline]
fn value<T: Real>(rec: &[T], comp: usize) -> T {
    rec[comp * 5]
}

#[inline]
fn grad<T: Real>(rec: &[T], comp: usize, axis: usize) -> T {
    rec[comp * 5 + 1 + axis]
}

/// `F^a_{μν} = ∂_μA^a_ν − ∂_νA^a_μ + g ε_abc A^b_μ A^c_ν` (the last term only for SU(2)).
#[inline]
pub(crate) fn field_strength<T: Real>(rec: &[T], layout: FieldLayout, coupling: T, a: usize, mu: usize, nu: usize) -> T {
    let abelian = grad(rec, layout.component(a, nu), mu) - grad(rec, layout.component(a, mu), nu);
    if layout != FieldLayout::Su2 {
        return abelian;
    }
    // ε_{a,b,c} = +1 for cyclic (b, c) = (a+1, a+2)
    let b = (a + 1) % 3;
    let c = (a + 2) % 3;
    let cross = value(rec, layout.component(b, mu)) * value(rec, layout.component(c, nu))
        - value(rec, layout.component(c, mu)) * value(rec, layout.component(b, nu));
    abelian + coupling * cross
}

/// Lagrangian density at one node.
pub(crate) fn density<T: Real>(model: &PhysicsModel<T>, rec: &[T]) -> T {
    let half = T::lit(0.5);
    match *model {
        PhysicsModel::HarmonicOscillator { mass, omega } => {
            let q = rec[0];
            let qdot = rec[1];
            half * mass * qdot * qdot + half * mass * omega * omega * q * q
        }
        PhysicsModel::GaugeU1 { .. } | PhysicsModel::GaugeSu2 { .. } => {
            let layout = model.layout();
            let coupling = model.action_coupling();
            let mut sum = T::zero();
            for a in 0..layout.colors() {
                for mu in 0..4 {
                    for nu in (mu + 1)..4 {
                        let f = field_strength(rec, layout, coupling, a, mu, nu);
                        sum = sum + f * f;
                    }
                }
            }
            // ¼ Σ_{μν} = ½ Σ_{μ<ν}
            half * sum
        }
    }
}

/// Change of the density at one node when component `comp` changes by
/// `dvalue` and its gradient by `dgrad`. Only the field-strength entries that
/// involve `comp` are re-evaluated.
#[allow(clippy::needless_range_loop)]
pub(crate) fn density_change<T: Real>(model: &PhysicsModel<T>, rec: &[T], comp: usize, dvalue: T, dgrad: &[T; 4]) -> T {
    let half = T::lit(0.5);
    match *model {
        PhysicsModel::HarmonicOscillator { mass, omega } => {
            let q = rec[0];
            let qdot = rec[1];
            let dq = dvalue;
            let dqdot = dgrad[0];
            half * mass * (T::lit(2.0) * qdot + dqdot) * dqdot + half * mass * omega * omega * (T::lit(2.0) * q + dq) * dq
        }
        PhysicsModel::GaugeU1 { .. } => {
            let (_, nu) = FieldLayout::U1.split(comp);
            // F_{μν} gains dgrad[μ] for every μ ≠ ν
            let mut sum = T::zero();
            for mu in 0..4 {
                if mu == nu {
                    continue;
                }
                let f = grad(rec, FieldLayout::U1.component(0, nu), mu) - grad(rec, FieldLayout::U1.component(0, mu), nu);
                let df = dgrad[mu];
                sum = sum + (T::lit(2.0) * f + df) * df;
            }
            half * sum
        }
        PhysicsModel::GaugeSu2 { coupling } => {
            let layout = FieldLayout::Su2;
            let (a0, nu) = layout.split(comp);
            // Only F^a_{μν} with this ν move. For a = a0 the abelian part
            // gains dgrad[μ]; for the other two colors the cross term
            // g(A^b_μA^c_ν − A^c_μA^b_ν) gains ∓g·A^{other}_μ·dvalue.
            let (b0, c0) = ((a0 + 1) % 3, (a0 + 2) % 3);
            let mut sum = T::zero();
            for mu in 0..4 {
                if mu == nu {
                    continue;
                }
                let f = field_strength(rec, layout, coupling, a0, mu, nu);
                let df = dgrad[mu];
                sum = sum + (T::lit(2.0) * f + df) * df;
                // color b0 has (b, c) = (c0, a0): a0 sits in the c slot
                let f = field_strength(rec, layout, coupling, b0, mu, nu);
                let df = coupling * value(rec, layout.component(c0, mu)) * dvalue;
                sum = sum + (T::lit(2.0) * f + df) * df;
                // color c0 has (b, c) = (a0, b0): a0 sits in the b slot
                let f = field_strength(rec, layout, coupling, c0, mu, nu);
                let df = -coupling * value(rec, layout.component(b0, mu)) * dvalue;
                sum = sum + (T::lit(2.0) * f + df) * df;
            }
            half * sum
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use rand::{Rng, SeedableRng};
    use rand_chacha::ChaCha8Rng;

    fn random_record(rng: &mut ChaCha8Rng, layout: FieldLayout) -> Vec<f64> {
        (0..record_len(layout)).map(|_| rng.random_range(-1.5..1.5)).collect()
    }

    #[test]
    fn density_change_matches_difference() {
        let mut rng = ChaCha8Rng::seed_from_u64(11);
        let models = [
            PhysicsModel::HarmonicOscillator { mass: 1.3, omega: 0.7 },
            PhysicsModel::GaugeU1 { coupling: 0.303 },
            PhysicsModel::GaugeSu2 { coupling: 3.5 },
        ];
        for model in models {
            let layout = model.layout();
            let w = 1 + layout.dims();
            for _ in 0..200 {
                let rec = random_record(&mut rng, layout);
                let comp = rng.random_range(0..layout.components());
                let dv = rng.random_range(-1.0..1.0);
                let mut dg = [0.0; 4];
                for d in dg.iter_mut().take(layout.dims()) {
                    *d = rng.random_range(-1.0..1.0);
                }
                let mut new = rec.clone();
                new[comp * w] += dv;
                for axis in 0..layout.dims() {
                    new[comp * w + 1 + axis] += dg[axis];
                }
                let expect = density(&model, &new) - density(&model, &rec);
                let got = density_change(&model, &rec, comp, dv, &dg);
                assert!((expect - got).abs() < 1e-12 * (1.0 + expect.abs()), "{model:?}: {expect} vs {got}");
            }
        }
    }

    #[test]
    fn su2_without_coupling_is_three_u1_copies() {
        let mut rng = ChaCha8Rng::seed_from_u64(5);
        let rec = random_record(&mut rng, FieldLayout::Su2);
        let su2 = density(&PhysicsModel::GaugeSu2 { coupling: 0.0 }, &rec);
        let u1: f64 = (0..3).map(|a| density(&PhysicsModel::GaugeU1 { coupling: 1.0 }, &rec[a * 20..(a + 1) * 20])).sum();
        assert!((su2 - u1).abs() < 1e-12 * su2);
    }

    #[test]
    fn structure_constant_sign() {
        // only A^2_1 = 1 and A^3_2 = 1 (components (b=1, μ=0), (c=2, ν=1)): F^1_{01} = g ε_123 = g
        let mut rec = vec![0.0; 60];
        rec[FieldLayout::Su2.component(1, 0) * 5] = 1.0;
        rec[FieldLayout::Su2.component(2, 1) * 5] = 1.0;
        assert_eq!(field_strength(&rec, FieldLayout::Su2, 2.0, 0, 0, 1), 2.0);
        assert_eq!(field_strength(&rec, FieldLayout::Su2, 2.0, 0, 1, 0), -2.0);
    }
}
