//! Uniform midpoint quadrature nodes and term footprints on them.

use crate::geometry::{minimal_image, GaussianTerm, PeriodicDomain};
use crate::scalar::Real;

/// Midpoint nodes `x_k = (k + ½)·L/n` on every axis of a torus.
#[derive(Debug, Clone)]
pub struct NodeGrid<T> {
    n: Vec<usize>,
    spacing: Vec<T>,
    extents: Vec<T>,
    strides: Vec<usize>,
    weight: T,
    len: usize,
}

impl<T: Real> NodeGrid<T> {
    pub fn new(domain: &PeriodicDomain<T>, nodes_per_axis: &[usize]) -> Self {
        let dims = domain.dims();
        assert_eq!(dims, nodes_per_axis.len());
        let spacing: Vec<T> = (0..dims).map(|k| domain.extent(k) / T::lit(nodes_per_axis[k] as f64)).collect();
        let mut strides = vec![1; dims];
        for k in (0..dims.saturating_sub(1)).rev() {
            strides[k] = strides[k + 1] * nodes_per_axis[k + 1];
        }
        let weight = spacing.iter().fold(T::one(), |a, &h| a * h);
        Self { n: nodes_per_axis.to_vec(), spacing, extents: domain.extents().to_vec(), strides, weight, len: nodes_per_axis.iter().product() }
    }

    pub fn len(&self) -> usize {
        self.len
    }

    pub fn is_empty(&self) -> bool {
        self.len == 0
    }

    pub fn dims(&self) -> usize {
        self.n.len()
    }

    /// Volume element carried by every node.
    pub fn weight(&self) -> T {
        self.weight
    }

    pub fn nodes_per_axis(&self) -> &[usize] {
        &self.n
    }

    #[inline]
    pub fn coordinate(&self, axis: usize, k: usize) -> T {
        (T::lit(k as f64) + T::lit(0.5)) * self.spacing[axis]
    }

    pub fn point(&self, node: usize) -> Vec<T> {
        let mut rest = node;
        (0..self.dims())
            .map(|axis| {
                let k = rest / self.strides[axis];
                rest %= self.strides[axis];
                self.coordinate(axis, k)
            })
            .collect()
    }

    /// Nodes along one axis within `sqrt(cut_d2)` of `center`, as
    /// `(flat offset, displacement, exp(−Δ²/ξ²))`. Each node appears once.
    fn axis_window(&self, axis: usize, center: T, width: T, cut_d2: T, out: &mut Vec<(usize, T, T)>) {
        out.clear();
        let n = self.n[axis];
        let h = self.spacing[axis];
        let l = self.extents[axis];
        let r = cut_d2.sqrt();
        let lo = ((center - r) / h - T::lit(0.5)).floor().to_i64().unwrap_or(0) - 1;
        let hi = ((center + r) / h - T::lit(0.5)).ceil().to_i64().unwrap_or(0) + 1;
        let w2 = width * width;
        let mut push = |k: usize| {
            let d = minimal_image(self.coordinate(axis, k) - center, l);
            let d2 = d * d;
            if d2 <= cut_d2 {
                out.push((k * self.strides[axis], d, (-d2 / w2).exp()));
            }
        };
        if hi - lo + 1 >= n as i64 {
            (0..n).for_each(&mut push);
        } else {
            for k in lo..=hi {
                push(k.rem_euclid(n as i64) as usize);
            }
        }
    }
}

/// Reusable per-axis buffers for footprint enumeration.
#[derive(Debug, Clone, Default)]
pub struct FootprintScratch<T> {
    axes: [Vec<(usize, T, T)>; 4],
}

/// Visits every node inside the truncated support of `term`:
/// `f(node, profile, displacement)` with `profile = exp(−|Δ|²/ξ²)` and
/// `Δ = node − center` (minimal image, per axis).
///
/// Support is the ball `|Δ|² ≤ ln(1/ε)·ξ²`; this is the single definition of
/// truncation shared by full and incremental action evaluation.
pub fn for_each_footprint_node<T: Real>(
    grid: &NodeGrid<T>,
    term: &GaussianTerm<T>,
    log_inv_epsilon: T,
    scratch: &mut FootprintScratch<T>,
    mut f: impl FnMut(usize, T, &[T; 4]),
) {
    let cut = log_inv_epsilon * term.width * term.width;
    let dims = grid.dims();
    for axis in 0..dims {
        grid.axis_window(axis, term.center[axis], term.width, cut, &mut scratch.axes[axis]);
    }
    let zero = T::zero();
    match dims {
        1 => {
            for &(k, d, g) in &scratch.axes[0] {
                f(k, g, &[d, zero, zero, zero]);
            }
        }
        4 => {
            let [a0, a1, a2, a3] = &scratch.axes;
            for &(k0, d0, g0) in a0 {
                let s0 = d0 * d0;
                for &(k1, d1, g1) in a1 {
                    let s1 = s0 + d1 * d1;
                    if s1 > cut {
                        continue;
                    }
                    let g01 = g0 * g1;
                    for &(k2, d2, g2) in a2 {
                        let s2 = s1 + d2 * d2;
                        if s2 > cut {
                            continue;
                        }
                        let g012 = g01 * g2;
                        let base = k0 + k1 + k2;
                        for &(k3, d3, g3) in a3 {
                            if s2 + d3 * d3 > cut {
                                continue;
                            }
                            f(base + k3, g012 * g3, &[d0, d1, d2, d3]);
                        }
                    }
                }
            }
        }
        _ => unreachable!("domains are 1- or 4-dimensional"),
    }
}
