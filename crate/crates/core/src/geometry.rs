//! Periodic domains and Gaussian-sum paths/fields.
//!
//! A path (one component) or a gauge field (4 or 12 components) is a finite
//! sum of isotropic Gaussians on a rectangular torus:
//!
//! ```text
//! f(x) = Σ_i c_i · exp(−|x − x_i|² / ξ_i²)
//! ```
//!
//! where `|x − x_i|` is the minimal-image distance, taken per axis.

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::scalar::Real;

/// Default truncation threshold for Gaussians inside integrals.
pub const DEFAULT_TRUNCATION_EPSILON: f64 = 1e-8;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum GeometryError {
    #[error("domain must have 1 or 4 dimensions, got {0}")]
    BadDimension(usize),
    #[error("domain extent along axis {axis} must be positive, got {value}")]
    BadExtent { axis: usize, value: f64 },
    #[error("gaussian width must be positive, got {0}")]
    BadWidth(f64),
    #[error("point has {got} coordinates but the domain has {expected} dimensions")]
    PointDimension { expected: usize, got: usize },
    #[error("center coordinate {value} on axis {axis} lies outside [0, {extent})")]
    CenterOutside { axis: usize, value: f64, extent: f64 },
    #[error("truncation epsilon must lie in (0, 1), got {0}")]
    BadEpsilon(f64),
    #[error("component {component} has {got} terms, expected {expected}")]
    TermCount { component: usize, expected: usize, got: usize },
    #[error("layout {layout:?} needs {expected} components, got {got}")]
    ComponentCount { layout: FieldLayout, expected: usize, got: usize },
    #[error("layout {layout:?} needs a {expected}-dimensional domain, got {got}")]
    LayoutDimension { layout: FieldLayout, expected: usize, got: usize },
    #[error("term index ({component}, {index}) out of range")]
    TermIndex { component: usize, index: usize },
}

/// Rectangular torus: every axis is periodic with its own extent.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct PeriodicDomain<T> {
    extents: Vec<T>,
}

impl<T: Real> PeriodicDomain<T> {
    pub fn new(extents: Vec<T>) -> Result<Self, GeometryError> {
        if extents.len() != 1 && extents.len() != 4 {
            return Err(GeometryError::BadDimension(extents.len()));
        }
        for (axis, &e) in extents.iter().enumerate() {
            if !(e > T::zero()) || !e.is_finite() {
                return Err(GeometryError::BadExtent { axis, value: e.to_f64_lossy() });
            }
        }
        Ok(Self { extents })
    }

    /// One periodic time axis of period `period`.
    pub fn line(period: T) -> Result<Self, GeometryError> {
        Self::new(vec![period])
    }

    /// Four-dimensional box `(space, space, space, time)`; axis 3 is Euclidean time.
    pub fn spacetime(space: T, time: T) -> Result<Self, GeometryError> {
        Self::new(vec![space, space, space, time])
    }

    #[inline]
    pub fn dims(&self) -> usize {
        self.extents.len()
    }

    #[inline]
    pub fn extent(&self, axis: usize) -> T {
        self.extents[axis]
    }

    pub fn extents(&self) -> &[T] {
        &self.extents
    }

    pub fn volume(&self) -> T {
        self.extents.iter().fold(T::one(), |acc, &e| acc * e)
    }

    /// Maps a coordinate into `[0, extent)`.
    #[inline]
    pub fn wrap_axis(&self, axis: usize, x: T) -> T {
        let l = self.extents[axis];
        let w = x - l * (x / l).floor();
        // rounding can land exactly on `l`
        if w >= l {
            T::zero()
        } else {
            w
        }
    }

    pub fn wrap(&self, x: &[T]) -> Vec<T> {
        x.iter().enumerate().map(|(axis, &v)| self.wrap_axis(axis, v)).collect()
    }

    pub fn contains(&self, x: &[T]) -> bool {
        x.len() == self.dims() && x.iter().zip(&self.extents).all(|(&v, &l)| v >= T::zero() && v < l)
    }

    /// Minimal-image value of `a − b` along one axis, in `(−extent/2, extent/2]`.
    #[inline]
    pub fn displacement_axis(&self, axis: usize, a: T, b: T) -> T {
        minimal_image(a - b, self.extents[axis])
    }

    /// Minimal-image displacement `a − b`; each component lies in `(−extent/2, extent/2]`.
    pub fn periodic_displacement(&self, a: &[T], b: &[T]) -> Vec<T> {
        debug_assert_eq!(a.len(), self.dims());
        debug_assert_eq!(b.len(), self.dims());
        (0..self.dims()).map(|axis| self.displacement_axis(axis, a[axis], b[axis])).collect()
    }

    #[inline]
    pub fn distance_squared(&self, a: &[T], b: &[T]) -> T {
        let mut d2 = T::zero();
        for axis in 0..self.dims() {
            let d = self.displacement_axis(axis, a[axis], b[axis]);
            d2 = d2 + d * d;
        }
        d2
    }

    pub fn cast<U: Real>(&self) -> PeriodicDomain<U> {
        PeriodicDomain { extents: self.extents.iter().map(|&e| U::lit(e.to_f64_lossy())).collect() }
    }
}

/// Free-function form of [`PeriodicDomain::periodic_displacement`].
pub fn periodic_displacement<T: Real>(a: &[T], b: &[T], domain: &PeriodicDomain<T>) -> Vec<T> {
    domain.periodic_displacement(a, b)
}

/// Reduces `d` to `(−period/2, period/2]`; the tie goes to `+period/2`.
#[inline]
pub fn minimal_image<T: Real>(d: T, period: T) -> T {
    let half = period * T::lit(0.5);
    if d > -half && d <= half {
        return d;
    }
    let mut r = d - period * (d / period + T::lit(0.5)).floor();
    if r <= -half {
        r = r + period;
    } else if r > half {
        r = r - period;
    }
    r
}

/// Radius beyond which a Gaussian of width `width` drops below `epsilon` of its peak.
pub fn truncation_radius<T: Real>(width: T, epsilon: T) -> Result<T, GeometryError> {
    if !(epsilon > T::zero() && epsilon < T::one()) {
        return Err(GeometryError::BadEpsilon(epsilon.to_f64_lossy()));
    }
    if !(width > T::zero()) {
        return Err(GeometryError::BadWidth(width.to_f64_lossy()));
    }
    Ok(width * (-epsilon.ln()).sqrt())
}

/// One basis function `coefficient · exp(−|x − center|² / width²)`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct GaussianTerm<T> {
    pub coefficient: T,
    pub center: Vec<T>,
    pub width: T,
}

impl<T: Real> GaussianTerm<T> {
    pub fn new(coefficient: T, center: Vec<T>, width: T) -> Result<Self, GeometryError> {
        if !(width > T::zero()) || !width.is_finite() {
            return Err(GeometryError::BadWidth(width.to_f64_lossy()));
        }
        Ok(Self { coefficient, center, width })
    }

    /// Unit-amplitude profile `exp(−|Δ|²/ξ²)` at a point.
    #[inline]
    pub fn profile(&self, domain: &PeriodicDomain<T>, x: &[T]) -> T {
        let d2 = domain.distance_squared(x, &self.center);
        (-d2 / (self.width * self.width)).exp()
    }
}

/// Which physical system a configuration describes; fixes the component layout.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum FieldLayout {
    /// A single coordinate `q(τ)` on a periodic line.
    Particle,
    /// Four Lorentz components `A_μ(x)`.
    U1,
    /// Twelve components `A^a_μ(x)`, `a ∈ {1,2,3}`, flattened as `a·4 + μ`.
    Su2,
}

impl FieldLayout {
    pub fn components(self) -> usize {
        match self {
            FieldLayout::Particle => 1,
            FieldLayout::U1 => 4,
            FieldLayout::Su2 => 12,
        }
    }

    pub fn dims(self) -> usize {
        match self {
            FieldLayout::Particle => 1,
            FieldLayout::U1 | FieldLayout::Su2 => 4,
        }
    }

    pub fn colors(self) -> usize {
        match self {
            FieldLayout::Su2 => 3,
            _ => 1,
        }
    }

    /// Flat component index of `(color, lorentz)`; zero-based.
    #[inline]
    pub fn component(self, color: usize, lorentz: usize) -> usize {
        match self {
            FieldLayout::Particle => 0,
            FieldLayout::U1 => lorentz,
            FieldLayout::Su2 => color * 4 + lorentz,
        }
    }

    /// Inverse of [`FieldLayout::component`].
    #[inline]
    pub fn split(self, component: usize) -> (usize, usize) {
        match self {
            FieldLayout::Particle => (0, 0),
            FieldLayout::U1 => (0, component),
            FieldLayout::Su2 => (component / 4, component % 4),
        }
    }
}

/// A full path or gauge-field configuration.
///
/// Every component carries the same number of terms; after construction only
/// coefficients change.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Configuration<T> {
    domain: PeriodicDomain<T>,
    layout: FieldLayout,
    components: Vec<Vec<GaussianTerm<T>>>,
}

impl<T: Real> Configuration<T> {
    pub fn new(domain: PeriodicDomain<T>, layout: FieldLayout, components: Vec<Vec<GaussianTerm<T>>>) -> Result<Self, GeometryError> {
        if domain.dims() != layout.dims() {
            return Err(GeometryError::LayoutDimension { layout, expected: layout.dims(), got: domain.dims() });
        }
        if components.len() != layout.components() {
            return Err(GeometryError::ComponentCount { layout, expected: layout.components(), got: components.len() });
        }
        let n_sum = components[0].len();
        for (component, terms) in components.iter().enumerate() {
            if terms.len() != n_sum {
                return Err(GeometryError::TermCount { component, expected: n_sum, got: terms.len() });
            }
            for term in terms {
                if !(term.width > T::zero()) {
                    return Err(GeometryError::BadWidth(term.width.to_f64_lossy()));
                }
                if term.center.len() != domain.dims() {
                    return Err(GeometryError::PointDimension { expected: domain.dims(), got: term.center.len() });
                }
                for (axis, &c) in term.center.iter().enumerate() {
                    if !(c >= T::zero() && c < domain.extent(axis)) {
                        return Err(GeometryError::CenterOutside { axis, value: c.to_f64_lossy(), extent: domain.extent(axis).to_f64_lossy() });
                    }
                }
            }
        }
        Ok(Self { domain, layout, components })
    }

    pub fn domain(&self) -> &PeriodicDomain<T> {
        &self.domain
    }

    pub fn layout(&self) -> FieldLayout {
        self.layout
    }

    pub fn n_components(&self) -> usize {
        self.components.len()
    }

    /// Terms per component.
    pub fn n_sum(&self) -> usize {
        self.components[0].len()
    }

    pub fn n_terms(&self) -> usize {
        self.n_sum() * self.n_components()
    }

    pub fn terms(&self, component: usize) -> &[GaussianTerm<T>] {
        &self.components[component]
    }

    pub fn components(&self) -> &[Vec<GaussianTerm<T>>] {
        &self.components
    }

    pub fn term(&self, component: usize, index: usize) -> Result<&GaussianTerm<T>, GeometryError> {
        self.components.get(component).and_then(|c| c.get(index)).ok_or(GeometryError::TermIndex { component, index })
    }

    pub fn set_coefficient(&mut self, component: usize, index: usize, value: T) -> Result<(), GeometryError> {
        let term = self.components.get_mut(component).and_then(|c| c.get_mut(index)).ok_or(GeometryError::TermIndex { component, index })?;
        term.coefficient = value;
        Ok(())
    }

    pub fn coefficients(&self) -> impl Iterator<Item = T> + '_ {
        self.components.iter().flatten().map(|t| t.coefficient)
    }

    pub fn max_width(&self) -> T {
        self.components.iter().flatten().fold(T::zero(), |m, t| m.max(t.width))
    }

    pub fn min_width(&self) -> T {
        self.components.iter().flatten().fold(T::infinity(), |m, t| m.min(t.width))
    }

    /// Copy with every coefficient multiplied by `factor`.
    pub fn scaled(&self, factor: T) -> Self {
        let mut out = self.clone();
        out.components.iter_mut().flatten().for_each(|t| t.coefficient = t.coefficient * factor);
        out
    }

    /// Copy with every coefficient set to zero.
    pub fn zeroed(&self) -> Self {
        self.scaled(T::zero())
    }

    /// Full (untruncated) value of one component at `x`.
    pub fn evaluate(&self, component: usize, x: &[T]) -> T {
        let x = self.domain.wrap(x);
        self.components[component].iter().map(|t| t.coefficient * t.profile(&self.domain, &x)).fold(T::zero(), |a, b| a + b)
    }

    /// Full analytic gradient of one component at `x`.
    pub fn evaluate_gradient(&self, component: usize, x: &[T]) -> Vec<T> {
        let x = self.domain.wrap(x);
        let dims = self.domain.dims();
        let mut grad = vec![T::zero(); dims];
        let two = T::lit(2.0);
        for t in &self.components[component] {
            let delta = self.domain.periodic_displacement(&x, &t.center);
            let w2 = t.width * t.width;
            let d2 = delta.iter().fold(T::zero(), |a, &d| a + d * d);
            let g = t.coefficient * (-d2 / w2).exp();
            for (out, d) in grad.iter_mut().zip(delta) {
                *out = *out - two * d / w2 * g;
            }
        }
        grad
    }

    pub fn cast<U: Real>(&self) -> Configuration<U> {
        let conv = |v: T| U::lit(v.to_f64_lossy());
        Configuration {
            domain: self.domain.cast(),
            layout: self.layout,
            components: self
                .components
                .iter()
                .map(|terms| {
                    terms
                        .iter()
                        .map(|t| GaussianTerm {
                            coefficient: conv(t.coefficient),
                            center: t.center.iter().map(|&c| conv(c)).collect(),
                            width: conv(t.width),
                        })
                        .collect()
                })
                .collect(),
        }
    }
}

/// Free-function form of [`Configuration::evaluate`].
pub fn evaluate<T: Real>(config: &Configuration<T>, component: usize, x: &[T]) -> T {
    config.evaluate(component, x)
}

/// Free-function form of [`Configuration::evaluate_gradient`].
pub fn evaluate_gradient<T: Real>(config: &Configuration<T>, component: usize, x: &[T]) -> Vec<T> {
    config.evaluate_gradient(component, x)
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_relative_eq;
    use proptest::prelude::*;

    fn single(c: f64, center: f64, width: f64, period: f64) -> Configuration<f64> {
        let domain = PeriodicDomain::line(period).unwrap();
        let term = GaussianTerm::new(c, vec![center], width).unwrap();
        Configuration::new(domain, FieldLayout::Particle, vec![vec![term]]).unwrap()
    }

    /// Brute force over image shifts in {-2..=2}^d, picking the smallest norm.
    fn brute_min_image(a: &[f64], b: &[f64], ext: &[f64]) -> Vec<f64> {
        a.iter()
            .zip(b)
            .zip(ext)
            .map(|((&a, &b), &l)| (-2..=2).map(|k| a - b + k as f64 * l).min_by(|x, y| x.abs().partial_cmp(&y.abs()).unwrap()).unwrap())
            .collect()
    }

    #[test]
    fn displacement_identity() {
        let d = PeriodicDomain::line(20.0).unwrap();
        assert_eq!(d.periodic_displacement(&[0.5], &[0.5]), vec![0.0]);
    }

    #[test]
    fn displacement_uses_minimal_image() {
        let d = PeriodicDomain::line(20.0).unwrap();
        assert_eq!(d.periodic_displacement(&[19.5], &[0.5]), vec![-1.0]);
        assert_eq!(d.periodic_displacement(&[0.5], &[19.5]), vec![1.0]);
    }

    #[test]
    fn displacement_4d_matches_enumeration() {
        let d = PeriodicDomain::new(vec![7.0; 4]).unwrap();
        let a = [1.0, 1.0, 1.0, 1.0];
        let b = [6.0, 1.0, 1.0, 1.0];
        let got = d.periodic_displacement(&a, &b);
        // a − b = −5 ≡ +2 (mod 7); |2| < |−5|
        assert_eq!(got, vec![2.0, 0.0, 0.0, 0.0]);
        assert_eq!(got, brute_min_image(&a, &b, &[7.0; 4]));
        assert_eq!(d.periodic_displacement(&b, &a), vec![-2.0, 0.0, 0.0, 0.0]);
    }

    #[test]
    fn displacement_tie_is_positive() {
        let d = PeriodicDomain::line(20.0).unwrap();
        assert_eq!(d.periodic_displacement(&[10.0], &[0.0]), vec![10.0]);
        assert_eq!(d.periodic_displacement(&[0.0], &[10.0]), vec![10.0]);
    }

    #[test]
    fn evaluate_examples() {
        let zero = single(0.0, 10.0, 1.0, 20.0);
        assert_eq!(zero.evaluate(0, &[3.0]), 0.0);
        let c = single(1.0, 10.0, 1.0, 20.0);
        assert_eq!(c.evaluate(0, &[10.0]), 1.0);
        assert_relative_eq!(c.evaluate(0, &[11.0]), (-1.0f64).exp(), max_relative = 1e-15);
        assert_relative_eq!(c.evaluate(0, &[11.0]), 0.367879, epsilon = 1e-6);
    }

    #[test]
    fn gradient_examples() {
        let zero = single(0.0, 10.0, 1.0, 20.0);
        assert_eq!(zero.evaluate_gradient(0, &[4.0]), vec![0.0]);
        let c = single(1.0, 10.0, 1.0, 20.0);
        assert_eq!(c.evaluate_gradient(0, &[10.0]), vec![0.0]);
        let g = c.evaluate_gradient(0, &[11.0])[0];
        assert_relative_eq!(g, -2.0 * (-1.0f64).exp(), max_relative = 1e-14);
        assert_relative_eq!(g, -0.735759, epsilon = 1e-6);
        let h = 1e-5;
        let fd = (c.evaluate(0, &[11.0 + h]) - c.evaluate(0, &[11.0 - h])) / (2.0 * h);
        assert!((fd - g).abs() < 1e-9);
    }

    #[test]
    fn truncation_radius_examples() {
        let e9 = (-9.0f64).exp();
        assert_relative_eq!(truncation_radius(1.0, e9).unwrap(), 3.0, max_relative = 1e-14);
        assert_relative_eq!(truncation_radius(0.2, e9).unwrap(), 0.6, max_relative = 1e-14);
        assert_relative_eq!(truncation_radius(1.0, 1e-8).unwrap(), (1e8f64).ln().sqrt(), max_relative = 1e-14);
        assert!((truncation_radius(1.0f64, 1e-8).unwrap() - 4.2919).abs() < 1e-4);
        assert_eq!(truncation_radius(1.0, 0.0), Err(GeometryError::BadEpsilon(0.0)));
        assert_eq!(truncation_radius(1.0, 1.0), Err(GeometryError::BadEpsilon(1.0)));
        assert!(truncation_radius(1.0, -0.5).is_err());
    }

    #[test]
    fn rejects_invalid_domains_and_terms() {
        assert!(PeriodicDomain::<f64>::new(vec![1.0, 2.0]).is_err());
        assert!(PeriodicDomain::line(0.0).is_err());
        assert!(PeriodicDomain::line(-1.0).is_err());
        assert!(GaussianTerm::new(1.0, vec![0.0], 0.0).is_err());
        let domain = PeriodicDomain::line(20.0).unwrap();
        let outside = GaussianTerm::new(1.0, vec![20.0], 1.0).unwrap();
        assert!(Configuration::new(domain.clone(), FieldLayout::Particle, vec![vec![outside]]).is_err());
        assert!(Configuration::<f64>::new(domain, FieldLayout::U1, vec![vec![]; 4]).is_err());
    }

    #[test]
    fn works_in_single_precision() {
        let domain = PeriodicDomain::line(20.0f32).unwrap();
        let term = GaussianTerm::new(1.0f32, vec![10.0], 1.0).unwrap();
        let c = Configuration::new(domain, FieldLayout::Particle, vec![vec![term]]).unwrap();
        assert!((c.evaluate(0, &[11.0]) - (-1.0f32).exp()).abs() < 1e-6);
    }

    fn arb_config_4d() -> impl Strategy<Value = Configuration<f64>> {
        let ext = [5.0, 6.0, 7.0, 9.0];
        prop::collection::vec((-2.0..2.0f64, 0.0..1.0f64, 0.0..1.0f64, 0.0..1.0f64, 0.0..1.0f64, 0.3..1.5f64), 1..6).prop_map(move |terms| {
            let domain = PeriodicDomain::new(ext.to_vec()).unwrap();
            let terms = terms
                .into_iter()
                .map(|(c, a, b, d, e, w)| GaussianTerm::new(c, vec![a * ext[0], b * ext[1], d * ext[2], e * ext[3]], w).unwrap())
                .collect::<Vec<_>>();
            let comps = vec![terms.clone(), terms.clone(), terms.clone(), terms];
            Configuration::new(domain, FieldLayout::U1, comps).unwrap()
        })
    }

    proptest! {
        #[test]
        fn displacement_within_half_extent(a in 0.0..20.0f64, b in 0.0..20.0f64) {
            let d = PeriodicDomain::line(20.0).unwrap();
            let v = d.periodic_displacement(&[a], &[b])[0];
            prop_assert!(v > -10.0 && v <= 10.0);
            prop_assert!((v - brute_min_image(&[a], &[b], &[20.0])[0]).abs() < 1e-12);
        }

        #[test]
        fn displacement_antisymmetric(a in 0.0..20.0f64, b in 0.0..20.0f64) {
            let d = PeriodicDomain::line(20.0).unwrap();
            prop_assume!(((a - b).abs() - 10.0).abs() > 1e-9);
            let ab = d.periodic_displacement(&[a], &[b])[0];
            let ba = d.periodic_displacement(&[b], &[a])[0];
            prop_assert_eq!(ab, -ba);
        }

        #[test]
        fn evaluation_is_periodic(cfg in arb_config_4d(), p in prop::array::uniform4(0.0..1.0f64), shift in prop::array::uniform4(-2i32..3)) {
            let ext = cfg.domain().extents().to_vec();
            let x: Vec<f64> = (0..4).map(|k| p[k] * ext[k]).collect();
            let xs: Vec<f64> = (0..4).map(|k| x[k] + shift[k] as f64 * ext[k]).collect();
            let a = cfg.evaluate(1, &x);
            let b = cfg.evaluate(1, &xs);
            prop_assert!((a - b).abs() <= 1e-12 * (1.0 + a.abs()));
        }

        #[test]
        fn gradient_matches_central_differences(cfg in arb_config_4d(), p in prop::array::uniform4(0.05..0.95f64), comp in 0usize..4) {
            let ext = cfg.domain().extents().to_vec();
            let x: Vec<f64> = (0..4).map(|k| p[k] * ext[k]).collect();
            let g = cfg.evaluate_gradient(comp, &x);
            let h = 1e-5;
            for k in 0..4 {
                let mut xp = x.clone();
                let mut xm = x.clone();
                xp[k] += h;
                xm[k] -= h;
                let fd = (cfg.evaluate(comp, &xp) - cfg.evaluate(comp, &xm)) / (2.0 * h);
                prop_assert!((fd - g[k]).abs() <= 1e-6 * (1.0 + g[k].abs()), "axis {}: fd {} vs {}", k, fd, g[k]);
            }
        }
    }
}
