//! Static potential from Wilson-loop averages:
//! `V(R) = (1/t) ln(⟨W(T,R)⟩ / ⟨W(T+t,R)⟩)`, with jackknife errors over paths.

use log::warn;
use serde::{Deserialize, Serialize};
use thiserror::Error;

use super::stats::{jackknife, mean_and_error, mean_excluding};
use super::wilson::LoopPlan;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum PotentialError {
    #[error("loop table has no entry for T = {0}")]
    MissingTime(f64),
    #[error("path {path} has {got} loop values, expected {expected}")]
    Shape { path: usize, got: usize, expected: usize },
    #[error("t must be positive, got {0}")]
    Step(f64),
    #[error("no paths in loop table")]
    Empty,
}

/// Per-path loop averages on a `(T, R)` grid.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct LoopTable {
    pub time_extents: Vec<f64>,
    pub space_extents: Vec<f64>,
    /// `per_path[p][ti·|R| + ri]`.
    pub per_path: Vec<Vec<f64>>,
}

impl LoopTable {
    pub fn new(time_extents: Vec<f64>, space_extents: Vec<f64>) -> Self {
        Self { time_extents, space_extents, per_path: Vec::new() }
    }

    pub fn for_plan(plan: &LoopPlan) -> Self {
        Self::new(plan.time_extents.clone(), plan.space_extents.clone())
    }

    pub fn push(&mut self, values: Vec<f64>) -> Result<(), PotentialError> {
        let expected = self.time_extents.len() * self.space_extents.len();
        if values.len() != expected {
            return Err(PotentialError::Shape { path: self.per_path.len(), got: values.len(), expected });
        }
        self.per_path.push(values);
        Ok(())
    }

    pub fn paths(&self) -> usize {
        self.per_path.len()
    }

    fn time_index(&self, t: f64) -> Result<usize, PotentialError> {
        self.time_extents.iter().position(|&x| (x - t).abs() <= 1e-9 * (1.0 + t.abs())).ok_or(PotentialError::MissingTime(t))
    }

    /// Values of one `(T, R)` cell across paths.
    pub fn column(&self, ti: usize, ri: usize) -> Vec<f64> {
        let k = ti * self.space_extents.len() + ri;
        self.per_path.iter().map(|v| v[k]).collect()
    }

    /// `(T, R, ⟨W⟩, error)` for every cell.
    pub fn averages(&self) -> Vec<(f64, f64, f64, f64)> {
        let mut out = Vec::new();
        for (ti, &t) in self.time_extents.iter().enumerate() {
            for (ri, &r) in self.space_extents.iter().enumerate() {
                let (m, e) = mean_and_error(&self.column(ti, ri));
                out.push((t, r, m, e));
            }
        }
        out
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct PotentialPoint {
    pub r: f64,
    pub v: f64,
    pub error: f64,
}

/// A separation whose loop averages were unusable.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct FlaggedPoint {
    pub r: f64,
    pub w_t: f64,
    pub w_t_plus: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct StaticPotential {
    pub time_extent: f64,
    pub step: f64,
    pub points: Vec<PotentialPoint>,
    pub flagged: Vec<FlaggedPoint>,
}

/// `V(R)` from loops at `T` and `T + t`. Separations where either average
/// (or any leave-one-out average) is not positive are flagged and skipped.
pub fn static_potential(table: &LoopTable, time_extent: f64, step: f64) -> Result<StaticPotential, PotentialError> {
    if !(step > 0.0) {
        return Err(PotentialError::Step(step));
    }
    if table.per_path.is_empty() {
        return Err(PotentialError::Empty);
    }
    let t0 = table.time_index(time_extent)?;
    let t1 = table.time_index(time_extent + step)?;
    let n = table.paths();
    let mut points = Vec::new();
    let mut flagged = Vec::new();
    for (ri, &r) in table.space_extents.iter().enumerate() {
        let a = table.column(t0, ri);
        let b = table.column(t1, ri);
        let usable = |skip: Option<usize>| mean_excluding(&a, skip) > 0.0 && mean_excluding(&b, skip) > 0.0;
        let all_usable = usable(None) && (n < 2 || (0..n).all(|i| usable(Some(i))));
        if !all_usable {
            let point = FlaggedPoint { r, w_t: mean_excluding(&a, None), w_t_plus: mean_excluding(&b, None) };
            warn!("non-positive Wilson loop average at R = {r}: {point:?}; point excluded");
            flagged.push(point);
            continue;
        }
        let (v, error) = jackknife(n, |skip| (mean_excluding(&a, skip) / mean_excluding(&b, skip)).ln() / step);
        points.push(PotentialPoint { r, v, error });
    }
    Ok(StaticPotential { time_extent, step, points, flagged })
}

#[cfg(test)]
mod tests {
    use super::*;

    fn table(times: &[f64], radii: &[f64], w: impl Fn(f64, f64, usize) -> f64, paths: usize) -> LoopTable {
        let mut t = LoopTable::new(times.to_vec(), radii.to_vec());
        for p in 0..paths {
            t.push(times.iter().flat_map(|&tt| radii.iter().map(move |&r| (tt, r))).map(|(tt, r)| w(tt, r, p)).collect()).unwrap();
        }
        t
    }

    #[test]
    fn equal_loops_give_zero() {
        let t = table(&[2.0, 2.5], &[1.0, 2.0], |_, r, _| 0.5 / r, 4);
        let v = static_potential(&t, 2.0, 0.5).unwrap();
        assert!(v.points.iter().all(|p| p.v == 0.0 && p.error == 0.0));
    }

    #[test]
    fn perimeter_decay_recovers_v0() {
        let v0 = 0.37;
        let t = table(&[3.0, 3.25], &[0.5, 1.0, 1.5], |tt, _, _| (-v0 * (tt + 1.3)).exp(), 3);
        for p in static_potential(&t, 3.0, 0.25).unwrap().points {
            assert!((p.v - v0).abs() < 1e-13);
        }
    }

    #[test]
    fn area_law_recovers_sigma_r() {
        let sigma = 0.17;
        for step in [0.25, 1.0] {
            let t = table(&[4.0, 4.0 + step], &[0.5, 1.0, 2.0, 3.0], |tt, r, _| (-sigma * tt * r).exp(), 5);
            for p in static_potential(&t, 4.0, step).unwrap().points {
                assert!((p.v - sigma * p.r).abs() < 1e-13, "{p:?}");
            }
        }
    }

    #[test]
    fn jackknife_error_from_path_spread() {
        let t = table(&[1.0, 2.0], &[1.0], |tt, _, p| if tt == 1.0 { 0.5 } else { 0.2 + 0.01 * p as f64 }, 5);
        let v = static_potential(&t, 1.0, 1.0).unwrap();
        assert!(v.points[0].error > 0.0);
        assert!((v.points[0].v - (0.5f64 / 0.22).ln()).abs() < 1e-12);
    }

    #[test]
    fn non_positive_averages_are_flagged() {
        let t = table(&[1.0, 2.0], &[1.0, 2.0], |tt, r, _| if tt == 2.0 && r == 2.0 { -0.01 } else { 0.4 }, 3);
        let v = static_potential(&t, 1.0, 1.0).unwrap();
        assert_eq!(v.points.len(), 1);
        assert_eq!(v.flagged.len(), 1);
        assert_eq!(v.flagged[0].r, 2.0);
    }

    #[test]
    fn errors() {
        let t = table(&[1.0, 2.0], &[1.0], |_, _, _| 0.5, 2);
        assert_eq!(static_potential(&t, 1.0, 0.5), Err(PotentialError::MissingTime(1.5)));
        assert_eq!(static_potential(&t, 1.0, 0.0), Err(PotentialError::Step(0.0)));
        let mut t = LoopTable::new(vec![1.0], vec![1.0, 2.0]);
        assert!(t.push(vec![1.0]).is_err());
        assert_eq!(static_potential(&t, 1.0, 1.0), Err(PotentialError::Empty));
    }
}
