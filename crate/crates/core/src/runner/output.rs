//! Derived results of a finished run and their CSV/JSON files.
//!
//! CSV files (all floats in shortest round-trip decimal form):
//! - `series.csv`: `chain,iteration,action,<columns>`
//! - `ensemble_series.csv`: `iteration,action_mean,action_error,<column>_mean,<column>_error`
//! - `observables.csv`: `name,value,error`
//! - `histogram_values.csv`, `histogram_coefficients.csv`: `bin_center,density,error,count`
//! - `loops.csv`: `T,R,mean,error`
//! - `potential.csv`: `R,V,error`
//! - `fit.csv`: `parameter,value,error`

use std::path::Path;

use serde::{Deserialize, Serialize};

use super::checkpoint::Checkpoint;
use super::config::RunConfig;
use super::{io_err, RunnerError};
use crate::observables::fit::{fit_potential, PotentialFit};
use crate::observables::histogram::{Histogram, PooledHistogram};
use crate::observables::potential::{static_potential, FlaggedPoint, LoopTable, StaticPotential};
use crate::observables::series::EnsembleSeries;
use crate::observables::stats::mean_and_error;
use crate::sampler::convergence::saturation_index;
use crate::sampler::rng::GENERATOR_NAME;

pub const METADATA_FILE: &str = "metadata.json";
pub const CONFIG_FILE: &str = "config.toml";
pub const OBSERVABLES_FILE: &str = "observables.csv";
pub const FIT_FILE: &str = "fit.csv";

/// Fraction of the series per window in the automatic saturation rule.
pub const SATURATION_WINDOW: f64 = 0.1;

#[derive(Debug, Clone, PartialEq)]
pub struct RunResults {
    pub ensemble: EnsembleSeries,
    /// `(name, value, error)` rows of `observables.csv`.
    pub scalars: Vec<(String, f64, f64)>,
    pub values: PooledHistogram,
    pub coefficients: Option<PooledHistogram>,
    pub loops: Option<LoopTable>,
    pub potential: Option<StaticPotential>,
    pub fit: Option<Result<PotentialFit, String>>,
}

impl RunResults {
    pub fn compute(cp: &Checkpoint) -> Result<Self, RunnerError> {
        let series: Vec<_> = cp.chains.iter().map(|c| c.series.clone()).collect();
        let ensemble = EnsembleSeries::from_chains(&series).map_err(|e| RunnerError::MissingArtifact(e.to_string().into()))?;
        let mut scalars = Vec::new();
        let (a, e) = *ensemble.action.last().expect("series has entries");
        scalars.push(("final_action".to_string(), a, e));
        for name in &ensemble.columns {
            let (v, e) = ensemble.last(name).expect("column exists");
            scalars.push((format!("final_{name}"), v, e));
        }
        let rates: Vec<f64> = cp.chains.iter().map(|c| c.accepted as f64 / c.iteration.max(1) as f64).collect();
        let (r, re) = mean_and_error(&rates);
        scalars.push(("acceptance_rate".into(), r, re));
        let drift = cp.chains.iter().flat_map(|c| c.drift.iter().map(|d| d.relative())).fold(0.0, f64::max);
        scalars.push(("max_relative_drift".into(), drift, 0.0));
        let means: Vec<f64> = ensemble.action.iter().map(|x| x.0).collect();
        let sat = saturation_index(&means, SATURATION_WINDOW).map_or(f64::NAN, |k| ensemble.iterations[k] as f64);
        scalars.push(("saturation_iteration".into(), sat, 0.0));
        scalars.push(("snapshots_per_path".into(), cp.chains[0].measured.snapshots as f64, 0.0));

        let pool = |hs: Vec<Histogram>| PooledHistogram::from_paths(&hs).expect("chains share binning");
        let values = pool(cp.chains.iter().map(|c| c.measured.values.clone()).collect());
        let coefficients = cp
            .config
            .measurement
            .coefficient_histogram
            .map(|_| pool(cp.chains.iter().map(|c| c.measured.coefficients.clone().expect("planned histogram")).collect()));

        let (mut loops, mut potential, mut fit) = (None, None, None);
        if let (Some(spec), Some(plan)) = (&cp.config.measurement.loops, super::measure::loop_plan(&cp.config)) {
            let mut table = LoopTable::for_plan(&plan);
            for c in &cp.chains {
                table.push(c.measured.loop_means()).expect("loop sums match plan");
            }
            let v = static_potential(&table, spec.time_extent_len, spec.time_step_len).expect("loop times present");
            let f = fit_potential(&v.points, spec.fit);
            if let Ok(f) = &f {
                for (name, (value, error)) in f.kind.parameter_names().iter().zip(f.params.iter().zip(&f.errors)) {
                    scalars.push((format!("fit_{name}"), *value, *error));
                }
            }
            fit = Some(f.map_err(|e| e.to_string()));
            potential = Some(v);
            loops = Some(table);
        }
        Ok(Self { ensemble, scalars, values, coefficients, loops, potential, fit })
    }

    pub fn scalar(&self, name: &str) -> Option<(f64, f64)> {
        self.scalars.iter().find(|s| s.0 == name).map(|s| (s.1, s.2))
    }
}

/// Run description written next to the CSV files. Wall time and worker count
/// live here (and not in any CSV) so CSV outputs stay bitwise reproducible.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RunMetadata {
    pub name: String,
    pub status: String,
    pub iteration: u64,
    pub n_iteration: u64,
    pub seed: u64,
    pub generator: String,
    pub crate_version: String,
    pub workers: usize,
    pub wall_time_s: f64,
    pub loop_value_convention: String,
    #[serde(default)]
    pub flagged_potential_points: Vec<FlaggedPoint>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub fit_error: Option<String>,
    pub config: RunConfig,
}

impl RunMetadata {
    pub fn new(config: &RunConfig, cp: &Checkpoint, results: Option<&RunResults>, workers: usize, wall_time_s: f64) -> Self {
        Self {
            name: config.name.clone(),
            status: if results.is_some() { "complete" } else { "partial" }.into(),
            iteration: cp.iteration,
            n_iteration: config.simulation.n_iteration,
            seed: config.simulation.seed,
            generator: GENERATOR_NAME.into(),
            crate_version: env!("CARGO_PKG_VERSION").into(),
            workers,
            wall_time_s,
            loop_value_convention: "U(1): cos(phi); SU(2): (1/2) Re tr, so a trivial loop is 1".into(),
            flagged_potential_points: results.and_then(|r| r.potential.as_ref()).map(|p| p.flagged.clone()).unwrap_or_default(),
            fit_error: results.and_then(|r| r.fit.as_ref()).and_then(|f| f.as_ref().err().cloned()),
            config: config.clone(),
        }
    }
}

fn num(x: f64) -> String {
    format!("{x}")
}

fn write_csv(path: &Path, header: &[&str], rows: impl IntoIterator<Item = Vec<String>>) -> Result<(), RunnerError> {
    let mut w = csv::Writer::from_path(path)?;
    w.write_record(header)?;
    for row in rows {
        w.write_record(&row)?;
    }
    w.flush().map_err(io_err(path))?;
    Ok(())
}

fn write_histogram(path: &Path, h: &PooledHistogram) -> Result<(), RunnerError> {
    let centers = h.bin_centers();
    write_csv(
        path,
        &["bin_center", "density", "error", "count"],
        (0..centers.len()).map(|k| vec![num(centers[k]), num(h.density[k]), num(h.error[k]), h.pooled.counts[k].to_string()]),
    )
}

pub(crate) fn write_run(out: &Path, cp: &Checkpoint, meta: &RunMetadata, results: Option<&RunResults>) -> Result<(), RunnerError> {
    let config = &cp.config;
    let cfg = out.join(CONFIG_FILE);
    std::fs::write(&cfg, config.to_toml()?).map_err(io_err(&cfg))?;
    let m = out.join(METADATA_FILE);
    std::fs::write(&m, serde_json::to_string_pretty(meta)?).map_err(io_err(&m))?;
    let Some(r) = results else { return Ok(()) };

    let cols = &r.ensemble.columns;
    let mut header = vec!["chain".to_string(), "iteration".into(), "action".into()];
    header.extend(cols.iter().cloned());
    let header_refs: Vec<&str> = header.iter().map(String::as_str).collect();
    write_csv(
        &out.join("series.csv"),
        &header_refs,
        cp.chains.iter().flat_map(|c| {
            c.series.entries.iter().map(move |e| {
                let mut row = vec![c.index.to_string(), e.iteration.to_string(), num(e.action)];
                row.extend(e.values.iter().map(|v| num(*v)));
                row
            })
        }),
    )?;

    let mut header = vec!["iteration".to_string(), "action_mean".into(), "action_error".into()];
    for c in cols {
        header.push(format!("{c}_mean"));
        header.push(format!("{c}_error"));
    }
    let header_refs: Vec<&str> = header.iter().map(String::as_str).collect();
    let e = &r.ensemble;
    write_csv(
        &out.join("ensemble_series.csv"),
        &header_refs,
        (0..e.iterations.len()).map(|k| {
            let mut row = vec![e.iterations[k].to_string(), num(e.action[k].0), num(e.action[k].1)];
            for v in &e.values[k] {
                row.push(num(v.0));
                row.push(num(v.1));
            }
            row
        }),
    )?;

    write_csv(&out.join(OBSERVABLES_FILE), &["name", "value", "error"], r.scalars.iter().map(|(n, v, e)| vec![n.clone(), num(*v), num(*e)]))?;
    write_histogram(&out.join("histogram_values.csv"), &r.values)?;
    if let Some(h) = &r.coefficients {
        write_histogram(&out.join("histogram_coefficients.csv"), h)?;
    }
    if let Some(t) = &r.loops {
        write_csv(
            &out.join("loops.csv"),
            &["T", "R", "mean", "error"],
            t.averages().into_iter().map(|(tt, rr, m, e)| vec![num(tt), num(rr), num(m), num(e)]),
        )?;
    }
    if let Some(p) = &r.potential {
        write_csv(&out.join("potential.csv"), &["R", "V", "error"], p.points.iter().map(|p| vec![num(p.r), num(p.v), num(p.error)]))?;
    }
    if let Some(Ok(f)) = &r.fit {
        let names = f.kind.parameter_names();
        write_csv(
            &out.join(FIT_FILE),
            &["parameter", "value", "error"],
            (0..2).map(|k| vec![names[k].to_string(), num(f.params[k]), num(f.errors[k])]),
        )?;
    }
    Ok(())
}
