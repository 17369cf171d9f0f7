//! Side-by-side comparison of a finished run with the reference values.

use std::fmt;
use std::path::Path;

use super::output::{RunMetadata, METADATA_FILE, OBSERVABLES_FILE};
use super::{io_err, RunnerError};
use crate::action::PhysicsModel;

#[derive(Debug, Clone, PartialEq)]
pub struct ReportRow {
    pub quantity: String,
    pub value: f64,
    pub error: f64,
    pub reference: Option<f64>,
    pub note: &'static str,
    /// Further than `2·error + 5%` from the reference.
    pub deviates: bool,
}

#[derive(Debug, Clone, PartialEq)]
pub struct Report {
    pub name: String,
    pub status: String,
    pub rows: Vec<ReportRow>,
}

/// Reference value and its origin for a scalar of `model`, if one exists.
fn reference(model: &PhysicsModel<f64>, name: &str) -> Option<(f64, &'static str)> {
    match (*model, name) {
        (PhysicsModel::HarmonicOscillator { omega, .. }, "final_potential_mean") => Some((omega / 4.0, "exact ω/4")),
        (PhysicsModel::HarmonicOscillator { mass, omega }, "final_q2_mean") => Some((1.0 / (2.0 * mass * omega), "exact 1/(2mω)")),
        (PhysicsModel::GaugeU1 { coupling }, "fit_alpha") => Some((coupling * coupling / (4.0 * std::f64::consts::PI), "g²/4π")),
        (PhysicsModel::GaugeU1 { .. }, "final_lagrangian_mean") => Some((0.20, "published 7³×14 run")),
        (PhysicsModel::GaugeSu2 { .. }, "fit_sigma") => Some((0.17, "published 7³×14 run")),
        (PhysicsModel::GaugeSu2 { .. }, "final_lagrangian_mean") => Some((0.49, "published 7³×14 run")),
        _ => None,
    }
}

/// Reads `metadata.json` and `observables.csv` from a run directory.
pub fn report(out: &Path) -> Result<Report, RunnerError> {
    let meta_path = out.join(METADATA_FILE);
    if !meta_path.exists() {
        return Err(RunnerError::MissingArtifact(meta_path));
    }
    let meta: RunMetadata = serde_json::from_str(&std::fs::read_to_string(&meta_path).map_err(io_err(&meta_path))?)?;
    let obs_path = out.join(OBSERVABLES_FILE);
    if !obs_path.exists() {
        return Err(RunnerError::MissingArtifact(obs_path));
    }
    let model = meta.config.simulation.model;
    let mut rows = Vec::new();
    for record in csv::Reader::from_path(&obs_path)?.records() {
        let record = record?;
        let parse = |k: usize| record.get(k).and_then(|s| s.parse::<f64>().ok()).unwrap_or(f64::NAN);
        let quantity = record.get(0).unwrap_or_default().to_string();
        let (reference, note) = match reference(&model, &quantity) {
            Some((r, n)) => (Some(r), n),
            None => (None, ""),
        };
        let (value, error) = (parse(1), parse(2));
        let deviates = reference.is_some_and(|r| !((value - r).abs() <= 2.0 * error + 0.05 * r.abs()));
        rows.push(ReportRow { value, error, quantity, reference, note, deviates });
    }
    Ok(Report { name: meta.name, status: meta.status, rows })
}

impl fmt::Display for Report {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        writeln!(f, "run {} ({})", self.name, self.status)?;
        writeln!(f, "{:<24} {:>14} {:>12} {:>10}", "quantity", "value", "error", "reference")?;
        for r in &self.rows {
            let reference = r.reference.map_or(String::new(), |x| format!("{x:.4}"));
            let flag = if r.deviates { "  DEVIATES" } else { "" };
            writeln!(f, "{:<24} {:>14.6} {:>12.2e} {:>10}  {}{flag}", r.quantity, r.value, r.error, reference, r.note)?;
        }
        Ok(())
    }
}
