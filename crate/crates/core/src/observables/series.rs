//! Iteration-indexed observable records.

use serde::{Deserialize, Serialize};
use thiserror::Error;

use super::stats::mean_and_error;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum SeriesError {
    #[error("iteration {got} does not follow {last}")]
    NotIncreasing { last: u64, got: u64 },
    #[error("entry has {got} derived values, series has {expected} columns")]
    Width { expected: usize, got: usize },
    #[error("series disagree on {0}")]
    Mismatch(&'static str),
    #[error("no series to combine")]
    Empty,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SeriesEntry {
    pub iteration: u64,
    pub action: f64,
    pub values: Vec<f64>,
}

/// Action and derived scalars (`V̄`, `q̄²` or `𝓛̄`) sampled along one chain.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ObservableSeries {
    pub columns: Vec<String>,
    pub entries: Vec<SeriesEntry>,
}

impl ObservableSeries {
    pub fn new(columns: Vec<String>) -> Self {
        Self { columns, entries: Vec::new() }
    }

    pub fn push(&mut self, entry: SeriesEntry) -> Result<(), SeriesError> {
        if entry.values.len() != self.columns.len() {
            return Err(SeriesError::Width { expected: self.columns.len(), got: entry.values.len() });
        }
        if let Some(last) = self.entries.last() {
            if entry.iteration <= last.iteration {
                return Err(SeriesError::NotIncreasing { last: last.iteration, got: entry.iteration });
            }
        }
        self.entries.push(entry);
        Ok(())
    }

    pub fn len(&self) -> usize {
        self.entries.len()
    }

    pub fn is_empty(&self) -> bool {
        self.entries.is_empty()
    }

    pub fn iterations(&self) -> Vec<u64> {
        self.entries.iter().map(|e| e.iteration).collect()
    }

    pub fn actions(&self) -> Vec<f64> {
        self.entries.iter().map(|e| e.action).collect()
    }

    pub fn column(&self, name: &str) -> Option<Vec<f64>> {
        let k = self.columns.iter().position(|c| c == name)?;
        Some(self.entries.iter().map(|e| e.values[k]).collect())
    }

    pub fn last(&self) -> Option<&SeriesEntry> {
        self.entries.last()
    }

    /// Appends a continuation of this series (e.g. after resuming).
    pub fn extend(&mut self, other: ObservableSeries) -> Result<(), SeriesError> {
        if other.columns != self.columns {
            return Err(SeriesError::Mismatch("columns"));
        }
        for e in other.entries {
            self.push(e)?;
        }
        Ok(())
    }
}

/// Mean and standard error across chains at every recorded iteration.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct EnsembleSeries {
    pub columns: Vec<String>,
    pub iterations: Vec<u64>,
    pub action: Vec<(f64, f64)>,
    pub values: Vec<Vec<(f64, f64)>>,
}

impl EnsembleSeries {
    pub fn from_chains(series: &[ObservableSeries]) -> Result<Self, SeriesError> {
        let first = series.first().ok_or(SeriesError::Empty)?;
        let iterations = first.iterations();
        for s in series {
            if s.columns != first.columns {
                return Err(SeriesError::Mismatch("columns"));
            }
            if s.iterations() != iterations {
                return Err(SeriesError::Mismatch("iterations"));
            }
        }
        let mut action = Vec::with_capacity(iterations.len());
        let mut values = Vec::with_capacity(iterations.len());
        for row in 0..iterations.len() {
            let a: Vec<f64> = series.iter().map(|s| s.entries[row].action).collect();
            action.push(mean_and_error(&a));
            values.push(
                (0..first.columns.len())
                    .map(|k| {
                        let v: Vec<f64> = series.iter().map(|s| s.entries[row].values[k]).collect();
                        mean_and_error(&v)
                    })
                    .collect(),
            );
        }
        Ok(Self { columns: first.columns.clone(), iterations, action, values })
    }

    pub fn column(&self, name: &str) -> Option<Vec<(f64, f64)>> {
        let k = self.columns.iter().position(|c| c == name)?;
        Some(self.values.iter().map(|row| row[k]).collect())
    }

    pub fn last(&self, name: &str) -> Option<(f64, f64)> {
        self.column(name)?.last().copied()
    }
}
