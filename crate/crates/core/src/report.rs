//! Serializable scenario and report files.

use std::collections::BTreeMap;

use serde::{Deserialize, Serialize};

use crate::converge::{ConvergenceReport, GridSpec, RegionRow, SkippedRegion};
use crate::error::{Error, Result};
use crate::geometry::Scenario;

pub const SCHEMA_VERSION: u32 = 1;

pub const DEFAULT_SCHEDULE: [f64; 4] = [0.2, 0.1, 0.05, 0.025];
pub const DEFAULT_DELTA: f64 = 0.25;

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct LagrangianSpec {
    pub a: f64,
    pub b: f64,
}

fn default_schedule() -> Vec<f64> {
    DEFAULT_SCHEDULE.to_vec()
}

fn default_delta() -> f64 {
    DEFAULT_DELTA
}

/// Input scenario: lines y = a_i x + b_i, listed counterclockwise.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ScenarioFile {
    pub schema_version: u32,
    pub k: usize,
    pub lagrangians: Vec<LagrangianSpec>,
    #[serde(default = "default_schedule")]
    pub epsilon_schedule: Vec<f64>,
    #[serde(default = "default_delta")]
    pub delta: f64,
    #[serde(default)]
    pub grid: GridSpec,
    #[serde(default)]
    pub seed: u64,
}

impl ScenarioFile {
    pub fn validate(&self) -> Result<()> {
        if self.schema_version != SCHEMA_VERSION {
            return Err(Error::Domain(format!(
                "schema_version {} is not supported (expected {SCHEMA_VERSION})",
                self.schema_version
            )));
        }
        if !(3..=4).contains(&self.k) {
            return Err(Error::Domain(format!("k={} must be 3 or 4", self.k)));
        }
        if self.lagrangians.len() != self.k {
            return Err(Error::Domain(format!("k={} but {} lagrangians", self.k, self.lagrangians.len())));
        }
        if self.lagrangians.iter().any(|l| !l.a.is_finite() || !l.b.is_finite()) {
            return Err(Error::Domain("lagrangian coefficients must be finite".into()));
        }
        if self.epsilon_schedule.is_empty() || self.epsilon_schedule.iter().any(|&e| !(e > 0.0 && e.is_finite())) {
            return Err(Error::Domain("epsilon_schedule needs positive finite entries".into()));
        }
        if !(self.delta > 0.0 && self.delta < 0.5) {
            return Err(Error::Domain(format!("delta={} outside (0, 1/2)", self.delta)));
        }
        let g = self.grid;
        if g.tau_samples < 2 || g.sigma_samples < 2 || g.polar_samples < 2 {
            return Err(Error::Domain("grid sample counts must be at least 2".into()));
        }
        Ok(())
    }

    /// The scenario at the first ε of the schedule.
    pub fn scenario(&self) -> Result<Scenario> {
        self.validate()?;
        let a: Vec<f64> = self.lagrangians.iter().map(|l| l.a).collect();
        let b: Vec<f64> = self.lagrangians.iter().map(|l| l.b).collect();
        Scenario::from_coefficients(&a, &b, self.epsilon_schedule[0], self.delta)
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ReportMetadata {
    pub classification: String,
    pub tree_type: String,
    pub internal_length: f64,
    pub k: usize,
    pub delta: f64,
    pub grid: GridSpec,
    pub skipped: Vec<SkippedRegion>,
    pub versions: BTreeMap<String, String>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ReportFile {
    pub metadata: ReportMetadata,
    pub rows: Vec<RegionRow>,
}

impl ReportFile {
    pub fn new(report: ConvergenceReport, classification: String) -> Self {
        let mut versions = BTreeMap::new();
        versions.insert("disktree".to_string(), env!("CARGO_PKG_VERSION").to_string());
        versions.insert("schema".to_string(), SCHEMA_VERSION.to_string());
        Self {
            metadata: ReportMetadata {
                classification,
                tree_type: report.tree_type.to_string(),
                internal_length: report.internal_length,
                k: report.k,
                delta: report.delta,
                grid: report.grid,
                skipped: report.skipped,
                versions,
            },
            rows: report.rows,
        }
    }

    /// Keep only rows whose region is listed.
    pub fn retain_regions(&mut self, names: &[String]) {
        self.rows.retain(|r| names.contains(&r.region));
        self.metadata.skipped.retain(|r| names.contains(&r.region));
    }
}
