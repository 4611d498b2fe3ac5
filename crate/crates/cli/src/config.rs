use std::collections::BTreeMap;
use std::path::{Path, PathBuf};

use opcalc::{GridSpec, SkewForm};
use serde::{Deserialize, Serialize};

use crate::suites::{default_tolerance, SUITES};
use crate::{CliError, Result};

/// Everything a suite run depends on. Loaded from JSON; every field has a
/// default, so `{}` is a valid config.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct SuiteConfig {
    pub suite: String,
    /// Spatial dimension, 1 or 2.
    pub n: usize,
    /// Points per axis of the position grid.
    pub points: usize,
    /// Box half width `L`.
    pub half_width: f64,
    /// Points per axis for checks that sample symbols over phase space
    /// (`2n` axes), which cost `phase_points^(2n)` samples.
    pub phase_points: usize,
    /// Matrix size of the coefficient algebra.
    pub k: usize,
    /// `J`, row-major `n x n`.
    pub j: Vec<f64>,
    /// Per-check overrides keyed by check id.
    pub tolerances: BTreeMap<String, f64>,
    pub seed: u64,
    /// JSON report destination.
    pub report: Option<PathBuf>,
    /// Optional flat CSV export.
    pub csv: Option<PathBuf>,
}

impl Default for SuiteConfig {
    fn default() -> Self {
        Self {
            suite: "all".into(),
            n: 2,
            points: 64,
            half_width: 10.0,
            phase_points: 16,
            k: 2,
            j: vec![0.0, 0.5, -0.5, 0.0],
            tolerances: BTreeMap::new(),
            seed: 20_240_917,
            report: None,
            csv: None,
        }
    }
}

impl SuiteConfig {
    pub fn from_json(text: &str) -> Result<Self> {
        serde_json::from_str(text).map_err(|e| CliError::Config(e.to_string()))
    }

    pub fn load(path: &Path) -> Result<Self> {
        let text = std::fs::read_to_string(path).map_err(|e| CliError::io(path, e))?;
        Self::from_json(&text)
    }

    /// Sets `n = 2` and `J = [[0, theta], [-theta, 0]]`.
    pub fn set_theta(&mut self, theta: f64) {
        self.n = 2;
        self.j = vec![0.0, theta, -theta, 0.0];
    }

    /// Sets the grid from `n,N,L`. A change of dimension resets `J` to zero
    /// unless it still has the right shape.
    pub fn set_grid(&mut self, spec: &str) -> Result<()> {
        let parts: Vec<&str> = spec.split(',').map(str::trim).collect();
        if parts.len() != 3 {
            return Err(CliError::Config(format!("--grid expects n,N,L, got '{spec}'")));
        }
        let bad = |what: &str| CliError::Config(format!("--grid: cannot parse {what} in '{spec}'"));
        self.n = parts[0].parse().map_err(|_| bad("n"))?;
        self.points = parts[1].parse().map_err(|_| bad("N"))?;
        self.half_width = parts[2].parse().map_err(|_| bad("L"))?;
        if self.j.len() != self.n * self.n {
            self.j = vec![0.0; self.n * self.n];
        }
        Ok(())
    }

    pub fn validate(&self) -> Result<()> {
        let err = |m: String| Err(CliError::Config(m));
        if !SUITES.contains(&self.suite.as_str()) {
            return err(format!("unknown suite '{}'; expected one of {}", self.suite, SUITES.join(", ")));
        }
        for (name, v) in [("points", self.points), ("phase_points", self.phase_points)] {
            if v < 8 || !v.is_power_of_two() {
                return err(format!("{name} must be a power of two >= 8, got {v}"));
            }
        }
        GridSpec::new(self.n, self.points, self.half_width).map_err(|e| CliError::Config(e.to_string()))?;
        if !(1..=8).contains(&self.k) {
            return err(format!("k must be between 1 and 8, got {}", self.k));
        }
        if self.j.iter().any(|v| !v.is_finite()) {
            return err("J entries must be finite".into());
        }
        SkewForm::new(self.n, self.j.clone()).map_err(|e| CliError::Config(e.to_string()))?;
        for (id, &tol) in &self.tolerances {
            if default_tolerance(id).is_none() {
                return err(format!("tolerance override for unknown check '{id}'"));
            }
            if !(tol.is_finite() && tol > 0.0) {
                return err(format!("tolerance for '{id}' must be positive, got {tol}"));
            }
        }
        Ok(())
    }

    pub fn grid(&self) -> GridSpec {
        GridSpec::new(self.n, self.points, self.half_width).expect("validated grid")
    }

    pub fn skew_form(&self) -> SkewForm {
        SkewForm::new(self.n, self.j.clone()).expect("validated J")
    }

    /// Override if present, else the built-in default.
    pub fn tolerance(&self, id: &str) -> f64 {
        self.tolerances
            .get(id)
            .copied()
            .or_else(|| default_tolerance(id))
            .unwrap_or_else(|| panic!("no tolerance registered for check '{id}'"))
    }
}
