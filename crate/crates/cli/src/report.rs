use std::fmt::Write as _;
use std::path::Path;

use serde::{Deserialize, Serialize};

use crate::config::SuiteConfig;
use crate::{CliError, Result};

/// Which side of the tolerance a passing residual lies on.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Bound {
    /// Pass iff `residual <= tolerance`.
    AtMost,
    /// Pass iff `residual >= tolerance`.
    AtLeast,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct CheckRecord {
    pub id: String,
    /// The statement being checked.
    pub anchor: String,
    /// Absent when the check could not be evaluated; see `error`.
    pub residual: Option<f64>,
    pub tolerance: f64,
    pub bound: Bound,
    pub pass: bool,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub error: Option<String>,
    /// Wall time; left out of the deterministic payload.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub runtime_ms: Option<u64>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Environment {
    pub n: usize,
    pub points: usize,
    pub half_width: f64,
    pub phase_points: usize,
    pub k: usize,
    pub j: Vec<f64>,
    pub seed: u64,
}

impl From<&SuiteConfig> for Environment {
    fn from(c: &SuiteConfig) -> Self {
        Self { n: c.n, points: c.points, half_width: c.half_width, phase_points: c.phase_points, k: c.k, j: c.j.clone(), seed: c.seed }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct VerificationReport {
    pub suite: String,
    pub environment: Environment,
    pub checks: Vec<CheckRecord>,
    pub pass: bool,
}

impl VerificationReport {
    pub fn new(suite: &str, environment: Environment, checks: Vec<CheckRecord>) -> Self {
        let pass = checks.iter().all(|c| c.pass);
        Self { suite: suite.into(), environment, checks, pass }
    }

    pub fn to_json(&self) -> String {
        serde_json::to_string_pretty(self).expect("report serializes")
    }

    /// The report without run times: identical for identical configs.
    pub fn payload(&self) -> String {
        let mut stripped = self.clone();
        stripped.checks.iter_mut().for_each(|c| c.runtime_ms = None);
        stripped.to_json()
    }

    pub fn to_csv(&self) -> String {
        let mut out = String::from("check,residual,tolerance,pass\n");
        for c in &self.checks {
            let residual = c.residual.map(|r| format!("{r:e}")).unwrap_or_default();
            writeln!(out, "{},{residual},{:e},{}", c.id, c.tolerance, c.pass).unwrap();
        }
        out
    }

    /// Writes the JSON report and, if asked, the CSV export.
    pub fn write(&self, json: Option<&Path>, csv: Option<&Path>) -> Result<()> {
        if let Some(p) = json {
            std::fs::write(p, self.to_json() + "\n").map_err(|e| CliError::io(p, e))?;
        }
        if let Some(p) = csv {
            std::fs::write(p, self.to_csv()).map_err(|e| CliError::io(p, e))?;
        }
        Ok(())
    }

    /// One line per check for terminals.
    pub fn summary(&self) -> String {
        let mut out = String::new();
        for c in &self.checks {
            let status = if c.pass { "PASS" } else { "FAIL" };
            let cmp = match c.bound {
                Bound::AtMost => "<=",
                Bound::AtLeast => ">=",
            };
            let residual = c.residual.map(|r| format!("{r:.3e}")).unwrap_or_else(|| "-".into());
            write!(out, "[{status}] {:<36} {residual:>10} {cmp} {:.1e}", c.id, c.tolerance).unwrap();
            if let Some(e) = &c.error {
                write!(out, "  ({e})").unwrap();
            }
            out.push('\n');
        }
        let passed = self.checks.iter().filter(|c| c.pass).count();
        writeln!(out, "{}: {passed}/{} checks passed", self.suite, self.checks.len()).unwrap();
        out
    }
}

impl std::str::FromStr for VerificationReport {
    type Err = CliError;

    fn from_str(s: &str) -> Result<Self> {
        serde_json::from_str(s).map_err(|e| CliError::Format(e.to_string()))
    }
}
