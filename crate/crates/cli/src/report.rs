//! The JSON report document and CSV output.

use std::path::Path;

use anyhow::{Context, Result};
use serde::Serialize;
use serde_json::Value;

use dsym_core::counting::GrowthReport;
use dsym_core::svconstants::ConvergenceRow;
use dsym_core::Constant;

#[derive(Debug, Serialize)]
pub struct ReportDocument {
    pub command: String,
    pub parameters: Value,
    pub constants: Vec<Constant>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub counts: Option<GrowthReport>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub convergence: Option<Vec<ConvergenceRow>>,
    #[serde(skip_serializing_if = "Value::is_null")]
    pub details: Value,
    pub version: &'static str,
    pub timing_ms: f64,
}

impl ReportDocument {
    pub fn new(command: &str, parameters: Value) -> Self {
        ReportDocument {
            command: command.to_string(),
            parameters,
            constants: vec![],
            counts: None,
            convergence: None,
            details: Value::Null,
            version: env!("CARGO_PKG_VERSION"),
            timing_ms: 0.0,
        }
    }

    pub fn to_json(&self) -> Result<String> {
        Ok(serde_json::to_string_pretty(self)?)
    }

    /// Writes to `path`, or stdout when `path` is None.
    pub fn emit(&self, path: Option<&Path>) -> Result<()> {
        let text = self.to_json()?;
        match path {
            Some(p) => std::fs::write(p, text + "\n").with_context(|| format!("writing {}", p.display())),
            None => stdout(&(text + "\n")),
        }
    }
}

/// Writes to stdout, returning an error (not panicking) on a closed pipe.
pub fn stdout(text: &str) -> Result<()> {
    use std::io::Write;
    let mut so = std::io::stdout().lock();
    so.write_all(text.as_bytes())?;
    so.flush()?;
    Ok(())
}

pub fn write_csv(report: &GrowthReport, path: &Path) -> Result<()> {
    let mut w = csv::Writer::from_path(path).with_context(|| format!("creating {}", path.display()))?;
    for row in &report.rows {
        w.serialize(row)?;
    }
    w.flush()?;
    Ok(())
}
