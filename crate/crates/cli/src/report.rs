//! Check records and the JSON report.

use std::collections::BTreeMap;
use std::panic::{catch_unwind, AssertUnwindSafe};
use std::path::Path;

use integrable_core::Complex64;
use serde::{Deserialize, Serialize};
use serde_json::{json, Value};
use sha2::{Digest, Sha256};

use crate::error::CliError;
use crate::scenario::Scenario;

pub const TOOLKIT_VERSION: &str = concat!(env!("CARGO_PKG_NAME"), " ", env!("CARGO_PKG_VERSION"));

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct CheckRecord {
    pub name: String,
    /// Hex SHA-256 of the compact JSON of the check inputs.
    pub inputs_digest: String,
    pub values: BTreeMap<String, Value>,
    pub residual: Option<f64>,
    pub threshold: Option<f64>,
    pub passed: bool,
    pub error: Option<String>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct Report {
    pub toolkit_version: String,
    pub scenario: Scenario,
    pub seed: u64,
    pub passed: bool,
    pub checks: Vec<CheckRecord>,
    /// Present only when timing was requested; omitted otherwise so that
    /// reports are byte-reproducible.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub duration_ms: Option<u64>,
}

impl Report {
    pub fn new(scenario: Scenario, seed: u64, checks: Vec<CheckRecord>) -> Self {
        let passed = checks.iter().all(|c| c.passed);
        Self {
            toolkit_version: TOOLKIT_VERSION.to_string(),
            scenario,
            seed,
            passed,
            checks,
            duration_ms: None,
        }
    }

    pub fn to_json(&self) -> Result<String, CliError> {
        let mut s = serde_json::to_string_pretty(self).map_err(|e| CliError::Serialize(e.to_string()))?;
        s.push('\n');
        Ok(s)
    }
}

pub fn digest(inputs: &Value) -> String {
    hex::encode(Sha256::digest(inputs.to_string().as_bytes()))
}

/// In-progress check. Outcome rules: an error fails the check; otherwise the
/// last `measure` or `expect` decides; a check with neither only records values.
pub struct Check {
    record: CheckRecord,
    verdict: Option<bool>,
}

impl Check {
    fn new(name: String, inputs: &Value) -> Self {
        Self {
            record: CheckRecord {
                name,
                inputs_digest: digest(inputs),
                values: BTreeMap::new(),
                residual: None,
                threshold: None,
                passed: false,
                error: None,
            },
            verdict: None,
        }
    }

    pub fn value(&mut self, key: &str, v: impl Into<Value>) {
        self.record.values.insert(key.to_string(), v.into());
    }

    /// Passes iff `residual` is finite and `<= threshold`.
    pub fn measure(&mut self, residual: f64, threshold: f64) {
        self.record.threshold = Some(threshold);
        if residual.is_finite() {
            self.record.residual = Some(residual);
            self.verdict = Some(residual <= threshold);
        } else {
            self.record.residual = None;
            self.record.error = Some(format!("non-finite residual {residual}"));
            self.verdict = Some(false);
        }
    }

    pub fn expect(&mut self, ok: bool) {
        self.verdict = Some(ok);
    }

    fn finish(mut self, outcome: Result<(), String>) -> CheckRecord {
        match outcome {
            Err(e) => {
                self.record.error = Some(e);
                self.record.passed = false;
            }
            Ok(()) => {
                self.record.passed = self.record.error.is_none() && self.verdict.unwrap_or(true);
            }
        }
        self.record
    }
}

/// Collects check records in execution order. A failing or panicking check
/// never prevents later checks from running.
#[derive(Default)]
pub struct Battery {
    records: Vec<CheckRecord>,
}

impl Battery {
    pub fn run(&mut self, name: impl Into<String>, inputs: Value, body: impl FnOnce(&mut Check) -> Result<(), String>) {
        let mut check = Check::new(name.into(), &inputs);
        let outcome = match catch_unwind(AssertUnwindSafe(|| body(&mut check))) {
            Ok(r) => r,
            Err(p) => Err(format!(
                "panic: {}",
                p.downcast_ref::<String>()
                    .cloned()
                    .or_else(|| p.downcast_ref::<&str>().map(|s| s.to_string()))
                    .unwrap_or_default()
            )),
        };
        self.records.push(check.finish(outcome));
    }

    pub fn into_records(self) -> Vec<CheckRecord> {
        self.records
    }
}

pub fn cjson(z: Complex64) -> Value {
    json!([z.re, z.im])
}

pub fn cvec_json(v: &[Complex64]) -> Value {
    Value::Array(v.iter().map(|&z| cjson(z)).collect())
}

pub fn emit_report(report: &Report, path: &Path) -> Result<(), CliError> {
    std::fs::write(path, report.to_json()?).map_err(|source| CliError::Io {
        path: path.to_path_buf(),
        source,
    })
}

pub fn read_report(path: &Path) -> Result<Report, CliError> {
    let text = std::fs::read_to_string(path).map_err(|source| CliError::Io {
        path: path.to_path_buf(),
        source,
    })?;
    serde_json::from_str(&text).map_err(|e| CliError::Parse {
        path: path.to_path_buf(),
        line: e.line(),
        column: e.column(),
        message: e.to_string(),
    })
}
