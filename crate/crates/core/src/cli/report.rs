//! Machine-readable run reports.

use serde::Serialize;

/// Version of the report, CSV and sidecar layouts.
pub const SCHEMA_VERSION: u32 = 1;

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct InvariantResult {
    pub name: String,
    pub residual: f64,
    pub tolerance: f64,
    pub passed: bool,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct RunReport {
    pub schema_version: u32,
    pub command: String,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub seed: Option<u64>,
    pub passed: bool,
    pub invariants: Vec<InvariantResult>,
    #[serde(skip_serializing_if = "serde_json::Map::is_empty")]
    pub metadata: serde_json::Map<String, serde_json::Value>,
}

impl RunReport {
    pub fn new(command: impl Into<String>) -> Self {
        RunReport {
            schema_version: SCHEMA_VERSION,
            command: command.into(),
            seed: None,
            passed: true,
            invariants: Vec::new(),
            metadata: serde_json::Map::new(),
        }
    }

    /// Records `residual ≤ tolerance`; a NaN residual fails. Names are unique:
    /// recording the same name twice keeps the worse of the two results.
    pub fn check(&mut self, name: impl Into<String>, residual: f64, tolerance: f64) -> bool {
        let name = name.into();
        let passed = residual <= tolerance;
        if let Some(existing) = self.invariants.iter_mut().find(|r| r.name == name) {
            if !passed || existing.residual.is_nan() || residual > existing.residual {
                existing.residual = residual;
                existing.tolerance = tolerance;
                existing.passed = existing.passed && passed;
            }
        } else {
            self.invariants.push(InvariantResult { name, residual, tolerance, passed });
        }
        self.passed = self.invariants.iter().all(|r| r.passed);
        passed
    }

    pub fn set_meta(&mut self, key: &str, value: impl Serialize) {
        let v = serde_json::to_value(value).unwrap_or(serde_json::Value::Null);
        self.metadata.insert(key.to_string(), v);
    }

    pub fn merge(&mut self, other: RunReport) {
        for r in other.invariants {
            self.check(r.name, r.residual, r.tolerance);
        }
        for (k, v) in other.metadata {
            self.metadata.insert(k, v);
        }
    }

    pub fn failures(&self) -> impl Iterator<Item = &InvariantResult> {
        self.invariants.iter().filter(|r| !r.passed)
    }

    pub fn to_json(&self) -> String {
        serde_json::to_string_pretty(self).expect("report serializes")
    }
}
