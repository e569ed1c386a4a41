//! Machine-diffable run reports.
//!
//! A report echoes the parsed configuration, lists one entry per check,
//! and carries summary counts. Serialization order is fixed (struct order
//! plus sorted maps), so two runs with the same configuration produce
//! byte-identical JSON except for the trailing `timestamp` and
//! `wall_time_ms` fields, which are excluded from comparisons.

use std::collections::BTreeMap;
use std::time::Instant;

use serde::Serialize;

pub const SCHEMA: &str = "heyde-report/1";

/// Process exit codes: 0 = all asserted properties hold; 1 = a guaranteed
/// property failed (implementation bug); 2 = input error; 3 = expected
/// counterexample found in a boundary-probing sweep.
#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord)]
pub enum Outcome {
    Ok = 0,
    Bug = 1,
    InputError = 2,
    BoundaryCounterexample = 3,
}

impl Outcome {
    pub fn code(self) -> i32 {
        self as i32
    }
}

#[derive(Serialize)]
pub struct Report {
    pub schema: &'static str,
    pub command: String,
    pub config: serde_json::Value,
    pub checks: Vec<serde_json::Value>,
    pub counts: BTreeMap<String, u64>,
    pub timestamp: String,
    pub wall_time_ms: u64,
}

pub struct ReportBuilder {
    command: String,
    config: serde_json::Value,
    checks: Vec<serde_json::Value>,
    counts: BTreeMap<String, u64>,
    started: Instant,
}

impl ReportBuilder {
    pub fn new(command: &str, config: serde_json::Value) -> Self {
        ReportBuilder {
            command: command.to_string(),
            config,
            checks: Vec::new(),
            counts: BTreeMap::new(),
            started: Instant::now(),
        }
    }

    pub fn push_check(&mut self, check: serde_json::Value) {
        self.checks.push(check);
    }

    pub fn bump(&mut self, key: &str, by: u64) {
        *self.counts.entry(key.to_string()).or_insert(0) += by;
    }

    pub fn finish(self) -> Report {
        Report {
            schema: SCHEMA,
            command: self.command,
            config: self.config,
            checks: self.checks,
            counts: self.counts,
            timestamp: chrono::Utc::now().to_rfc3339(),
            wall_time_ms: self.started.elapsed().as_millis() as u64,
        }
    }
}

impl Report {
    pub fn to_json_pretty(&self) -> String {
        serde_json::to_string_pretty(self).expect("report serializes")
    }

    /// Human-readable summary: one line per check plus the counts.
    pub fn render_text(&self) -> String {
        let mut out = String::new();
        out.push_str(&format!("command: {}\n", self.command));
        for check in &self.checks {
            let name = check
                .get("name")
                .and_then(|v| v.as_str())
                .unwrap_or("check");
            let ok = check
                .get("holds")
                .or_else(|| check.get("ok"))
                .and_then(|v| v.as_bool());
            let status = match ok {
                Some(true) => "ok",
                Some(false) => "FAIL",
                None => "info",
            };
            out.push_str(&format!("  {name}: {status}\n"));
            if let Some(detail) = check.get("detail").and_then(|v| v.as_str()) {
                out.push_str(&format!("      {detail}\n"));
            }
        }
        for (k, v) in &self.counts {
            out.push_str(&format!("  {k} = {v}\n"));
        }
        out
    }
}
