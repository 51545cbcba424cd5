use std::collections::BTreeMap;
use std::fmt::Write as _;

use chevalley::{Error, Result};
use serde::{Deserialize, Serialize};
use serde_json::Value;

pub const SCHEMA_VERSION: u32 = 1;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Status {
    Pass,
    Fail,
    Anomaly,
}

impl Status {
    pub fn as_str(self) -> &'static str {
        match self {
            Status::Pass => "pass",
            Status::Fail => "fail",
            Status::Anomaly => "anomaly",
        }
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct Check {
    pub name: String,
    pub claim: String,
    pub status: Status,
    pub metrics: BTreeMap<String, Value>,
    /// Point at which the check failed or an anomaly was seen.
    pub witness: Option<Vec<f64>>,
    pub detail: Option<String>,
}

impl Check {
    pub fn new(name: impl Into<String>, claim: &str, status: Status) -> Self {
        Check {
            name: name.into(),
            claim: claim.to_string(),
            status,
            metrics: BTreeMap::new(),
            witness: None,
            detail: None,
        }
    }

    pub fn metric(mut self, key: &str, v: impl Serialize) -> Self {
        self.metrics
            .insert(key.to_string(), serde_json::to_value(v).unwrap_or(Value::Null));
        self
    }

    pub fn witness(mut self, x: Option<Vec<f64>>) -> Self {
        self.witness = x;
        self
    }

    pub fn detail(mut self, d: impl Into<String>) -> Self {
        self.detail = Some(d.into());
        self
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct Provenance {
    #[serde(rename = "type")]
    pub ty: Option<String>,
    pub command: Option<String>,
    pub seed: u64,
    pub version: String,
    /// SHA-256 of the basic invariants used.
    pub basis_sha256: Option<String>,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct SuiteReport {
    pub schema: u32,
    pub provenance: Provenance,
    pub checks: Vec<Check>,
    pub runtime_secs: f64,
}

impl SuiteReport {
    pub fn empty(seed: u64) -> Self {
        SuiteReport {
            schema: SCHEMA_VERSION,
            provenance: Provenance {
                ty: None,
                command: None,
                seed,
                version: env!("CARGO_PKG_VERSION").to_string(),
                basis_sha256: None,
            },
            checks: Vec::new(),
            runtime_secs: 0.0,
        }
    }

    pub fn passed(&self) -> bool {
        self.checks.iter().all(|c| c.status == Status::Pass)
    }

    pub fn count(&self, s: Status) -> usize {
        self.checks.iter().filter(|c| c.status == s).count()
    }
}

fn csv_field(s: &str) -> String {
    if s.contains([',', '"', '\n']) {
        format!("\"{}\"", s.replace('"', "\"\""))
    } else {
        s.to_string()
    }
}

/// Renders a report. JSON is the lossless form; CSV has one row per metric
/// and text one line per check.
pub fn emit_report(r: &SuiteReport, format: crate::Format) -> Vec<u8> {
    match format {
        crate::Format::Json => {
            let mut v = serde_json::to_vec_pretty(r).expect("reports always serialize");
            v.push(b'\n');
            v
        }
        crate::Format::Csv => {
            let mut s = String::from("check,status,metric,value\n");
            for c in &r.checks {
                if c.metrics.is_empty() {
                    let _ = writeln!(s, "{},{},,", csv_field(&c.name), c.status.as_str());
                }
                for (k, v) in &c.metrics {
                    let _ = writeln!(
                        s,
                        "{},{},{},{}",
                        csv_field(&c.name),
                        c.status.as_str(),
                        csv_field(k),
                        csv_field(&v.to_string())
                    );
                }
            }
            s.into_bytes()
        }
        crate::Format::Text => {
            let p = &r.provenance;
            let mut s = format!(
                "{} {} seed {} (version {})\n",
                p.command.as_deref().unwrap_or("-"),
                p.ty.as_deref().unwrap_or("-"),
                p.seed,
                p.version
            );
            for c in &r.checks {
                let _ = write!(s, "{:<7} {}", c.status.as_str(), c.name);
                if let Some(d) = &c.detail {
                    let _ = write!(s, ": {d}");
                }
                s.push('\n');
            }
            let _ = writeln!(
                s,
                "{} checks: {} pass, {} fail, {} anomaly",
                r.checks.len(),
                r.count(Status::Pass),
                r.count(Status::Fail),
                r.count(Status::Anomaly)
            );
            s.into_bytes()
        }
    }
}

pub fn parse_report(bytes: &[u8]) -> Result<SuiteReport> {
    let r: SuiteReport = serde_json::from_slice(bytes)
        .map_err(|e| Error::Usage(format!("not a suite report: {e}")))?;
    if r.schema != SCHEMA_VERSION {
        return Err(Error::Usage(format!(
            "report schema {} is not the supported {SCHEMA_VERSION}",
            r.schema
        )));
    }
    Ok(r)
}
