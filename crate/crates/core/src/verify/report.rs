use std::collections::BTreeMap;
use std::fmt::Write as _;
use std::time::{Instant, SystemTime, UNIX_EPOCH};

use serde::Serialize;
use serde_json::Value;

use crate::error::Result;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "UPPERCASE")]
pub enum Status {
    Pass,
    Fail,
    Skip,
}

impl std::fmt::Display for Status {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.write_str(match self {
            Status::Pass => "PASS",
            Status::Fail => "FAIL",
            Status::Skip => "SKIP",
        })
    }
}

#[derive(Debug, Clone, Serialize)]
pub struct CheckResult {
    pub name: String,
    pub status: Status,
    pub measured: Value,
    pub tolerance: Option<f64>,
    pub detail: String,
}

/// Run-dependent data kept apart so the rest of a report is reproducible.
#[derive(Debug, Clone, Serialize)]
pub struct Stamp {
    pub unix_time: u64,
    pub crate_version: &'static str,
    pub parallel: bool,
    pub total_wall_ms: f64,
    pub wall_ms: BTreeMap<String, f64>,
}

#[derive(Debug, Clone, Serialize)]
pub struct VerificationReport {
    pub suite: String,
    pub sizes: Vec<usize>,
    pub seed: u64,
    pub checks: Vec<CheckResult>,
    pub stamp: Stamp,
}

/// What a check returns: status, measured value, tolerance, detail.
pub type Outcome = (Status, Value, Option<f64>, String);

pub(crate) struct Recorder {
    checks: Vec<CheckResult>,
    wall_ms: BTreeMap<String, f64>,
    start: Instant,
}

impl Recorder {
    pub(crate) fn new() -> Self {
        Recorder { checks: Vec::new(), wall_ms: BTreeMap::new(), start: Instant::now() }
    }

    /// Runs one check; an `Err` becomes a failure carrying the error text.
    pub(crate) fn check(&mut self, name: String, f: impl FnOnce() -> Result<Outcome>) {
        let t = Instant::now();
        let (status, measured, tolerance, detail) = match f() {
            Ok(o) => o,
            Err(e) => (Status::Fail, Value::Null, None, e.to_string()),
        };
        self.wall_ms.insert(name.clone(), t.elapsed().as_secs_f64() * 1e3);
        self.checks.push(CheckResult { name, status, measured, tolerance, detail });
    }

    pub(crate) fn finish(self, suite: &str, sizes: &[usize], seed: u64) -> VerificationReport {
        VerificationReport {
            suite: suite.to_string(),
            sizes: sizes.to_vec(),
            seed,
            checks: self.checks,
            stamp: Stamp {
                unix_time: SystemTime::now().duration_since(UNIX_EPOCH).map_or(0, |d| d.as_secs()),
                crate_version: env!("CARGO_PKG_VERSION"),
                parallel: crate::par::Exec::default().is_parallel(),
                total_wall_ms: self.start.elapsed().as_secs_f64() * 1e3,
                wall_ms: self.wall_ms,
            },
        }
    }
}

pub(crate) fn pass_if(ok: bool) -> Status {
    if ok {
        Status::Pass
    } else {
        Status::Fail
    }
}

impl VerificationReport {
    pub fn all_pass(&self) -> bool {
        self.checks.iter().all(|c| c.status != Status::Fail)
    }

    pub fn failures(&self) -> usize {
        self.checks.iter().filter(|c| c.status == Status::Fail).count()
    }

    pub fn to_json(&self) -> Value {
        serde_json::to_value(self).expect("serializable report")
    }

    /// The report without its stamp; identical across reruns with equal inputs.
    pub fn reproducible_json(&self) -> Value {
        let mut v = self.to_json();
        v.as_object_mut().expect("object").remove("stamp");
        v
    }

    pub fn table(&self) -> String {
        let width = self.checks.iter().map(|c| c.name.chars().count()).max().unwrap_or(5).max(5);
        let mut s = String::new();
        let _ = writeln!(s, "suite {} (sizes {:?}, seed {})", self.suite, self.sizes, self.seed);
        for c in &self.checks {
            let pad = width - c.name.chars().count();
            let _ = writeln!(s, "{}{}  {}  {}  {}", c.name, " ".repeat(pad), c.status, c.measured, c.detail);
        }
        let _ = writeln!(s, "{} checks, {} failed", self.checks.len(), self.failures());
        s
    }
}
