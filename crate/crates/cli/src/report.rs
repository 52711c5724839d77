//! JSON reports. Field order is fixed and no wall-clock data is written
//! unless requested, so equal inputs and seeds give byte-identical output.

use std::collections::BTreeMap;

use lbq::Verdict;
use serde::Serialize;

pub const SCHEMA: &str = "lbq-report/1";

#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum Status {
    Holds,
    Fails,
    Undecided,
    /// Informational output with nothing to verify.
    Info,
    Error,
}

impl Status {
    /// Exit code contribution: 0 positive, 1 negative, 3 undecided or failed computation.
    pub fn exit_code(self) -> i32 {
        match self {
            Status::Holds | Status::Info => 0,
            Status::Fails => 1,
            Status::Undecided | Status::Error => 3,
        }
    }
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct FailureReport {
    pub index: Vec<usize>,
    pub residual: String,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub witness: Option<String>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub reason: Option<String>,
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct TaskReport {
    pub task: String,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub subject: Option<String>,
    pub status: Status,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub failure: Option<FailureReport>,
    #[serde(skip_serializing_if = "BTreeMap::is_empty")]
    pub values: BTreeMap<String, serde_json::Value>,
}

impl TaskReport {
    pub fn new(task: &str, subject: Option<&str>) -> TaskReport {
        TaskReport {
            task: task.into(),
            subject: subject.map(Into::into),
            status: Status::Info,
            failure: None,
            values: BTreeMap::new(),
        }
    }

    pub fn with_verdict(mut self, v: &Verdict) -> TaskReport {
        let (status, failure) = verdict_parts(v);
        self.status = status;
        self.failure = failure;
        self
    }

    pub fn error(task: &str, subject: Option<&str>, message: impl ToString) -> TaskReport {
        let mut r = TaskReport::new(task, subject);
        r.status = Status::Error;
        r.failure = Some(FailureReport { index: Vec::new(), residual: String::new(), witness: None, reason: Some(message.to_string()) });
        r
    }

    pub fn value(mut self, key: &str, v: impl Into<serde_json::Value>) -> TaskReport {
        self.values.insert(key.into(), v.into());
        self
    }
}

pub fn verdict_parts(v: &Verdict) -> (Status, Option<FailureReport>) {
    match v {
        Verdict::Holds => (Status::Holds, None),
        Verdict::Fails(f) => (
            Status::Fails,
            Some(FailureReport {
                index: f.index.clone(),
                residual: f.residual.to_string(),
                witness: f.witness.as_ref().map(|w| w.to_string()),
                reason: None,
            }),
        ),
        Verdict::Undecided { index, reason } => (
            Status::Undecided,
            Some(FailureReport { index: index.clone(), residual: String::new(), witness: None, reason: Some(reason.clone()) }),
        ),
    }
}

#[derive(Clone, Debug, Serialize)]
pub struct InputInfo {
    pub path: String,
    pub name: String,
    pub sha256: String,
}

#[derive(Clone, Debug, Serialize)]
pub struct Report {
    pub schema: &'static str,
    pub tool: String,
    pub command: String,
    pub input: InputInfo,
    pub seed: u64,
    pub conventions: BTreeMap<&'static str, &'static str>,
    pub results: Vec<TaskReport>,
    pub status: Status,
    pub exit_code: i32,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub timing_ms: Option<f64>,
}

pub fn conventions() -> BTreeMap<&'static str, &'static str> {
    BTreeMap::from([
        ("curvature_sign", "R^a_bcd = d_d G^a_cb - d_c G^a_db + G^a_de G^e_cb - G^a_ce G^e_db, Ric_bd = R^a_bad; spheres have Sc < 0"),
        ("inverse_tangent", "tan^-1(q) is read as cot(q) = 1/tan(q)"),
        ("quantization", "K^ = hbar^2/2 (nabla_a K^ab nabla_b - E_K) + W"),
    ])
}

impl Report {
    pub fn new(command: &str, input: InputInfo, seed: u64, results: Vec<TaskReport>) -> Report {
        let status = overall(&results);
        Report {
            schema: SCHEMA,
            tool: format!("lbq {}", env!("CARGO_PKG_VERSION")),
            command: command.into(),
            input,
            seed,
            conventions: conventions(),
            results,
            status,
            exit_code: status.exit_code(),
            timing_ms: None,
        }
    }

    pub fn to_json(&self) -> String {
        serde_json::to_string_pretty(self).expect("report serializes")
    }

    pub fn summary(&self) -> String {
        let mut out = format!("{} on {} ({}): {:?}\n", self.command, self.input.name, self.input.path, self.status);
        for r in &self.results {
            let subject = r.subject.as_deref().map(|s| format!(" [{s}]")).unwrap_or_default();
            out.push_str(&format!("  {}{}: {:?}\n", r.task, subject, r.status));
            for (k, v) in &r.values {
                let v = v.as_str().map(str::to_string).unwrap_or_else(|| v.to_string());
                out.push_str(&format!("    {k} = {v}\n"));
            }
            if let Some(f) = &r.failure {
                if let Some(reason) = &f.reason {
                    out.push_str(&format!("    reason: {reason}\n"));
                } else {
                    out.push_str(&format!("    residual at {:?}: {}\n", f.index, f.residual));
                }
                if let Some(w) = &f.witness {
                    out.push_str(&format!("    witness: {w}\n"));
                }
            }
        }
        out
    }
}

/// Worst status of a result list: errors and undecided dominate failures.
pub fn overall(results: &[TaskReport]) -> Status {
    let worst = |s: Status| match s {
        Status::Holds | Status::Info => 0,
        Status::Fails => 1,
        Status::Undecided => 2,
        Status::Error => 3,
    };
    results.iter().map(|r| r.status).max_by_key(|s| worst(*s)).unwrap_or(Status::Info)
}
