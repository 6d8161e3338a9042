use serde_json::{json, Map, Value};
use slocal_core::Error;
use std::path::Path;

pub const SCHEMA: u64 = 1;

#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord)]
pub enum Status {
    Ok = 0,
    Invalid = 1,
    Usage = 2,
    Infeasible = 3,
    Oracle = 4,
}

impl Status {
    pub fn of(err: &Error) -> Status {
        match err {
            Error::InvalidArgument(_) | Error::Parse { .. } | Error::Io(_) => Status::Usage,
            Error::Capacity { .. } | Error::InfeasibleThreshold(_) | Error::InfeasibleBound(_) => Status::Infeasible,
            Error::OracleFailure(_) => Status::Oracle,
            _ => Status::Invalid,
        }
    }

    pub fn code(self) -> i32 {
        self as i32
    }
}

fn error_kind(err: &Error) -> &'static str {
    match err {
        Error::InvalidArgument(_) => "invalid-argument",
        Error::Parse { .. } => "parse",
        Error::Io(_) => "io",
        Error::Capacity { .. } => "capacity",
        Error::InfeasibleThreshold(_) => "infeasible-threshold",
        Error::InfeasibleBound(_) => "infeasible-bound",
        Error::OracleFailure(_) => "oracle-failure",
        Error::LocalityViolation { .. } => "locality-violation",
        Error::WriteViolation { .. } => "write-violation",
        Error::ReadViolation { .. } => "read-violation",
        Error::CompilationSoundness { .. } => "compilation-soundness",
        Error::SeparationViolation { .. } => "separation-violation",
        Error::Invariant(_) => "invariant",
    }
}

pub fn error_json(err: &Error) -> Value {
    json!({ "kind": error_kind(err), "message": err.to_string() })
}

/// Result of one solver run, already paired with its verifier.
#[derive(Clone, Debug, Default)]
pub struct Outcome {
    pub valid: bool,
    pub params: Map<String, Value>,
    pub assertions: Vec<(String, bool)>,
    pub metrics: Map<String, Value>,
    pub solution: Value,
    pub verification: Value,
}

impl Outcome {
    pub fn new(solution: Value) -> Self {
        Outcome { solution, ..Outcome::default() }
    }

    pub fn valid(mut self, valid: bool) -> Self {
        self.valid = valid;
        self
    }

    pub fn verification(mut self, v: Value) -> Self {
        self.verification = v;
        self
    }

    pub fn param(mut self, key: &str, v: impl Into<Value>) -> Self {
        self.params.insert(key.into(), v.into());
        self
    }

    pub fn metric(mut self, key: &str, v: impl Into<Value>) -> Self {
        self.metrics.insert(key.into(), v.into());
        self
    }

    pub fn check(mut self, name: &str, holds: bool) -> Self {
        self.assertions.push((name.into(), holds));
        self
    }

    pub fn status(&self) -> Status {
        if self.valid && self.assertions.iter().all(|(_, h)| *h) {
            Status::Ok
        } else {
            Status::Invalid
        }
    }

    pub fn to_json(&self) -> Value {
        let assertions: Vec<Value> = self.assertions.iter().map(|(n, h)| json!({ "name": n, "holds": h })).collect();
        json!({
            "valid": self.valid,
            "ok": self.status() == Status::Ok,
            "params": self.params,
            "assertions": assertions,
            "metrics": self.metrics,
            "verification": self.verification,
            "solution": self.solution,
        })
    }
}

/// JSON body and exit status of a run that may have errored.
pub fn settle(result: slocal_core::Result<Outcome>) -> (Value, Status) {
    match result {
        Ok(out) => (out.to_json(), out.status()),
        Err(e) => (json!({ "valid": false, "ok": false, "error": error_json(&e) }), Status::of(&e)),
    }
}

/// Pretty JSON on stdout, and in `path` when given.
pub fn emit(report: &Value, path: Option<&Path>) -> anyhow::Result<()> {
    let text = serde_json::to_string_pretty(report)? + "\n";
    if let Some(p) = path {
        std::fs::write(p, &text).map_err(|e| anyhow::anyhow!("writing {}: {e}", p.display()))?;
    }
    print!("{text}");
    Ok(())
}
