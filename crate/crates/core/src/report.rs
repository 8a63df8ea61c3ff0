use std::collections::BTreeMap;
use std::fmt;

use serde::{Deserialize, Serialize};
use serde_json::Value;

use crate::schema::SCHEMA_VERSION;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub enum CheckStatus {
    Pass,
    Fail,
    /// The statement quantifies over a sup that cannot be computed; only measurements are reported.
    ReportOnly,
}

impl fmt::Display for CheckStatus {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let s = match self {
            CheckStatus::Pass => "Pass",
            CheckStatus::Fail => "Fail",
            CheckStatus::ReportOnly => "ReportOnly",
        };
        f.write_str(s)
    }
}

/// Outcome of one named numerical check.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct CheckReport {
    pub schema: String,
    pub check_id: String,
    pub status: CheckStatus,
    pub measured: BTreeMap<String, f64>,
    pub witnesses: Vec<Value>,
    /// The statement under test, in words.
    pub statement: String,
}

impl CheckReport {
    pub fn new(check_id: impl Into<String>, statement: impl Into<String>) -> Self {
        CheckReport {
            schema: SCHEMA_VERSION.to_string(),
            check_id: check_id.into(),
            status: CheckStatus::Pass,
            measured: BTreeMap::new(),
            witnesses: Vec::new(),
            statement: statement.into(),
        }
    }

    pub fn measure(&mut self, name: impl Into<String>, value: f64) {
        self.measured.insert(name.into(), value);
    }

    /// Marks the report failed and records a re-runnable witness.
    pub fn fail(&mut self, witness: Value) {
        self.status = CheckStatus::Fail;
        if self.witnesses.len() < 16 {
            self.witnesses.push(witness);
        }
    }

    pub fn witness(&mut self, witness: Value) {
        if self.witnesses.len() < 16 {
            self.witnesses.push(witness);
        }
    }

    pub fn report_only(mut self) -> Self {
        if self.status != CheckStatus::Fail {
            self.status = CheckStatus::ReportOnly;
        }
        self
    }

    pub fn passed(&self) -> bool {
        self.status != CheckStatus::Fail
    }
}
