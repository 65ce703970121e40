use serde::{Deserialize, Serialize};
use std::fmt;

/// Outcome of a brute-force verifier: how many elementary checks ran and
/// the first violation, if any.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct Report {
    pub subject: String,
    pub passed: bool,
    pub checks: usize,
    pub failure: Option<String>,
}

impl Report {
    pub fn pass(subject: impl Into<String>, checks: usize) -> Self {
        Report {
            subject: subject.into(),
            passed: true,
            checks,
            failure: None,
        }
    }

    pub fn fail(subject: impl Into<String>, checks: usize, failure: impl Into<String>) -> Self {
        Report {
            subject: subject.into(),
            passed: false,
            checks,
            failure: Some(failure.into()),
        }
    }
}

impl fmt::Display for Report {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match &self.failure {
            None => write!(f, "{}: pass ({} checks)", self.subject, self.checks),
            Some(why) => write!(f, "{}: FAIL after {} checks: {}", self.subject, self.checks, why),
        }
    }
}
