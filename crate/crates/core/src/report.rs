//! Validation reports.
//!
//! Validators never fail: they collect violations as data. A report is
//! empty exactly when the object is well formed. Violations are kept
//! sorted by (code, elements) so golden output is stable.

use std::fmt;

/// One violated invariant, naming the rule and the offending elements.
#[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord)]
pub struct Violation {
    /// Short stable rule code, e.g. `"tg3-orientation"`.
    pub code: String,
    /// Ids of the offending elements, in context-dependent order.
    pub elements: Vec<String>,
    /// Human-readable description.
    pub message: String,
}

impl fmt::Display for Violation {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "[{}]", self.code)?;
        for e in &self.elements {
            write!(f, " {}", e)?;
        }
        write!(f, ": {}", self.message)
    }
}

/// An ordered list of violations.
#[derive(Debug, Clone, Default, PartialEq, Eq)]
pub struct ValidationReport {
    violations: Vec<Violation>,
}

impl ValidationReport {
    pub fn new() -> Self {
        Self::default()
    }

    pub fn push(&mut self, code: &str, elements: Vec<String>, message: impl Into<String>) {
        self.violations.push(Violation {
            code: code.to_string(),
            elements,
            message: message.into(),
        });
    }

    pub fn merge(&mut self, other: ValidationReport) {
        self.violations.extend(other.violations);
    }

    pub fn is_empty(&self) -> bool {
        self.violations.is_empty()
    }

    pub fn len(&self) -> usize {
        self.violations.len()
    }

    /// Violations sorted by (code, elements, message).
    pub fn violations(&self) -> Vec<Violation> {
        let mut v = self.violations.clone();
        v.sort();
        v
    }

    pub fn has_code(&self, code: &str) -> bool {
        self.violations.iter().any(|v| v.code == code)
    }
}

impl fmt::Display for ValidationReport {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.is_empty() {
            return write!(f, "ok");
        }
        for v in self.violations() {
            writeln!(f, "{}", v)?;
        }
        Ok(())
    }
}
