use std::fmt;

use serde::Serialize;

use crate::error::{Error, Result};

/// Outcome of an exhaustive or randomized verification run.
#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct CheckReport {
    pub name: String,
    pub passed: bool,
    /// Number of individual identities evaluated.
    pub checked: u64,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub counterexample: Option<String>,
    #[serde(skip_serializing_if = "Vec::is_empty")]
    pub notes: Vec<String>,
}

impl CheckReport {
    pub fn new(name: impl Into<String>) -> Self {
        CheckReport { name: name.into(), passed: true, checked: 0, counterexample: None, notes: Vec::new() }
    }

    /// Records one evaluated identity; the first failure is kept as the counterexample.
    pub fn record(&mut self, ok: bool, describe: impl FnOnce() -> String) {
        self.checked += 1;
        if !ok && self.passed {
            self.passed = false;
            self.counterexample = Some(describe());
        }
    }

    pub fn note(&mut self, note: impl Into<String>) {
        self.notes.push(note.into());
    }

    pub fn merge(&mut self, other: CheckReport) {
        self.checked += other.checked;
        if !other.passed && self.passed {
            self.passed = false;
            self.counterexample = other.counterexample.map(|c| format!("{}: {c}", other.name));
        }
        self.notes.extend(other.notes);
    }
}

impl fmt::Display for CheckReport {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let status = if self.passed { "PASS" } else { "FAIL" };
        write!(f, "{status} {} ({} checks)", self.name, self.checked)?;
        if let Some(c) = &self.counterexample {
            write!(f, "; counterexample: {c}")?;
        }
        Ok(())
    }
}

/// Closed exponent interval `[lo, hi]`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
pub struct ExponentWindow {
    pub lo: i64,
    pub hi: i64,
}

impl ExponentWindow {
    pub fn new(lo: i64, hi: i64) -> Result<Self> {
        if lo > hi {
            return Err(Error::Invalid(format!("empty window {lo}..{hi}")));
        }
        Ok(ExponentWindow { lo, hi })
    }

    pub fn exponents(self) -> impl Iterator<Item = i64> + Clone {
        self.lo..=self.hi
    }

    pub fn len(self) -> usize {
        (self.hi - self.lo + 1) as usize
    }

    pub fn is_empty(self) -> bool {
        false
    }

    /// Parses `"lo..hi"`.
    pub fn parse(text: &str) -> Result<Self> {
        let (a, b) = text.split_once("..").ok_or_else(|| Error::Parse(format!("expected lo..hi, got {text:?}")))?;
        let lo = a.trim().parse().map_err(|_| Error::Parse(format!("bad window bound {a:?}")))?;
        let hi = b.trim().parse().map_err(|_| Error::Parse(format!("bad window bound {b:?}")))?;
        Self::new(lo, hi)
    }
}

impl fmt::Display for ExponentWindow {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}..{}", self.lo, self.hi)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn first_failure_is_kept() {
        let mut r = CheckReport::new("demo");
        r.record(true, || unreachable!());
        r.record(false, || "first".into());
        r.record(false, || "second".into());
        assert!(!r.passed);
        assert_eq!(r.checked, 3);
        assert_eq!(r.counterexample.as_deref(), Some("first"));
    }

    #[test]
    fn window_parsing() {
        assert_eq!(ExponentWindow::parse("-4..4").unwrap(), ExponentWindow { lo: -4, hi: 4 });
        assert_eq!(ExponentWindow::parse("-4..4").unwrap().len(), 9);
        assert!(ExponentWindow::parse("3..1").is_err());
        assert!(ExponentWindow::parse("3").is_err());
    }
}
