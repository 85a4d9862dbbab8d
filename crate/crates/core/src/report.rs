//! Verification reports: a count of checks and the failures with witnesses.

use std::fmt;

use serde::Serialize;

use crate::grading::Bidegree;

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct Failure {
    pub check: String,
    pub at: Option<Bidegree>,
    pub witness: String,
}

#[derive(Clone, Debug, Default, PartialEq, Eq, Serialize)]
pub struct Report {
    pub name: String,
    pub checks: usize,
    pub failures: Vec<Failure>,
    pub notes: Vec<String>,
}

const WITNESS_LIMIT: usize = 240;

impl Report {
    pub fn new(name: impl Into<String>) -> Self {
        Report { name: name.into(), ..Default::default() }
    }

    pub fn passed(&self) -> bool {
        self.failures.is_empty()
    }

    /// Records one check; `witness` is only evaluated when it fails.
    pub fn check(&mut self, ok: bool, check: &str, at: Option<Bidegree>, witness: impl FnOnce() -> String) {
        self.checks += 1;
        if !ok {
            let mut w = witness();
            if w.chars().count() > WITNESS_LIMIT {
                w = w.chars().take(WITNESS_LIMIT).collect::<String>() + " ...";
            }
            self.failures.push(Failure { check: check.to_string(), at, witness: w });
        }
    }

    pub fn note(&mut self, s: impl Into<String>) {
        self.notes.push(s.into());
    }

    pub fn merge(&mut self, other: Report) {
        self.checks += other.checks;
        self.failures.extend(other.failures);
        self.notes.extend(other.notes);
    }

    /// Failures of the named check, in the order found.
    pub fn failures_of<'a>(&'a self, check: &'a str) -> impl Iterator<Item = &'a Failure> + 'a {
        self.failures.iter().filter(move |f| f.check == check)
    }

    /// The smallest failing bidegree of a check, by `(t, w)`.
    pub fn first_failure(&self, check: &str) -> Option<Bidegree> {
        self.failures_of(check).filter_map(|f| f.at).min()
    }

    pub fn summary(&self) -> String {
        format!(
            "{} ({} checks, {} failures)",
            if self.passed() { "PASS" } else { "FAIL" },
            self.checks,
            self.failures.len()
        )
    }
}

impl fmt::Display for Report {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        writeln!(f, "{}", self.name)?;
        for n in &self.notes {
            writeln!(f, "  note: {n}")?;
        }
        for x in &self.failures {
            match x.at {
                Some(d) => writeln!(f, "  {} at {}: {}", x.check, d, x.witness)?,
                None => writeln!(f, "  {}: {}", x.check, x.witness)?,
            }
        }
        write!(f, "{}", self.summary())
    }
}
